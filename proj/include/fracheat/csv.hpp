#pragma once

// Profile tables: first column x, then one column per time labelled t=<value>.
// A column whose window is narrower than the x column leaves its cells empty.
// Numbers carry 17 significant digits so a read returns the written doubles.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracheat::csv {

inline std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline std::string time_label(double t) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, t);
  return "t=" + std::string(buf, r.ptr);
}

struct Column {
  std::string label;
  std::size_t offset = 0;  ///< row of values[0]
  std::vector<double> values;
};

struct Table {
  std::vector<double> x;
  std::vector<Column> columns;

  std::optional<double> at(std::size_t column, std::size_t row) const {
    const Column& c = columns.at(column);
    if (row < c.offset || row >= c.offset + c.values.size()) return std::nullopt;
    return c.values[row - c.offset];
  }

  const Column* find(const std::string& label) const {
    for (const auto& c : columns)
      if (c.label == label) return &c;
    return nullptr;
  }
};

inline void write(std::ostream& out, const Table& t) {
  for (const auto& c : t.columns)
    if (c.offset + c.values.size() > t.x.size()) throw std::invalid_argument("column " + c.label + " overruns the x grid");
  out << "x";
  for (const auto& c : t.columns) out << ',' << c.label;
  out << '\n';
  for (std::size_t r = 0; r < t.x.size(); ++r) {
    out << number(t.x[r]);
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out << ',';
      if (const auto v = t.at(c, r)) out << number(*v);
    }
    out << '\n';
  }
}

inline void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out, t);
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace detail

/// Reads a table; every column's non-empty cells must form one contiguous run.
inline Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  const auto header = detail::split(line);
  if (header.empty() || header[0] != "x") throw std::runtime_error("CSV must start with an x column");
  for (std::size_t c = 1; c < header.size(); ++c) t.columns.push_back({header[c], 0, {}});
  std::vector<int> state(t.columns.size(), 0);  // 0 before run, 1 inside, 2 after
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != header.size()) throw std::runtime_error("line " + std::to_string(lineno) + ": wrong cell count");
    const std::size_t row = t.x.size();
    t.x.push_back(detail::parse(cells[0], lineno));
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const std::string& s = cells[c + 1];
      if (s.empty()) {
        if (state[c] == 1) state[c] = 2;
        continue;
      }
      if (state[c] == 2) throw std::runtime_error("column " + t.columns[c].label + " is not contiguous");
      if (state[c] == 0) {
        state[c] = 1;
        t.columns[c].offset = row;
      }
      t.columns[c].values.push_back(detail::parse(s, lineno));
    }
  }
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read(in);
}

}  // namespace fracheat::csv
