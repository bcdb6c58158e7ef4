#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fracheat/fdsolver.hpp"
#include "fracheat/metrics.hpp"

using namespace fracheat;

namespace {

ConstitutiveModel mt() { return ConstitutiveModel::multi_term({0.0, 0.25, 0.5, 0.75}, {0.4, 0.6, 0.8}); }
ConstitutiveModel pt() { return ConstitutiveModel::power_type(); }

const std::vector<SchemeKind> all_schemes{AdamsBashforth3{}, Euler{}, Centered{}, CenteredRAW{}};

// Multi-term weights from Gamma functions, no recurrence.
double direct_weight(double dt, int k) {
  const double alphas[] = {0.0, 0.25, 0.5, 0.75};
  const double taus[] = {1.0, 0.4, 0.6, 0.8};
  double w = 0.0;
  for (int v = 0; v < 4; ++v) {
    const double g = alphas[v];
    double om = 1.0;
    if (k > 0) om = g == 0.0 ? 0.0 : -std::exp(std::lgamma(k - g) - std::lgamma(-g) - std::lgamma(k + 1.0));
    w += taus[v] * std::pow(dt, -g) * om;
  }
  return w;
}

GridSpec small_grid(std::size_t n_steps, double half_width = 0.5) {
  GridSpec g;
  g.x_min = -half_width;
  g.x_max = half_width;
  g.dx = 1e-3;
  g.dt = 1e-4;
  g.n_steps = n_steps;
  g.record_times = {};
  return g;
}

}  // namespace

TEST(Grid, Validation) {
  GridSpec g = small_grid(100);
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.last_index(), 1000u);
  g.n_steps = 250;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_grid(100);
  g.record_times = {0.02};
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g.record_times = {0.00505};
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = small_grid(10);
  g.dx = 0.0003;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Grid, RecordTimesSnapToSteps) {
  GridSpec g;
  EXPECT_EQ(g.step_of(0.065), 650u);
  EXPECT_EQ(g.step_of(0.035), 350u);
  EXPECT_EQ(g.step_of(0.0), 0u);
  EXPECT_THROW(g.step_of(0.06505), std::invalid_argument);
}

TEST(Grid, MirroredNodes) {
  GridSpec g;
  const std::size_t J = g.last_index();
  for (std::size_t j = 0; j <= J; ++j) EXPECT_EQ(g.node(j), -g.node(J - j));
  EXPECT_EQ(g.node(J / 2), 0.0);
}

TEST(ValidRange, Rule) {
  const auto a = valid_range(1, 4000);
  EXPECT_EQ(a.flux, (IndexWindow{1, 3999}));
  EXPECT_EQ(a.temperature, (IndexWindow{2, 3998}));
  EXPECT_EQ(valid_range(650, 4000).temperature, (IndexWindow{1300, 2700}));
  EXPECT_EQ(valid_range(650, 4000).flux, (IndexWindow{1299, 2701}));
  EXPECT_EQ(valid_range(0, 4000).temperature, (IndexWindow{0, 4000}));
  EXPECT_THROW(valid_range(1001, 4000), std::out_of_range);
}

TEST(Init, InitialState) {
  const GridSpec g = small_grid(10);
  const auto st = init(g, Gaussian{0.001, 5e-4});
  const std::size_t J = g.last_index();
  for (std::size_t j = 0; j <= J; ++j) {
    EXPECT_EQ(st.T[j], st.T[J - j]);
    EXPECT_EQ(st.flux(0)[j], 0.0);
  }
  EXPECT_EQ(st.n, 0u);
  EXPECT_THROW(init(g, Dirac{1.0}), std::invalid_argument);
  EXPECT_THROW(init(g, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(Step, FirstStepKeepsTemperature) {
  const GridSpec g = small_grid(10);
  for (const auto& s : all_schemes) {
    auto st = init(g, Gaussian{0.001, 5e-4});
    const auto T0 = st.T;
    WeightTable w(mt(), g.dt, 0);
    step(st, s, w);
    EXPECT_EQ(st.T, T0) << scheme_name(s);
    EXPECT_EQ(st.n, 1u);
    EXPECT_EQ(st.window.flux, (IndexWindow{1, g.last_index() - 1}));
  }
}

TEST(Step, ZeroDataStaysZero) {
  const GridSpec g = small_grid(60);
  for (const auto& s : all_schemes) {
    auto st = init(g, std::vector<double>(g.last_index() + 1, 0.0));
    WeightTable w(pt(), g.dt, 0, 0.01);
    for (int k = 0; k < 60; ++k) step(st, s, w);
    for (std::size_t j = st.window.temperature.lo; j <= st.window.temperature.hi; ++j) EXPECT_EQ(st.T[j], 0.0);
    for (std::size_t j = st.window.flux.lo; j <= st.window.flux.hi; ++j) EXPECT_EQ(st.flux(60)[j], 0.0);
  }
}

TEST(Step, HandTraceOnNinePoints) {
  // Two full steps need J >= 8 under the shrinking-window rule.
  GridSpec g;
  g.x_min = 0.0;
  g.x_max = 0.8;
  g.dx = 0.1;
  g.dt = 0.01;
  g.n_steps = 1;
  g.record_times = {};
  const std::vector<double> T0{0.0, 0.1, 0.4, 0.9, 1.0, 0.7, 0.3, 0.2, 0.05};
  const double W0 = direct_weight(g.dt, 0);
  const double W1 = direct_weight(g.dt, 1);
  const double W2 = direct_weight(g.dt, 2);

  for (bool ab3 : {true, false}) {
    auto st = init(g, T0);
    WeightTable w(mt(), g.dt, 0);
    const SchemeKind s = ab3 ? SchemeKind{AdamsBashforth3{}} : SchemeKind{Euler{}};
    step(st, s, w);
    step(st, s, w);

    std::vector<double> q1(9, 0.0);
    for (int j = 1; j <= 7; ++j) q1[j] = -((T0[j + 1] - T0[j - 1]) / (2 * g.dx)) / W0;
    std::vector<double> T2(9, 0.0);
    const double factor = ab3 ? 23.0 / 12.0 : 1.0;
    for (int j = 2; j <= 6; ++j) T2[j] = T0[j] - g.dt / (2 * g.dx) * factor * (q1[j + 1] - q1[j - 1]);
    std::vector<double> q2(9, 0.0);
    for (int j = 3; j <= 5; ++j) q2[j] = -((T2[j + 1] - T2[j - 1]) / (2 * g.dx) + W1 * q1[j] + W2 * 0.0) / W0;

    for (int j = 1; j <= 7; ++j) EXPECT_NEAR(st.flux(1)[j], q1[j], 1e-13 * std::abs(q1[j]) + 1e-16);
    for (int j = 2; j <= 6; ++j) EXPECT_NEAR(st.T[j], T2[j], 1e-13);
    for (int j = 3; j <= 5; ++j) EXPECT_NEAR(st.flux(2)[j], q2[j], 1e-12 * std::abs(q2[j]) + 1e-15);
    EXPECT_TRUE(std::isnan(st.T[1]));
    EXPECT_TRUE(std::isnan(st.flux(2)[2]));
  }
}

TEST(Step, AdamsBashforthWithSteadyHistoryIsEuler) {
  const std::size_t J = 16;
  SolverState st;
  st.n = 3;
  st.J = J;
  st.dx = 1.0 / 32;
  st.dt = 1.0 / 1024;
  st.T.resize(J + 1);
  st.q.assign(4 * (J + 1), 0.0);
  for (std::size_t j = 0; j <= J; ++j) {
    st.T[j] = static_cast<double>((j * 7) % 5) / 8.0;
    const double level = static_cast<double>((j * 3) % 7) / 16.0;
    for (std::size_t m = 1; m <= 3; ++m) st.flux(m)[j] = level;
  }
  st.T_prev = st.T;
  st.window = valid_range(3, J);
  auto a = st;
  auto b = st;
  WeightTable wa(mt(), st.dt, 4);
  WeightTable wb(mt(), st.dt, 4);
  step(a, AdamsBashforth3{}, wa);
  step(b, Euler{}, wb);
  for (std::size_t j = a.window.temperature.lo; j <= a.window.temperature.hi; ++j) EXPECT_EQ(a.T[j], b.T[j]);
}

TEST(FluxUpdate, MatchesDirectConvolution) {
  const double dt = 1e-3;
  const std::size_t N = 400;
  WeightTable w(mt(), dt, N);
  std::vector<double> history{0.0};
  std::vector<double> oracle{0.0};
  std::vector<double> wk(N + 1);
  for (std::size_t k = 0; k <= N; ++k) wk[k] = direct_weight(dt, static_cast<int>(k));
  for (std::size_t n = 0; n < N; ++n) {
    const std::vector<double> g{std::sin(0.05 * static_cast<double>(n + 1)) + 0.3};
    std::vector<double> out(1);
    flux_update(w, history, 1, n, g, IndexWindow{0, 0}, out);
    history.push_back(out[0]);
    double mem = 0.0;
    for (std::size_t k = 1; k <= n + 1; ++k) mem += wk[k] * oracle[n + 1 - k];
    oracle.push_back(-(g[0] + mem) / wk[0]);
  }
  for (std::size_t n = 0; n <= N; ++n) EXPECT_NEAR(history[n], oracle[n], 1e-12 * (std::abs(oracle[n]) + 1e-3)) << n;
}

TEST(Run, ParityPreserved) {
  GridSpec g = small_grid(200);
  g.record_times = {0.005, 0.02};
  for (const auto& m : {mt(), pt()}) {
    for (const auto& s : all_schemes) {
      const auto r = run(m, g, s, Gaussian{0.001, 5e-4}, 0.005);
      for (const auto& snap : r.snapshots) {
        const double tmax = std::abs(*std::max_element(snap.T.begin(), snap.T.end(),
                                                       [](double a, double b) { return std::abs(a) < std::abs(b); }));
        const double qmax = std::abs(*std::max_element(snap.q.begin(), snap.q.end(),
                                                       [](double a, double b) { return std::abs(a) < std::abs(b); }));
        for (std::size_t k = 0; k < snap.T.size(); ++k)
          EXPECT_LE(std::abs(snap.T[k] - snap.T[snap.T.size() - 1 - k]), 1e-12 * tmax);
        for (std::size_t k = 0; k < snap.q.size(); ++k)
          EXPECT_LE(std::abs(snap.q[k] + snap.q[snap.q.size() - 1 - k]), 1e-12 * qmax);
      }
    }
  }
}

TEST(Run, MassConservation) {
  GridSpec g;
  g.n_steps = 500;
  g.record_times = {0.0, 0.01, 0.02, 0.035, 0.05};
  for (const SchemeKind s : {SchemeKind{AdamsBashforth3{}}, SchemeKind{Euler{}}}) {
    const auto r = run(mt(), g, s, Gaussian{0.001, 5e-4});
    const double m0 = std::accumulate(r.snapshots[0].T.begin(), r.snapshots[0].T.end(), 0.0) * g.dx;
    for (const auto& snap : r.snapshots) {
      const double mass = std::accumulate(snap.T.begin(), snap.T.end(), 0.0) * g.dx;
      EXPECT_LE(std::abs(mass - m0), 1e-10 * m0) << scheme_name(s) << " t=" << snap.t;
      const double peak = *std::max_element(snap.T.begin(), snap.T.end());
      EXPECT_LT(std::abs(snap.T.front()), 1e-14 * peak);
    }
  }
}

TEST(Run, RecordAtZeroEchoesInitialCondition) {
  GridSpec g = small_grid(0);
  g.record_times = {0.0};
  const auto r = run(mt(), g, AdamsBashforth3{}, Gaussian{0.001, 5e-4});
  ASSERT_EQ(r.snapshots.size(), 1u);
  const Gaussian ic{0.001, 5e-4};
  for (std::size_t j = 0; j <= g.last_index(); ++j) EXPECT_EQ(r.snapshots[0].T[j], ic(g.node(j)));
  for (double q : r.snapshots[0].q) EXPECT_EQ(q, 0.0);
}

TEST(Run, SnapshotWindowsAndOrder) {
  GridSpec g = small_grid(100);
  g.record_times = {0.01, 0.002};
  const auto r = run(pt(), g, Euler{}, Gaussian{0.001, 5e-4}, 0.005);
  EXPECT_EQ(r.snapshots[0].step, 100u);
  EXPECT_EQ(r.snapshots[1].step, 20u);
  EXPECT_EQ(r.snapshots[0].T.size(), r.snapshots[0].window.temperature.size());
  EXPECT_EQ(r.snapshots[1].q.size(), valid_range(20, g.last_index()).flux.size());
  EXPECT_EQ(r.scheme, "euler");
  EXPECT_EQ(r.model, "power-type");
  for (double v : r.snapshots[0].T) EXPECT_TRUE(std::isfinite(v));
}

TEST(Run, InstabilityPolicy) {
  GridSpec g = small_grid(100);
  g.record_times = {0.01};
  StepOptions lenient;
  lenient.blowup_threshold = 1e-6;  // any profile counts as "blown up"
  const auto r = run(mt(), g, Centered{}, Gaussian{0.001, 5e-4}, 0.0, lenient);
  ASSERT_TRUE(r.first_unstable.has_value());
  EXPECT_EQ(*r.first_unstable, 1u);
  StepOptions strict = lenient;
  strict.strict = true;
  try {
    run(mt(), g, Centered{}, Gaussian{0.001, 5e-4}, 0.0, strict);
    FAIL() << "expected NumericalInstability";
  } catch (const NumericalInstability& e) {
    EXPECT_EQ(e.step(), 1u);
  }
  const auto fine = run(mt(), g, AdamsBashforth3{}, Gaussian{0.001, 5e-4});
  EXPECT_FALSE(fine.first_unstable.has_value());
}

TEST(Run, RawParametersValidated) {
  GridSpec g = small_grid(10);
  EXPECT_THROW(run(mt(), g, CenteredRAW{1.2, 0.5}, Gaussian{}), std::invalid_argument);
  EXPECT_THROW(run(mt(), g, CenteredRAW{0.2, 0.0}, Gaussian{}), std::invalid_argument);
  EXPECT_THROW(run(pt(), g, Euler{}, Gaussian{}), std::invalid_argument);  // power-type without dgamma
}

TEST(Run, RefinementReducesError) {
  auto error_at = [](double dx, double dt) {
    GridSpec g;
    g.x_min = -1.0;
    g.x_max = 1.0;
    g.dx = dx;
    g.dt = dt;
    g.n_steps = static_cast<std::size_t>(std::llround(0.02 / dt));
    g.record_times = {0.02};
    const Gaussian ic{0.001, 5e-4};
    const auto r = run(mt(), g, AdamsBashforth3{}, ic);
    const auto w = r.snapshots[0].window.flux;
    std::vector<Snapshot> an{analytic_response(mt(), ic, g.nodes(w.lo, w.hi), 0.02)};
    return compare(r, an, Field::temperature).relative_l2[0];
  };
  const double coarse = error_at(1e-3, 1e-4);
  const double fine = error_at(5e-4, 5e-5);
  EXPECT_LT(fine, coarse);
}
