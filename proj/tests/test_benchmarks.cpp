#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ddo/benchmarks.hpp"
#include "doctest.h"

using namespace ddo;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double unif(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

Box degenerate(std::span<const double> v) {
  Box b(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) b[j] = Interval{v[j], v[j]};
  return b;
}

// Central finite difference of component i with respect to argument
// `which` (0 = state, 1 = disturbance) at index j.
double central_diff(const SystemModel& model, std::vector<double> x, std::vector<double> u,
                    std::vector<double> w, int which, std::size_t j, std::size_t i) {
  const double step = 1e-6;
  std::vector<double>& arg = which == 0 ? x : w;
  const double saved = arg[j];
  arg[j] = saved + step;
  const double hi = model.f(x, u, w)[i];
  arg[j] = saved - step;
  const double lo = model.f(x, u, w)[i];
  arg[j] = saved;
  return (hi - lo) / (2.0 * step);
}

}  // namespace

TEST_CASE("oscillator model shape and defaults") {
  const SystemModel m = vdp_model(VdpParams{});
  CHECK(m.n == 2);
  CHECK(m.m == 0);
  CHECK(m.p == 1);
  CHECK(m.C.at(0, 0) == 1.0);
  CHECK(m.C.at(0, 1) == 0.0);
  CHECK(m.X0[0] == Interval{-1.0, 1.0});
  CHECK(m.X0[1] == Interval{-1.0, 1.0});
  CHECK(m.W[0] == Interval{-1e-3, 1e-3});
  CHECK(m.V[0] == Interval{-0.2, 0.2});
  CHECK(!m.state_domain.has_value());
  CHECK(m.u_nominal.empty());

  CHECK_THROWS_AS((void)vdp_model(VdpParams{.mu = 0.0}), Error);
  CHECK_THROWS_AS((void)vdp_model(VdpParams{.h = -1.0}), Error);
  CHECK_THROWS_AS((void)vdp_model(VdpParams{}, Box(3), Box(2), Box(1)), Error);
}

TEST_CASE("oscillator step at fixed points") {
  const SystemModel m = vdp_model(VdpParams{});
  const std::vector<double> w0{0.0, 0.0};

  const std::vector<double> a = m.f(std::vector<double>{1.0, 0.0}, {}, w0);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == -0.025);

  const std::vector<double> b = m.f(std::vector<double>{0.5, -0.5}, {}, w0);
  CHECK(b[0] == 0.4875);
  CHECK(b[1] == -0.559375);
}

TEST_CASE("oscillator jacobian at a fixed box") {
  const SystemModel m = vdp_model(VdpParams{});
  Box x(2);
  x[0] = Interval{0.9, 1.1};
  x[1] = Interval{-0.1, 0.1};
  const IntervalMatrix jac = m.jacobian(x, {}, m.W);

  CHECK(jac.at(0, 0) == Interval{1.0, 1.0});
  CHECK(jac.at(0, 1) == Interval{0.025, 0.025});
  CHECK(jac.at(1, 0) == Interval{-0.052500000000000005, 0.0025000000000000022});
  CHECK(jac.at(1, 1) == Interval{0.97375, 1.02375});
  // Disturbance block is the identity.
  CHECK(jac.at(0, 2) == Interval{1.0, 1.0});
  CHECK(jac.at(0, 3) == Interval{0.0, 0.0});
  CHECK(jac.at(1, 2) == Interval{0.0, 0.0});
  CHECK(jac.at(1, 3) == Interval{1.0, 1.0});
}

TEST_CASE("tank model shape and reference layout") {
  const SystemModel m = tank_model(TankParams{});
  CHECK(m.n == 30);
  CHECK(m.m == 15);
  CHECK(m.p == 21);
  CHECK(default_inflow_tanks(30) ==
        std::vector<std::size_t>{1, 4, 5, 7, 9, 10, 13, 15, 16, 19, 21, 22, 25, 27, 28});
  CHECK(default_measured_tanks(30) ==
        std::vector<std::size_t>{2,  4,  5,  7,  8,  10, 11, 13, 14, 16, 17,
                                 19, 20, 21, 22, 23, 25, 26, 27, 28, 29});

  // C selects the measured tanks, one row per output.
  const std::vector<std::size_t> measured = default_measured_tanks(30);
  for (std::size_t i = 0; i < m.p; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      CHECK(m.C.at(i, j) == (j == measured[i] - 1 ? 1.0 : 0.0));
    }
  }
  for (std::size_t j = 0; j < 30; ++j) {
    CHECK(m.X0[j] == Interval{16.0, 24.0});
    CHECK(m.W[j] == Interval{-1e-3, 1e-3});
    CHECK((*m.state_domain)[j].lo == 0.0);
    CHECK(std::isinf((*m.state_domain)[j].hi));
  }
  CHECK(m.V[0] == Interval{-0.2, 0.2});
  CHECK(m.u_nominal == std::vector<double>(15, 0.1));

  // Small cascades fall back to the generic layouts.
  CHECK(default_inflow_tanks(5) == std::vector<std::size_t>{1, 3, 5});
  CHECK(default_measured_tanks(5) == std::vector<std::size_t>{1, 2, 4, 5});
}

TEST_CASE("tank parameter validation") {
  CHECK_THROWS_AS((void)tank_model(TankParams{.n = 1}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.h = 0.0}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.kappa = {0.015}}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.kappa = std::vector<double>(30, -1.0)}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.u_level = -0.1}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.level_floor = 0.0}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.inflow = {0}}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.inflow = {31}}), Error);
  CHECK_THROWS_AS((void)tank_model(TankParams{.measured = {2, 2}}), Error);
}

TEST_CASE("tank step at fixed points") {
  TankParams two;
  two.n = 2;
  const SystemModel m = tank_model(two);
  REQUIRE(m.m == 1);  // inflow {1}
  REQUIRE(m.p == 2);  // measured {1, 2}

  // Equal levels: tank 2 sees no net flow and no inflow channel.
  const std::vector<double> out =
      m.f(std::vector<double>{20.0, 20.0}, std::vector<double>{0.1}, std::vector<double>{0.0, 0.0});
  CHECK(out[0] == 19.901431833827026);
  CHECK(out[1] == 20.0);

  // Channel routing: n = 4 feeds channels 1 and 2 into tanks 1 and 3.
  TankParams four;
  four.n = 4;
  const SystemModel m4 = tank_model(four);
  REQUIRE(m4.m == 2);
  const std::vector<double> out4 = m4.f(std::vector<double>(4, 9.0), std::vector<double>{0.7, 0.3},
                                        std::vector<double>(4, 0.0));
  CHECK(out4[0] == 9.250337444343424);
  CHECK(out4[1] == 9.0);
  CHECK(out4[2] == 9.15);
  CHECK(out4[3] == 9.0);
}

TEST_CASE("box dynamics on degenerate boxes equal the point dynamics") {
  // The mean-value enclosure centers boxes and feeds the centers through
  // the box variant; without outward rounding both evaluations must agree
  // exactly, not just approximately.
  ScopedRounding mode(Rounding::Fast);
  Gen gen(20240813);

  const SystemModel vdp = vdp_model(VdpParams{});
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x{gen.unif(-3.0, 3.0), gen.unif(-3.0, 3.0)};
    const std::vector<double> w{gen.unif(-1e-3, 1e-3), gen.unif(-1e-3, 1e-3)};
    const std::vector<double> ref = vdp.f(x, {}, w);
    const Box out = vdp.f_box(degenerate(x), {}, degenerate(w));
    for (std::size_t j = 0; j < 2; ++j) {
      REQUIRE(out[j].lo == ref[j]);
      REQUIRE(out[j].hi == ref[j]);
    }
  }

  TankParams params;
  params.n = 7;
  const SystemModel tank = tank_model(params);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(7);
    std::vector<double> w(7);
    for (std::size_t j = 0; j < 7; ++j) {
      x[j] = gen.unif(0.5, 40.0);
      w[j] = gen.unif(-1e-3, 1e-3);
    }
    std::vector<double> u(tank.m);
    for (double& c : u) c = gen.unif(0.0, 0.3);
    const std::vector<double> ref = tank.f(x, u, w);
    const Box out = tank.f_box(degenerate(x), u, degenerate(w));
    for (std::size_t j = 0; j < 7; ++j) {
      REQUIRE(out[j].lo == ref[j]);
      REQUIRE(out[j].hi == ref[j]);
    }
  }
}

TEST_CASE("jacobians enclose finite-difference slopes") {
  ScopedRounding mode(Rounding::Rigorous);
  Gen gen(5511);
  const double slack = 1e-5;

  const SystemModel vdp = vdp_model(VdpParams{});
  for (int trial = 0; trial < 100; ++trial) {
    Box x(2);
    std::vector<double> pt(2);
    for (std::size_t j = 0; j < 2; ++j) {
      const double c = gen.unif(-2.0, 2.0);
      const double r = gen.unif(0.0, 0.3);
      x[j] = Interval{c - r, c + r};
      pt[j] = gen.unif(x[j].lo, x[j].hi);
    }
    const IntervalMatrix jac = vdp.jacobian(x, {}, vdp.W);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double dx = central_diff(vdp, pt, {}, {0.0, 0.0}, 0, j, i);
        REQUIRE(jac.at(i, j).lo - slack <= dx);
        REQUIRE(dx <= jac.at(i, j).hi + slack);
        const double dw = central_diff(vdp, pt, {}, {0.0, 0.0}, 1, j, i);
        REQUIRE(jac.at(i, 2 + j).lo - slack <= dw);
        REQUIRE(dw <= jac.at(i, 2 + j).hi + slack);
      }
    }
  }

  TankParams params;
  params.n = 4;
  const SystemModel tank = tank_model(params);
  const std::vector<double> u(tank.m, 0.1);
  for (int trial = 0; trial < 100; ++trial) {
    Box x(4);
    std::vector<double> pt(4);
    for (std::size_t j = 0; j < 4; ++j) {
      const double c = gen.unif(5.0, 40.0);
      const double r = gen.unif(0.0, 2.0);
      x[j] = Interval{c - r, c + r};
      pt[j] = gen.unif(x[j].lo, x[j].hi);
    }
    const IntervalMatrix jac = tank.jacobian(x, u, tank.W);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double dx = central_diff(tank, pt, u, {0.0, 0.0, 0.0, 0.0}, 0, j, i);
        REQUIRE(jac.at(i, j).lo - slack <= dx);
        REQUIRE(dx <= jac.at(i, j).hi + slack);
        const double dw = central_diff(tank, pt, u, {0.0, 0.0, 0.0, 0.0}, 1, j, i);
        REQUIRE(jac.at(i, 4 + j).lo - slack <= dw);
        REQUIRE(dw <= jac.at(i, 4 + j).hi + slack);
      }
    }
  }
}

TEST_CASE("tank jacobian refuses levels at the square-root singularity") {
  TankParams params;
  params.n = 2;
  const SystemModel m = tank_model(params);
  Box x(2);
  x[0] = Interval{1e-7, 1.0};
  x[1] = Interval{1.0, 2.0};
  try {
    (void)m.jacobian(x, std::vector<double>{0.1}, m.W);
    FAIL("jacobian accepted a level below the floor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainViolation);
  }
}

TEST_CASE("uncertainty scaling widens about the center") {
  const SystemModel base = vdp_model(VdpParams{});
  const SystemModel big = scale_uncertainty(base, 10.0, 0.5);
  CHECK(big.W[0] == Interval{-0.01, 0.01});
  CHECK(big.W[1] == Interval{-0.01, 0.01});
  CHECK(big.V[0] == Interval{-0.1, 0.1});
  CHECK(big.X0[0] == base.X0[0]);

  // Asymmetric bounds keep their center.
  Box w(2);
  w[0] = Interval{1.0, 3.0};
  w[1] = Interval{-1.0, 1.0};
  Box x0(2);
  x0[0] = Interval{-1.0, 1.0};
  x0[1] = Interval{-1.0, 1.0};
  Box v(1);
  v[0] = Interval{-0.2, 0.2};
  const SystemModel odd = vdp_model(VdpParams{}, x0, w, v);
  const SystemModel scaled = scale_uncertainty(odd, 2.0, 0.0);
  CHECK(scaled.W[0] == Interval{0.0, 4.0});
  CHECK(scaled.W[1] == Interval{-2.0, 2.0});
  CHECK(scaled.V[0] == Interval{0.0, 0.0});

  CHECK_THROWS_AS((void)scale_uncertainty(base, -1.0, 1.0), Error);
}

TEST_CASE("truth simulation is deterministic and stays in bounds") {
  const SystemModel m = vdp_model(VdpParams{});
  const TruthRun a = simulate_truth(m, {}, {}, 50, 42);
  const TruthRun b = simulate_truth(m, {}, {}, 50, 42);
  CHECK(a.states == b.states);
  CHECK(a.measurements == b.measurements);
  CHECK(a.inputs == b.inputs);
  CHECK(a.seed == 42);

  const TruthRun c = simulate_truth(m, {}, {}, 50, 43);
  CHECK(a.states != c.states);

  REQUIRE(a.states.size() == 51);
  REQUIRE(a.measurements.size() == 51);
  REQUIRE(a.inputs.size() == 50);
  CHECK(a.states[0] == std::vector<double>{0.0, 0.0});  // center of X0

  // Every transition differs from the noise-free image by at most the
  // disturbance bound; every measurement sits within V of Cx.
  for (std::size_t k = 0; k < 50; ++k) {
    const std::vector<double> f0 = m.f(a.states[k], {}, std::vector<double>{0.0, 0.0});
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(a.states[k + 1][j] - f0[j]) <= 1e-3 + 1e-12);
    }
  }
  for (std::size_t k = 0; k <= 50; ++k) {
    CHECK(std::abs(a.measurements[k][0] - a.states[k][0]) <= 0.2 + 1e-12);
  }
}

TEST_CASE("truth simulation input handling and errors") {
  const SystemModel m = vdp_model(VdpParams{});
  try {
    (void)simulate_truth(m, std::vector<double>{2.0, 0.0}, {}, 5, 1);
    FAIL("accepted an initial state outside the bounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InitialStateOutsideX0);
  }
  CHECK_THROWS_AS((void)simulate_truth(m, std::vector<double>{0.0}, {}, 5, 1), Error);
  CHECK_THROWS_AS((void)simulate_truth(m, {}, {{}, {}}, 5, 1), Error);
  CHECK_THROWS_AS((void)simulate_truth(m, {}, {}, -1, 1), Error);

  // Tank runs consume the nominal input when none is given and stay inside
  // the nonnegative domain.
  TankParams params;
  params.n = 3;
  const SystemModel tank = tank_model(params);
  const TruthRun t = simulate_truth(tank, {}, {}, 40, 9);
  for (const auto& u : t.inputs) CHECK(u == tank.u_nominal);
  for (const auto& x : t.states) {
    for (double lvl : x) CHECK(lvl >= 0.0);
  }

  // Explicit inputs are recorded as given.
  std::vector<std::vector<double>> inputs(4, std::vector<double>(tank.m, 0.25));
  const TruthRun t2 = simulate_truth(tank, {}, inputs, 4, 9);
  CHECK(t2.inputs == inputs);
}
