#include "ddo/benchmarks.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ddo/error.hpp"

namespace ddo {

namespace {

Box symmetric_box(std::size_t n, double r) {
  Box b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = Interval{-r, r};
  return b;
}

void check_tank_indices(const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
  if (idx.empty()) fail(ErrorCode::InvalidArgument, std::string("tank: no ") + what + " tanks");
  std::size_t prev = 0;
  for (std::size_t j : idx) {
    if (j < 1 || j > n) {
      fail(ErrorCode::InvalidArgument, std::string("tank: ") + what + " index out of range");
    }
    if (j <= prev) {
      fail(ErrorCode::InvalidArgument,
           std::string("tank: ") + what + " indices must be strictly increasing");
    }
    prev = j;
  }
}

}  // namespace

SystemModel vdp_model(const VdpParams& params) {
  Box x0(2);
  x0[0] = Interval{-1.0, 1.0};
  x0[1] = Interval{-1.0, 1.0};
  return vdp_model(params, std::move(x0), symmetric_box(2, 1e-3), symmetric_box(1, 0.2));
}

SystemModel vdp_model(const VdpParams& params, Box x0, Box w, Box v) {
  if (!(params.mu > 0.0) || !(params.h > 0.0)) {
    fail(ErrorCode::InvalidArgument, "vdp: mu and h must be positive");
  }
  if (x0.dim() != 2 || w.dim() != 2 || v.dim() != 1) {
    fail(ErrorCode::DimensionMismatch, "vdp: expected n = 2 and p = 1 bounds");
  }
  if (x0.is_empty() || w.is_empty() || v.is_empty()) {
    fail(ErrorCode::EmptySet, "vdp: empty bounds");
  }

  const double mu = params.mu;
  const double h = params.h;

  SystemModel mdl;
  mdl.n = 2;
  mdl.m = 0;
  mdl.p = 1;
  mdl.f = [mu, h](std::span<const double> x, std::span<const double>, std::span<const double> w) {
    return std::vector<double>{
        x[0] + h * x[1] + w[0],
        x[1] + h * (mu * (1.0 - x[0] * x[0]) * x[1] - x[0]) + w[1],
    };
  };
  mdl.f_box = [mu, h](const Box& x, std::span<const double>, const Box& w) {
    Box out(2);
    out[0] = x[0] + h * x[1] + w[0];
    out[1] = x[1] + h * (mu * (1.0 - sqr(x[0])) * x[1] - x[0]) + w[1];
    return out;
  };
  mdl.jacobian = [mu, h](const Box& x, std::span<const double>, const Box&) {
    IntervalMatrix jac(2, 4);
    jac.at(0, 0) = Interval(1.0);
    jac.at(0, 1) = Interval(h);
    jac.at(1, 0) = h * ((-2.0 * mu) * (x[0] * x[1]) - 1.0);
    jac.at(1, 1) = 1.0 + (h * mu) * (1.0 - sqr(x[0]));
    jac.at(0, 2) = Interval(1.0);
    jac.at(1, 3) = Interval(1.0);
    return jac;
  };
  mdl.C = Matrix(1, 2);
  mdl.C.at(0, 0) = 1.0;
  mdl.W = std::move(w);
  mdl.V = std::move(v);
  mdl.X0 = std::move(x0);
  return mdl;
}

std::vector<std::size_t> default_inflow_tanks(std::size_t n) {
  if (n == 30) {
    return {1, 4, 5, 7, 9, 10, 13, 15, 16, 19, 21, 22, 25, 27, 28};
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= n; j += 2) out.push_back(j);
  return out;
}

std::vector<std::size_t> default_measured_tanks(std::size_t n) {
  if (n == 30) {
    return {2,  4,  5,  7,  8,  10, 11, 13, 14, 16, 17,
            19, 20, 21, 22, 23, 25, 26, 27, 28, 29};
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= n; ++j) {
    if (j % 3 != 0) out.push_back(j);
  }
  return out;
}

SystemModel tank_model(const TankParams& params) {
  const std::size_t n = params.n;
  if (n < 2) fail(ErrorCode::InvalidArgument, "tank: need at least two tanks");
  if (!(params.h > 0.0) || !(params.g > 0.0)) {
    fail(ErrorCode::InvalidArgument, "tank: h and g must be positive");
  }
  if (!(params.level_floor > 0.0)) {
    fail(ErrorCode::InvalidArgument, "tank: level_floor must be positive");
  }
  if (!(params.u_level >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "tank: u_level must be nonnegative");
  }
  std::vector<double> kappa = params.kappa;
  if (kappa.empty()) kappa.assign(n, 0.015);
  if (kappa.size() != n) fail(ErrorCode::DimensionMismatch, "tank: kappa size != n");
  for (double k : kappa) {
    if (!(k > 0.0)) fail(ErrorCode::InvalidArgument, "tank: kappa must be positive");
  }

  const std::vector<std::size_t> inflow =
      params.inflow.empty() ? default_inflow_tanks(n) : params.inflow;
  const std::vector<std::size_t> measured =
      params.measured.empty() ? default_measured_tanks(n) : params.measured;
  check_tank_indices(inflow, n, "inflow");
  check_tank_indices(measured, n, "measured");

  const std::size_t m = inflow.size();
  const std::size_t p = measured.size();
  const double h = params.h;
  const double floor_lvl = params.level_floor;
  const double sqrt2g = std::sqrt(2.0 * params.g);

  std::vector<double> coef(n);
  std::vector<double> hcoef(n);
  for (std::size_t j = 0; j < n; ++j) {
    coef[j] = kappa[j] * sqrt2g;
    hcoef[j] = h * coef[j];
  }
  std::vector<int> chan(n, -1);
  for (std::size_t i = 0; i < m; ++i) chan[inflow[i] - 1] = static_cast<int>(i);

  SystemModel mdl;
  mdl.n = n;
  mdl.m = m;
  mdl.p = p;
  mdl.f = [n, h, coef, chan](std::span<const double> x, std::span<const double> u,
                             std::span<const double> w) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double bu = chan[j] >= 0 ? u[static_cast<std::size_t>(chan[j])] : 0.0;
      double flow;
      if (j == 0) {
        flow = -(coef[0] * std::sqrt(x[0])) + bu;
      } else {
        flow = coef[j] * (std::sqrt(x[j - 1]) - std::sqrt(x[j])) + bu;
      }
      out[j] = x[j] + h * flow + w[j];
    }
    return out;
  };
  mdl.f_box = [n, h, coef, chan](const Box& x, std::span<const double> u, const Box& w) {
    Box out(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double bu = chan[j] >= 0 ? u[static_cast<std::size_t>(chan[j])] : 0.0;
      Interval flow;
      if (j == 0) {
        flow = -(coef[0] * sqrt(x[0])) + bu;
      } else {
        flow = coef[j] * (sqrt(x[j - 1]) - sqrt(x[j])) + bu;
      }
      out[j] = x[j] + h * flow + w[j];
    }
    return out;
  };
  mdl.jacobian = [n, hcoef, floor_lvl](const Box& x, std::span<const double>, const Box&) {
    IntervalMatrix jac(n, 2 * n);
    std::vector<Interval> dsq(n);
    for (std::size_t j = 0; j < n; ++j) {
      // d sqrt(x)/dx = 1/(2 sqrt(x)) is unbounded at 0; refuse levels that
      // close to the singularity instead of emitting huge enclosures.
      if (x[j].lo < floor_lvl) {
        fail(ErrorCode::DomainViolation, "tank: level enclosure below the jacobian floor");
      }
      dsq[j] = 1.0 / (2.0 * sqrt(x[j]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0) {
        jac.at(0, 0) = 1.0 - hcoef[0] * dsq[0];
      } else {
        jac.at(j, j - 1) = hcoef[j] * dsq[j - 1];
        jac.at(j, j) = 1.0 - hcoef[j] * dsq[j];
      }
      jac.at(j, n + j) = Interval(1.0);
    }
    return jac;
  };
  mdl.C = Matrix(p, n);
  for (std::size_t i = 0; i < p; ++i) mdl.C.at(i, measured[i] - 1) = 1.0;
  mdl.W = symmetric_box(n, 1e-3);
  mdl.V = symmetric_box(p, 0.2);
  Box x0(n);
  for (std::size_t j = 0; j < n; ++j) x0[j] = Interval{16.0, 24.0};
  mdl.X0 = std::move(x0);
  Box dom(n);
  for (std::size_t j = 0; j < n; ++j) {
    dom[j] = Interval{0.0, std::numeric_limits<double>::infinity()};
  }
  mdl.state_domain = std::move(dom);
  mdl.u_nominal.assign(m, params.u_level);
  return mdl;
}

SystemModel scale_uncertainty(const SystemModel& model, double w_factor, double v_factor) {
  if (!(w_factor >= 0.0) || !(v_factor >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "scale_uncertainty: factors must be nonnegative");
  }
  SystemModel out = model;
  const auto scale_box = [](Box& b, double f) {
    for (Interval& c : b.comps) {
      const double mid = midpoint(c);
      const double r = radius(c);
      c = Interval{mid - f * r, mid + f * r};
    }
  };
  scale_box(out.W, w_factor);
  scale_box(out.V, v_factor);
  return out;
}

TruthRun simulate_truth(const SystemModel& model, std::span<const double> x0,
                        const std::vector<std::vector<double>>& inputs, int horizon,
                        std::uint64_t seed) {
  if (horizon < 0) fail(ErrorCode::InvalidArgument, "simulate_truth: negative horizon");
  if (!model.f) fail(ErrorCode::InvalidArgument, "simulate_truth: model without dynamics");
  const auto steps = static_cast<std::size_t>(horizon);

  std::vector<double> state;
  if (x0.empty()) {
    state = midpoint(model.X0);
  } else {
    if (x0.size() != model.n) {
      fail(ErrorCode::DimensionMismatch, "simulate_truth: x0 dimension != n");
    }
    state.assign(x0.begin(), x0.end());
    if (!contains(model.X0, std::span<const double>(state))) {
      fail(ErrorCode::InitialStateOutsideX0, "simulate_truth: x0 outside the initial bounds");
    }
  }
  if (!inputs.empty()) {
    if (inputs.size() != steps) {
      fail(ErrorCode::DimensionMismatch, "simulate_truth: input count != horizon");
    }
    for (const auto& u : inputs) {
      if (u.size() != model.m) {
        fail(ErrorCode::DimensionMismatch, "simulate_truth: input dimension != m");
      }
    }
  }

  std::mt19937_64 rng(seed);
  const auto draw_in = [&rng](const Box& b) {
    std::vector<double> v(b.dim());
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const Interval& c = b[j];
      v[j] = c.lo == c.hi ? c.lo : std::uniform_real_distribution<double>(c.lo, c.hi)(rng);
    }
    return v;
  };
  const auto measure = [&](const std::vector<double>& x) {
    const std::vector<double> noise = draw_in(model.V);
    std::vector<double> y(model.p);
    for (std::size_t i = 0; i < model.p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < model.n; ++j) acc += model.C.at(i, j) * x[j];
      y[i] = acc + noise[i];
    }
    return y;
  };

  TruthRun out;
  out.seed = seed;
  out.states.push_back(state);
  out.measurements.push_back(measure(state));
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<double>& u = inputs.empty() ? model.u_nominal : inputs[k];
    const std::vector<double> w = draw_in(model.W);
    std::vector<double> next = model.f(state, u, w);
    if (model.state_domain &&
        !contains(*model.state_domain, std::span<const double>(next))) {
      fail(ErrorCode::DomainViolation,
           "simulate_truth: trajectory left the domain at step " + std::to_string(k + 1));
    }
    out.inputs.push_back(u);
    state = std::move(next);
    out.states.push_back(state);
    out.measurements.push_back(measure(state));
  }
  return out;
}

}  // namespace ddo
