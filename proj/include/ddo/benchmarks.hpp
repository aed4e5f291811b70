#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ddo/dynamics.hpp"

namespace ddo {

/// Euler-discretized Van der Pol oscillator
///
///   x1+ = x1 + h x2 + w1
///   x2+ = x2 + h (mu (1 - x1^2) x2 - x1) + w2
///
/// with one measured channel y = x1 + v.  Defaults: X0 = [-1,1]^2,
/// W = 1e-3 [-1,1]^2, V = [-0.2, 0.2].
struct VdpParams {
  double mu = 5.0;
  double h = 0.025;
};

SystemModel vdp_model(const VdpParams& params);
SystemModel vdp_model(const VdpParams& params, Box x0, Box w, Box v);

/// Euler-discretized cascade of n draining tanks.  Tank 1 only drains;
/// tank j >= 2 receives the outflow of tank j-1:
///
///   x1+ = x1 + h (-kappa_1 sqrt(2g) sqrt(x1) + (B u)_1) + w1
///   xj+ = xj + h ( kappa_j sqrt(2g) (sqrt(x_{j-1}) - sqrt(xj)) + (B u)_j) + wj
///
/// Inflow channels feed the tanks listed in `inflow` (1-based); measured
/// tanks are listed in `measured` (1-based), giving a selection matrix C.
/// Empty lists pick the built-in layouts: for n = 30 the reference layout
/// below, otherwise odd tanks receive inflow and tanks with index not
/// divisible by 3 are measured.
///
/// The state domain is [0, inf)^n.  The square-root Jacobian term
/// 1/(2 sqrt(x)) blows up at 0; levels below `level_floor` fail with
/// DomainViolation instead of producing unbounded enclosures.
///
/// Defaults: X0 = [16, 24]^n, W = 1e-3 [-1,1]^n, V = [-0.2, 0.2]^p,
/// u = u_level on every inflow channel.
struct TankParams {
  std::size_t n = 30;
  double h = 0.5;
  double g = 9.81;
  std::vector<double> kappa;  // per-tank; empty = 0.015 everywhere
  double u_level = 0.1;
  double level_floor = 1e-6;
  std::vector<std::size_t> inflow;    // 1-based tank indices
  std::vector<std::size_t> measured;  // 1-based tank indices
};

std::vector<std::size_t> default_inflow_tanks(std::size_t n);
std::vector<std::size_t> default_measured_tanks(std::size_t n);

SystemModel tank_model(const TankParams& params);

/// Returns a copy of the model with W and V scaled about their centers by
/// the given nonnegative factors.
SystemModel scale_uncertainty(const SystemModel& model, double w_factor, double v_factor);

/// A simulated ground-truth trajectory with the noisy measurements the
/// observer consumes.  states has N+1 rows, measurements has N+1 rows,
/// inputs has N rows.
struct TruthRun {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> measurements;
  std::uint64_t seed = 0;
};

/// Simulates the model for `horizon` steps from `x0` (must lie in X0),
/// drawing disturbances uniformly from W and measurement noise uniformly
/// from V with the given seed.  Empty `x0` uses the center of X0; empty
/// `inputs` applies the nominal input every step.  Fails with
/// DomainViolation when the trajectory leaves the state domain.
TruthRun simulate_truth(const SystemModel& model, std::span<const double> x0,
                        const std::vector<std::vector<double>>& inputs, int horizon,
                        std::uint64_t seed);

}  // namespace ddo
