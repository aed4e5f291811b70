#pragma once

#include <cstddef>
#include <vector>

#include "ddo/dynamics.hpp"
#include "ddo/interval.hpp"

namespace ddo {

/// Measurement strips  S_i = { x : y_i - C_i x in V_i }  for one sample
/// vector y.  The consistent set for the sample is the intersection of all
/// p strips.
struct StripSet {
  Matrix C;               // p x n
  std::vector<double> y;  // p measured values
  Box V;                  // p noise bounds
};

/// Admissible interval for variable `var` under strip `strip`, given the
/// current bounds on the other variables:
///
///   I = [min(bl/Cij, bh/Cij), max(bl/Cij, bh/Cij)]
///   bl = y_i - hi(V_i) - hi(s),  bh = y_i - lo(V_i) - lo(s),
///   s  = sum_{l != var} C_il X_l
///
/// Requires C(strip, var) != 0 and a non-empty box.
Interval admissible_interval(const StripSet& strips, std::size_t strip, std::size_t var,
                             const Box& x);

/// Gauss-Seidel contraction of one box: repeatedly intersects each
/// variable with its admissible interval, sweeping strips in order and
/// variables within each strip, for at most `max_sweeps` sweeps or until a
/// sweep changes nothing.  Returns false as soon as a component becomes
/// empty; the box contents are unspecified then.
bool gs_contract_box(Box& box, const StripSet& strips, int max_sweeps);

/// Contracts every box in the collection and discards the ones that turn
/// out inconsistent with the strips.  Survivors keep their order.  May
/// return an empty collection.
BoxCollection gs_contract(const BoxCollection& boxes, const StripSet& strips, int max_sweeps);

/// Initial-time correction: contracts the initial bounds with the first
/// measurement's strips.  Result is a collection of at most one box.
BoxCollection contract_initial(const Box& x0, const StripSet& strips, int max_sweeps);

}  // namespace ddo
