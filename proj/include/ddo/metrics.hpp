#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ddo/interval.hpp"

namespace ddo {

/// Unit directions for width measurements: componentwise standard normal
/// draws, normalized to unit length.
struct DirectionSet {
  std::vector<std::vector<double>> dirs;
  std::uint64_t seed = 0;
};

DirectionSet sample_directions(std::size_t dim, std::size_t count, std::uint64_t seed);

/// Tightest box containing every box of the collection.
Box hull_of_collection(const BoxCollection& boxes);

/// n-th root of the hull volume: vol(hull)^(1/n).  Zero-width hulls give 0.
double hull_volume_term(const BoxCollection& boxes);

/// Mean of hull_volume_term over the per-step collections.
double hull_volume_metric(std::span<const BoxCollection> steps);

/// Support function of the union:  max over boxes of d.c + sum_j |d_j| r_j
/// with c the box center and r the radii.
double support(const BoxCollection& boxes, std::span<const double> direction);

/// Mean two-sided support  rho(X, d) + rho(X, -d)  over the direction set.
double width_term(const BoxCollection& boxes, const DirectionSet& dirs);

/// Mean of width_term over the per-step collections.
double mean_width(std::span<const BoxCollection> steps, const DirectionSet& dirs);

/// Divides every value by the smallest one.  All inputs must be positive.
std::vector<double> normalize(std::span<const double> values);

}  // namespace ddo
