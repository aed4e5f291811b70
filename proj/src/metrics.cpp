#include "ddo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "ddo/error.hpp"

namespace ddo {

namespace {

double nth_root(double v, std::size_t n) {
  if (n == 1) return v;
  if (n == 2) return std::sqrt(v);
  return std::pow(v, 1.0 / static_cast<double>(n));
}

void require_boxes(const BoxCollection& boxes, const char* what) {
  if (boxes.empty()) fail(ErrorCode::EmptySet, std::string(what) + ": empty collection");
}

}  // namespace

DirectionSet sample_directions(std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "sample_directions: zero dimension");
  if (count == 0) fail(ErrorCode::InvalidArgument, "sample_directions: zero count");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DirectionSet out;
  out.seed = seed;
  out.dirs.reserve(count);
  while (out.dirs.size() < count) {
    std::vector<double> d(dim);
    double norm2 = 0.0;
    for (double& c : d) {
      c = gauss(rng);
      norm2 += c * c;
    }
    const double norm = std::sqrt(norm2);
    if (norm < 1e-154) continue;  // resample near-zero draws
    for (double& c : d) c /= norm;
    out.dirs.push_back(std::move(d));
  }
  return out;
}

Box hull_of_collection(const BoxCollection& boxes) {
  require_boxes(boxes, "hull_of_collection");
  if (boxes.front().is_empty()) fail(ErrorCode::EmptySet, "hull_of_collection: empty box");
  Box h = boxes.front();
  for (std::size_t b = 1; b < boxes.size(); ++b) {
    if (boxes[b].is_empty()) fail(ErrorCode::EmptySet, "hull_of_collection: empty box");
    h = hull(h, boxes[b]);
  }
  return h;
}

double hull_volume_term(const BoxCollection& boxes) {
  const Box h = hull_of_collection(boxes);
  if (h.dim() == 0) fail(ErrorCode::InvalidArgument, "hull_volume_term: zero-dimensional box");
  double vol = 1.0;
  for (std::size_t j = 0; j < h.dim(); ++j) vol *= width(h[j]);
  return nth_root(vol, h.dim());
}

double hull_volume_metric(std::span<const BoxCollection> steps) {
  if (steps.empty()) fail(ErrorCode::InvalidArgument, "hull_volume_metric: no steps");
  double acc = 0.0;
  for (const BoxCollection& s : steps) acc += hull_volume_term(s);
  return acc / static_cast<double>(steps.size());
}

double support(const BoxCollection& boxes, std::span<const double> direction) {
  require_boxes(boxes, "support");
  double best = -std::numeric_limits<double>::infinity();
  for (const Box& b : boxes) {
    if (b.dim() != direction.size()) {
      fail(ErrorCode::DimensionMismatch, "support: direction dimension differs");
    }
    if (b.is_empty()) fail(ErrorCode::EmptySet, "support: empty box");
    double s = 0.0;
    for (std::size_t j = 0; j < b.dim(); ++j) {
      const double c = (b[j].lo + b[j].hi) / 2.0;
      const double r = (b[j].hi - b[j].lo) / 2.0;
      s += direction[j] * c + std::abs(direction[j]) * r;
    }
    best = std::max(best, s);
  }
  return best;
}

double width_term(const BoxCollection& boxes, const DirectionSet& dirs) {
  if (dirs.dirs.empty()) fail(ErrorCode::InvalidArgument, "width_term: no directions");
  double acc = 0.0;
  std::vector<double> neg;
  for (const auto& d : dirs.dirs) {
    neg.assign(d.size(), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) neg[j] = -d[j];
    acc += support(boxes, d) + support(boxes, neg);
  }
  return acc / static_cast<double>(dirs.dirs.size());
}

double mean_width(std::span<const BoxCollection> steps, const DirectionSet& dirs) {
  if (steps.empty()) fail(ErrorCode::InvalidArgument, "mean_width: no steps");
  double acc = 0.0;
  for (const BoxCollection& s : steps) acc += width_term(s, dirs);
  return acc / static_cast<double>(steps.size());
}

std::vector<double> normalize(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "normalize: no values");
  double lo = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!(v > 0.0)) fail(ErrorCode::NonpositiveMetric, "normalize: values must be positive");
    lo = std::min(lo, v);
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / lo;
  return out;
}

}  // namespace ddo
