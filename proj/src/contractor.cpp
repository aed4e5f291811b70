#include "ddo/contractor.hpp"

#include <cstddef>

#include "ddo/error.hpp"

namespace ddo {

namespace {

void validate_strips(const StripSet& strips, std::size_t n) {
  const std::size_t p = strips.C.rows;
  if (p == 0) fail(ErrorCode::InvalidArgument, "strip set without strips");
  if (strips.C.cols != n) {
    fail(ErrorCode::DimensionMismatch, "strip matrix columns != state dimension");
  }
  if (strips.y.size() != p || strips.V.dim() != p) {
    fail(ErrorCode::DimensionMismatch, "strip measurement or noise dimension != strip count");
  }
  if (strips.V.is_empty()) fail(ErrorCode::EmptySet, "strip noise bounds empty");
}

}  // namespace

Interval admissible_interval(const StripSet& strips, std::size_t strip, std::size_t var,
                             const Box& x) {
  validate_strips(strips, x.dim());
  if (strip >= strips.C.rows || var >= strips.C.cols) {
    fail(ErrorCode::InvalidArgument, "admissible_interval: index out of range");
  }
  const double cij = strips.C.at(strip, var);
  if (cij == 0.0) {
    fail(ErrorCode::ZeroCoefficient, "admissible_interval: strip does not involve the variable");
  }
  if (x.is_empty()) fail(ErrorCode::EmptySet, "admissible_interval: empty box");

  Interval s(0.0);
  for (std::size_t l = 0; l < x.dim(); ++l) {
    if (l == var) continue;
    const double c = strips.C.at(strip, l);
    if (c == 0.0) continue;
    s = s + c * x[l];
  }
  const Interval b = (Interval(strips.y[strip]) - strips.V[strip]) - s;
  return b / Interval(cij);
}

bool gs_contract_box(Box& box, const StripSet& strips, int max_sweeps) {
  if (max_sweeps < 1) fail(ErrorCode::InvalidArgument, "gs_contract_box: max_sweeps < 1");
  const std::size_t p = strips.C.rows;
  const std::size_t n = box.dim();
  for (int t = 0; t < max_sweeps; ++t) {
    bool changed = false;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (strips.C.at(i, j) == 0.0) continue;
        const Interval next = intersect(box[j], admissible_interval(strips, i, j, box));
        if (next.empty) return false;
        if (next != box[j]) {
          box[j] = next;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return true;
}

BoxCollection gs_contract(const BoxCollection& boxes, const StripSet& strips, int max_sweeps) {
  BoxCollection out;
  out.reserve(boxes.size());
  for (const Box& b : boxes) {
    validate_strips(strips, b.dim());
    if (b.is_empty()) fail(ErrorCode::EmptySet, "gs_contract: empty input box");
    Box contracted = b;
    if (gs_contract_box(contracted, strips, max_sweeps)) {
      out.push_back(std::move(contracted));
    }
  }
  return out;
}

BoxCollection contract_initial(const Box& x0, const StripSet& strips, int max_sweeps) {
  return gs_contract(BoxCollection{x0}, strips, max_sweeps);
}

}  // namespace ddo
