#include "ddo/dynamics.hpp"

#include <cstddef>

#include "ddo/error.hpp"

namespace ddo {

Box interval_matvec(const IntervalMatrix& m, const Box& v) {
  if (m.cols != v.dim()) {
    fail(ErrorCode::DimensionMismatch, "interval_matvec: matrix columns != vector dimension");
  }
  if (v.is_empty()) fail(ErrorCode::EmptySet, "interval_matvec: empty operand");
  Box out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    Interval acc(0.0);
    for (std::size_t j = 0; j < m.cols; ++j) {
      const Interval& e = m.at(i, j);
      if (e.empty) fail(ErrorCode::EmptySet, "interval_matvec: empty matrix entry");
      if (e.lo == 0.0 && e.hi == 0.0) continue;
      acc = acc + e * v[j];
    }
    out[i] = acc;
  }
  return out;
}

Box mean_value_enclosure(const SystemModel& model, const Box& x, std::span<const double> u,
                         const Box& w) {
  if (x.dim() != model.n || w.dim() != model.n) {
    fail(ErrorCode::DimensionMismatch, "mean_value_enclosure: box dimension != model state dimension");
  }
  if (u.size() != model.m) {
    fail(ErrorCode::DimensionMismatch, "mean_value_enclosure: input dimension != model input dimension");
  }
  if (x.is_empty() || w.is_empty()) {
    fail(ErrorCode::EmptySet, "mean_value_enclosure: empty operand");
  }

  const std::vector<double> cx = midpoint(x);
  const std::vector<double> cw = midpoint(w);

  const Box fc = model.f_box(Box::from_point(cx), u, Box::from_point(cw));
  if (fc.dim() != model.n) {
    fail(ErrorCode::DimensionMismatch, "mean_value_enclosure: f_box returned wrong dimension");
  }

  const IntervalMatrix jac = model.jacobian(x, u, w);
  if (jac.rows != model.n || jac.cols != 2 * model.n) {
    fail(ErrorCode::DimensionMismatch, "mean_value_enclosure: jacobian has wrong shape");
  }

  Box z(2 * model.n);
  for (std::size_t j = 0; j < model.n; ++j) z[j] = x[j] - cx[j];
  for (std::size_t j = 0; j < model.n; ++j) z[model.n + j] = w[j] - cw[j];

  return fc + interval_matvec(jac, z);
}

Box apply_state_domain(const SystemModel& model, const Box& x) {
  if (!model.state_domain) return x;
  Box clipped = intersect(x, *model.state_domain);
  if (clipped.is_empty()) {
    fail(ErrorCode::DomainViolation, "state enclosure left the model domain");
  }
  return clipped;
}

}  // namespace ddo
