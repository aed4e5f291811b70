#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ddo/interval.hpp"

namespace ddo {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Dense row-major matrix of intervals; entries default to [0, 0].
struct IntervalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Interval> data;

  IntervalMatrix() = default;
  IntervalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  Interval& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Interval& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Discrete-time system
///
///   x_{k+1} = f(x_k, u_k, w_k),   w_k in W
///   y_k     = C x_k + v_k,        v_k in V
///
/// with state dimension n, input dimension m and measurement dimension p.
///
/// `f` evaluates the dynamics at a point.  `f_box` is its interval
/// extension and must evaluate the identical floating-point expression, so
/// that a degenerate box in Fast mode reproduces `f` bit for bit.
/// `jacobian` returns an n x 2n interval enclosure of df/d[x; w] over the
/// given state box and disturbance box.
///
/// `state_domain`, when present, is the region the dynamics are defined
/// on; enclosures are clipped to it before prediction.
struct SystemModel {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t p = 0;

  std::function<std::vector<double>(std::span<const double> x, std::span<const double> u,
                                    std::span<const double> w)>
      f;
  std::function<Box(const Box& x, std::span<const double> u, const Box& w)> f_box;
  std::function<IntervalMatrix(const Box& x, std::span<const double> u, const Box& w)> jacobian;

  Matrix C;  // p x n measurement matrix
  Box W;     // disturbance bounds, dimension n
  Box V;     // measurement noise bounds, dimension p
  Box X0;    // initial state bounds, dimension n

  std::optional<Box> state_domain;
  std::vector<double> u_nominal;  // default input, dimension m
};

/// Interval matrix-vector product; row i accumulates sum_j m(i,j) * v_j
/// in ascending j starting from [0, 0].  Exactly-zero entries contribute
/// nothing and are skipped.
Box interval_matvec(const IntervalMatrix& m, const Box& v);

/// Mean-value enclosure of the one-step image:
///
///   f(X, u, W)  subset of  f(c) + J * ([X; W] - c)
///
/// with c the midpoint of the augmented box [X; W] and J the interval
/// Jacobian over it.  f(c) is evaluated through `f_box` on degenerate
/// boxes so Rigorous mode accounts for evaluation roundoff.
Box mean_value_enclosure(const SystemModel& model, const Box& x, std::span<const double> u,
                         const Box& w);

/// Clips `x` to the model's state domain.  Returns `x` unchanged when no
/// domain is set; fails with DomainViolation when the clipped box is empty.
Box apply_state_domain(const SystemModel& model, const Box& x);

}  // namespace ddo
