#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ddo/error.hpp"

namespace ddo {

/// Endpoint rounding policy for interval arithmetic.
///
/// Fast evaluates endpoints with native round-to-nearest and makes no
/// claim about the last ulp.  Rigorous nudges every computed endpoint one
/// ulp outward, so results are supersets of the exact real-arithmetic
/// intervals.  The mode is thread-local; arithmetic on different threads
/// never interferes.
enum class Rounding { Fast, Rigorous };

namespace detail {
inline thread_local Rounding rounding_state = Rounding::Fast;
}

inline Rounding rounding_mode() noexcept { return detail::rounding_state; }
inline void set_rounding_mode(Rounding mode) noexcept { detail::rounding_state = mode; }

/// Sets the rounding mode for the current scope and restores the previous
/// mode on exit.
class ScopedRounding {
 public:
  explicit ScopedRounding(Rounding mode) noexcept : prev_(rounding_mode()) {
    set_rounding_mode(mode);
  }
  ~ScopedRounding() { set_rounding_mode(prev_); }
  ScopedRounding(const ScopedRounding&) = delete;
  ScopedRounding& operator=(const ScopedRounding&) = delete;

 private:
  Rounding prev_;
};

namespace detail {

inline double round_down(double v) noexcept {
  if (rounding_state == Rounding::Rigorous) {
    return std::nextafter(v, -std::numeric_limits<double>::infinity());
  }
  return v;
}

inline double round_up(double v) noexcept {
  if (rounding_state == Rounding::Rigorous) {
    return std::nextafter(v, std::numeric_limits<double>::infinity());
  }
  return v;
}

}  // namespace detail

/// Closed interval [lo, hi], or the empty set when `empty` is set.
/// Non-empty intervals keep lo <= hi; endpoints of the empty interval are
/// meaningless and must not be read.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;

  constexpr Interval() = default;
  constexpr explicit Interval(double v) : lo(v), hi(v) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) { assert(l <= h); }

  static constexpr Interval make_empty() {
    Interval r;
    r.empty = true;
    return r;
  }
};

inline bool operator==(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return a.empty == b.empty;
  return a.lo == b.lo && a.hi == b.hi;
}

inline bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

inline double midpoint(const Interval& a) {
  if (a.empty) fail(ErrorCode::EmptySet, "midpoint of empty interval");
  return (a.lo + a.hi) / 2.0;
}

inline double width(const Interval& a) {
  if (a.empty) fail(ErrorCode::EmptySet, "width of empty interval");
  return a.hi - a.lo;
}

inline double radius(const Interval& a) {
  if (a.empty) fail(ErrorCode::EmptySet, "radius of empty interval");
  return (a.hi - a.lo) / 2.0;
}

inline bool contains(const Interval& a, double v) {
  return !a.empty && a.lo <= v && v <= a.hi;
}

/// True when `inner` is a subset of `outer`; the empty set is a subset of
/// everything.
inline bool contains(const Interval& outer, const Interval& inner) {
  if (inner.empty) return true;
  if (outer.empty) return false;
  return outer.lo <= inner.lo && inner.hi <= outer.hi;
}

inline Interval operator-(const Interval& a) {
  if (a.empty) return a;
  return Interval{-a.hi, -a.lo};
}

inline Interval operator+(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::make_empty();
  return Interval{detail::round_down(a.lo + b.lo), detail::round_up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::make_empty();
  return Interval{detail::round_down(a.lo - b.hi), detail::round_up(a.hi - b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::make_empty();
  const double p1 = a.lo * b.lo;
  const double p2 = a.lo * b.hi;
  const double p3 = a.hi * b.lo;
  const double p4 = a.hi * b.hi;
  const double lo = std::min(std::min(p1, p2), std::min(p3, p4));
  const double hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return Interval{detail::round_down(lo), detail::round_up(hi)};
}

inline Interval operator*(double c, const Interval& a) {
  if (a.empty) return a;
  if (c >= 0.0) {
    return Interval{detail::round_down(c * a.lo), detail::round_up(c * a.hi)};
  }
  return Interval{detail::round_down(c * a.hi), detail::round_up(c * a.lo)};
}

inline Interval operator*(const Interval& a, double c) { return c * a; }

inline Interval operator/(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::make_empty();
  if (b.lo <= 0.0 && 0.0 <= b.hi) {
    fail(ErrorCode::DivisorContainsZero, "interval division by interval containing zero");
  }
  const double q1 = a.lo / b.lo;
  const double q2 = a.lo / b.hi;
  const double q3 = a.hi / b.lo;
  const double q4 = a.hi / b.hi;
  const double lo = std::min(std::min(q1, q2), std::min(q3, q4));
  const double hi = std::max(std::max(q1, q2), std::max(q3, q4));
  return Interval{detail::round_down(lo), detail::round_up(hi)};
}

inline Interval operator+(const Interval& a, double c) { return a + Interval(c); }
inline Interval operator+(double c, const Interval& a) { return Interval(c) + a; }
inline Interval operator-(const Interval& a, double c) { return a - Interval(c); }
inline Interval operator-(double c, const Interval& a) { return Interval(c) - a; }
inline Interval operator/(const Interval& a, double c) { return a / Interval(c); }
inline Interval operator/(double c, const Interval& a) { return Interval(c) / a; }

/// Range of x^2 over the interval; tighter than a*a because the two factors
/// are the same variable.
inline Interval sqr(const Interval& a) {
  if (a.empty) return a;
  if (a.lo >= 0.0) {
    return Interval{detail::round_down(a.lo * a.lo), detail::round_up(a.hi * a.hi)};
  }
  if (a.hi <= 0.0) {
    return Interval{detail::round_down(a.hi * a.hi), detail::round_up(a.lo * a.lo)};
  }
  const double m = std::max(a.lo * a.lo, a.hi * a.hi);
  return Interval{detail::round_down(0.0), detail::round_up(m)};
}

inline Interval sqrt(const Interval& a) {
  if (a.empty) return a;
  if (a.hi < 0.0) fail(ErrorCode::NegativeDomain, "sqrt of interval below zero");
  const double lo = a.lo > 0.0 ? a.lo : 0.0;
  return Interval{detail::round_down(std::sqrt(lo)), detail::round_up(std::sqrt(a.hi))};
}

/// Set intersection.  Exact: endpoints are selected, never recomputed, so
/// no rounding is applied in either mode.
inline Interval intersect(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::make_empty();
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (lo > hi) return Interval::make_empty();
  return Interval{lo, hi};
}

/// Tightest interval containing both arguments; exact like intersect.
inline Interval hull(const Interval& a, const Interval& b) {
  if (a.empty) return b;
  if (b.empty) return a;
  return Interval{std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

/// Axis-aligned box: a vector of component intervals.  A box is empty as
/// soon as any component is empty.
struct Box {
  std::vector<Interval> comps;

  Box() = default;
  explicit Box(std::size_t n) : comps(n) {}
  explicit Box(std::vector<Interval> c) : comps(std::move(c)) {}

  static Box from_bounds(std::span<const double> lo, std::span<const double> hi) {
    if (lo.size() != hi.size()) {
      fail(ErrorCode::DimensionMismatch, "box bounds of different lengths");
    }
    Box b(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (!(lo[j] <= hi[j])) {
        fail(ErrorCode::InvalidArgument, "box lower bound above upper bound");
      }
      b.comps[j] = Interval{lo[j], hi[j]};
    }
    return b;
  }

  static Box from_point(std::span<const double> x) {
    Box b(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) b.comps[j] = Interval(x[j]);
    return b;
  }

  std::size_t dim() const { return comps.size(); }
  Interval& operator[](std::size_t j) { return comps[j]; }
  const Interval& operator[](std::size_t j) const { return comps[j]; }

  bool is_empty() const {
    for (const Interval& c : comps) {
      if (c.empty) return true;
    }
    return false;
  }
};

using BoxCollection = std::vector<Box>;

inline bool operator==(const Box& a, const Box& b) { return a.comps == b.comps; }
inline bool operator!=(const Box& a, const Box& b) { return !(a == b); }

namespace detail {
inline void require_same_dim(const Box& a, const Box& b, const char* what) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, what);
}
}  // namespace detail

inline std::vector<double> midpoint(const Box& b) {
  std::vector<double> m(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) m[j] = midpoint(b[j]);
  return m;
}

inline std::vector<double> width(const Box& b) {
  std::vector<double> w(b.dim());
  for (std::size_t j = 0; j < b.dim(); ++j) w[j] = width(b[j]);
  return w;
}

inline Box intersect(const Box& a, const Box& b) {
  detail::require_same_dim(a, b, "intersect: box dimensions differ");
  Box r(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) r[j] = intersect(a[j], b[j]);
  return r;
}

inline Box hull(const Box& a, const Box& b) {
  detail::require_same_dim(a, b, "hull: box dimensions differ");
  Box r(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) r[j] = hull(a[j], b[j]);
  return r;
}

inline bool contains(const Box& b, std::span<const double> x) {
  if (b.dim() != x.size()) fail(ErrorCode::DimensionMismatch, "contains: point dimension differs");
  for (std::size_t j = 0; j < b.dim(); ++j) {
    if (!contains(b[j], x[j])) return false;
  }
  return true;
}

inline bool contains(const Box& outer, const Box& inner) {
  detail::require_same_dim(outer, inner, "contains: box dimensions differ");
  for (std::size_t j = 0; j < outer.dim(); ++j) {
    if (!contains(outer[j], inner[j])) return false;
  }
  return true;
}

/// Minkowski sum; componentwise interval addition.
inline Box operator+(const Box& a, const Box& b) {
  detail::require_same_dim(a, b, "box sum: dimensions differ");
  Box r(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) r[j] = a[j] + b[j];
  return r;
}

}  // namespace ddo
