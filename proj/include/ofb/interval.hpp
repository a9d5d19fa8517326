#pragma once

// Closed-interval arithmetic and interval vectors (boxes).
//
// Bounds are rounded outward whenever the double result is inexact, so an
// enclosure always contains the exact real result while exact cases stay
// exact. EMPTY is an explicit state, never encoded as lo > hi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ofb {

class Interval {
 public:
  constexpr Interval() noexcept = default;
  constexpr explicit Interval(double point) noexcept : lo_(point), hi_(point) {}
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("Interval: lo must not exceed hi");
  }

  static constexpr Interval empty() noexcept {
    Interval r;
    r.empty_ = true;
    return r;
  }

  bool is_empty() const noexcept { return empty_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  // Only meaningful for non-empty intervals.
  double width() const noexcept { return hi_ - lo_; }
  double mid() const noexcept { return 0.5 * (lo_ + hi_); }
  double radius() const noexcept { return 0.5 * (hi_ - lo_); }
  double mag() const noexcept { return std::max(std::abs(lo_), std::abs(hi_)); }

  bool contains(double v) const noexcept { return !empty_ && lo_ <= v && v <= hi_; }
  bool contains(const Interval& o) const noexcept {
    if (o.empty_) return true;
    return !empty_ && lo_ <= o.lo_ && o.hi_ <= hi_;
  }

  friend bool operator==(const Interval& a, const Interval& b) noexcept {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = false;
};

namespace detail {
inline double down(double v) noexcept {
  return std::nextafter(v, -std::numeric_limits<double>::infinity());
}
inline double up(double v) noexcept {
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

// Directed rounding from round-to-nearest plus the exact error term
// (TwoSum for addition, FMA residual for products and quotients).
inline double add_down(double a, double b) noexcept {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? down(s) : s;
}
inline double add_up(double a, double b) noexcept {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? up(s) : s;
}
inline double mul_down(double a, double b) noexcept {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  return std::fma(a, b, -p) < 0.0 ? down(p) : p;
}
inline double mul_up(double a, double b) noexcept {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  return std::fma(a, b, -p) > 0.0 ? up(p) : p;
}
// a / s with s != 0: the exact quotient is q + r/s where r = a - q*s.
inline double div_down(double a, double s) noexcept {
  const double q = a / s;
  if (!std::isfinite(q)) return q;
  const double r = std::fma(-q, s, a);
  return (r != 0.0 && ((r < 0.0) != (s < 0.0))) ? down(q) : q;
}
inline double div_up(double a, double s) noexcept {
  const double q = a / s;
  if (!std::isfinite(q)) return q;
  const double r = std::fma(-q, s, a);
  return (r != 0.0 && ((r < 0.0) == (s < 0.0))) ? up(q) : q;
}
}  // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval(detail::add_down(a.lo(), b.lo()), detail::add_up(a.hi(), b.hi()));
}

inline Interval operator-(const Interval& a) {
  if (a.is_empty()) return a;
  return Interval(-a.hi(), -a.lo());
}

inline Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval(detail::add_down(a.lo(), -b.hi()), detail::add_up(a.hi(), -b.lo()));
}

inline Interval operator*(double s, const Interval& a) {
  if (a.is_empty()) return a;
  if (s == 0.0) return Interval(0.0);
  if (s > 0.0) return Interval(detail::mul_down(s, a.lo()), detail::mul_up(s, a.hi()));
  return Interval(detail::mul_down(s, a.hi()), detail::mul_up(s, a.lo()));
}

inline Interval operator*(const Interval& a, double s) { return s * a; }

// Division by a non-zero scalar.
inline Interval operator/(const Interval& a, double s) {
  if (s == 0.0) throw std::domain_error("Interval: division by zero");
  if (a.is_empty()) return a;
  if (s > 0.0) return Interval(detail::div_down(a.lo(), s), detail::div_up(a.hi(), s));
  return Interval(detail::div_down(a.hi(), s), detail::div_up(a.lo(), s));
}

inline Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

inline Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline std::ostream& operator<<(std::ostream& os, const Interval& a) {
  if (a.is_empty()) return os << "EMPTY";
  return os << '[' << a.lo() << ", " << a.hi() << ']';
}

class Box {
 public:
  Box() = default;
  explicit Box(std::size_t dim, Interval fill = Interval(0.0)) : comps_(dim, fill) {}
  Box(std::initializer_list<Interval> comps) : comps_(comps) {}
  explicit Box(std::vector<Interval> comps) : comps_(std::move(comps)) {}

  static Box empty(std::size_t dim) { return Box(dim, Interval::empty()); }
  static Box point(const Eigen::VectorXd& v) {
    Box b(static_cast<std::size_t>(v.size()));
    for (Eigen::Index k = 0; k < v.size(); ++k) b[k] = Interval(v[k]);
    return b;
  }

  std::size_t dim() const noexcept { return comps_.size(); }
  bool is_empty() const noexcept {
    return std::any_of(comps_.begin(), comps_.end(),
                       [](const Interval& c) { return c.is_empty(); });
  }

  Interval& operator[](std::size_t k) { return comps_[k]; }
  const Interval& operator[](std::size_t k) const { return comps_[k]; }

  auto begin() noexcept { return comps_.begin(); }
  auto end() noexcept { return comps_.end(); }
  auto begin() const noexcept { return comps_.begin(); }
  auto end() const noexcept { return comps_.end(); }

  Eigen::VectorXd center() const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < dim(); ++k) c[static_cast<Eigen::Index>(k)] = comps_[k].mid();
    return c;
  }
  Eigen::VectorXd width() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < dim(); ++k) w[static_cast<Eigen::Index>(k)] = comps_[k].width();
    return w;
  }
  double max_width() const {
    double w = 0.0;
    for (const auto& c : comps_) w = std::max(w, c.width());
    return w;
  }

  bool contains(const Eigen::VectorXd& v) const {
    if (static_cast<std::size_t>(v.size()) != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k) {
      if (!comps_[k].contains(v[static_cast<Eigen::Index>(k)])) return false;
    }
    return true;
  }
  bool contains(const Box& o) const {
    if (o.is_empty()) return true;
    if (o.dim() != dim() || is_empty()) return false;
    for (std::size_t k = 0; k < dim(); ++k) {
      if (!comps_[k].contains(o.comps_[k])) return false;
    }
    return true;
  }

  friend bool operator==(const Box& a, const Box& b) {
    if (a.is_empty() || b.is_empty()) return a.is_empty() == b.is_empty() && a.dim() == b.dim();
    return a.comps_ == b.comps_;
  }

 private:
  std::vector<Interval> comps_;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b) {
  os << '(';
  for (std::size_t k = 0; k < b.dim(); ++k) os << (k ? ", " : "") << b[k];
  return os << ')';
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

inline Box operator+(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "Box +");
  Box r(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) r[k] = a[k] + b[k];
  return r;
}

inline Box operator-(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "Box -");
  Box r(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) r[k] = a[k] - b[k];
  return r;
}

inline Box intersect(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "Box intersect");
  Box r(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    r[k] = intersect(a[k], b[k]);
    if (r[k].is_empty()) return Box::empty(a.dim());
  }
  return r;
}

inline Box hull(const Box& a, const Box& b) {
  require_same_dim(a.dim(), b.dim(), "Box hull");
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  Box r(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) r[k] = hull(a[k], b[k]);
  return r;
}

// Interval enclosure of one row of A times x.
inline Interval dot_box(const Eigen::Ref<const Eigen::RowVectorXd>& row, const Box& x) {
  double lo = 0.0;
  double hi = 0.0;
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    const double a = row[k];
    if (a == 0.0) continue;
    const Interval& xk = x[k];
    if (xk.is_empty()) return Interval::empty();
    if (a > 0.0) {
      lo = detail::add_down(lo, detail::mul_down(a, xk.lo()));
      hi = detail::add_up(hi, detail::mul_up(a, xk.hi()));
    } else {
      lo = detail::add_down(lo, detail::mul_down(a, xk.hi()));
      hi = detail::add_up(hi, detail::mul_up(a, xk.lo()));
    }
  }
  return Interval(lo, hi);
}

inline Box matvec_box(const Eigen::Ref<const Eigen::MatrixXd>& A, const Box& x) {
  require_same_dim(static_cast<std::size_t>(A.cols()), x.dim(), "matvec_box");
  if (x.is_empty()) return Box::empty(static_cast<std::size_t>(A.rows()));
  Box r(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index j = 0; j < A.rows(); ++j) r[j] = dot_box(A.row(j), x);
  return r;
}

}  // namespace ofb
