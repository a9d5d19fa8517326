#pragma once

// Outer approximation of {x in x0 : A x in c} for a fixed real matrix A.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ofb/interval.hpp"
#include "ofb/simplex.hpp"

namespace ofb {

enum class HullMethod {
  kForwardBackward,  // interval propagation only
  kLinearProgram,    // forward-backward, then exact hull by 2n small LPs
};

struct ContractorOptions {
  double tol = 1e-6;     // relative width change that ends the sweeps
  int max_sweeps = 50;
  // Intersect with B c for a left inverse B of A (only when A has full
  // column rank). Any x with A x in c satisfies x = B A x in B c.
  bool precondition = true;
  HullMethod method = HullMethod::kForwardBackward;
};

class AffineContractor {
 public:
  explicit AffineContractor(Eigen::MatrixXd A, ContractorOptions opts = {})
      : A_(std::move(A)), opts_(opts) {
    if (!(opts_.tol > 0.0)) throw std::invalid_argument("contractor tol must be positive");
    if (opts_.max_sweeps < 1) throw std::invalid_argument("contractor max_sweeps must be >= 1");
    if (opts_.precondition && A_.rows() >= A_.cols() && A_.cols() > 0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A_);
      if (cod.rank() == A_.cols()) {
        left_inverse_ = cod.pseudoInverse();
        const Eigen::MatrixXd defect =
            left_inverse_ * A_ - Eigen::MatrixXd::Identity(A_.cols(), A_.cols());
        // Row sums of |B A - I| bound how far B A x strays from x.
        inverse_defect_ = defect.cwiseAbs().rowwise().sum() * 4.0;
        has_left_inverse_ = true;
      }
    }
  }

  const Eigen::MatrixXd& matrix() const noexcept { return A_; }
  const ContractorOptions& options() const noexcept { return opts_; }

  Box contract(const Box& x0, const Box& c) const {
    require_same_dim(static_cast<std::size_t>(A_.cols()), x0.dim(), "contract_affine (x0)");
    require_same_dim(static_cast<std::size_t>(A_.rows()), c.dim(), "contract_affine (c)");
    const std::size_t n = x0.dim();
    if (x0.is_empty() || c.is_empty()) return Box::empty(n);

    Box x = x0;
    if (has_left_inverse_) {
      Box proj = matvec_box(left_inverse_, c);
      double scale = 0.0;
      for (const auto& xi : x0) scale = std::max(scale, xi.mag());
      for (std::size_t k = 0; k < n; ++k) {
        const double slack = inverse_defect_[static_cast<Eigen::Index>(k)] * scale;
        proj[k] = proj[k] + Interval(-slack, slack);
      }
      x = intersect(x, proj);
      if (x.is_empty()) return x;
    }

    if (!forward_backward(x, c)) return Box::empty(n);
    if (opts_.method == HullMethod::kLinearProgram) return lp_hull(x, c);
    return x;
  }

 private:
  // Returns false once emptiness is proven.
  bool forward_backward(Box& x, const Box& c) const {
    const Eigen::Index m = A_.rows();
    const Eigen::Index n = A_.cols();
    for (int sweep = 0; sweep < opts_.max_sweeps; ++sweep) {
      const Eigen::VectorXd before = x.width();
      for (Eigen::Index j = 0; j < m; ++j) {
        const Interval s = intersect(dot_box(A_.row(j), x), c[static_cast<std::size_t>(j)]);
        if (s.is_empty()) return false;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double a = A_(j, k);
          if (a == 0.0) continue;
          Interval rest(0.0);
          for (Eigen::Index k2 = 0; k2 < n; ++k2) {
            if (k2 == k || A_(j, k2) == 0.0) continue;
            rest = rest + A_(j, k2) * x[static_cast<std::size_t>(k2)];
          }
          auto& xk = x[static_cast<std::size_t>(k)];
          xk = intersect(xk, (s - rest) / a);
          if (xk.is_empty()) return false;
        }
      }
      double shrink = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (before[k] > 0.0) {
          shrink = std::max(shrink, (before[k] - x[static_cast<std::size_t>(k)].width()) / before[k]);
        }
      }
      if (shrink < opts_.tol) break;
    }
    return true;
  }

  // Exact hull: min and max of each coordinate over the polytope, after
  // shifting x to s = x - lo so that s >= 0.
  Box lp_hull(const Box& x, const Box& c) const {
    const Eigen::Index m = A_.rows();
    const Eigen::Index n = A_.cols();
    Eigen::VectorXd lo(n), width(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      lo[k] = x[static_cast<std::size_t>(k)].lo();
      width[k] = x[static_cast<std::size_t>(k)].width();
    }
    const Eigen::VectorXd offset = A_ * lo;
    Eigen::MatrixXd G(2 * m + n, n);
    Eigen::VectorXd h(2 * m + n);
    G.topRows(m) = A_;
    G.middleRows(m, m) = -A_;
    G.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index j = 0; j < m; ++j) {
      h[j] = c[static_cast<std::size_t>(j)].hi() - offset[j];
      h[m + j] = -(c[static_cast<std::size_t>(j)].lo() - offset[j]);
    }
    h.tail(n) = width;

    double scale = 1.0;
    for (const auto& xi : x) scale = std::max(scale, xi.mag());
    const double slack = 1e-9 * scale;

    Box out(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXd obj = Eigen::VectorXd::Zero(n);
      obj[k] = 1.0;
      auto hi = DenseSimplex(G, h, obj).solve();
      if (hi.status != DenseSimplex::Status::kOptimal) return Box::empty(static_cast<std::size_t>(n));
      obj[k] = -1.0;
      auto lo_res = DenseSimplex(G, h, obj).solve();
      if (lo_res.status != DenseSimplex::Status::kOptimal) return Box::empty(static_cast<std::size_t>(n));
      const double top = lo[k] + hi.value + slack;
      const double bottom = lo[k] - lo_res.value - slack;
      out[static_cast<std::size_t>(k)] =
          intersect(x[static_cast<std::size_t>(k)], Interval(bottom, std::max(bottom, top)));
    }
    return out;
  }

  Eigen::MatrixXd A_;
  ContractorOptions opts_;
  Eigen::MatrixXd left_inverse_;
  Eigen::VectorXd inverse_defect_;
  bool has_left_inverse_ = false;
};

inline Box contract_affine(const Eigen::MatrixXd& A, const Box& x0, const Box& c,
                           ContractorOptions opts = {}) {
  return AffineContractor(A, opts).contract(x0, c);
}

inline Box contract_affine(const Eigen::MatrixXd& A, const Box& x0, const Box& c, double tol,
                           int max_sweeps) {
  ContractorOptions opts;
  opts.tol = tol;
  opts.max_sweeps = max_sweeps;
  return contract_affine(A, x0, c, opts);
}

}  // namespace ofb
