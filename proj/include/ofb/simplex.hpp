#pragma once

// Small dense simplex solver, used only for exact box hulls of polytopes
// with a handful of variables.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ofb {

// maximize c.s subject to G s <= h, s >= 0.
// Bland's rule on ties; the textbook two-phase tableau with one auxiliary
// column for infeasible starts.
class DenseSimplex {
 public:
  enum class Status { kOptimal, kInfeasible, kUnbounded };

  struct Result {
    Status status = Status::kInfeasible;
    double value = 0.0;
    Eigen::VectorXd s;
  };

  DenseSimplex(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& c,
               double eps = 1e-10)
      : m_(static_cast<int>(G.rows())),
        n_(static_cast<int>(G.cols())),
        eps_(eps),
        basic_(static_cast<std::size_t>(m_)),
        nonbasic_(static_cast<std::size_t>(n_ + 1)),
        D_(Eigen::MatrixXd::Zero(m_ + 2, n_ + 2)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) D_(i, j) = G(i, j);
      basic_[static_cast<std::size_t>(i)] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = h[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[static_cast<std::size_t>(j)] = j;
      D_(m_, j) = -c[j];
    }
    nonbasic_[static_cast<std::size_t>(n_)] = -1;
    D_(m_ + 1, n_) = 1.0;
  }

  Result solve() {
    Result out;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      if (!run(1) || D_(m_ + 1, n_ + 1) < -eps_) {
        out.status = Status::kInfeasible;
        return out;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[static_cast<std::size_t>(i)] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
          if (s == -1 || D_(i, j) < D_(i, s) ||
              (D_(i, j) == D_(i, s) && nb(j) < nb(s))) {
            s = j;
          }
        }
        pivot(i, s);
      }
    }
    if (!run(2)) {
      out.status = Status::kUnbounded;
      return out;
    }
    out.status = Status::kOptimal;
    out.s = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      const int b = basic_[static_cast<std::size_t>(i)];
      if (b >= 0 && b < n_) out.s[b] = D_(i, n_ + 1);
    }
    out.value = D_(m_, n_ + 1);
    return out;
  }

 private:
  int nb(int j) const { return nonbasic_[static_cast<std::size_t>(j)]; }

  void pivot(int r, int s) {
    const double inv = 1.0 / D_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_(i, s) * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j) {
        if (j != s) D_(i, j) -= D_(r, j) * f;
      }
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) D_(r, j) *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) D_(i, s) *= -inv;
    }
    D_(r, s) = inv;
    std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
  }

  bool run(int phase) {
    const int obj = phase == 1 ? m_ + 1 : m_;
    // Bland's rule guarantees termination; the cap only guards against
    // numerical ping-pong.
    for (int iter = 0; iter < 10000; ++iter) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nb(j) == -1) continue;
        if (s == -1 || D_(obj, j) < D_(obj, s) - eps_ ||
            (std::abs(D_(obj, j) - D_(obj, s)) <= eps_ && nb(j) < nb(s))) {
          s = j;
        }
      }
      if (s == -1 || D_(obj, s) > -eps_) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_(i, s) < eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_(i, n_ + 1) / D_(i, s);
        const double rhs = D_(r, n_ + 1) / D_(r, s);
        if (lhs < rhs - eps_ ||
            (std::abs(lhs - rhs) <= eps_ &&
             basic_[static_cast<std::size_t>(i)] < basic_[static_cast<std::size_t>(r)])) {
          r = i;
        }
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  int m_;
  int n_;
  double eps_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  Eigen::MatrixXd D_;
};

}  // namespace ofb
