#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ofb/ofb.hpp"

namespace oracle {

// M=3, N=2, L=1: two orthonormal length-2 rows plus one zero-sum row that
// spans two blocks.
inline ofb::FilterBank tiny_bank() {
  const double a = 1.0 / std::sqrt(2.0);
  const double b = 0.35355339059327373;
  ofb::FilterBank fb;
  fb.M = 3;
  fb.N = 2;
  fb.L = 1;
  fb.taps = {{a, a}, {a, -a}, {b, b, -b, -b}};
  return fb;
}

inline ofb::Box tiny_input_box() { return ofb::Box(2, ofb::Interval(-1.0, 1.0)); }
inline constexpr double kTinyDelta = 0.75;

// Filter-and-decimate straight from the taps: subband m at block i reads
// sample N*i - N*floor(k/N) + (k mod N) with coefficient h_m[k].
inline std::vector<std::vector<double>> filter_decimate(const ofb::FilterBank& fb,
                                                        const std::vector<double>& x) {
  const int nb = static_cast<int>((x.size() + fb.N - 1) / fb.N);
  std::vector<std::vector<double>> y(nb, std::vector<double>(fb.M, 0.0));
  for (int i = 0; i < nb; ++i) {
    for (int m = 0; m < fb.M; ++m) {
      double acc = 0.0;
      const auto& h = fb.taps[m];
      for (int k = 0; k < static_cast<int>(h.size()); ++k) {
        const int t = fb.N * i - fb.N * (k / fb.N) + k % fb.N;
        if (t >= 0 && t < static_cast<int>(x.size())) acc += h[k] * x[t];
      }
      y[i][m] = acc;
    }
  }
  return y;
}

// Width of each subband range for a symmetric input box [-a, a]^N.
inline std::vector<double> symmetric_subband_widths(const ofb::FilterBank& fb, double a) {
  std::vector<double> w(fb.M);
  for (int m = 0; m < fb.M; ++m) {
    double s = 0.0;
    for (double h : fb.taps[m]) s += std::abs(h);
    w[m] = 2.0 * a * s;
  }
  return w;
}

// Smallest L' with an (M-N)-dimensional left null space of the block
// convolution matrix, by full-pivot LU on the transpose.
inline int minimal_parity_order(const ofb::PolyphaseAnalysis& pa, int cap = 8) {
  for (int lp = 0; lp <= cap; ++lp) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(pa.M * (lp + 1), pa.N * (pa.L + lp + 1));
    for (int r = 0; r <= lp; ++r) {
      for (int l = 0; l <= pa.L; ++l) T.block(pa.M * r, pa.N * (r + l), pa.M, pa.N) = pa.E[l];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(T.transpose());
    lu.setThreshold(1e-10);
    if (T.rows() - lu.rank() >= pa.M - pa.N) return lp;
  }
  return -1;
}

// Dense pseudo-inverse by normal equations on a small full-rank system.
inline Eigen::MatrixXd normal_equation_pinv(const Eigen::MatrixXd& A) {
  return (A.transpose() * A).inverse() * A.transpose();
}

// All index vectors of a quantizer bank with their block log-likelihood,
// best first (ties lexicographic), computed bit by bit.
struct Scored {
  ofb::IndexVector u;
  double loglik;
};

inline std::vector<Scored> exhaustive_ranking(const std::vector<double>& r, const ofb::QuantizerBank& q,
                                              const ofb::ChannelModel& ch) {
  std::vector<Scored> all{{{}, 0.0}};
  for (int m = 0; m < q.M(); ++m) {
    std::vector<Scored> next;
    const int R = q[m].rate;
    for (const auto& p : all) {
      for (int u = q[m].min_index(); u <= q[m].max_index(); ++u) {
        const unsigned w = q.codeword(u, m);
        double ll = 0.0;
        for (int b = 0; b < R; ++b) {
          const int bit = (w >> (R - 1 - b)) & 1u;
          const double d = r[q.bit_offset(m) + b] - (bit ? -1.0 : 1.0);
          ll += -d * d / (2.0 * ch.sigma2);
        }
        Scored s = p;
        s.u.push_back(u);
        s.loglik += ll;
        next.push_back(std::move(s));
      }
    }
    all.swap(next);
  }
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    if (a.loglik != b.loglik) return a.loglik > b.loglik;
    return a.u < b.u;
  });
  return all;
}

inline double uniform_in(const ofb::Interval& iv, std::mt19937_64& g) {
  if (iv.width() == 0.0) return iv.lo();
  return std::uniform_real_distribution<double>(iv.lo(), iv.hi())(g);
}

inline Eigen::VectorXd uniform_in(const ofb::Box& b, std::mt19937_64& g) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(b.dim()));
  for (std::size_t k = 0; k < b.dim(); ++k) v[static_cast<Eigen::Index>(k)] = uniform_in(b[k], g);
  return v;
}

// Dense key of an index vector: its natural-binary codewords concatenated.
inline std::size_t index_key(const ofb::IndexVector& u, const ofb::QuantizerBank& q) {
  std::size_t key = 0;
  for (int m = 0; m < q.M(); ++m) key = (key << q[m].rate) | static_cast<std::size_t>(u[m] - q[m].min_index());
  return key;
}

// Index vectors reached by sampled OFB outputs at instant i, as flags over
// index_key (so the quantizer must have few bits in total).
//   consistent: x^{i-l} drawn from the x-history boxes, x^i from [x].
//   parity:     additionally every y^{i-l} (l = 1..L') formed from the
//               sampled blocks lies in its y-history box.
// Both are inner approximations of the true feasible sets.
struct FeasibleSets {
  std::vector<char> consistent;
  std::vector<char> parity;
};

inline FeasibleSets sample_feasible(const ofb::PolyphaseAnalysis& pa, const ofb::QuantizerBank& q,
                                    const std::vector<ofb::Box>& x_past,  // [x^{i-K}] .. [x^{i-1}]
                                    const std::vector<ofb::Box>& y_past,  // [y^{i-L'}] .. [y^{i-1}]
                                    const ofb::Box& input_box, int samples, std::mt19937_64& g) {
  const int K = static_cast<int>(x_past.size());
  const int Lp = static_cast<int>(y_past.size());
  FeasibleSets out;
  out.consistent.assign(std::size_t{1} << q.total_bits(), 0);
  out.parity.assign(out.consistent.size(), 0);
  std::vector<Eigen::VectorXd> xs(K + 1);
  Eigen::VectorXd y(pa.M);
  auto y_at = [&](int back) {  // y^{i-back} from the sampled blocks
    y.setZero();
    for (int l = 0; l <= pa.L; ++l) {
      const int idx = K - back - l;
      if (idx >= 0) y.noalias() += pa.E[l] * xs[idx];
    }
  };
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < K; ++k) xs[k] = uniform_in(x_past[k], g);
    xs[K] = uniform_in(input_box, g);
    y_at(0);
    const std::size_t key = index_key(q.quantize(y), q);
    out.consistent[key] = 1;
    bool in_hist = true;
    for (int l = 1; l <= Lp && in_hist; ++l) {
      y_at(l);
      const ofb::Box& yb = y_past[Lp - l];
      for (int m = 0; m < pa.M; ++m) in_hist = in_hist && yb[m].contains(y[m]);
    }
    if (in_hist) out.parity[key] = 1;
  }
  return out;
}

}  // namespace oracle
