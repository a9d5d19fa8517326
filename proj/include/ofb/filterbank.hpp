#pragma once

// FIR oversampled analysis filter bank in polyphase form, its FIR
// parity-check bank, and windowed least-squares synthesis.
//
// Block convention: x^i = (x_{Ni}, ..., x_{Ni+N-1}), y^i = sum_l E_l x^{i-l},
// with (E_l)[m, n] = h_m[l N + n] and x^j = 0 for j < 0.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ofb {

using BlockSequence = std::vector<Eigen::VectorXd>;

struct FilterBank {
  int M = 0;  // subbands
  int N = 0;  // downsampling factor
  int L = 0;  // polyphase order
  std::vector<std::vector<double>> taps;

  void validate() const {
    if (M < 1 || N < 1 || L < 0) throw std::invalid_argument("filter bank: bad M, N or L");
    if (N > M) throw std::invalid_argument("filter bank: N must not exceed M");
    if (static_cast<int>(taps.size()) != M) {
      throw std::invalid_argument("filter bank: expected " + std::to_string(M) + " filters");
    }
    std::size_t longest = 0;
    for (const auto& h : taps) {
      if (h.empty()) throw std::invalid_argument("filter bank: empty filter");
      if (h.size() > static_cast<std::size_t>(N * (L + 1))) {
        throw std::invalid_argument("filter bank: filter longer than N(L+1)");
      }
      longest = std::max(longest, h.size());
    }
    if (L > 0 && longest <= static_cast<std::size_t>(N * L)) {
      throw std::invalid_argument("filter bank: L is not tight (no filter longer than N L)");
    }
  }
};

namespace detail {
inline double parse_real(const std::string& tok, int line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("filter bank: line " + std::to_string(line_no) + ": bad number '" +
                             tok + "'");
  }
  return v;
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line.substr(0, line.find('#')));
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}
}  // namespace detail

// Plain text: "M N L" header, then M lines of taps. '#' starts a comment.
inline FilterBank parse_filter_bank(std::istream& in) {
  FilterBank fb;
  bool have_header = false;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto toks = detail::tokens(line);
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 3) {
        throw std::runtime_error("filter bank: line " + std::to_string(line_no) +
                                 ": header must be 'M N L'");
      }
      auto as_int = [&](const std::string& t) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) {
          throw std::runtime_error("filter bank: line " + std::to_string(line_no) +
                                   ": bad integer '" + t + "'");
        }
        return v;
      };
      fb.M = as_int(toks[0]);
      fb.N = as_int(toks[1]);
      fb.L = as_int(toks[2]);
      have_header = true;
      continue;
    }
    std::vector<double> h;
    h.reserve(toks.size());
    for (const auto& t : toks) h.push_back(detail::parse_real(t, line_no));
    fb.taps.push_back(std::move(h));
  }
  if (!have_header) throw std::runtime_error("filter bank: missing 'M N L' header");
  fb.validate();
  return fb;
}

inline FilterBank load_filter_bank(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open filter bank file '" + path + "'");
  return parse_filter_bank(in);
}

struct PolyphaseAnalysis {
  int M = 0;
  int N = 0;
  int L = 0;
  std::vector<Eigen::MatrixXd> E;  // E_0 ... E_L, each M x N

  // E_{L:0} = (E_L, ..., E_0), acting on (x^{i-L}, ..., x^i).
  Eigen::MatrixXd stacked() const {
    Eigen::MatrixXd S(M, N * (L + 1));
    for (int l = 0; l <= L; ++l) S.middleCols(N * (L - l), N) = E[static_cast<std::size_t>(l)];
    return S;
  }
};

inline PolyphaseAnalysis polyphase_from_filters(const FilterBank& fb) {
  fb.validate();
  PolyphaseAnalysis pa;
  pa.M = fb.M;
  pa.N = fb.N;
  pa.L = fb.L;
  pa.E.assign(static_cast<std::size_t>(fb.L + 1), Eigen::MatrixXd::Zero(fb.M, fb.N));
  for (int m = 0; m < fb.M; ++m) {
    const auto& h = fb.taps[static_cast<std::size_t>(m)];
    for (std::size_t k = 0; k < h.size(); ++k) {
      const auto l = k / static_cast<std::size_t>(fb.N);
      const auto n = static_cast<Eigen::Index>(k % static_cast<std::size_t>(fb.N));
      pa.E[l](m, n) = h[k];
    }
  }
  return pa;
}

// Splits samples into N-blocks, padding the tail with zeros.
inline BlockSequence to_blocks(std::span<const double> x, int N) {
  const std::size_t nb = (x.size() + static_cast<std::size_t>(N) - 1) / static_cast<std::size_t>(N);
  BlockSequence out(nb, Eigen::VectorXd::Zero(N));
  for (std::size_t t = 0; t < x.size(); ++t) {
    out[t / static_cast<std::size_t>(N)][static_cast<Eigen::Index>(t % static_cast<std::size_t>(N))] = x[t];
  }
  return out;
}

inline std::vector<double> from_blocks(const BlockSequence& blocks) {
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.data(), b.data() + b.size());
  return out;
}

inline BlockSequence analyze(const PolyphaseAnalysis& pa, std::span<const double> x) {
  const BlockSequence xb = to_blocks(x, pa.N);
  BlockSequence y(xb.size(), Eigen::VectorXd::Zero(pa.M));
  for (std::size_t i = 0; i < xb.size(); ++i) {
    for (int l = 0; l <= pa.L && static_cast<std::size_t>(l) <= i; ++l) {
      y[i].noalias() += pa.E[static_cast<std::size_t>(l)] * xb[i - static_cast<std::size_t>(l)];
    }
  }
  return y;
}

// Stacks `window` consecutive instances of y^j = sum_l E_l x^{j-l}.
// Unknowns are x^{s-L}, ..., x^{s+window-1}; with `leading_zeros` the first
// L blocks are known to be zero and their columns are dropped.
inline Eigen::MatrixXd window_system(const PolyphaseAnalysis& pa, int window,
                                     bool leading_zeros = false) {
  const int M = pa.M, N = pa.N, L = pa.L;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(M * window, N * (window + L));
  for (int j = 0; j < window; ++j) {
    for (int l = 0; l <= L; ++l) {
      T.block(M * j, N * (j + L - l), M, N) = pa.E[static_cast<std::size_t>(l)];
    }
  }
  if (leading_zeros) return T.rightCols(N * window);
  return T;
}

// Analysis operator restricted to `window` input blocks: every output
// block they touch, M (window + L) x N window.
inline Eigen::MatrixXd frame_matrix(const PolyphaseAnalysis& pa, int window) {
  const int M = pa.M, N = pa.N, L = pa.L;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(M * (window + L), N * window);
  for (int k = 0; k < window; ++k) {
    for (int l = 0; l <= L; ++l) {
      T.block(M * (k + l), N * k, M, N) = pa.E[static_cast<std::size_t>(l)];
    }
  }
  return T;
}

inline double min_singular_value(const Eigen::MatrixXd& A) {
  if (A.rows() < A.cols()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  return s.size() ? s[s.size() - 1] : 0.0;
}

inline double frame_conditioning(const PolyphaseAnalysis& pa, int window = 0) {
  if (window <= 0) window = std::max(8, 4 * (pa.L + 1));
  return min_singular_value(frame_matrix(pa, window));
}

struct ParityCheck {
  int Lp = 0;
  std::vector<Eigen::MatrixXd> P;  // P_0 ... P_{L'}, each (M-N) x M

  Eigen::MatrixXd stacked() const {
    const auto rows = P.front().rows();
    const auto cols = P.front().cols();
    Eigen::MatrixXd S(rows, cols * static_cast<Eigen::Index>(P.size()));
    for (std::size_t l = 0; l < P.size(); ++l) {
      S.middleCols(cols * static_cast<Eigen::Index>(l), cols) = P[l];
    }
    return S;
  }
};

// max_k || sum_l P_l E_{k-l} ||_inf (row-sum norm)
inline double verify_annihilation(const PolyphaseAnalysis& pa, const ParityCheck& pc) {
  const int L = pa.L;
  const int Lp = pc.Lp;
  double worst = 0.0;
  for (int k = 0; k <= L + Lp; ++k) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(pc.P.front().rows(), pa.N);
    for (int l = std::max(0, k - L); l <= std::min(Lp, k); ++l) {
      acc += pc.P[static_cast<std::size_t>(l)] * pa.E[static_cast<std::size_t>(k - l)];
    }
    if (acc.size()) worst = std::max(worst, acc.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return worst;
}

// Searches the smallest L' whose block convolution matrix has an
// (M-N)-dimensional left null space; its basis gives P_0 ... P_{L'}.
inline ParityCheck parity_from_polyphase(const PolyphaseAnalysis& pa, double tol = 1e-10,
                                         int max_order = 8) {
  const int M = pa.M, N = pa.N, L = pa.L;
  const int need = M - N;
  if (need == 0) {
    ParityCheck pc;
    pc.P.assign(1, Eigen::MatrixXd::Zero(0, M));
    return pc;
  }
  for (int Lp = 0; Lp <= max_order; ++Lp) {
    // Block (row l, col k) = E_{k-l}.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(M * (Lp + 1), N * (L + Lp + 1));
    for (int l = 0; l <= Lp; ++l) {
      for (int e = 0; e <= L; ++e) {
        T.block(M * l, N * (l + e), M, N) = pa.E[static_cast<std::size_t>(e)];
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s[0] : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s[k] > tol * smax) ++rank;
    }
    const Eigen::Index nullity = T.rows() - rank;
    if (nullity < need) continue;
    const Eigen::MatrixXd& U = svd.matrixU();
    // Left singular vectors are sorted by decreasing singular value; take
    // the trailing ones.
    ParityCheck pc;
    pc.Lp = Lp;
    pc.P.assign(static_cast<std::size_t>(Lp + 1), Eigen::MatrixXd::Zero(need, M));
    for (int r = 0; r < need; ++r) {
      const Eigen::VectorXd v = U.col(T.rows() - 1 - r);
      for (int l = 0; l <= Lp; ++l) {
        pc.P[static_cast<std::size_t>(l)].row(r) = v.segment(M * l, M).transpose();
      }
    }
    return pc;
  }
  throw std::runtime_error("no FIR annihilator found");
}

// Pseudo-inverse reconstruction over a sliding window of block equations.
// Edge unknowns of an interior window may be only partially observed, so the
// system is solved in the minimum-norm sense and every emitted block is
// checked to be exactly recoverable from consistent data.
class LsSynthesizer {
 public:
  static constexpr int kDefaultWindow = 8;

  explicit LsSynthesizer(PolyphaseAnalysis pa, int window = kDefaultWindow)
      : pa_(std::move(pa)), window_(window) {
    if (window_ < 2 * (pa_.L + 1)) {
      throw std::invalid_argument("synthesize_ls: window must be at least 2(L+1)");
    }
    lead_ = (window_ - 1 - pa_.L) / 2;
    interior_ = solver(window_system(pa_, window_, false), pa_.L + lead_, pa_.L + window_ - 1);
    start_ = solver(window_system(pa_, window_, true), 0, window_ - 1);
  }

  const PolyphaseAnalysis& analysis() const noexcept { return pa_; }
  int window() const noexcept { return window_; }

  BlockSequence synthesize(const BlockSequence& y) const {
    const int nb = static_cast<int>(y.size());
    const int N = pa_.N, L = pa_.L;
    BlockSequence x(y.size(), Eigen::VectorXd::Zero(N));
    if (nb == 0) return x;
    if (nb < window_) {
      // Short sequences: one system from the start, all blocks at once.
      const Eigen::MatrixXd R = solver(window_system(pa_, nb, true), 0, nb - 1);
      const Eigen::VectorXd xs = R * stack(y, 0, nb);
      for (int i = 0; i < nb; ++i) x[static_cast<std::size_t>(i)] = xs.segment(N * i, N);
      return x;
    }
    for (int i = 0; i < nb; ++i) {
      const int s = std::clamp(i - lead_, 0, nb - window_);
      const Eigen::VectorXd ys = stack(y, s, window_);
      if (s == 0) {
        x[static_cast<std::size_t>(i)] = start_.middleRows(N * i, N) * ys;
      } else {
        x[static_cast<std::size_t>(i)] = interior_.middleRows(N * (i - s + L), N) * ys;
      }
    }
    return x;
  }

 private:
  static Eigen::VectorXd stack(const BlockSequence& y, int s, int count) {
    const auto M = y.front().size();
    Eigen::VectorXd v(M * count);
    for (int j = 0; j < count; ++j) v.segment(M * j, M) = y[static_cast<std::size_t>(s + j)];
    return v;
  }

  // Minimum-norm pseudo-inverse of T. Unknown blocks first..last (the ones
  // that may be emitted) must satisfy (T^+ T) = I on their rows.
  Eigen::MatrixXd solver(const Eigen::MatrixXd& T, int first, int last) const {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-12);
    cod.compute(T);
    const Eigen::MatrixXd R = cod.pseudoInverse();
    const int N = pa_.N;
    const Eigen::MatrixXd recover = R * T;
    for (int b = first; b <= last; ++b) {
      const Eigen::MatrixXd rows = recover.middleRows(N * b, N);
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(N, T.cols());
      expect.middleCols(N * b, N).setIdentity();
      if ((rows - expect).cwiseAbs().maxCoeff() > 1e-8) {
        throw std::runtime_error("synthesize_ls: singular stacked system (bank is not a frame)");
      }
    }
    return R;
  }

  PolyphaseAnalysis pa_;
  int window_;
  int lead_ = 0;
  Eigen::MatrixXd interior_;
  Eigen::MatrixXd start_;
};

inline std::vector<double> synthesize_ls(const PolyphaseAnalysis& pa, const BlockSequence& y,
                                         int window = LsSynthesizer::kDefaultWindow) {
  return from_blocks(LsSynthesizer(pa, window).synthesize(y));
}

}  // namespace ofb
