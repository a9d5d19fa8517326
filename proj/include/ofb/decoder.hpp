#pragma once

// Consistent maximum-likelihood decoding of quantized OFB subbands.
//
// At each instant the N_max most likely index vectors are listed, those
// whose cell box cannot be reached by the filter bank from the current
// history boxes are discarded, the parity-check test optionally prunes the
// rest, and the most likely survivor is kept. The reconstructed input block
// is the center of its consistency box.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ofb/channel.hpp"
#include "ofb/contractor.hpp"
#include "ofb/filterbank.hpp"
#include "ofb/interval.hpp"
#include "ofb/quantcode.hpp"

namespace ofb {

struct Candidate {
  IndexVector u;
  double loglik = 0.0;
  int rank = 0;  // 1-based position in the list
};

namespace detail {

// Strictly non-increasing likelihood, ties broken lexicographically on u.
inline bool ranks_before(double ll_a, const IndexVector& a, double ll_b, const IndexVector& b) {
  if (ll_a != ll_b) return ll_a > ll_b;
  return a < b;
}

struct Option {
  double loglik;
  int u;
};

// Every index of subband m with its likelihood, best first, keeping `keep`.
// Codeword likelihoods are accumulated bit by bit (MSB first) from 0.
inline std::vector<Option> subband_options(std::span<const double> r_sub, int m,
                                           const QuantizerBank& q, const ChannelModel& ch,
                                           std::size_t keep) {
  const int R = q[m].rate;
  std::vector<double> ll{0.0};
  for (int b = 0; b < R; ++b) {
    std::vector<double> next(ll.size() * 2);
    const double c0 = bit_loglik(r_sub[static_cast<std::size_t>(b)], 0, ch);
    const double c1 = bit_loglik(r_sub[static_cast<std::size_t>(b)], 1, ch);
    for (std::size_t p = 0; p < ll.size(); ++p) {
      next[2 * p] = ll[p] + c0;
      next[2 * p + 1] = ll[p] + c1;
    }
    ll.swap(next);
  }
  std::vector<Option> opts(ll.size());
  for (std::size_t w = 0; w < ll.size(); ++w) {
    opts[w] = {ll[w], q.index_from_codeword(static_cast<unsigned>(w), m)};
  }
  keep = std::min(keep, opts.size());
  auto better = [](const Option& a, const Option& b) {
    if (a.loglik != b.loglik) return a.loglik > b.loglik;
    return a.u < b.u;
  };
  std::partial_sort(opts.begin(), opts.begin() + static_cast<std::ptrdiff_t>(keep), opts.end(),
                    better);
  opts.resize(keep);
  return opts;
}

}  // namespace detail

// M-algorithm over subbands: the n_max best partial index vectors survive
// each stage. Only the n_max best indexes of a subband can appear in the
// global top n_max, so the result equals the exhaustive top list.
inline std::vector<Candidate> top_candidates(std::span<const double> r_i, const QuantizerBank& q,
                                             const ChannelModel& ch, int n_max) {
  if (n_max < 1) throw std::invalid_argument("top_candidates: n_max must be >= 1");
  if (static_cast<int>(r_i.size()) != q.total_bits()) {
    throw std::invalid_argument("top_candidates: soft block has wrong length");
  }
  const auto keep = static_cast<std::size_t>(n_max);
  std::vector<Candidate> partial(1);
  for (int m = 0; m < q.M(); ++m) {
    const auto opts = detail::subband_options(
        r_i.subspan(static_cast<std::size_t>(q.bit_offset(m)), static_cast<std::size_t>(q[m].rate)),
        m, q, ch, keep);
    std::vector<Candidate> next;
    next.reserve(partial.size() * opts.size());
    for (const auto& p : partial) {
      for (const auto& o : opts) {
        Candidate c;
        c.u = p.u;
        c.u.push_back(o.u);
        c.loglik = p.loglik + o.loglik;
        next.push_back(std::move(c));
      }
    }
    const auto n = std::min(keep, next.size());
    std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(n), next.end(),
                      [](const Candidate& a, const Candidate& b) {
                        return detail::ranks_before(a.loglik, a.u, b.loglik, b.u);
                      });
    next.resize(n);
    partial.swap(next);
  }
  for (std::size_t k = 0; k < partial.size(); ++k) partial[k].rank = static_cast<int>(k + 1);
  return partial;
}

enum class StepFlag { kClean, kError };

enum class FallbackPolicy {
  kLeastSquares,  // LS point from the hard decision, boxed by the cell radii
  kInputBox,      // the whole input box [x]
};

struct DecoderConfig {
  int n_max = 20;
  bool use_pct = false;
  ContractorOptions contractor;
  FallbackPolicy fallback = FallbackPolicy::kLeastSquares;
};

// Sliding history of verified boxes, oldest first.
struct DecoderState {
  std::deque<Box> x_hist;  // [x^{i-L}] ... [x^{i-1}]
  std::deque<Box> y_hist;  // [y^{i-L'}] ... [y^{i-1}]
  Box input_box;
  std::vector<StepFlag> flags;
};

struct StepResult {
  Box x_box;
  Box y_box;
  IndexVector u_hat;
  StepFlag flag = StepFlag::kClean;
  int chosen_rank = 0;    // rank of u_hat in the candidate list
  int n_consistent = 0;   // |L_cand^{U1}|
  bool fallback = false;  // error branch produced an empty box
};

struct DecodeResult {
  std::vector<double> x_hat;
  std::vector<StepResult> steps;

  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(
        steps.begin(), steps.end(), [](const StepResult& s) { return s.flag == StepFlag::kError; }));
  }
};

class ConsistentDecoder {
 public:
  ConsistentDecoder(PolyphaseAnalysis pa, ParityCheck pc, QuantizerBank q, ChannelModel ch,
                    Box input_box, DecoderConfig cfg = {})
      : pa_(std::move(pa)),
        pc_(std::move(pc)),
        q_(std::move(q)),
        ch_(ch),
        input_box_(std::move(input_box)),
        cfg_(cfg),
        contractor_(pa_.E.front(), cfg.contractor),
        joint_(stacked_taps(pa_), cfg.contractor) {
    if (cfg_.n_max < 1) throw std::invalid_argument("decoder: n_max must be >= 1");
    if (q_.M() != pa_.M) throw std::invalid_argument("decoder: quantizer and bank disagree on M");
    require_same_dim(input_box_.dim(), static_cast<std::size_t>(pa_.N), "decoder input box");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(pa_.E.front());
    e0_pinv_ = cod.pseudoInverse();
  }

  const PolyphaseAnalysis& analysis() const noexcept { return pa_; }
  const ParityCheck& parity() const noexcept { return pc_; }
  const QuantizerBank& quantizer() const noexcept { return q_; }
  const ChannelModel& channel() const noexcept { return ch_; }
  const DecoderConfig& config() const noexcept { return cfg_; }
  const Box& input_box() const noexcept { return input_box_; }

  // Histories start at the degenerate box [0, 0], exact under x^j = 0 for j < 0.
  DecoderState initial_state() const {
    DecoderState st;
    st.input_box = input_box_;
    for (int l = 0; l < pa_.L; ++l) st.x_hist.emplace_back(static_cast<std::size_t>(pa_.N));
    for (int l = 0; l < pc_.Lp; ++l) st.y_hist.emplace_back(static_cast<std::size_t>(pa_.M));
    return st;
  }

  // Outer approximation of X^i(u); EMPTY proves u is not consistent with
  // the history boxes.
  Box consistency_box(const IndexVector& u, const DecoderState& st) const {
    return consistency_box(u, history_reach(st), st);
  }

  // False proves no OFB output through the y-history boxes lands in the
  // cell of u.
  bool pct(const IndexVector& u, const DecoderState& st) const {
    return pct(u, parity_history(st));
  }

  StepResult step(std::span<const double> r_i, DecoderState& st) const {
    const auto cands = top_candidates(r_i, q_, ch_, cfg_.n_max);
    const Box reach = history_reach(st);

    std::vector<std::pair<const Candidate*, Box>> consistent;
    for (const auto& c : cands) {
      Box xb = consistency_box(c.u, reach, st);
      if (!xb.is_empty()) consistent.emplace_back(&c, std::move(xb));
    }

    StepResult res;
    res.n_consistent = static_cast<int>(consistent.size());
    if (consistent.empty()) {
      res.flag = StepFlag::kError;
      res.fallback = true;
      res.u_hat = cands.front().u;
      res.chosen_rank = cands.front().rank;
      res.x_box = fallback_box(r_i, st);
      res.y_box = q_.cell_box(res.u_hat);
    } else {
      std::size_t pick = 0;
      bool clean = true;
      if (cfg_.use_pct) {
        const Box ph = parity_history(st);
        clean = false;
        for (std::size_t k = 0; k < consistent.size(); ++k) {
          if (pct(consistent[k].first->u, ph)) {
            pick = k;
            clean = true;
            break;
          }
        }
      }
      res.flag = clean ? StepFlag::kClean : StepFlag::kError;
      res.u_hat = consistent[pick].first->u;
      res.chosen_rank = consistent[pick].first->rank;
      res.x_box = std::move(consistent[pick].second);
      res.y_box = q_.cell_box(res.u_hat);
    }
    advance(st, res);
    return res;
  }

  DecodeResult decode_sequence(std::span<const double> r) const {
    const auto per = static_cast<std::size_t>(q_.total_bits());
    if (r.size() % per != 0) {
      throw std::invalid_argument("decode_sequence: stream length is not a whole number of blocks");
    }
    DecodeResult out;
    DecoderState st = initial_state();
    const std::size_t nb = r.size() / per;
    out.steps.reserve(nb);
    out.x_hat.reserve(nb * static_cast<std::size_t>(pa_.N));
    for (std::size_t i = 0; i < nb; ++i) {
      out.steps.push_back(step(r.subspan(i * per, per), st));
      const Eigen::VectorXd c = out.steps.back().x_box.center();
      out.x_hat.insert(out.x_hat.end(), c.data(), c.data() + c.size());
    }
    return out;
  }

 private:
  // sum_{l=1}^{L} E_l [x^{i-l}]
  Box history_reach(const DecoderState& st) const {
    Box acc(static_cast<std::size_t>(pa_.M));
    for (int l = 1; l <= pa_.L; ++l) {
      acc = acc + matvec_box(pa_.E[static_cast<std::size_t>(l)],
                             st.x_hist[static_cast<std::size_t>(pa_.L - l)]);
    }
    return acc;
  }

  // sum_{l=1}^{L'} P_l [y^{i-l}]
  Box parity_history(const DecoderState& st) const {
    const auto rows = static_cast<std::size_t>(pc_.P.front().rows());
    Box acc(rows);
    for (int l = 1; l <= pc_.Lp; ++l) {
      acc = acc + matvec_box(pc_.P[static_cast<std::size_t>(l)],
                             st.y_hist[static_cast<std::size_t>(pc_.Lp - l)]);
    }
    return acc;
  }

  // The LP hull works on the joint polytope over (x^i, x^{i-1}, .., x^{i-L})
  // and projects, so it is the exact hull of X^i(u). The interval
  // contractor uses the enclosure of the history term instead.
  Box consistency_box(const IndexVector& u, const Box& reach, const DecoderState& st) const {
    if (cfg_.contractor.method != HullMethod::kLinearProgram || pa_.L == 0) {
      return contractor_.contract(st.input_box, q_.cell_box(u) - reach);
    }
    const auto N = static_cast<std::size_t>(pa_.N);
    Box x0(N * static_cast<std::size_t>(pa_.L + 1));
    for (std::size_t k = 0; k < N; ++k) x0[k] = st.input_box[k];
    for (int l = 1; l <= pa_.L; ++l) {
      const Box& h = st.x_hist[static_cast<std::size_t>(pa_.L - l)];
      for (std::size_t k = 0; k < N; ++k) x0[static_cast<std::size_t>(l) * N + k] = h[k];
    }
    const Box joint = joint_.contract(x0, q_.cell_box(u));
    if (joint.is_empty()) return Box::empty(N);
    Box out(N);
    for (std::size_t k = 0; k < N; ++k) out[k] = joint[k];
    return out;
  }

  static Eigen::MatrixXd stacked_taps(const PolyphaseAnalysis& pa) {
    Eigen::MatrixXd A(pa.M, pa.N * (pa.L + 1));
    for (int l = 0; l <= pa.L; ++l) A.middleCols(l * pa.N, pa.N) = pa.E[static_cast<std::size_t>(l)];
    return A;
  }

  bool pct(const IndexVector& u, const Box& history) const {
    const Box residual = history + matvec_box(pc_.P.front(), q_.cell_box(u));
    return std::all_of(residual.begin(), residual.end(),
                       [](const Interval& c) { return c.contains(0.0); });
  }

  Box fallback_box(std::span<const double> r_i, const DecoderState& st) const {
    if (cfg_.fallback == FallbackPolicy::kInputBox) return st.input_box;
    const IndexVector u = q_.debinarize(hard_decision(r_i));
    Eigen::VectorXd rhs = q_.dequantize(u);
    for (int l = 1; l <= pa_.L; ++l) {
      rhs -= pa_.E[static_cast<std::size_t>(l)] *
             st.x_hist[static_cast<std::size_t>(pa_.L - l)].center();
    }
    const Eigen::VectorXd p = e0_pinv_ * rhs;
    const Box cells = q_.cell_box(u);
    Eigen::VectorXd cell_rad(pa_.M);
    for (int m = 0; m < pa_.M; ++m) cell_rad[m] = cells[static_cast<std::size_t>(m)].radius();
    const Eigen::VectorXd rad = e0_pinv_.cwiseAbs() * cell_rad;
    Box out(static_cast<std::size_t>(pa_.N));
    for (int k = 0; k < pa_.N; ++k) {
      const Interval& lim = st.input_box[static_cast<std::size_t>(k)];
      const double lo = std::clamp(p[k] - rad[k], lim.lo(), lim.hi());
      const double hi = std::clamp(p[k] + rad[k], lim.lo(), lim.hi());
      out[static_cast<std::size_t>(k)] = Interval(lo, hi);
    }
    return out;
  }

  void advance(DecoderState& st, const StepResult& res) const {
    if (pa_.L > 0) {
      st.x_hist.pop_front();
      st.x_hist.push_back(res.x_box);
    }
    if (pc_.Lp > 0) {
      st.y_hist.pop_front();
      st.y_hist.push_back(res.y_box);
    }
    st.flags.push_back(res.flag);
  }

  PolyphaseAnalysis pa_;
  ParityCheck pc_;
  QuantizerBank q_;
  ChannelModel ch_;
  Box input_box_;
  DecoderConfig cfg_;
  AffineContractor contractor_;
  AffineContractor joint_;  // [E_0 .. E_L], used by the LP hull
  Eigen::MatrixXd e0_pinv_;
};

// Per-instant diagnostics: instant, flag, chosen rank, |L_cand^{U1}|, max box width.
inline void write_diagnostics_csv(std::ostream& os, const DecodeResult& res) {
  os << "instant,flag,chosen_rank,n_consistent,box_width_max\n";
  for (std::size_t i = 0; i < res.steps.size(); ++i) {
    const auto& s = res.steps[i];
    os << i << ',' << (s.flag == StepFlag::kClean ? "clean" : "error") << ',' << s.chosen_rank
       << ',' << s.n_consistent << ',' << s.x_box.max_width() << '\n';
  }
}

// Hard decision, inverse quantization, least-squares synthesis.
inline BlockSequence dequantized_subbands(std::span<const double> r, const QuantizerBank& q) {
  const auto per = static_cast<std::size_t>(q.total_bits());
  if (r.size() % per != 0) {
    throw std::invalid_argument("decode_classical: stream length is not a whole number of blocks");
  }
  BlockSequence y;
  y.reserve(r.size() / per);
  for (std::size_t off = 0; off < r.size(); off += per) {
    y.push_back(q.dequantize(q.debinarize(hard_decision(r.subspan(off, per)))));
  }
  return y;
}

inline std::vector<double> decode_classical(std::span<const double> r, const QuantizerBank& q,
                                            const LsSynthesizer& synth) {
  return from_blocks(synth.synthesize(dequantized_subbands(r, q)));
}

}  // namespace ofb
