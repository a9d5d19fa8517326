#pragma once

// Per-subband uniform midtread quantizers, noise-equalizing rate allocation
// and the index <-> bit mapping of the transmit path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ofb/filterbank.hpp"
#include "ofb/interval.hpp"

namespace ofb {

using IndexVector = std::vector<int>;
using BitBlock = std::vector<std::uint8_t>;

enum class IndexMapping { kNatural, kGray };

inline constexpr int kMaxRate = 16;

struct SubbandQuantizer {
  double step = 1.0;
  int rate = 1;
  Interval range{0.0};  // subband range box [y_m]
  double center = 0.0;  // reconstruction levels sit at center + u * step

  int offset() const noexcept { return 1 << (rate - 1); }
  int min_index() const noexcept { return -offset(); }
  int max_index() const noexcept { return offset() - 1; }
};

class QuantizerBank {
 public:
  QuantizerBank() = default;
  QuantizerBank(std::vector<SubbandQuantizer> q, IndexMapping mapping = IndexMapping::kNatural)
      : q_(std::move(q)), mapping_(mapping) {
    total_bits_ = 0;
    for (const auto& s : q_) {
      if (!(s.step > 0.0)) throw std::invalid_argument("quantizer: step must be positive");
      if (s.rate < 1 || s.rate > kMaxRate) throw std::invalid_argument("quantizer: rate out of range");
      if (std::ldexp(s.step, s.rate) < s.range.width() * (1.0 - 1e-12)) {
        throw std::invalid_argument("quantizer: cells do not cover the subband range");
      }
      bit_offset_.push_back(total_bits_);
      total_bits_ += s.rate;
    }
  }

  int M() const noexcept { return static_cast<int>(q_.size()); }
  int total_bits() const noexcept { return total_bits_; }
  int bit_offset(int m) const { return bit_offset_[static_cast<std::size_t>(m)]; }
  IndexMapping mapping() const noexcept { return mapping_; }
  const SubbandQuantizer& operator[](int m) const { return q_[static_cast<std::size_t>(m)]; }

  // Midtread, ties away from zero, clamped to the index range.
  int quantize(double y, int m) const {
    const auto& s = (*this)[m];
    const double v = std::round((y - s.center) / s.step);
    return static_cast<int>(std::clamp(v, static_cast<double>(s.min_index()),
                                       static_cast<double>(s.max_index())));
  }

  double dequantize(int u, int m) const {
    const auto& s = (*this)[m];
    return s.center + u * s.step;
  }

  // Decision region of u. Saturated cells extend to the edge of [y_m].
  Interval cell_box(int u, int m) const {
    const auto& s = (*this)[m];
    Interval cell = Interval(s.center) + s.step * Interval(u - 0.5, u + 0.5);
    if (u <= s.min_index()) cell = Interval(std::min(cell.lo(), s.range.lo()), cell.hi());
    if (u >= s.max_index()) cell = Interval(cell.lo(), std::max(cell.hi(), s.range.hi()));
    return cell;
  }

  IndexVector quantize(const Eigen::VectorXd& y) const {
    IndexVector u(static_cast<std::size_t>(M()));
    for (int m = 0; m < M(); ++m) u[static_cast<std::size_t>(m)] = quantize(y[m], m);
    return u;
  }

  Eigen::VectorXd dequantize(const IndexVector& u) const {
    check_dim(u);
    Eigen::VectorXd y(M());
    for (int m = 0; m < M(); ++m) y[m] = dequantize(u[static_cast<std::size_t>(m)], m);
    return y;
  }

  Box cell_box(const IndexVector& u) const {
    check_dim(u);
    Box b(static_cast<std::size_t>(M()));
    for (int m = 0; m < M(); ++m) b[static_cast<std::size_t>(m)] = cell_box(u[static_cast<std::size_t>(m)], m);
    return b;
  }

  // Codeword of index u on R_m bits (natural binary of u + o_m, or its Gray code).
  unsigned codeword(int u, int m) const {
    const auto& s = (*this)[m];
    if (u < s.min_index() || u > s.max_index()) {
      throw std::out_of_range("quantizer: index " + std::to_string(u) + " out of range");
    }
    const auto v = static_cast<unsigned>(u + s.offset());
    return mapping_ == IndexMapping::kGray ? (v ^ (v >> 1)) : v;
  }

  int index_from_codeword(unsigned w, int m) const {
    const auto& s = (*this)[m];
    unsigned v = w;
    if (mapping_ == IndexMapping::kGray) {
      for (unsigned shift = w >> 1; shift; shift >>= 1) v ^= shift;
    }
    return static_cast<int>(v) - s.offset();
  }

  // MSB first, subbands concatenated in order.
  BitBlock binarize(const IndexVector& u) const {
    check_dim(u);
    BitBlock bits(static_cast<std::size_t>(total_bits_));
    for (int m = 0; m < M(); ++m) {
      const unsigned w = codeword(u[static_cast<std::size_t>(m)], m);
      const int R = (*this)[m].rate;
      for (int b = 0; b < R; ++b) {
        bits[static_cast<std::size_t>(bit_offset(m) + b)] =
            static_cast<std::uint8_t>((w >> (R - 1 - b)) & 1u);
      }
    }
    return bits;
  }

  IndexVector debinarize(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != total_bits_) {
      throw std::invalid_argument("debinarize: expected " + std::to_string(total_bits_) +
                                  " bits, got " + std::to_string(bits.size()));
    }
    IndexVector u(static_cast<std::size_t>(M()));
    for (int m = 0; m < M(); ++m) {
      unsigned w = 0;
      for (int b = 0; b < (*this)[m].rate; ++b) {
        w = (w << 1) | (bits[static_cast<std::size_t>(bit_offset(m) + b)] & 1u);
      }
      u[static_cast<std::size_t>(m)] = index_from_codeword(w, m);
    }
    return u;
  }

 private:
  void check_dim(const IndexVector& u) const {
    if (static_cast<int>(u.size()) != M()) throw std::invalid_argument("index vector has wrong size");
  }

  std::vector<SubbandQuantizer> q_;
  std::vector<int> bit_offset_;
  int total_bits_ = 0;
  IndexMapping mapping_ = IndexMapping::kNatural;
};

// [y] = E_{L:0} [x]^{L+1}
inline Box subband_ranges(const PolyphaseAnalysis& pa, const Box& input_box) {
  std::vector<Interval> rep;
  for (int l = 0; l <= pa.L; ++l) rep.insert(rep.end(), input_box.begin(), input_box.end());
  return matvec_box(pa.stacked(), Box(std::move(rep)));
}

// Equal steps give equal noise variance delta^2 / 12 in every subband; the
// rate is the smallest that covers the subband range.
inline QuantizerBank allocate_rates(const Box& subband_boxes, double delta,
                                    IndexMapping mapping = IndexMapping::kNatural) {
  if (!(delta > 0.0)) throw std::invalid_argument("allocate_rates: delta must be positive");
  if (subband_boxes.is_empty() || subband_boxes.dim() == 0) {
    throw std::invalid_argument("allocate_rates: subband boxes must be non-empty");
  }
  std::vector<SubbandQuantizer> q;
  for (const auto& range : subband_boxes) {
    SubbandQuantizer s;
    s.step = delta;
    s.range = range;
    s.center = range.mid();
    if (std::abs(s.center) <= 1e-12 * range.width()) s.center = 0.0;
    const double ratio = range.width() / delta;
    const int need = ratio <= 2.0 ? 1 : static_cast<int>(std::ceil(std::log2(ratio) - 1e-9));
    if (need > kMaxRate) throw std::invalid_argument("rate overflow");
    s.rate = std::clamp(need, 1, kMaxRate);
    q.push_back(s);
  }
  return QuantizerBank(std::move(q), mapping);
}

}  // namespace ofb
