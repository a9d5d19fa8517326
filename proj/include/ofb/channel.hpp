#pragma once

// BPSK over a memoryless AWGN channel, and the bit / index likelihoods used
// to rank candidate index vectors.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ofb/quantcode.hpp"

namespace ofb {

using SoftBlock = std::vector<double>;

// Unit-energy BPSK symbols, sigma2 = 10^(-snr_db/10) per real dimension.
struct ChannelModel {
  double snr_db = 0.0;
  double sigma2 = 1.0;
  bool noiseless = false;  // transmit adds no noise; likelihoods still use sigma2

  static ChannelModel from_snr_db(double snr_db) {
    ChannelModel ch;
    ch.snr_db = snr_db;
    ch.sigma2 = std::pow(10.0, -snr_db / 10.0);
    return ch;
  }
  static ChannelModel ideal() {
    ChannelModel ch = from_snr_db(60.0);
    ch.noiseless = true;
    return ch;
  }
};

// Seeded, splittable Gaussian stream: (seed, stream) picks an independent
// substream, and consecutive draws continue the same stream.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  double gaussian() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double bpsk_symbol(std::uint8_t b) noexcept { return b ? -1.0 : 1.0; }

inline SoftBlock transmit(std::span<const std::uint8_t> bits, const ChannelModel& ch,
                          NoiseStream& noise) {
  SoftBlock r(bits.size());
  const double sigma = std::sqrt(ch.sigma2);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    r[k] = bpsk_symbol(bits[k]);
    if (!ch.noiseless) r[k] += sigma * noise.gaussian();
  }
  return r;
}

// log g(r|b) up to a constant shared by both bit values.
inline double bit_loglik(double r, std::uint8_t b, const ChannelModel& ch) noexcept {
  const double d = r - bpsk_symbol(b);
  return -d * d / (2.0 * ch.sigma2);
}

inline double index_loglik(std::span<const double> r_sub, int u, int m, const QuantizerBank& q,
                           const ChannelModel& ch) {
  const int R = q[m].rate;
  if (static_cast<int>(r_sub.size()) != R) {
    throw std::invalid_argument("index_loglik: slice length does not match R_m");
  }
  const unsigned w = q.codeword(u, m);
  double ll = 0.0;
  for (int b = 0; b < R; ++b) {
    ll += bit_loglik(r_sub[static_cast<std::size_t>(b)],
                     static_cast<std::uint8_t>((w >> (R - 1 - b)) & 1u), ch);
  }
  return ll;
}

// Zero on ties.
inline BitBlock hard_decision(std::span<const double> r) {
  BitBlock b(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) b[k] = r[k] >= 0.0 ? 0 : 1;
  return b;
}

// Closed-form BPSK bit error rate, Q(1/sigma).
inline double bpsk_ber(double sigma2) { return 0.5 * std::erfc(1.0 / std::sqrt(2.0 * sigma2)); }

}  // namespace ofb
