#pragma once

// Signal sources, reconstruction SNR, experiment configuration and the
// Monte-Carlo sweep over channel SNR.

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ofb/channel.hpp"
#include "ofb/contractor.hpp"
#include "ofb/decoder.hpp"
#include "ofb/filterbank.hpp"
#include "ofb/quantcode.hpp"

namespace ofb {

// ---------------------------------------------------------------- sources

inline std::vector<double> gen_ar1(std::size_t n, double rho, NoiseStream& rng, double clip = 4.0) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("gen_ar1: |rho| must be < 1");
  std::vector<double> x(n);
  const double innov = std::sqrt(1.0 - rho * rho);
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = rng.gaussian();
    prev = k == 0 ? w : rho * prev + innov * w;
    x[k] = std::clamp(prev, -clip, clip);
  }
  return x;
}

inline std::vector<double> gen_ar1(std::size_t n, double rho, std::uint64_t seed, double clip = 4.0) {
  NoiseStream rng(seed, 0);
  return gen_ar1(n, rho, rng, clip);
}

class PgmError : public std::runtime_error {
 public:
  PgmError(const std::string& what, std::size_t offset)
      : std::runtime_error("pgm: " + what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

inline PgmImage parse_pgm(const std::string& data) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) {
    skip_ws();
    const std::size_t start = pos;
    long v = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
      v = v * 10 + (data[pos] - '0');
      if (v > 1'000'000) throw PgmError(std::string(what) + " too large", start);
      ++pos;
    }
    if (pos == start) throw PgmError(std::string("expected ") + what, start);
    return static_cast<int>(v);
  };

  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5')) {
    throw PgmError("expected magic P2 or P5", 0);
  }
  const bool binary = data[1] == '5';
  pos = 2;
  PgmImage img;
  img.width = read_uint("width");
  img.height = read_uint("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_uint("maxval");
  if (maxval < 1 || maxval > 255) throw PgmError("only 8-bit depth is supported", maxval_at);
  if (img.width < 1 || img.height < 1) throw PgmError("empty image", maxval_at);
  const auto count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  if (binary) {
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
      throw PgmError("expected single whitespace before raster", pos);
    }
    ++pos;
    if (data.size() - pos < count) throw PgmError("truncated raster", data.size());
    for (std::size_t k = 0; k < count; ++k) img.pixels[k] = static_cast<std::uint8_t>(data[pos + k]);
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t at = pos;
      const int v = read_uint("pixel value");
      if (v > maxval) throw PgmError("pixel exceeds maxval", at);
      img.pixels[k] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

// Concatenates the requested rows and keeps the first `count` samples.
inline std::vector<double> load_pgm_lines(const std::string& path, const std::vector<int>& rows,
                                          std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pgm file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const PgmImage img = parse_pgm(ss.str());
  std::vector<double> out;
  for (int r : rows) {
    if (r < 0 || r >= img.height) {
      throw std::out_of_range("pgm: row " + std::to_string(r) + " outside image height " +
                              std::to_string(img.height));
    }
    const auto base = static_cast<std::size_t>(r) * static_cast<std::size_t>(img.width);
    for (int c = 0; c < img.width; ++c) out.push_back(img.pixels[base + static_cast<std::size_t>(c)]);
  }
  if (count > out.size()) {
    throw std::out_of_range("pgm: requested " + std::to_string(count) + " samples, only " +
                            std::to_string(out.size()) + " available");
  }
  out.resize(count);
  return out;
}

// ---------------------------------------------------------------- metrics

inline constexpr double kSnrCapDb = 120.0;

inline double reconstruction_snr(std::span<const double> x, std::span<const double> x_hat,
                                 std::size_t skip) {
  if (x.size() != x_hat.size()) throw std::invalid_argument("reconstruction_snr: length mismatch");
  double sig = 0.0;
  double err = 0.0;
  for (std::size_t k = skip; k < x.size(); ++k) {
    sig += x[k] * x[k];
    const double d = x[k] - x_hat[k];
    err += d * d;
  }
  if (sig == 0.0) throw std::invalid_argument("reconstruction_snr: signal is all zero after skip");
  if (err == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(sig / err));
}

// ---------------------------------------------------------------- config

struct ExperimentConfig {
  std::string source = "ar1";  // ar1 | pgm
  double rho = 0.9;
  std::size_t n = 2000;
  double clip = 4.0;
  std::string pgm_path;
  std::vector<int> pgm_rows{55, 56, 57, 58};
  std::size_t pgm_count = 2000;

  std::string bank = "data/haar_6x4.txt";
  double delta = 0.8;
  IndexMapping mapping = IndexMapping::kNatural;
  int window = LsSynthesizer::kDefaultWindow;

  std::vector<double> snr_db{6, 7, 8, 9, 10, 11};
  int realizations = 50;
  int n_max = 20;
  bool use_pct = true;  // receiver shown by `simulate`
  HullMethod hull = HullMethod::kForwardBackward;
  bool precondition = true;
  bool noiseless = false;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string output;

  void validate() const {
    if (source != "ar1" && source != "pgm") throw std::invalid_argument("config: source must be ar1 or pgm");
    if (source == "pgm" && pgm_path.empty()) throw std::invalid_argument("config: pgm source needs pgm_path");
    if (realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");
    if (snr_db.empty()) throw std::invalid_argument("config: snr_db list is empty");
    if (n_max < 1) throw std::invalid_argument("config: n_max must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (!(clip > 0.0)) throw std::invalid_argument("config: clip must be positive");
  }

  std::size_t samples() const { return source == "pgm" ? pgm_count : n; }
};

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& v) {
  std::vector<T> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream conv(item);
    T x{};
    conv >> x;
    if (conv.fail() || !conv.eof()) throw std::invalid_argument("config: bad list item '" + item + "'");
    out.push_back(x);
  }
  return out;
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& v) {
  std::istringstream conv(v);
  T x{};
  conv >> x;
  if (conv.fail() || !conv.eof()) throw std::invalid_argument("config: bad value for '" + key + "': " + v);
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}
}  // namespace detail

// key = value lines, '#' comments. Unknown keys are errors.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    using detail::parse_scalar;
    if (key == "source") cfg.source = val;
    else if (key == "rho") cfg.rho = parse_scalar<double>(key, val);
    else if (key == "n") cfg.n = parse_scalar<std::size_t>(key, val);
    else if (key == "clip") cfg.clip = parse_scalar<double>(key, val);
    else if (key == "pgm_path") cfg.pgm_path = val;
    else if (key == "pgm_rows") cfg.pgm_rows = detail::parse_list<int>(val);
    else if (key == "pgm_count") cfg.pgm_count = parse_scalar<std::size_t>(key, val);
    else if (key == "bank") cfg.bank = val;
    else if (key == "delta") cfg.delta = parse_scalar<double>(key, val);
    else if (key == "mapping") {
      if (val == "natural") cfg.mapping = IndexMapping::kNatural;
      else if (val == "gray") cfg.mapping = IndexMapping::kGray;
      else throw std::invalid_argument("config: mapping must be natural or gray");
    } else if (key == "window") cfg.window = parse_scalar<int>(key, val);
    else if (key == "snr_db") cfg.snr_db = detail::parse_list<double>(val);
    else if (key == "realizations") cfg.realizations = parse_scalar<int>(key, val);
    else if (key == "n_max") cfg.n_max = parse_scalar<int>(key, val);
    else if (key == "use_pct") cfg.use_pct = detail::parse_bool(key, val);
    else if (key == "hull") {
      if (val == "interval") cfg.hull = HullMethod::kForwardBackward;
      else if (val == "lp") cfg.hull = HullMethod::kLinearProgram;
      else throw std::invalid_argument("config: hull must be interval or lp");
    } else if (key == "precondition") cfg.precondition = detail::parse_bool(key, val);
    else if (key == "noiseless") cfg.noiseless = detail::parse_bool(key, val);
    else if (key == "seed") cfg.seed = parse_scalar<std::uint64_t>(key, val);
    else if (key == "threads") cfg.threads = parse_scalar<int>(key, val);
    else if (key == "output") cfg.output = val;
    else throw std::invalid_argument("config: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

// Relative bank / pgm paths are tried as given, then next to the config file.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  ExperimentConfig cfg = parse_config(in);
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (p.empty() || fs::path(p).is_absolute() || fs::exists(p)) return;
    const fs::path alt = dir / p;
    if (fs::exists(alt)) p = alt.string();
  };
  resolve(cfg.bank);
  resolve(cfg.pgm_path);
  return cfg;
}

// ---------------------------------------------------------------- pipeline

struct Encoded {
  BlockSequence y;
  std::vector<IndexVector> u;
  BitBlock bits;
};

// Everything shared read-only by the workers of a sweep.
class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& cfg)
      : Pipeline(cfg, load_filter_bank(cfg.bank)) {}

  Pipeline(const ExperimentConfig& cfg, const FilterBank& fb)
      : cfg_(cfg),
        pa_(polyphase_from_filters(fb)),
        pc_(parity_from_polyphase(pa_)),
        input_box_(static_cast<std::size_t>(pa_.N),
                   cfg.source == "pgm" ? Interval(0.0, 255.0) : Interval(-cfg.clip, cfg.clip)),
        q_(allocate_rates(subband_ranges(pa_, input_box_), cfg.delta, cfg.mapping)),
        synth_(pa_, cfg.window) {
    cfg_.validate();
    const double sv = frame_conditioning(pa_);
    if (!(sv > 1e-8)) {
      throw std::runtime_error("filter bank is not a frame (smallest singular value " +
                               std::to_string(sv) + ")");
    }
  }

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const PolyphaseAnalysis& analysis() const noexcept { return pa_; }
  const ParityCheck& parity() const noexcept { return pc_; }
  const QuantizerBank& quantizer() const noexcept { return q_; }
  const LsSynthesizer& synthesizer() const noexcept { return synth_; }
  const Box& input_box() const noexcept { return input_box_; }

  std::size_t warmup_samples() const {
    return static_cast<std::size_t>((pa_.L + pc_.Lp + synth_.window()) * pa_.N);
  }

  std::vector<double> source(int realization) const {
    if (cfg_.source == "pgm") return load_pgm_lines(cfg_.pgm_path, cfg_.pgm_rows, cfg_.pgm_count);
    NoiseStream rng(cfg_.seed, source_stream(realization));
    return gen_ar1(cfg_.n, cfg_.rho, rng, cfg_.clip);
  }

  Encoded encode(std::span<const double> x) const {
    Encoded e;
    e.y = analyze(pa_, x);
    e.bits.reserve(e.y.size() * static_cast<std::size_t>(q_.total_bits()));
    for (const auto& yi : e.y) {
      e.u.push_back(q_.quantize(yi));
      const BitBlock b = q_.binarize(e.u.back());
      e.bits.insert(e.bits.end(), b.begin(), b.end());
    }
    return e;
  }

  ChannelModel channel(double snr_db) const {
    ChannelModel ch = ChannelModel::from_snr_db(snr_db);
    ch.noiseless = cfg_.noiseless;
    return ch;
  }

  ConsistentDecoder decoder(const ChannelModel& ch, bool use_pct) const {
    DecoderConfig dc;
    dc.n_max = cfg_.n_max;
    dc.use_pct = use_pct;
    dc.contractor.method = cfg_.hull;
    dc.contractor.precondition = cfg_.precondition;
    return ConsistentDecoder(pa_, pc_, q_, ch, input_box_, dc);
  }

  // Stream ids: sources use the top bit, channels (realization, snr index).
  static std::uint64_t source_stream(int realization) {
    return (std::uint64_t{1} << 63) | static_cast<std::uint64_t>(realization);
  }
  static std::uint64_t channel_stream(int realization, std::size_t snr_index) {
    return (static_cast<std::uint64_t>(realization) << 16) | snr_index;
  }

 private:
  ExperimentConfig cfg_;
  PolyphaseAnalysis pa_;
  ParityCheck pc_;
  Box input_box_;
  QuantizerBank q_;
  LsSynthesizer synth_;
};

// ---------------------------------------------------------------- sweep

enum Receiver : std::size_t { kClassical = 0, kProposed = 1, kProposedPct = 2, kReference = 3 };
inline constexpr std::array<const char*, 4> kReceiverNames{"classical", "proposed", "proposed_pct",
                                                           "reference"};

struct ReceiverStats {
  double mean_snr_db = 0.0;
  double std_snr_db = 0.0;
  // classical: hard-decision bit error rate; proposed: fraction of ERROR
  // instants; reference: 0.
  double error_rate = 0.0;
};

struct SnrPoint {
  double snr_db = 0.0;
  std::array<ReceiverStats, 4> receivers{};
};

struct RealizationResult {
  std::array<double, 4> snr{};
  std::array<double, 4> error_rate{};
};

inline std::vector<double> truncated(std::vector<double> v, std::size_t n) {
  v.resize(n);
  return v;
}

// One channel draw through all receivers. `reference_snr` is the
// quantization-only SNR of this source realization.
inline RealizationResult run_point(const Pipeline& pl, const std::vector<double>& x,
                                   const Encoded& enc, double reference_snr,
                                   const ConsistentDecoder& plain, const ConsistentDecoder& with_pct,
                                   NoiseStream& noise) {
  const std::size_t skip = pl.warmup_samples();
  const SoftBlock r = transmit(enc.bits, plain.channel(), noise);
  RealizationResult out;

  const BitBlock hard = hard_decision(r);
  std::size_t bit_errors = 0;
  for (std::size_t k = 0; k < hard.size(); ++k) bit_errors += hard[k] != enc.bits[k];
  out.snr[kClassical] = reconstruction_snr(
      x, truncated(decode_classical(r, pl.quantizer(), pl.synthesizer()), x.size()), skip);
  out.error_rate[kClassical] = static_cast<double>(bit_errors) / static_cast<double>(hard.size());

  const DecodeResult a = plain.decode_sequence(r);
  out.snr[kProposed] = reconstruction_snr(x, truncated(a.x_hat, x.size()), skip);
  out.error_rate[kProposed] = static_cast<double>(a.error_count()) / static_cast<double>(a.steps.size());

  const DecodeResult b = with_pct.decode_sequence(r);
  out.snr[kProposedPct] = reconstruction_snr(x, truncated(b.x_hat, x.size()), skip);
  out.error_rate[kProposedPct] =
      static_cast<double>(b.error_count()) / static_cast<double>(b.steps.size());

  out.snr[kReference] = reference_snr;
  return out;
}

inline double quantization_only_snr(const Pipeline& pl, const std::vector<double>& x,
                                    const Encoded& enc) {
  BlockSequence y;
  y.reserve(enc.u.size());
  for (const auto& u : enc.u) y.push_back(pl.quantizer().dequantize(u));
  return reconstruction_snr(x, truncated(from_blocks(pl.synthesizer().synthesize(y)), x.size()),
                            pl.warmup_samples());
}

// Runs fn(0..count-1) on `threads` workers; each index is processed once.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

// Source realization r is shared by every SNR point (paired comparison);
// each (realization, snr) pair draws its own channel substream. Results are
// reduced in (snr, realization) order, so worker count never changes them.
inline std::vector<SnrPoint> run_sweep(const Pipeline& pl) {
  const auto& cfg = pl.config();
  const auto R = static_cast<std::size_t>(cfg.realizations);
  const std::size_t S = cfg.snr_db.size();

  std::vector<std::vector<double>> sources(R);
  std::vector<Encoded> encoded(R);
  std::vector<double> reference(R);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    try {
      sources[r] = pl.source(static_cast<int>(r));
      encoded[r] = pl.encode(sources[r]);
      reference[r] = quantization_only_snr(pl, sources[r], encoded[r]);
    } catch (const std::exception& e) {
      throw std::runtime_error("realization " + std::to_string(r) + ": " + e.what());
    }
  });

  std::vector<ConsistentDecoder> plain;
  std::vector<ConsistentDecoder> with_pct;
  for (double s : cfg.snr_db) {
    plain.push_back(pl.decoder(pl.channel(s), false));
    with_pct.push_back(pl.decoder(pl.channel(s), true));
  }

  std::vector<RealizationResult> results(R * S);
  parallel_for(R * S, cfg.threads, [&](std::size_t item) {
    const std::size_t r = item / S;
    const std::size_t s = item % S;
    try {
      NoiseStream noise(cfg.seed, Pipeline::channel_stream(static_cast<int>(r), s));
      results[s * R + r] =
          run_point(pl, sources[r], encoded[r], reference[r], plain[s], with_pct[s], noise);
    } catch (const std::exception& e) {
      throw std::runtime_error("realization " + std::to_string(r) + " at " +
                               std::to_string(cfg.snr_db[s]) + " dB: " + e.what());
    }
  });

  std::vector<SnrPoint> points(S);
  for (std::size_t s = 0; s < S; ++s) {
    points[s].snr_db = cfg.snr_db[s];
    for (std::size_t rc = 0; rc < 4; ++rc) {
      double sum = 0.0, err = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        sum += results[s * R + r].snr[rc];
        err += results[s * R + r].error_rate[rc];
      }
      const double mean = sum / static_cast<double>(R);
      double var = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double d = results[s * R + r].snr[rc] - mean;
        var += d * d;
      }
      auto& st = points[s].receivers[rc];
      st.mean_snr_db = mean;
      st.std_snr_db = R > 1 ? std::sqrt(var / static_cast<double>(R - 1)) : 0.0;
      st.error_rate = err / static_cast<double>(R);
    }
  }
  return points;
}

namespace detail {
inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}
}  // namespace detail

// Leading '#' lines echo the configuration and quantizers; the first
// non-comment line is the column header.
inline void write_sweep_csv(std::ostream& os, const Pipeline& pl, const std::vector<SnrPoint>& pts) {
  const auto& cfg = pl.config();
  const auto& q = pl.quantizer();
  os << "# source=" << cfg.source;
  if (cfg.source == "ar1") os << " rho=" << detail::fixed(cfg.rho, 4) << " n=" << cfg.n << " clip=" << detail::fixed(cfg.clip, 4);
  else os << " pgm_count=" << cfg.pgm_count;
  os << "\n# bank M=" << pl.analysis().M << " N=" << pl.analysis().N << " L=" << pl.analysis().L
     << " Lp=" << pl.parity().Lp << " window=" << pl.synthesizer().window() << "\n";
  os << "# quantizer mapping=" << (q.mapping() == IndexMapping::kGray ? "gray" : "natural") << " delta=";
  for (int m = 0; m < q.M(); ++m) os << (m ? "," : "") << detail::fixed(q[m].step, 6);
  os << " rates=";
  for (int m = 0; m < q.M(); ++m) os << (m ? "," : "") << q[m].rate;
  os << " bits_per_block=" << q.total_bits() << "\n";
  os << "# n_max=" << cfg.n_max << " hull=" << (cfg.hull == HullMethod::kLinearProgram ? "lp" : "interval")
     << " noiseless=" << (cfg.noiseless ? "true" : "false") << "\n";
  os << "snr_db,receiver,mean_snr_db,std_snr_db,error_rate,realizations,seed\n";
  for (const auto& p : pts) {
    for (std::size_t rc = 0; rc < 4; ++rc) {
      const auto& st = p.receivers[rc];
      os << detail::fixed(p.snr_db, 2) << ',' << kReceiverNames[rc] << ',' << detail::fixed(st.mean_snr_db)
         << ',' << detail::fixed(st.std_snr_db) << ',' << detail::fixed(st.error_rate, 8) << ','
         << cfg.realizations << ',' << cfg.seed << '\n';
    }
  }
}

}  // namespace ofb
