#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

#ifndef OFB_DATA_DIR
#define OFB_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace {

const std::string kBank = std::string(OFB_DATA_DIR) + "/haar_6x4.txt";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ofb_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
}

ofb::ExperimentConfig small_config() {
  ofb::ExperimentConfig cfg;
  cfg.bank = kBank;
  cfg.n = 400;
  cfg.realizations = 3;
  cfg.snr_db = {6, 9};
  cfg.seed = 5;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST(Ar1, WhiteNoiseVariance) {
  const auto x = ofb::gen_ar1(100000, 0.0, 3, 100.0);
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(x.size());
  const double var = s2 / n - (s / n) * (s / n);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Ar1, LagOneCorrelation) {
  const auto x = ofb::gen_ar1(100000, 0.9, 4, 100.0);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    den += x[k] * x[k];
    if (k) num += x[k] * x[k - 1];
  }
  EXPECT_NEAR(num / den, 0.9, 0.02);
}

TEST(Ar1, ClippedAndReproducible) {
  const auto a = ofb::gen_ar1(5000, 0.9, 8, 1.0);
  EXPECT_EQ(a, ofb::gen_ar1(5000, 0.9, 8, 1.0));
  EXPECT_NE(a, ofb::gen_ar1(5000, 0.9, 9, 1.0));
  for (double v : a) EXPECT_LE(std::abs(v), 1.0);
  EXPECT_THROW(ofb::gen_ar1(10, 1.0, 1), std::invalid_argument);
}

TEST(Pgm, AsciiRows) {
  const auto p = scratch("tiny_p2.pgm");
  write_file(p, "P2\n# comment\n2 2\n255\n0 1\n2 3\n");
  EXPECT_EQ(ofb::load_pgm_lines(p.string(), {0, 1}, 4), (std::vector<double>{0, 1, 2, 3}));
  EXPECT_EQ(ofb::load_pgm_lines(p.string(), {1}, 1), (std::vector<double>{2}));
}

TEST(Pgm, BinaryAndAsciiAgree) {
  std::string raster;
  std::ostringstream ascii;
  ascii << "P2\n5 3\n255\n";
  for (int k = 0; k < 15; ++k) {
    raster.push_back(static_cast<char>(k * 17));
    ascii << k * 17 << (k % 5 == 4 ? "\n" : " ");
  }
  const auto p2 = scratch("eq_p2.pgm"), p5 = scratch("eq_p5.pgm");
  write_file(p2, ascii.str());
  write_file(p5, "P5\n5 3\n255\n" + raster);
  EXPECT_EQ(ofb::load_pgm_lines(p2.string(), {2, 0}, 10), ofb::load_pgm_lines(p5.string(), {2, 0}, 10));
}

TEST(Pgm, Errors) {
  EXPECT_THROW(ofb::parse_pgm("P6\n1 1\n255\n\0"), ofb::PgmError);
  try {
    ofb::parse_pgm("P5\n1 1\n65535\n\0\0");
    FAIL() << "16-bit image accepted";
  } catch (const ofb::PgmError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
  EXPECT_THROW(ofb::parse_pgm("P5\n2 2\n255\nab"), ofb::PgmError);
  EXPECT_THROW(ofb::parse_pgm("P2\n1 1\n10\n11\n"), ofb::PgmError);
  const auto p = scratch("short.pgm");
  write_file(p, "P2\n2 1\n255\n4 5\n");
  EXPECT_THROW(ofb::load_pgm_lines(p.string(), {0}, 3), std::out_of_range);
  EXPECT_THROW(ofb::load_pgm_lines(p.string(), {1}, 1), std::out_of_range);
}

TEST(ReconstructionSnr, ClosedForms) {
  const std::vector<double> x{1, 1};
  EXPECT_EQ(ofb::reconstruction_snr(x, x, 0), 120.0);
  EXPECT_NEAR(ofb::reconstruction_snr(x, std::vector<double>{0, 0}, 0), 0.0, 1e-15);
  // Scaling the error by 1/sqrt(2) halves its energy.
  const std::vector<double> a{1, 2, 3, 4}, e{0.2, 0.0, -0.1, 0.05};
  std::vector<double> b(4), c(4);
  for (int k = 0; k < 4; ++k) {
    b[k] = a[k] + e[k];
    c[k] = a[k] + e[k] / std::sqrt(2.0);
  }
  EXPECT_NEAR(ofb::reconstruction_snr(a, c, 0) - ofb::reconstruction_snr(a, b, 0), 3.0103, 1e-4);
  EXPECT_THROW(ofb::reconstruction_snr(a, b, 4), std::invalid_argument);
  EXPECT_THROW(ofb::reconstruction_snr(a, x, 0), std::invalid_argument);
}

TEST(Config, ParsesKeysAndRejectsUnknown) {
  std::istringstream in(
      "# sweep\nsource = ar1\nrho=0.5\nn = 1000\nsnr_db = 6, 7.5\nmapping = gray\nhull = lp\n"
      "use_pct = false\nseed = 77\n");
  const auto cfg = ofb::parse_config(in);
  EXPECT_EQ(cfg.rho, 0.5);
  EXPECT_EQ(cfg.n, 1000u);
  EXPECT_EQ(cfg.snr_db, (std::vector<double>{6, 7.5}));
  EXPECT_EQ(cfg.mapping, ofb::IndexMapping::kGray);
  EXPECT_EQ(cfg.hull, ofb::HullMethod::kLinearProgram);
  EXPECT_FALSE(cfg.use_pct);
  EXPECT_EQ(cfg.seed, 77u);
  std::istringstream bad("colour = blue\n");
  EXPECT_THROW(ofb::parse_config(bad), std::invalid_argument);
  std::istringstream bad_value("n = many\n");
  EXPECT_THROW(ofb::parse_config(bad_value), std::invalid_argument);
  std::istringstream empty_list("snr_db = \n");
  EXPECT_THROW(ofb::parse_config(empty_list), std::invalid_argument);
}

TEST(Config, RelativeBankPathResolvesNextToConfig) {
  const fs::path dir = fs::temp_directory_path() / "ofb_tests" / "cfgdir";
  fs::create_directories(dir);
  fs::copy_file(kBank, dir / "bank.txt", fs::copy_options::overwrite_existing);
  write_file(dir / "run.cfg", "bank = bank.txt\n");
  EXPECT_EQ(fs::path(ofb::load_config((dir / "run.cfg").string()).bank), dir / "bank.txt");
}

TEST(Sweep, NoiselessReceiversMatchReference) {
  auto cfg = small_config();
  cfg.realizations = 1;
  cfg.noiseless = true;
  const ofb::Pipeline pl(cfg);
  const auto pts = ofb::run_sweep(pl);
  for (const auto& p : pts) {
    const double ref = p.receivers[ofb::kReference].mean_snr_db;
    EXPECT_EQ(p.receivers[ofb::kClassical].mean_snr_db, ref);
    EXPECT_EQ(p.receivers[ofb::kClassical].error_rate, 0.0);
    EXPECT_EQ(p.receivers[ofb::kProposed].error_rate, 0.0);
    EXPECT_EQ(p.receivers[ofb::kProposedPct].error_rate, 0.0);
  }
}

TEST(Sweep, ClassicalBitErrorRateMatchesClosedForm) {
  auto cfg = small_config();
  cfg.n = 20000;
  cfg.realizations = 2;
  cfg.snr_db = {6, 8};
  const ofb::Pipeline pl(cfg);
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const auto ch = pl.channel(cfg.snr_db[s]);
    std::size_t errors = 0, total = 0;
    for (int r = 0; r < cfg.realizations; ++r) {
      const auto enc = pl.encode(pl.source(r));
      ofb::NoiseStream ns(cfg.seed, ofb::Pipeline::channel_stream(r, s));
      const auto hard = ofb::hard_decision(ofb::transmit(enc.bits, ch, ns));
      for (std::size_t k = 0; k < hard.size(); ++k) errors += hard[k] != enc.bits[k];
      total += hard.size();
    }
    const double ber = static_cast<double>(errors) / static_cast<double>(total);
    const double expect = ofb::bpsk_ber(ch.sigma2);
    // Four binomial standard deviations.
    const double tol = 4.0 * std::sqrt(expect * (1.0 - expect) / static_cast<double>(total));
    EXPECT_NEAR(ber, expect, tol) << cfg.snr_db[s] << " dB";
  }
}

TEST(Sweep, ReferenceIsIndependentOfChannel) {
  const ofb::Pipeline pl(small_config());
  const auto pts = ofb::run_sweep(pl);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].receivers[ofb::kReference].mean_snr_db, pts[1].receivers[ofb::kReference].mean_snr_db);
  EXPECT_EQ(pts[0].receivers[ofb::kReference].std_snr_db, pts[1].receivers[ofb::kReference].std_snr_db);
}

TEST(Sweep, CsvIsIndependentOfWorkerCount) {
  std::string out[2];
  for (int t : {1, 3}) {
    auto cfg = small_config();
    cfg.threads = t;
    const ofb::Pipeline pl(cfg);
    std::ostringstream os;
    ofb::write_sweep_csv(os, pl, ofb::run_sweep(pl));
    out[t == 1 ? 0 : 1] = os.str();
  }
  EXPECT_EQ(out[0], out[1]);
  std::istringstream in(out[0]);
  std::string line;
  while (std::getline(in, line) && line.rfind('#', 0) == 0) {
  }
  EXPECT_EQ(line, "snr_db,receiver,mean_snr_db,std_snr_db,error_rate,realizations,seed");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Sweep, FailedRealizationCarriesContext) {
  auto cfg = small_config();
  cfg.source = "pgm";
  cfg.pgm_path = scratch("tiny_sweep.pgm").string();
  write_file(cfg.pgm_path, "P2\n2 1\n255\n4 5\n");
  const ofb::Pipeline pl(cfg);
  try {
    ofb::run_sweep(pl);
    FAIL() << "sweep over a too-short image succeeded";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("realization 0"), std::string::npos) << e.what();
  }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  ofb::parallel_for(hits.size(), 4, [&](std::size_t k) { ++hits[k]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(ofb::parallel_for(10, 2, [](std::size_t k) {
                 if (k == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
