#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

#ifndef OFB_DATA_DIR
#define OFB_DATA_DIR "data"
#endif

using ofb::Box;
using ofb::Interval;

namespace {

ofb::QuantizerBank symmetric_bank(std::vector<double> widths, double delta,
                                  ofb::IndexMapping mapping = ofb::IndexMapping::kNatural) {
  Box b(widths.size());
  for (std::size_t m = 0; m < widths.size(); ++m) b[m] = Interval(-widths[m] / 2, widths[m] / 2);
  return ofb::allocate_rates(b, delta, mapping);
}

ofb::QuantizerBank single(int rate, double step = 1.0) {
  ofb::SubbandQuantizer s;
  s.step = step;
  s.rate = rate;
  s.range = Interval(-step * (1 << (rate - 1)), step * ((1 << (rate - 1)) - 1));
  return ofb::QuantizerBank({s});
}

}  // namespace

TEST(AllocateRates, WidthsFour) {
  const auto q = symmetric_bank({4, 4}, 1.0);
  EXPECT_EQ(q[0].rate, 2);
  EXPECT_EQ(q[1].rate, 2);
  EXPECT_EQ(q[0].step, 1.0);
  EXPECT_EQ(q[1].step, 1.0);
}

TEST(AllocateRates, WidthsFourAndEight) {
  const auto q = symmetric_bank({4, 8}, 1.0);
  EXPECT_EQ(q[0].rate, 2);
  EXPECT_EQ(q[1].rate, 3);
  EXPECT_EQ(q.total_bits(), 5);
}

TEST(AllocateRates, DefaultBankFromTapMagnitudes) {
  const auto fb = ofb::load_filter_bank(std::string(OFB_DATA_DIR) + "/haar_6x4.txt");
  const auto pa = ofb::polyphase_from_filters(fb);
  const Box x(4, Interval(-4, 4));
  const auto q = ofb::allocate_rates(ofb::subband_ranges(pa, x), 0.25);
  const auto widths = oracle::symmetric_subband_widths(fb, 4.0);
  for (int m = 0; m < 6; ++m) {
    const int want = static_cast<int>(std::ceil(std::log2(widths[m] / 0.25) - 1e-9));
    EXPECT_EQ(q[m].rate, want) << "subband " << m;
  }
  // Frozen: widths 16 and 16*sqrt(2) at delta 0.25.
  EXPECT_EQ(q[0].rate, 6);
  EXPECT_EQ(q[4].rate, 7);
}

TEST(AllocateRates, Errors) {
  EXPECT_THROW(symmetric_bank({4}, 0.0), std::invalid_argument);
  EXPECT_THROW(symmetric_bank({1e6}, 1e-2), std::invalid_argument);
  EXPECT_THROW(ofb::allocate_rates(Box::empty(2), 1.0), std::invalid_argument);
}

TEST(AllocateRates, CoversOffCentreRanges) {
  const auto q = ofb::allocate_rates(Box{Interval(0, 255)}, 16.0);
  EXPECT_EQ(q[0].rate, 4);
  for (double y = 0.0; y <= 255.0; y += 0.37) EXPECT_TRUE(q.cell_box(q.quantize(y, 0), 0).contains(y));
}

TEST(Quantize, SmallValueRoundsToZero) {
  const auto q = symmetric_bank({8}, 1.0);
  EXPECT_EQ(q.quantize(0.2, 0), 0);
  EXPECT_EQ(q.dequantize(0, 0), 0.0);
  EXPECT_EQ(q.cell_box(0, 0), Interval(-0.5, 0.5));
}

TEST(Quantize, JustAboveHalfRoundsUp) {
  const auto q = symmetric_bank({8}, 1.0);
  EXPECT_EQ(q.quantize(0.51, 0), 1);
  EXPECT_EQ(q.cell_box(1, 0), Interval(0.5, 1.5));
}

TEST(Quantize, TiesRoundAwayFromZero) {
  const auto q = symmetric_bank({8}, 1.0);
  EXPECT_EQ(q.quantize(0.5, 0), 1);
  EXPECT_EQ(q.quantize(-0.5, 0), -1);
  EXPECT_EQ(q.quantize(-1.5, 0), -2);
}

TEST(Quantize, SaturatedCellsReachTheRangeEdges) {
  const auto q = symmetric_bank({9}, 1.0);  // R = 4, indexes -8..7
  EXPECT_EQ(q.quantize(100.0, 0), 7);
  EXPECT_EQ(q.quantize(-100.0, 0), -8);
  EXPECT_EQ(q.cell_box(-8, 0).lo(), -8.5);
  EXPECT_EQ(q.cell_box(7, 0).hi(), 7.5);
  const auto tight = symmetric_bank({16}, 1.0);  // R = 4, range [-8, 8]
  EXPECT_EQ(tight.cell_box(7, 0).hi(), 8.0);
}

TEST(QuantizeProperty, BoundedErrorAndContainment) {
  const auto q = symmetric_bank({7.3, 12.0, 3.1}, 0.37);
  std::mt19937_64 g(41);
  for (int m = 0; m < q.M(); ++m) {
    for (int k = 0; k < 100000; ++k) {
      const double y = oracle::uniform_in(q[m].range, g);
      const int u = q.quantize(y, m);
      EXPECT_TRUE(q.cell_box(u, m).contains(y));
      if (u > q[m].min_index() && u < q[m].max_index()) {
        EXPECT_LE(std::abs(y - q.dequantize(u, m)), q[m].step / 2 + 1e-15);
      }
    }
  }
}

TEST(QuantizeProperty, CellsPartitionTheRange) {
  const auto q = symmetric_bank({7.3, 12.0}, 0.37);
  for (int m = 0; m < q.M(); ++m) {
    EXPECT_LE(q.cell_box(q[m].min_index(), m).lo(), q[m].range.lo());
    EXPECT_GE(q.cell_box(q[m].max_index(), m).hi(), q[m].range.hi());
    for (int u = q[m].min_index(); u < q[m].max_index(); ++u) {
      const Interval shared = intersect(q.cell_box(u, m), q.cell_box(u + 1, m));
      ASSERT_FALSE(shared.is_empty());
      EXPECT_NEAR(shared.width(), 0.0, 1e-12);
    }
  }
}

TEST(Binarize, NegativeOneOnThreeBits) {
  const auto q = single(3);
  EXPECT_EQ(q.binarize({-1}), (ofb::BitBlock{0, 1, 1}));
}

TEST(Binarize, ZeroOnTwoBits) {
  const auto q = single(2);
  EXPECT_EQ(q.binarize({0}), (ofb::BitBlock{1, 0}));
}

TEST(Binarize, ExhaustiveRoundTrip) {
  for (auto mapping : {ofb::IndexMapping::kNatural, ofb::IndexMapping::kGray}) {
    for (int R = 1; R <= 8; ++R) {
      auto base = single(R);
      const ofb::QuantizerBank q({base[0]}, mapping);
      std::set<ofb::BitBlock> seen;
      for (int u = q[0].min_index(); u <= q[0].max_index(); ++u) {
        const auto bits = q.binarize({u});
        ASSERT_EQ(static_cast<int>(bits.size()), R);
        EXPECT_EQ(q.debinarize(bits), ofb::IndexVector{u});
        seen.insert(bits);
      }
      EXPECT_EQ(static_cast<int>(seen.size()), 1 << R);
    }
  }
}

TEST(Binarize, GrayNeighboursDifferInOneBit) {
  const ofb::QuantizerBank q({single(5)[0]}, ofb::IndexMapping::kGray);
  for (int u = q[0].min_index(); u < q[0].max_index(); ++u) {
    const auto a = q.binarize({u}), b = q.binarize({u + 1});
    int diff = 0;
    for (std::size_t k = 0; k < a.size(); ++k) diff += a[k] != b[k];
    EXPECT_EQ(diff, 1);
  }
}

TEST(Binarize, MultiSubbandLayoutAndErrors) {
  const auto q = symmetric_bank({4, 8}, 1.0);  // R = (2, 3)
  EXPECT_EQ(q.binarize({0, -1}), (ofb::BitBlock{1, 0, 0, 1, 1}));
  EXPECT_EQ(q.bit_offset(1), 2);
  EXPECT_THROW(q.debinarize(ofb::BitBlock{1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(q.binarize({0, 4}), std::out_of_range);
  EXPECT_THROW(q.binarize({0}), std::invalid_argument);
}
