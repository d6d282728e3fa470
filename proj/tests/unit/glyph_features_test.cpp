#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sealkit/error.hpp"
#include "sealkit/glyph_features.hpp"
#include "sealkit/rng.hpp"
#include "sealkit/synth.hpp"

using namespace sealkit;
using fixtures::cross_mask;
using fixtures::filled_rect;
using fixtures::ring_mask;
using fixtures::shape_suite;

namespace {

double min_dist(const PointSet& pts, double x, double y) {
  double best = INFINITY;
  for (const Point& p : pts) best = std::min(best, std::hypot(p.x - x, p.y - y));
  return best;
}

// Mirror inside the 224-column HOG window; column 224 must be empty.
BinaryMask mirror_in_window(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < 224; ++x) {
      if (m.get(x, y)) out.set(223 - x, y);
    }
  }
  return out;
}

std::size_t hog_index(int by, int bx, int cell, int bin) {
  return ((static_cast<std::size_t>(by) * HogLayout::kBlocks + bx) * 4 + cell) * HogLayout::kBins + bin;
}

}  // namespace

TEST(Standardize, FullMaskIsIdentity) {
  const BinaryMask full(225, 225, true);
  EXPECT_EQ(standardize(full).mask, full);
}

TEST(Standardize, SinglePixelFillsCanvas) {
  BinaryMask m(10, 10);
  m.set(3, 4);
  const StandardGlyph g = standardize(m, GlyphOrigin::kQuerySegment);
  EXPECT_EQ(g.mask, BinaryMask(225, 225, true));
  EXPECT_EQ(g.source, GlyphOrigin::kQuerySegment);
}

TEST(Standardize, WideContentArithmetic) {
  const BinaryMask m = filled_rect(460, 240, 5, 7, 450, 225);
  const StandardGlyph g = standardize(m);
  const BoundingBox b = points_to_bbox(mask_to_points(g.mask));
  // 225 * 225 / 450 = 112.5, rounded half away from zero.
  EXPECT_EQ(b.width(), 225);
  EXPECT_EQ(b.height(), 113);
  EXPECT_EQ(b.y_min, (225 - 113) / 2);
  EXPECT_EQ(g.mask.count(), 225u * 113u);
}

TEST(Standardize, EmptyMaskIsRejected) {
  try {
    standardize(BinaryMask(5, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(StandardizeProperty, SizeAndTightCrop) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const StandardGlyph g = standardize(synthetic_glyph(seed, 64 + static_cast<int>(seed)));
    ASSERT_EQ(g.mask.width(), 225);
    ASSERT_EQ(g.mask.height(), 225);
    const BoundingBox b = points_to_bbox(mask_to_points(g.mask));
    EXPECT_TRUE((b.x_min == 0 && b.x_max == 224) || (b.y_min == 0 && b.y_max == 224));
  }
}

TEST(ZhangSuen, LineIsUnchanged) {
  const BinaryMask line = filled_rect(14, 5, 2, 2, 10, 1);
  EXPECT_EQ(zhang_suen_thin(line).mask, line);
}

TEST(ZhangSuen, EmptyStaysEmpty) {
  const SkeletonMap s = zhang_suen_thin(BinaryMask(8, 8));
  EXPECT_EQ(s.mask.count(), 0u);
  EXPECT_TRUE(s.points.empty());
}

TEST(ZhangSuen, SolidBarBecomesSpanningPath) {
  const BinaryMask bar = filled_rect(30, 15, 5, 5, 20, 5);
  const SkeletonMap s = zhang_suen_thin(bar);
  EXPECT_EQ(oracle::components8(s.mask), 1);
  EXPECT_EQ(oracle::deletable_pixels(s.mask), 0);
  const BoundingBox b = points_to_bbox(s.points);
  EXPECT_GE(b.width(), 14);
  // At most one skeleton pixel per column away from the ends.
  for (int x = b.x_min + 2; x <= b.x_max - 2; ++x) {
    int col = 0;
    for (int y = 0; y < 15; ++y) col += s.mask.get(x, y);
    EXPECT_EQ(col, 1) << "column " << x;
  }
  EXPECT_EQ(s.points, mask_to_points(s.mask));
}

TEST(ZhangSuenProperty, IdempotentAndConnectivityPreserving) {
  for (const BinaryMask& shape : shape_suite()) {
    const SkeletonMap s = zhang_suen_thin(shape);
    EXPECT_EQ(zhang_suen_thin(s.mask).mask, s.mask);
    EXPECT_EQ(oracle::deletable_pixels(s.mask), 0);
    EXPECT_EQ(oracle::components8(s.mask), oracle::components8(shape));
    for (const Point& p : s.points) EXPECT_TRUE(shape.get(p.x, p.y));
  }
}

TEST(Harris, UniformMasksHaveNoCorners) {
  EXPECT_TRUE(harris_corners(BinaryMask(20, 20)).points.empty());
  EXPECT_TRUE(harris_corners(BinaryMask(20, 20, true)).points.empty());
}

TEST(Harris, ResponseMatchesDenseOracle) {
  const std::vector<BinaryMask> masks{filled_rect(50, 50, 10, 10, 30, 30), cross_mask(41, 15),
                                      fixtures::pad(synthetic_glyph(8, 60), 3)};
  for (const auto& m : masks) {
    for (double k : {0.04, 0.06}) {
      const auto got = harris_response(m, k, 1.5);
      const auto want = oracle::harris_response(m, k, 1.5);
      ASSERT_EQ(got.size(), want.size());
      double peak = 0;
      for (double v : want) peak = std::max(peak, std::abs(v));
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_NEAR(got[i], want[i], 1e-9 * peak) << "pixel " << i;
      }
    }
  }
}

TEST(Harris, SquareCorners) {
  const BinaryMask sq = filled_rect(50, 50, 10, 10, 30, 30);
  const CornerSet c = harris_corners(sq);
  EXPECT_GE(c.points.size(), 4u);
  for (auto [x, y] : {std::pair{10, 10}, {39, 10}, {10, 39}, {39, 39}}) {
    EXPECT_LE(min_dist(c.points, x, y), 2.0) << x << "," << y;
  }
}

TEST(Harris, CrossIntersection) {
  const CornerSet c = harris_corners(cross_mask(41, 15));
  EXPECT_LE(min_dist(c.points, 20, 20), 3.0);
}

TEST(HarrisProperty, CornersAreThresholdedLocalMaxima) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const BinaryMask m = fixtures::pad(synthetic_glyph(seed, 80), 4);
    const auto r = harris_response(m);
    const CornerSet c = harris_corners(m);
    ASSERT_EQ(c.points.size(), c.responses.size());
    const double peak = *std::max_element(r.begin(), r.end());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const Point p = c.points[i];
      const double v = r[static_cast<std::size_t>(p.y) * m.width() + p.x];
      EXPECT_EQ(v, c.responses[i]);
      EXPECT_GT(v, 0.01 * peak);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!m.contains(p.x + dx, p.y + dy)) continue;
          EXPECT_GE(v, r[static_cast<std::size_t>(p.y + dy) * m.width() + p.x + dx]);
        }
      }
    }
  }
}

TEST(HarrisProperty, TranslationShiftsCorners) {
  Rng rng(4);
  for (std::uint64_t seed : {6u, 7u, 8u}) {
    const BinaryMask base = fixtures::pad(synthetic_glyph(seed, 60), 20);
    const CornerSet c0 = harris_corners(base);
    const int dx = rng.uniform_int(-8, 8), dy = rng.uniform_int(-8, 8);
    const CornerSet c1 = harris_corners(fixtures::translate(base, dx, dy));
    ASSERT_EQ(c0.points.size(), c1.points.size());
    for (std::size_t i = 0; i < c0.points.size(); ++i) {
      EXPECT_EQ(c1.points[i], (Point{c0.points[i].x + dx, c0.points[i].y + dy}));
      EXPECT_NEAR(c1.responses[i], c0.responses[i], 1e-9 * std::abs(c0.responses[i]));
    }
  }
}

TEST(Hog, EmptyMaskGivesZeros) {
  // A full mask is not uniform here: outside the canvas is background, so its
  // edge carries gradient.
  const HogDescriptor d = hog(BinaryMask(225, 225));
  ASSERT_EQ(d.values.size(), 26244u);
  EXPECT_TRUE(std::all_of(d.values.begin(), d.values.end(), [](double v) { return v == 0.0; }));
  EXPECT_EQ(HogLayout::kLength, 27u * 27u * 4u * 9u);
}

TEST(Hog, WrongSizeIsRejected) { EXPECT_THROW(hog(BinaryMask(224, 225)), Error); }

TEST(Hog, MatchesReferenceImplementation) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const StandardGlyph g = standardize(synthetic_glyph(seed));
    for (const BinaryMask& m : {g.mask, zhang_suen_thin(g.mask).mask}) {
      const HogDescriptor d = hog(m);
      const auto want = oracle::hog(m);
      ASSERT_EQ(d.values.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(d.values[i], want[i], 1e-12) << i;
    }
  }
}

TEST(HogProperty, ValuesInUnitInterval) {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const HogDescriptor d = hog(zhang_suen_thin(standardize(synthetic_glyph(seed)).mask).mask);
    for (double v : d.values) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(HogProperty, MirrorPermutesBins) {
  for (std::uint64_t seed : {30u, 31u, 32u}) {
    BinaryMask m = standardize(synthetic_glyph(seed)).mask;
    for (int y = 0; y < 225; ++y) m.set(224, y, false);
    const HogDescriptor a = hog(m);
    const HogDescriptor b = hog(mirror_in_window(m));
    constexpr int kMirrorCell[4] = {1, 0, 3, 2};
    for (int by = 0; by < HogLayout::kBlocks; ++by) {
      for (int bx = 0; bx < HogLayout::kBlocks; ++bx) {
        for (int cell = 0; cell < 4; ++cell) {
          for (int bin = 0; bin < HogLayout::kBins; ++bin) {
            const double va = a.values[hog_index(by, bx, cell, bin)];
            const double vb =
                b.values[hog_index(by, HogLayout::kBlocks - 1 - bx, kMirrorCell[cell],
                                   HogLayout::kBins - 1 - bin)];
            ASSERT_NEAR(va, vb, 1e-12);
          }
        }
      }
    }
  }
}

TEST(HogProperty, InvariantUnderPreStandardizeTranslation) {
  Rng rng(10);
  for (std::uint64_t seed : {40u, 41u}) {
    const BinaryMask base = fixtures::pad(synthetic_glyph(seed, 70), 25);
    const HogDescriptor h0 = hog(standardize(base).mask);
    for (int t = 0; t < 3; ++t) {
      const BinaryMask moved =
          fixtures::translate(base, rng.uniform_int(-20, 20), rng.uniform_int(-20, 20));
      EXPECT_EQ(hog(standardize(moved).mask), h0);
    }
  }
}

TEST(PointSetDistance, Examples) {
  const PointSet a{{{0, 0}}}, b{{{3, 4}}};
  EXPECT_EQ(point_set_distance(a, b), 5.0);
  EXPECT_EQ(point_set_distance(b, b), 0.0);
  EXPECT_THROW(point_set_distance(a, PointSet{}), Error);
}

TEST(PointSetDistanceProperty, MatchesBruteForceAndIsSymmetric) {
  Rng rng(50);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point> ra, rb;
    for (int i = 0; i < 50; ++i) {
      ra.push_back({rng.uniform_int(0, 224), rng.uniform_int(0, 224)});
      rb.push_back({rng.uniform_int(0, 224), rng.uniform_int(0, 224)});
    }
    const PointSet a = make_unique_points(ra), b = make_unique_points(rb);
    const double d = point_set_distance(a, b);
    EXPECT_NEAR(d, oracle::modified_hausdorff(a.points, b.points), 1e-12);
    EXPECT_EQ(d, point_set_distance(b, a));
    EXPECT_GT(d, 0.0);
    EXPECT_EQ(point_set_distance(a, a), 0.0);
  }
}

TEST(CosineDistance, Cases) {
  const std::vector<double> a{1, 2, 3}, b{-1, -2, -3}, z{0, 0, 0}, c{3, 2, 1};
  EXPECT_EQ(cosine_distance(a, a), 0.0);
  EXPECT_EQ(cosine_distance(a, b), 2.0);
  EXPECT_EQ(cosine_distance(a, z), 1.0);
  EXPECT_NEAR(cosine_distance(a, c), 1.0 - 10.0 / 14.0, 1e-15);
  EXPECT_THROW(cosine_distance(a, std::vector<double>{1, 2}), Error);
}

TEST(ExtractFeatures, RoutesInputsPerOptions) {
  const StandardGlyph g = standardize(synthetic_glyph(77));
  const GeometricFeature f = extract_features(g);
  const SkeletonMap s = zhang_suen_thin(g.mask);
  EXPECT_EQ(f.skeleton, s);
  EXPECT_EQ(f.corners, harris_corners(g.mask));
  EXPECT_EQ(f.hog, hog(s.mask));

  FeatureOptions regular;
  regular.hog_input = HogInput::kRegular;
  EXPECT_EQ(extract_features(g, regular).hog, hog(g.mask));
  EXPECT_EQ(parse_hog_input(to_string(HogInput::kRegular)), HogInput::kRegular);
  EXPECT_THROW(parse_hog_input("gray"), Error);
}
