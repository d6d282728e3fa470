#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sealkit/error.hpp"
#include "sealkit/rng.hpp"
#include "sealkit/segmentation.hpp"
#include "sealkit/synth.hpp"
#include "sealkit/color_separation.hpp"

using namespace sealkit;
using fixtures::two_blobs;

namespace {

PointSet random_points(Rng& rng, int n, int extent) {
  std::vector<Point> raw;
  for (int i = 0; i < n; ++i) raw.push_back({rng.uniform_int(0, extent), rng.uniform_int(0, extent)});
  return make_unique_points(raw);
}

PointSet block_points(std::initializer_list<BoundingBox> boxes) {
  std::vector<Point> pts;
  for (const auto& b : boxes) {
    for (int y = b.y_min; y <= b.y_max; ++y) {
      for (int x = b.x_min; x <= b.x_max; ++x) pts.push_back({x, y});
    }
  }
  return make_unique_points(pts);
}

SegmentHypothesis hyp(std::vector<Point> pts, int label) {
  SegmentHypothesis h;
  h.pixels = make_unique_points(std::move(pts));
  h.bbox = points_to_bbox(h.pixels);
  h.cluster_label = label;
  return h;
}

std::vector<Point> row_of(int y, int x0, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back({x0 + i, y});
  return out;
}

std::size_t count_inside(const PointSet& pts, const BoundingBox& box) {
  return static_cast<std::size_t>(
      std::count_if(pts.begin(), pts.end(), [&](const Point& p) { return box.contains(p); }));
}

BandwidthCurve curve_from(std::vector<double> xs, auto&& count_of) {
  BandwidthCurve c;
  for (double x : xs) c.samples.push_back({x, count_of(x)});
  return c;
}

}  // namespace

TEST(EstimateBandwidths, TwoPointClosedForm) {
  const ForegroundSet fg(PointSet{{{0, 0}, {10, 0}}});
  const std::vector<double> r{1.0};
  EXPECT_EQ(estimate_bandwidths(fg, r), std::vector<double>{10.0});
}

TEST(EstimateBandwidths, ThreeCollinearPoints) {
  const ForegroundSet fg(PointSet{{{0, 0}, {1, 0}, {2, 0}}});
  const std::vector<double> r{0.5};
  EXPECT_EQ(estimate_bandwidths(fg, r), std::vector<double>{1.0});
}

TEST(EstimateBandwidths, ZeroRatioGivesMeanNearestNeighbour) {
  Rng rng(1);
  const PointSet pts = random_points(rng, 60, 50);
  double mean_nn = 0;
  for (const Point& p : pts) {
    double best = INFINITY;
    for (const Point& q : pts) {
      if (p == q) continue;
      best = std::min(best, std::hypot(double(p.x - q.x), double(p.y - q.y)));
    }
    mean_nn += best;
  }
  mean_nn /= static_cast<double>(pts.size());
  const std::vector<double> r{0.0};
  const auto bw = estimate_bandwidths(ForegroundSet(pts), r);
  ASSERT_EQ(bw.size(), 1u);
  EXPECT_NEAR(bw[0], mean_nn, 1e-9);
}

TEST(EstimateBandwidths, Errors) {
  const std::vector<double> r{0.5};
  EXPECT_THROW(estimate_bandwidths(ForegroundSet(PointSet{{{1, 1}}}), r), Error);
  const std::vector<double> bad{1.5};
  EXPECT_THROW(estimate_bandwidths(ForegroundSet(PointSet{{{0, 0}, {1, 1}}}), bad), Error);
  // Degenerate: duplicate coordinates only.
  try {
    estimate_bandwidths(ForegroundSet(PointSet{{{3, 3}, {3, 3}}}), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
  EXPECT_THROW(ForegroundSet(PointSet{}), Error);
}

TEST(EstimateBandwidthsProperty, MatchesBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const PointSet pts = random_points(rng, rng.uniform_int(2, 200), trial % 2 ? 60 : 3000);
    if (pts.size() < 2) continue;
    const std::vector<double> ratios = draw_ratios(10, static_cast<std::uint64_t>(trial), 0.0, 1.0);
    const auto got = estimate_bandwidths(ForegroundSet(pts), ratios);
    std::set<double> expect;
    for (double r : ratios) {
      const double bw = oracle::knn_bandwidth(pts.points, r);
      if (bw > 0) expect.insert(bw);
    }
    // Dedup can differ by ulps between the two summation paths; compare values.
    ASSERT_GE(got.size(), 1u);
    for (double g : got) {
      const auto it = expect.lower_bound(g - 1e-9);
      ASSERT_NE(it, expect.end());
      EXPECT_NEAR(*it, g, 1e-9);
    }
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
  }
}

TEST(DrawRatios, SortedWithinRange) {
  const auto r = draw_ratios(100, 9, 0.05, 1.0);
  ASSERT_EQ(r.size(), 100u);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
  EXPECT_GE(r.front(), 0.05);
  EXPECT_LE(r.back(), 1.0);
  EXPECT_EQ(r, draw_ratios(100, 9, 0.05, 1.0));
}

TEST(Kde, SinglePointPeak) {
  const ForegroundSet fg(PointSet{{{4, 7}}});
  EXPECT_NEAR(kde_at(fg, 3.0, 4, 7), 1.0 / (2 * std::numbers::pi * 9.0), 1e-15);
  const DensityGrid g = kde_density(fg, 3.0, BoundingBox{4, 7, 4, 7}, 1.0);
  ASSERT_EQ(g.values.size(), 1u);
  EXPECT_NEAR(g.values[0], 1.0 / (2 * std::numbers::pi * 9.0), 1e-15);
}

TEST(Kde, DuplicatesAverageOut) {
  const ForegroundSet one(PointSet{{{0, 0}}});
  const ForegroundSet two(PointSet{{{0, 0}, {0, 0}}});
  for (double x : {0.0, 1.5, -4.0}) {
    EXPECT_NEAR(kde_at(one, 2.0, x, 1.0), kde_at(two, 2.0, x, 1.0), 1e-15);
  }
}

TEST(Kde, RejectsBadBandwidth) {
  const ForegroundSet fg(PointSet{{{0, 0}}});
  EXPECT_THROW(kde_at(fg, 0.0, 0, 0), Error);
  EXPECT_THROW(kde_density(fg, -1.0, BoundingBox{}, 1.0), Error);
  EXPECT_THROW(mean_shift(fg, 0.0), Error);
}

TEST(KdeProperty, GridMatchesOracleNonNegativeAndIntegratesToOne) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const PointSet pts = random_points(rng, rng.uniform_int(1, 40), 40);
    const double h = rng.uniform(1.5, 6.0);
    const ForegroundSet fg(pts);
    const BoundingBox b = points_to_bbox(pts);
    const int pad = static_cast<int>(std::ceil(6 * h));
    const BoundingBox grid{b.x_min - pad, b.y_min - pad, b.x_max + pad, b.y_max + pad};
    const DensityGrid g = kde_density(fg, h, grid, 1.0);
    double integral = 0;
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const double v = g.at(ix, iy);
        ASSERT_GE(v, 0.0);
        integral += v;
      }
    }
    EXPECT_GE(integral, 0.98);
    EXPECT_LE(integral, 1.02);
    for (int probe = 0; probe < 5; ++probe) {
      const int ix = rng.uniform_int(0, g.nx - 1), iy = rng.uniform_int(0, g.ny - 1);
      EXPECT_NEAR(g.at(ix, iy), oracle::kde(pts.points, h, grid.x_min + ix, grid.y_min + iy), 1e-12);
    }
  }
}

TEST(MeanShift, TwoBlobsMatchOracle) {
  const PointSet pts = two_blobs();
  for (bool accel : {false, true}) {
    MeanShiftOptions opt;
    opt.accelerate = accel;
    const MeanShiftResult r = mean_shift(ForegroundSet(pts), 10.0, opt);
    EXPECT_EQ(r.cluster_count(), 2);
    EXPECT_TRUE(oracle::same_partition(r.labels, oracle::mean_shift_labels(pts.points, 10.0)));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(r.labels[i], r.labels[pts[i].x < 50 ? 0 : pts.size() - 1]);
    }
  }
}

TEST(MeanShift, SinglePointAndHugeBandwidth) {
  const MeanShiftResult one = mean_shift(ForegroundSet(PointSet{{{7, 9}}}), 3.0);
  ASSERT_EQ(one.cluster_count(), 1);
  EXPECT_NEAR(one.modes[0][0], 7.0, 1e-12);
  EXPECT_NEAR(one.modes[0][1], 9.0, 1e-12);
  EXPECT_EQ(mean_shift(ForegroundSet(two_blobs()), 1e6).cluster_count(), 1);
}

TEST(MeanShiftProperty, AccelerationAgreesWithOracleOnRandomSets) {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const PointSet pts = random_points(rng, rng.uniform_int(5, 80), 60);
    const double h = rng.uniform(2.0, 25.0);
    const auto expect = oracle::mean_shift_labels(pts.points, h);
    const MeanShiftResult plain = mean_shift(ForegroundSet(pts), h, {.accelerate = false});
    ASSERT_EQ(plain.labels.size(), pts.size());
    EXPECT_TRUE(oracle::same_partition(plain.labels, expect)) << "trial " << trial;
    const MeanShiftResult fast = mean_shift(ForegroundSet(pts), h);
    EXPECT_EQ(fast.labels.size(), pts.size());
    EXPECT_NEAR(fast.cluster_count(), plain.cluster_count(), 1);
  }
}

TEST(MeanShiftProperty, CountNonIncreasingInBandwidth) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const PointSet pts = random_points(rng, 150, 120);
    std::vector<double> bws;
    for (double b = 1.0; b < 120; b *= 1.4) bws.push_back(b);
    const BandwidthCurve c = cluster_count_curve(ForegroundSet(pts), bws);
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
      EXPECT_LT(c.samples[i - 1].bandwidth, c.samples[i].bandwidth);
      EXPECT_GE(c.samples[i].n_clusters, 1);
      EXPECT_LE(c.samples[i].n_clusters, c.samples[i - 1].n_clusters + 1);
    }
  }
}

TEST(ClusterCountCurve, SinglePointAndTwoBlobs) {
  const std::vector<double> bws{1000.0, 1.0, 10.0};
  const BandwidthCurve single = cluster_count_curve(ForegroundSet(PointSet{{{1, 1}}}), bws);
  for (const auto& s : single.samples) EXPECT_EQ(s.n_clusters, 1);

  const BandwidthCurve c = cluster_count_curve(ForegroundSet(two_blobs()), bws);
  ASSERT_EQ(c.samples.size(), 3u);
  EXPECT_EQ(c.samples[0].bandwidth, 1.0);
  EXPECT_GE(c.samples[0].n_clusters, c.samples[1].n_clusters);
  EXPECT_EQ(c.samples[1].n_clusters, 2);
  EXPECT_EQ(c.samples[2].n_clusters, 1);
}

TEST(FitPolynomial, ResidualsOrthogonalToBasis) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> xs, ys;
    for (int i = 0; i < 30; ++i) {
      xs.push_back(rng.uniform(0.5, 80.0));
      ys.push_back(rng.uniform_int(1, 30));
    }
    const PolynomialFit f = fit_polynomial(xs, ys, 4);
    ASSERT_EQ(f.degree, 4);
    ASSERT_EQ(f.coefficients.size(), 5u);
    for (int d = 0; d <= 4; ++d) {
      double dot = 0, norm = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double basis = std::pow((xs[i] - f.center) / f.scale, d);
        dot += (ys[i] - f(xs[i])) * basis;
        norm += std::abs(ys[i] * basis);
      }
      EXPECT_LE(std::abs(dot), 1e-6 * norm) << "degree " << d;
    }
  }
}

TEST(FitPolynomial, SecondDerivativeOfExactParabola) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 12; ++i) {
    xs.push_back(i);
    ys.push_back(-0.5 * i * i + 3 * i + 1);
  }
  const PolynomialFit f = fit_polynomial(xs, ys, 2);
  for (double x : xs) {
    EXPECT_NEAR(f(x), -0.5 * x * x + 3 * x + 1, 1e-9);
    EXPECT_NEAR(f.second_derivative(x), -1.0, 1e-9);
  }
}

TEST(SelectCandidates, ConcaveParabolaKeepsEveryBandwidth) {
  std::vector<double> xs;
  for (int i = 1; i <= 20; ++i) xs.push_back(i);
  const BandwidthCurve c = curve_from(xs, [](double x) { return static_cast<int>(400 - x * x); });
  const CandidateSelection s = select_candidate_bandwidths(c, 5, 2);
  EXPECT_EQ(s.descent_band, xs);
  // Equal spacing gives equal spreads; the lowest group wins the tie.
  EXPECT_EQ(s.candidates, (std::vector<double>{1, 2, 3, 4, 5}));
}

TEST(SelectCandidates, StraightLineHasNoConcaveRegion) {
  std::vector<double> xs;
  for (int i = 1; i <= 20; ++i) xs.push_back(i);
  const BandwidthCurve c = curve_from(xs, [](double x) { return static_cast<int>(60 - 2 * x); });
  try {
    select_candidate_bandwidths(c, 5, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDataError);
  }
  const CandidateSelection s = select_candidates(c, SelectionRule::kConcaveBand);
  EXPECT_TRUE(s.used_fallback);
  // Every count is distinct, so the first run of length one wins.
  EXPECT_EQ(s.candidates, std::vector<double>{1.0});
}

TEST(SelectCandidates, MinimumSpreadGroupAndShortTail) {
  // Descent band spacing tightens towards the middle group.
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 6.1, 6.2, 6.3, 6.4, 8, 20};
  const BandwidthCurve c = curve_from(xs, [](double x) { return static_cast<int>(1000 - x * x); });
  const CandidateSelection s = select_candidate_bandwidths(c, 5, 2);
  EXPECT_EQ(s.candidates, (std::vector<double>{6, 6.1, 6.2, 6.3, 6.4}));
  EXPECT_THROW(select_candidate_bandwidths(c, 1, 2), Error);
  EXPECT_THROW(select_candidate_bandwidths(BandwidthCurve{{{1, 2}, {2, 1}}}, 5, 4), Error);
}

TEST(SelectCandidates, PlateauRule) {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<int> n{9, 5, 3, 3, 3, 2, 2, 1};
  BandwidthCurve c;
  for (std::size_t i = 0; i < xs.size(); ++i) c.samples.push_back({xs[i], n[i]});
  EXPECT_EQ(plateau_bandwidths(c), (std::vector<double>{3, 4, 5}));
  const CandidateSelection s = select_candidates(c, SelectionRule::kPlateau);
  EXPECT_EQ(s.candidates, (std::vector<double>{3, 4, 5}));
  EXPECT_FALSE(s.used_fallback);

  BandwidthCurve flat{{{1, 1}, {2, 1}}};
  EXPECT_EQ(plateau_bandwidths(flat), (std::vector<double>{1, 2}));
}

TEST(SelectionRuleNames, RoundTrip) {
  for (SelectionRule r : {SelectionRule::kPlateau, SelectionRule::kConcaveBand}) {
    EXPECT_EQ(parse_selection_rule(to_string(r)), r);
  }
  EXPECT_THROW(parse_selection_rule("median"), Error);
}

TEST(TwoBlobCandidates, EverySelectedBandwidthGivesTwoClusters) {
  const PointSet pts = two_blobs();
  const ForegroundSet fg(pts);
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    // Full ratio range so the curve spans both the split and merged regimes.
    const auto bws = estimate_bandwidths(fg, 100, seed, 0.05, 1.0);
    const BandwidthCurve curve = cluster_count_curve(fg, bws);
    const CandidateSelection sel = select_candidate_bandwidths(curve, 5, 4);
    ASSERT_FALSE(sel.candidates.empty());
    for (double b : sel.candidates) {
      const MeanShiftResult r = mean_shift(fg, b);
      EXPECT_EQ(r.cluster_count(), 2) << "bandwidth " << b;
      const auto expect = oracle::mean_shift_labels(pts.points, b);
      EXPECT_EQ(*std::max_element(expect.begin(), expect.end()), 1);
      EXPECT_TRUE(oracle::same_partition(r.labels, expect)) << "bandwidth " << b;
    }
  }
}

TEST(OverlapFilter, Examples) {
  std::vector<Point> big, small;
  for (int y = 0; y < 10; ++y) {
    auto r = row_of(y, 0, 15);
    big.insert(big.end(), r.begin(), r.end());
  }
  for (int y = 0; y < 10; ++y) {
    auto r = row_of(y, 0, 10);
    small.insert(small.end(), r.begin(), r.end());
  }
  auto kept = overlap_filter({hyp(small, 1), hyp(big, 2)});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].cluster_label, 2);

  kept = overlap_filter({hyp(row_of(0, 0, 10), 1), hyp(row_of(5, 0, 10), 2)});
  EXPECT_EQ(kept.size(), 2u);

  // Half of the smaller one shared.
  kept = overlap_filter({hyp(row_of(0, 0, 10), 1), hyp(row_of(0, 5, 10), 2)});
  EXPECT_EQ(kept.size(), 2u);

  // Equal size, full overlap: the later one goes.
  kept = overlap_filter({hyp(row_of(0, 0, 10), 1), hyp(row_of(0, 0, 10), 2)});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].cluster_label, 1);
}

TEST(OverlapFilterProperty, IdempotentAndPairwiseBounded) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<SegmentHypothesis> hs;
    for (int i = 0; i < 8; ++i) {
      const int x0 = rng.uniform_int(0, 20), y0 = rng.uniform_int(0, 20);
      const int w = rng.uniform_int(2, 12), h = rng.uniform_int(2, 12);
      hs.push_back(hyp(block_points({BoundingBox{x0, y0, x0 + w, y0 + h}}).points, i));
    }
    const auto once = overlap_filter(hs);
    const auto twice = overlap_filter(once);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      EXPECT_EQ(once[i].cluster_label, twice[i].cluster_label);
      for (std::size_t j = i + 1; j < once.size(); ++j) {
        const double smaller = double(std::min(once[i].pixels.size(), once[j].pixels.size()));
        EXPECT_LE(double(pixel_overlap(once[i].pixels, once[j].pixels)), 0.9 * smaller);
      }
    }
  }
}

TEST(ResolveSharedPixels, FinerBandwidthKeepsSharedPixels) {
  // A coarse cluster that swallowed two pixels of a finer neighbour.
  std::vector<Point> coarse = row_of(0, 0, 40);
  coarse.push_back({5, 20});
  coarse.push_back({6, 20});
  SegmentHypothesis a = hyp(coarse, 0);
  a.source_bandwidth = 40;
  SegmentHypothesis b = hyp(row_of(20, 0, 40), 1);
  b.source_bandwidth = 18;
  const auto out = resolve_shared_pixels({a, b}, 5);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].pixels.size(), 40u);
  EXPECT_EQ(out[0].bbox, (BoundingBox{0, 0, 39, 0}));
  EXPECT_EQ(out[1].pixels.size(), 40u);

  // Equal bandwidths: the first claimant wins; emptied hypotheses vanish.
  SegmentHypothesis c = hyp(row_of(0, 0, 10), 2);
  SegmentHypothesis d = hyp(row_of(0, 0, 10), 3);
  const auto tie = resolve_shared_pixels({c, d}, 1);
  ASSERT_EQ(tie.size(), 1u);
  EXPECT_EQ(tie[0].cluster_label, 2);
}

TEST(ResolveSharedPixelsProperty, DisjointAndCovering) {
  Rng rng(78);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<SegmentHypothesis> hs;
    std::set<Point> all;
    for (int i = 0; i < 6; ++i) {
      const int x0 = rng.uniform_int(0, 20), y0 = rng.uniform_int(0, 20);
      hs.push_back(hyp(block_points({BoundingBox{x0, y0, x0 + rng.uniform_int(2, 12),
                                                 y0 + rng.uniform_int(2, 12)}})
                           .points,
                       i));
      hs.back().source_bandwidth = rng.uniform(1, 50);
      all.insert(hs.back().pixels.begin(), hs.back().pixels.end());
    }
    const auto out = resolve_shared_pixels(hs, 1);
    std::set<Point> seen;
    for (const auto& h : out) {
      EXPECT_EQ(h.bbox, points_to_bbox(h.pixels));
      for (const Point& p : h.pixels) EXPECT_TRUE(seen.insert(p).second);
    }
    EXPECT_EQ(seen, all);
  }
}

TEST(Segment, FourBlockGrid) {
  // 2x2 grid of 40x40 blocks on a 200x200 canvas.
  const std::vector<BoundingBox> blocks{
      {30, 30, 69, 69}, {130, 30, 169, 69}, {30, 130, 69, 169}, {130, 130, 169, 169}};
  const PointSet pts = block_points({blocks[0], blocks[1], blocks[2], blocks[3]});
  const SegmentationResult r = segment(ForegroundSet(pts), {.seed = 7});
  ASSERT_EQ(r.hypotheses.size(), 4u);
  std::set<Point> claimed;
  for (const auto& h : r.hypotheses) {
    for (const Point& p : h.pixels) EXPECT_TRUE(claimed.insert(p).second) << "pixel in two hypotheses";
  }
  std::set<std::size_t> owners;
  for (const auto& h : r.hypotheses) {
    EXPECT_EQ(h.bbox, points_to_bbox(h.pixels));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::size_t inside = count_inside(h.pixels, blocks[b]);
      if (inside >= 0.95 * 1600) {
        owners.insert(b);
      } else {
        const BoundingBox core{blocks[b].x_min + 5, blocks[b].y_min + 5, blocks[b].x_max - 5,
                               blocks[b].y_max - 5};
        EXPECT_EQ(count_inside(h.pixels, core), 0u);
      }
    }
  }
  EXPECT_EQ(owners.size(), 4u);
}

TEST(Segment, SingleGlyphIsCoveredUnderConcaveBand) {
  // The plateau default ignores count-1 runs, so one-character seals need the
  // concave-band rule.
  for (std::uint64_t seed : {5u, 17u, 42u}) {
    const PointSet pts = normalize_size(mask_to_points(synthetic_glyph(seed)));
    const SegmentationResult r =
        segment(ForegroundSet(pts), {.seed = 3, .rule = SelectionRule::kConcaveBand});
    ASSERT_GE(r.hypotheses.size(), 1u);
    EXPECT_GE(r.hypotheses[0].pixels.size(), 0.95 * pts.size()) << "glyph " << seed;
  }
}

TEST(Segment, UnequalVerticalPair) {
  const std::vector<BoundingBox> truth{{80, 10, 129, 79}, {85, 130, 124, 190}};
  const PointSet pts = block_points({truth[0], truth[1]});
  const SegmentationResult r = segment(ForegroundSet(pts), {.seed = 11});
  ASSERT_EQ(r.hypotheses.size(), 2u);
  for (const BoundingBox& t : truth) {
    double best = 0;
    for (const auto& h : r.hypotheses) best = std::max(best, box_iou(h.bbox, t));
    EXPECT_GE(best, 0.5);
  }
}

TEST(SegmentProperty, DeterministicForSeed) {
  const PointSet pts = block_points({BoundingBox{10, 10, 40, 60}, BoundingBox{90, 20, 130, 70}});
  for (SelectionRule rule : {SelectionRule::kPlateau, SelectionRule::kConcaveBand}) {
    const SegmentConfig cfg{.seed = 99, .rule = rule};
    const SegmentationResult a = segment(ForegroundSet(pts), cfg);
    const SegmentationResult b = segment(ForegroundSet(pts), cfg);
    EXPECT_EQ(a.candidate_bandwidths, b.candidate_bandwidths);
    ASSERT_EQ(a.hypotheses.size(), b.hypotheses.size());
    for (std::size_t i = 0; i < a.hypotheses.size(); ++i) {
      EXPECT_EQ(a.hypotheses[i].pixels, b.hypotheses[i].pixels);
    }
    for (std::size_t i = 0; i < a.curve.samples.size(); ++i) {
      EXPECT_EQ(a.curve.samples[i], b.curve.samples[i]);
    }
  }
}

TEST(StripBorder, RemovesEnclosingOutlineOnly) {
  BinaryMask m(100, 100);
  for (int i = 0; i < 100; ++i) {
    m.set(i, 0);
    m.set(i, 99);
    m.set(0, i);
    m.set(99, i);
  }
  for (int y = 30; y < 60; ++y) {
    for (int x = 30; x < 60; ++x) m.set(x, y);
  }
  const BinaryMask out = strip_enclosing_border(m);
  EXPECT_EQ(out.count(), 900u);
  const BinaryMask none = strip_enclosing_border(out);
  EXPECT_EQ(none, out);
}
