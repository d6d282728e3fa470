#include "sealkit/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sealkit/error.hpp"

namespace sealkit {

double corner_distance(const CornerSet& a, const CornerSet& b) {
  if (a.points.empty() && b.points.empty()) return 0.0;
  if (a.points.empty() || b.points.empty()) return kMissingCornerDistance;
  return point_set_distance(a.points, b.points);
}

FeatureDistances feature_distances(const GlyphRecord& query, const GlyphRecord& record) {
  FeatureDistances d;
  d.harris = corner_distance(query.geometric.corners, record.geometric.corners);
  d.hog = cosine_distance(query.geometric.hog.values, record.geometric.hog.values);
  const auto& qs = query.geometric.skeleton.points;
  const auto& rs = record.geometric.skeleton.points;
  if (qs.empty() && rs.empty()) {
    d.skeleton = 0.0;
  } else if (qs.empty() || rs.empty()) {
    d.skeleton = kMissingCornerDistance;
  } else {
    d.skeleton = point_set_distance(qs, rs);
  }
  if (query.embedding && record.embedding) {
    d.cnn = cosine_distance(*query.embedding, *record.embedding);
  }
  return d;
}

std::vector<double> normalize_scores(std::span<const double> distances) {
  if (distances.empty()) fail(ErrorCode::kInvalidArgument, "no distances to normalize");
  for (double d : distances) {
    if (!std::isfinite(d)) fail(ErrorCode::kInvalidArgument, "non-finite distance");
  }
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  std::vector<double> out(distances.size(), 1.0);
  const double span = *hi - *lo;
  if (span == 0.0) return out;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    out[i] = 1.0 - (distances[i] - *lo) / span;
  }
  return out;
}

double fuse(double s_cnn, double s_geo, const Weights& w) {
  if (w.w_cf < 0.0 || w.w_gf < 0.0) fail(ErrorCode::kInvalidArgument, "weights must be >= 0");
  const double sum = w.w_cf + w.w_gf;
  if (!(sum > 0.0)) fail(ErrorCode::kInvalidArgument, "weight sum must be positive");
  return (w.w_cf * s_cnn + w.w_gf * s_geo) / sum;
}

RankResult rank(const GlyphRecord& query, std::span<const GlyphRecord> db, const Weights& w) {
  if (db.empty()) fail(ErrorCode::kInvalidArgument, "empty glyph database");
  fuse(0.0, 0.0, w);  // validates the weights

  RankResult result;
  Weights eff = w;
  const bool all_embedded =
      query.embedding &&
      std::all_of(db.begin(), db.end(), [](const GlyphRecord& r) { return r.embedding.has_value(); });
  if (w.w_cf > 0.0 && !all_embedded) {
    if (!(w.w_gf > 0.0)) {
      fail(ErrorCode::kDataError, "embeddings are missing and w_gf is 0: nothing to rank by");
    }
    eff.w_cf = 0.0;
    result.embedding_ignored = true;
    result.warnings.push_back(query.embedding
                                  ? "some database records lack embeddings; w_cf treated as 0"
                                  : "query has no embedding; w_cf treated as 0");
  }

  const std::size_t n = db.size();
  std::vector<FeatureDistances> dist(n);
  std::vector<double> dh(n), dg(n), ds(n), dc;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = feature_distances(query, db[i]);
    dh[i] = dist[i].harris;
    dg[i] = dist[i].hog;
    ds[i] = dist[i].skeleton;
  }
  const std::vector<double> sh = normalize_scores(dh);
  const std::vector<double> sg = normalize_scores(dg);
  const std::vector<double> ss = normalize_scores(ds);
  std::vector<double> sc(n, 0.0);
  if (eff.w_cf > 0.0) {
    for (const auto& d : dist) dc.push_back(*d.cnn);
    sc = normalize_scores(dc);
  }

  result.matches.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    RankedMatch& m = result.matches[i];
    m.glyph_id = db[i].glyph_id;
    m.label = db[i].label;
    ScoreBreakdown& b = m.breakdown;
    b.harris = sh[i];
    b.hog = sg[i];
    b.skeleton = ss[i];
    b.s_geo = (sh[i] + sg[i] + ss[i]) / 3.0;
    b.s_cnn = sc[i];
    b.s_total = fuse(b.s_cnn, b.s_geo, eff);
    b.distances = dist[i];
  }
  std::stable_sort(result.matches.begin(), result.matches.end(),
                   [](const RankedMatch& a, const RankedMatch& b) {
                     if (a.breakdown.s_total != b.breakdown.s_total) {
                       return a.breakdown.s_total > b.breakdown.s_total;
                     }
                     return a.glyph_id < b.glyph_id;
                   });
  for (std::size_t i = 0; i < n; ++i) result.matches[i].rank = static_cast<int>(i) + 1;
  return result;
}

double mrr(std::span<const int> ranks) {
  if (ranks.empty()) fail(ErrorCode::kInvalidArgument, "MRR needs at least one rank");
  double acc = 0.0;
  for (int r : ranks) {
    if (r < 1) fail(ErrorCode::kInvalidArgument, "ranks are 1-based");
    acc += 1.0 / r;
  }
  return acc / static_cast<double>(ranks.size());
}

AverageSimilarity average_similarity(const std::vector<std::vector<double>>& pair_sims) {
  if (pair_sims.empty()) fail(ErrorCode::kInvalidArgument, "no characters");
  AverageSimilarity out;
  for (const auto& sims : pair_sims) {
    if (sims.empty()) {
      fail(ErrorCode::kInvalidArgument, "every character needs at least two images");
    }
    out.per_class.push_back(std::accumulate(sims.begin(), sims.end(), 0.0) /
                            static_cast<double>(sims.size()));
  }
  out.overall = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
                static_cast<double>(out.per_class.size());
  return out;
}

double distinction_score(std::span<const double> cross_pair_sims) {
  if (cross_pair_sims.empty()) {
    fail(ErrorCode::kInvalidArgument, "distinction score needs at least two characters");
  }
  return std::accumulate(cross_pair_sims.begin(), cross_pair_sims.end(), 0.0) /
         static_cast<double>(cross_pair_sims.size());
}

double feature_score(double s_avg, double s_dist) { return std::abs(s_avg - s_dist); }

PairSets enumerate_pairs(std::span<const std::string> labels) {
  PairSets out;
  std::map<std::string, std::size_t> class_of;
  for (const auto& l : labels) {
    if (class_of.emplace(l, out.classes.size()).second) out.classes.push_back(l);
  }
  out.within.resize(out.classes.size());
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      if (labels[a] == labels[b]) {
        out.within[class_of[labels[a]]].push_back({a, b});
      } else {
        out.cross.push_back({a, b});
      }
    }
  }
  return out;
}

FeatureReport evaluate_feature(const std::string& feature, std::span<const std::string> labels,
                               const std::function<double(std::size_t, std::size_t)>& distance) {
  const PairSets pairs = enumerate_pairs(labels);
  if (pairs.classes.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "feature evaluation needs at least two characters");
  }
  for (std::size_t c = 0; c < pairs.classes.size(); ++c) {
    if (pairs.within[c].empty()) {
      fail(ErrorCode::kInvalidArgument,
           "character " + pairs.classes[c] + " has fewer than two images");
    }
  }
  std::vector<double> d;
  for (const auto& group : pairs.within) {
    for (const auto& p : group) d.push_back(distance(p.a, p.b));
  }
  for (const auto& p : pairs.cross) d.push_back(distance(p.a, p.b));
  const std::vector<double> s = normalize_scores(d);

  FeatureReport report;
  report.feature = feature;
  std::vector<std::vector<double>> within(pairs.within.size());
  std::size_t k = 0;
  for (std::size_t c = 0; c < pairs.within.size(); ++c) {
    for (std::size_t i = 0; i < pairs.within[c].size(); ++i) within[c].push_back(s[k++]);
    report.within_pairs += pairs.within[c].size();
  }
  const std::vector<double> cross(s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
  report.cross_pairs = cross.size();
  report.average = average_similarity(within);
  report.distinction = distinction_score(cross);
  report.score = feature_score(report.average.overall, report.distinction);
  return report;
}

}  // namespace sealkit
