#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sealkit/glyph_features.hpp"

namespace sealkit {

struct GlyphRecord {
  std::string glyph_id;
  std::string label;
  GeometricFeature geometric;
  /// Reduced embedding; absent when no provider vector was available.
  std::optional<std::vector<double>> embedding;

  friend bool operator==(const GlyphRecord&, const GlyphRecord&) = default;
};

struct Weights {
  double w_cf = 1.0;
  double w_gf = 1.0;
};

/// Raw per-feature distances between a query and one record.
struct FeatureDistances {
  double harris = 0.0;
  double hog = 0.0;
  double skeleton = 0.0;
  std::optional<double> cnn;
};

struct ScoreBreakdown {
  double s_cnn = 0.0;
  double s_geo = 0.0;
  double harris = 0.0;
  double hog = 0.0;
  double skeleton = 0.0;
  double s_total = 0.0;
  FeatureDistances distances;
};

struct RankedMatch {
  std::string glyph_id;
  std::string label;
  int rank = 0;
  ScoreBreakdown breakdown;
};

struct RankResult {
  std::vector<RankedMatch> matches;
  /// Set when w_cf > 0 was requested but embeddings were missing, so w_cf
  /// was treated as 0.
  bool embedding_ignored = false;
  std::vector<std::string> warnings;
};

/// Diagonal of the standard canvas: corner distance when exactly one side
/// has no corners.
inline constexpr double kMissingCornerDistance = 318.1980515339464;

/// Modified Hausdorff between corner sets; two empty sets are at distance 0.
double corner_distance(const CornerSet& a, const CornerSet& b);

FeatureDistances feature_distances(const GlyphRecord& query, const GlyphRecord& record);

/// s_i = 1 - (d_i - min) / (max - min). An all-equal list maps to all 1.0.
/// Throws kInvalidArgument on an empty list or a non-finite value.
std::vector<double> normalize_scores(std::span<const double> distances);

/// (w_cf·s_cnn + w_gf·s_geo) / (w_cf + w_gf). Throws on negative weights or
/// a zero weight sum.
double fuse(double s_cnn, double s_geo, const Weights& w);

/// Scores every record against the query, normalising each distance column
/// over the whole db. Sorted by s_total descending, then glyph_id.
RankResult rank(const GlyphRecord& query, std::span<const GlyphRecord> db, const Weights& w);

/// Throws kInvalidArgument on an empty list or a rank below 1.
double mrr(std::span<const int> ranks);

struct AverageSimilarity {
  std::vector<double> per_class;
  double overall = 0.0;
};

/// per_class[q] is the mean of character q's pair similarities; overall is
/// the mean over characters. Each character needs at least one pair.
AverageSimilarity average_similarity(const std::vector<std::vector<double>>& pair_sims);

/// Mean similarity over cross-character pairs. Throws on an empty list.
double distinction_score(std::span<const double> cross_pair_sims);

/// |s_avg - s_dist|.
double feature_score(double s_avg, double s_dist);

struct PairIndex {
  std::size_t a = 0;
  std::size_t b = 0;
};

/// Unordered pairs (a < b) grouped by shared label, in label order of first
/// appearance, and the remaining cross-label pairs.
struct PairSets {
  std::vector<std::string> classes;
  std::vector<std::vector<PairIndex>> within;
  std::vector<PairIndex> cross;
};

PairSets enumerate_pairs(std::span<const std::string> labels);

struct FeatureReport {
  std::string feature;
  AverageSimilarity average;
  double distinction = 0.0;
  double score = 0.0;
  std::size_t within_pairs = 0;
  std::size_t cross_pairs = 0;
};

/// One feature's harness run: distances over every pair, normalised
/// together, then split into within- and cross-character similarities.
/// Needs at least two characters with at least two images each.
FeatureReport evaluate_feature(const std::string& feature, std::span<const std::string> labels,
                               const std::function<double(std::size_t, std::size_t)>& distance);

}  // namespace sealkit
