#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sealkit/raster.hpp"

namespace sealkit {

using ColorVec = std::array<double, 3>;

struct ColorCluster {
  ColorVec centroid{};
  /// Row-major pixel indices into the source image, ascending.
  std::vector<std::size_t> member_indices;
  double redness = 0.0;
};

struct SeparationResult {
  /// Ordered by descending redness (ties: more members first).
  std::vector<ColorCluster> clusters;
  int k = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  /// Within-cluster sum of squares after each Lloyd assignment step.
  std::vector<double> wcss_history;
};

inline constexpr int kDefaultColorClusters = 3;
inline constexpr int kDefaultKMeansIterations = 100;
inline constexpr int kNormalizedExtent = 200;

/// Euclidean distance in RGB space.
double color_distance(const ColorVec& a, const ColorVec& b) noexcept;
double color_distance(const Rgb& a, const Rgb& b) noexcept;

/// R - (G + B) / 2.
double redness(const ColorVec& centroid) noexcept;

/// Lloyd's k-means over pixel colors with k-means++ seeding. K is clamped to
/// the number of distinct colors. Deterministic for a given seed.
SeparationResult kmeans_rgb(const RasterImage& image,
                            int k = kDefaultColorClusters,
                            std::uint64_t seed = 0,
                            int max_iters = kDefaultKMeansIterations);

/// Index of the cluster with the largest redness; ties go to the larger
/// cluster, then the lower index.
std::size_t select_red_cluster(const SeparationResult& result);

BinaryMask cluster_to_mask(const RasterImage& image,
                           const ColorCluster& cluster);

/// Maps normalized coordinates back onto the source pixel grid:
/// source = origin + normalized / scale.
struct SizeTransform {
  Point origin;
  double scale = 1.0;

  double to_source_x(double x) const noexcept { return origin.x + x / scale; }
  double to_source_y(double y) const noexcept { return origin.y + y / scale; }
};

struct NormalizedPoints {
  PointSet points;
  SizeTransform transform;
};

/// Translates the bounding-box origin to (0,0) and scales uniformly so the
/// longer bounding-box side spans exactly `extent`. Rounded and deduplicated.
NormalizedPoints normalize_size_with_transform(const PointSet& points,
                                               int extent = kNormalizedExtent);
PointSet normalize_size(const PointSet& points);

}  // namespace sealkit
