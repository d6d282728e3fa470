#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sealkit/color_separation.hpp"
#include "sealkit/raster.hpp"
#include "sealkit/segmentation.hpp"

namespace sealkit {

struct PipelineConfig {
  int k = kDefaultColorClusters;
  int kmeans_iters = kDefaultKMeansIterations;
  std::uint64_t seed = 0;
  /// Overrides the automatic red-cluster choice.
  std::optional<std::size_t> cluster;
  bool strip_border = true;
  SegmentConfig segment;
};

/// A character hypothesis mapped back onto the source image grid.
struct SourceHypothesis {
  BoundingBox bbox;
  PointSet pixels;
  double source_bandwidth = 0.0;
  int cluster_label = 0;
};

struct SealSegmentation {
  int width = 0;
  int height = 0;
  SeparationResult separation;
  std::size_t cluster_index = 0;
  SizeTransform transform;
  /// Hypotheses in normalized coordinates.
  SegmentationResult segmentation;
  std::vector<SourceHypothesis> hypotheses;
};

/// Color separation, red-layer choice, border strip, size normalization and
/// segmentation in one call.
SealSegmentation segment_seal(const RasterImage& image, const PipelineConfig& config = {});

/// Segmentation of an already separated image (interactive cluster choice).
SealSegmentation segment_cluster(const RasterImage& image, SeparationResult separation,
                                 std::size_t cluster_index, const PipelineConfig& config);

/// Binary mask of one hypothesis, cropped to its bounding box.
BinaryMask hypothesis_mask(const SourceHypothesis& hypothesis);

/// Source image with one translucent color per hypothesis.
RasterImage render_overlay(const RasterImage& image,
                           const std::vector<SourceHypothesis>& hypotheses);

}  // namespace sealkit
