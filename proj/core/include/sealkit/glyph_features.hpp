#pragma once

#include <span>
#include <string>
#include <vector>

#include "sealkit/raster.hpp"

namespace sealkit {

inline constexpr int kStandardSize = 225;

enum class GlyphOrigin { kTypeface, kQuerySegment };

const char* to_string(GlyphOrigin origin) noexcept;

/// A 225×225 mask with its content tight-cropped, scaled and centred.
struct StandardGlyph {
  BinaryMask mask;
  GlyphOrigin source = GlyphOrigin::kTypeface;

  friend bool operator==(const StandardGlyph&, const StandardGlyph&) = default;
};

struct SkeletonMap {
  BinaryMask mask;
  PointSet points;  // row-major

  friend bool operator==(const SkeletonMap&, const SkeletonMap&) = default;
};

struct CornerSet {
  PointSet points;  // row-major
  std::vector<double> responses;

  friend bool operator==(const CornerSet&, const CornerSet&) = default;
};

/// 8×8 cells over the top-left 224×224 window, 9 unsigned bins, 2×2 blocks
/// with stride 1.
struct HogLayout {
  static constexpr int kCellSize = 8;
  static constexpr int kCells = 28;
  static constexpr int kBins = 9;
  static constexpr int kBlocks = kCells - 1;
  static constexpr std::size_t kLength =
      static_cast<std::size_t>(kBlocks) * kBlocks * 4 * kBins;
};

struct HogDescriptor {
  std::vector<double> values;
  int cells_x = HogLayout::kCells;
  int cells_y = HogLayout::kCells;
  int bins = HogLayout::kBins;

  friend bool operator==(const HogDescriptor&, const HogDescriptor&) = default;
};

struct HarrisOptions {
  double k = 0.04;
  double rel_threshold = 0.01;
  int nms_radius = 4;
  double sigma = 1.5;

  friend bool operator==(const HarrisOptions&, const HarrisOptions&) = default;
};

enum class HogInput { kSkeleton, kRegular };

const char* to_string(HogInput input) noexcept;
HogInput parse_hog_input(const std::string& name);

struct FeatureOptions {
  HarrisOptions harris;
  HogInput hog_input = HogInput::kSkeleton;

  friend bool operator==(const FeatureOptions&, const FeatureOptions&) = default;
};

struct GeometricFeature {
  SkeletonMap skeleton;
  CornerSet corners;
  HogDescriptor hog;

  friend bool operator==(const GeometricFeature&, const GeometricFeature&) = default;
};

/// Throws kInvalidArgument on an empty mask. Nearest-neighbour scaling; the
/// longer side becomes exactly 225.
StandardGlyph standardize(const BinaryMask& mask,
                          GlyphOrigin source = GlyphOrigin::kTypeface);

/// Classic two-subiteration thinning to a fixpoint. Out-of-bounds
/// neighbours are background.
SkeletonMap zhang_suen_thin(const BinaryMask& mask);

/// Response R = det(M) - k·trace(M)² per pixel, row-major. M is built from
/// Sobel gradients of the 0/1 mask (replicated border) smoothed by a
/// Gaussian window.
std::vector<double> harris_response(const BinaryMask& mask, double k = 0.04,
                                    double sigma = 1.5);

/// Pixels with R > rel_threshold·max(R) that dominate their
/// (2·nms_radius+1)² window: strictly above earlier pixels in row-major
/// order, not below later ones. Uniform masks give no corners.
CornerSet harris_corners(const BinaryMask& mask, const HarrisOptions& options = {});

/// Requires a 225×225 mask. Block vectors are L2-normalised, clipped at 0.2
/// and renormalised; all-zero blocks stay zero.
HogDescriptor hog(const BinaryMask& mask);

/// Modified Hausdorff distance. Throws kInvalidArgument on an empty set.
double point_set_distance(const PointSet& a, const PointSet& b);

/// 1 - cos(a, b), clamped to [0, 2]. Identical vectors are at exactly 0; a
/// zero vector is at 1 from any non-zero one. Throws on length mismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Harris on the standardized map, HOG on the skeleton unless overridden.
GeometricFeature extract_features(const StandardGlyph& glyph,
                                  const FeatureOptions& options = {});

}  // namespace sealkit
