#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sealkit/raster.hpp"
#include "sealkit/segmentation.hpp"

namespace sealkit {

enum class SealShape { kSquare, kRect, kCircleBorder };

const char* to_string(SealShape shape) noexcept;
SealShape parse_seal_shape(const std::string& name);

inline constexpr Rgb kSealRed{180, 30, 30};
inline constexpr Rgb kPaperWhite{245, 242, 235};
inline constexpr Rgb kInkGray{80, 80, 86};

struct SyntheticSealSpec {
  /// Grid layout; ignored when `offsets` is non-empty.
  int rows = 2;
  int cols = 2;
  /// Irregular layout: glyph centers on the canvas.
  std::vector<Point> offsets;
  std::vector<std::string> glyph_ids;
  /// Zero derives the canvas from the layout.
  int canvas_width = 0;
  int canvas_height = 0;
  /// Per-glyph scale; empty means 1.0 everywhere.
  std::vector<double> scales;
  int jitter = 0;
  SealShape shape = SealShape::kSquare;
  std::uint64_t seed = 0;
  bool handwriting = true;
  int cell_size = 100;
  /// Glyph longest side as a fraction of the cell at scale 1.
  double fill = 0.62;
  /// Per-channel uniform noise amplitude.
  int noise = 6;

  std::size_t slot_count() const noexcept {
    return offsets.empty() ? static_cast<std::size_t>(rows * cols) : offsets.size();
  }
};

struct GroundTruthGlyph {
  std::string glyph_id;
  BoundingBox box;
  PointSet pixels;
};

struct GroundTruth {
  int width = 0;
  int height = 0;
  std::vector<GroundTruthGlyph> glyphs;
  /// Seal outline pixels (red layer, never part of a glyph).
  PointSet border;
};

struct SyntheticSeal {
  RasterImage image;
  GroundTruth truth;
};

/// Supplies the binary glyph image for an id.
using GlyphSource = std::function<BinaryMask(const std::string& glyph_id)>;

/// Procedural stroke glyph, deterministic in `seed`.
BinaryMask synthetic_glyph(std::uint64_t seed, int size = 128);

/// Resolves ids of the form "syn-<n>" to synthetic_glyph(n).
GlyphSource procedural_glyph_source();

SyntheticSeal synth_seal(const SyntheticSealSpec& spec, const GlyphSource& glyphs);

struct GlyphVerdict {
  std::string glyph_id;
  double iou = 0.0;
  int matched_hypothesis = -1;
};

struct SealVerdict {
  bool correct = false;
  std::size_t hypothesis_count = 0;
  std::vector<GlyphVerdict> glyphs;
};

inline constexpr double kMatchIou = 0.5;

/// Greedy one-to-one matching by descending box IoU. Correct iff the counts
/// agree and every truth glyph matches at IoU >= 0.5.
SealVerdict score_segmentation(const std::vector<BoundingBox>& hypotheses,
                               const GroundTruth& truth);
SealVerdict score_segmentation(const SegmentationResult& result, const GroundTruth& truth);

double corpus_accuracy(const std::vector<SealVerdict>& verdicts);

struct SealCorpusOptions {
  std::size_t count = 100;
  /// Drives glyph choice and per-glyph scale.
  std::uint64_t seed = 12345;
  /// Seal i renders with seed first_seal_seed + i.
  std::uint64_t first_seal_seed = 1000;
  int jitter = 4;
  double scale_min = 0.8;
  double scale_max = 1.2;
};

/// Cycles 1x2, 2x2 and 2x3 grids and, every third seal, the next shape.
/// Glyph ids are procedural ("syn-<n>").
std::vector<SyntheticSealSpec> make_seal_corpus(const SealCorpusOptions& options = {});

}  // namespace sealkit
