#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sealkit/raster.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using sealkit::BinaryMask;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "sealkit");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Dark glyph on white, the ingestion contract.
void write_glyph_png(const BinaryMask& mask, const fs::path& path);

struct GlyphClass {
  std::string label;
  std::string glyph_id;
  std::uint64_t seed;
};

/// `count` procedural glyph classes written as `<label>/<glyph_id>.png`.
std::vector<GlyphClass> write_glyph_classes(const fs::path& dir, int count,
                                            std::uint64_t first_seed = 100);

BinaryMask filled_rect(int w, int h, int x0, int y0, int rw, int rh);
BinaryMask dilate(const BinaryMask& mask, int radius = 1);
/// Shift content by (dx, dy); pixels leaving the canvas are dropped.
BinaryMask translate(const BinaryMask& mask, int dx, int dy);
BinaryMask pad(const BinaryMask& mask, int margin);

/// Plus sign with 3-px arms reaching `arm` from the centre.
BinaryMask cross_mask(int size, int arm);
/// Annulus centred on the canvas.
BinaryMask ring_mask(int size, double r_in, double r_out);
/// Union of two equal-size masks.
BinaryMask overlay(const BinaryMask& a, const BinaryMask& b);
/// Ten shapes: bars, crosses, rings, glyph renders.
std::vector<BinaryMask> shape_suite();

/// Ten lattice points within distance 2 of (cx, cy).
std::vector<sealkit::Point> blob(int cx, int cy);
/// Two such blobs, 100 px apart on each axis.
sealkit::PointSet two_blobs();

std::string read_file(const fs::path& path);

}  // namespace fixtures
