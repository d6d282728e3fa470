// Writes the demo dataset under data/sample: labeled glyph PNGs, a seal spec
// with its rendered image and truth, and an embedding manifest.
//
// The embedding provider is a stand-in: each glyph's bounding box is resampled
// onto an 8x8 occupancy grid. It exercises the KPCA and fusion path without
// shipping pretrained network weights.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "sealkit/corpus.hpp"
#include "sealkit/raster.hpp"
#include "sealkit/synth.hpp"

namespace fs = std::filesystem;
using sealkit::BinaryMask;

namespace {

constexpr int kClasses = 8;
constexpr int kPad = 6;
constexpr int kGrid = 8;
constexpr std::uint64_t kFirstSeed = 100;

BinaryMask padded(const BinaryMask& m) {
  BinaryMask out(m.width() + 2 * kPad, m.height() + 2 * kPad);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.get(x, y)) out.set(x + kPad, y + kPad);
    }
  }
  return out;
}

std::vector<double> grid_vector(const BinaryMask& m) {
  const sealkit::BoundingBox b = sealkit::points_to_bbox(sealkit::mask_to_points(m));
  const double w = b.x_max - b.x_min + 1;
  const double h = b.y_max - b.y_min + 1;
  std::vector<double> v(kGrid * kGrid, 0.0);
  std::vector<double> area(kGrid * kGrid, 0.0);
  for (int y = b.y_min; y <= b.y_max; ++y) {
    for (int x = b.x_min; x <= b.x_max; ++x) {
      const int gx = std::min(kGrid - 1, static_cast<int>((x - b.x_min) * kGrid / w));
      const int gy = std::min(kGrid - 1, static_cast<int>((y - b.y_min) * kGrid / h));
      area[gy * kGrid + gx] += 1;
      if (m.get(x, y)) v[gy * kGrid + gx] += 1;
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = area[i] > 0 ? v[i] / area[i] : 0.0;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_sample_data <out-dir>\n";
    return 1;
  }
  const fs::path out(argv[1]);
  const fs::path glyphs = out / "glyphs";

  std::vector<std::pair<std::string, BinaryMask>> made;
  for (int i = 0; i < kClasses; ++i) {
    char label[8];
    std::snprintf(label, sizeof label, "c%02d", i);
    const std::string id = std::string(label) + "_ref";
    const BinaryMask g = padded(sealkit::synthetic_glyph(kFirstSeed + i));
    fs::create_directories(glyphs / label);
    sealkit::save_image(sealkit::mask_to_image(g), glyphs / label / (id + ".png"));
    made.emplace_back(id, g);
  }

  std::ofstream(out / "embeddings.json")
      << seal::json{{"provider_id", "grid8-occupancy"}, {"dim", kGrid * kGrid}, {"count", made.size()}}
             .dump(2)
      << "\n";
  std::ofstream records(out / "embeddings.jsonl");
  for (const auto& [id, g] : made) {
    records << seal::json{{"glyph_id", id}, {"vector", grid_vector(g)}}.dump() << "\n";
  }

  sealkit::SyntheticSealSpec spec;
  spec.rows = 2;
  spec.cols = 2;
  spec.glyph_ids = {"c01_ref", "c03_ref", "c04_ref", "c06_ref"};
  spec.jitter = 3;
  spec.seed = 2;
  const auto seal = sealkit::synth_seal(spec, sealkit::directory_glyph_source(glyphs));
  seal::json spec_doc = seal::spec_to_json(spec);
  spec_doc["name"] = "seal";
  seal::write_text_file(out / "seal.json", spec_doc.dump(2) + "\n");
  sealkit::save_image(seal.image, out / "seal.png");
  seal::json truth = seal::truth_to_json(seal.truth);
  truth["spec"] = seal::spec_to_json(spec);
  seal::write_text_file(out / "seal.truth.json", truth.dump(2) + "\n");
  std::cout << "wrote " << made.size() << " glyphs and seal.png to " << out << "\n";
  return 0;
}
