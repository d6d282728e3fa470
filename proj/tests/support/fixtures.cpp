#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sealkit/synth.hpp"

namespace fixtures {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_glyph_png(const BinaryMask& mask, const fs::path& path) {
  fs::create_directories(path.parent_path());
  sealkit::save_image(sealkit::mask_to_image(mask), path);
}

std::vector<GlyphClass> write_glyph_classes(const fs::path& dir, int count,
                                            std::uint64_t first_seed) {
  std::vector<GlyphClass> out;
  for (int i = 0; i < count; ++i) {
    char label[16];
    std::snprintf(label, sizeof label, "c%02d", i);
    GlyphClass g{label, std::string(label) + "_ref", first_seed + static_cast<std::uint64_t>(i)};
    write_glyph_png(pad(sealkit::synthetic_glyph(g.seed), 6), dir / g.label / (g.glyph_id + ".png"));
    out.push_back(g);
  }
  return out;
}

BinaryMask filled_rect(int w, int h, int x0, int y0, int rw, int rh) {
  BinaryMask m(w, h);
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) m.set(x, y);
  }
  return m;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (out.contains(x + dx, y + dy)) out.set(x + dx, y + dy);
        }
      }
    }
  }
  return out;
}

BinaryMask translate(const BinaryMask& mask, int dx, int dy) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y) && out.contains(x + dx, y + dy)) out.set(x + dx, y + dy);
    }
  }
  return out;
}

BinaryMask pad(const BinaryMask& mask, int margin) {
  BinaryMask out(mask.width() + 2 * margin, mask.height() + 2 * margin);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) out.set(x + margin, y + margin);
    }
  }
  return out;
}

BinaryMask cross_mask(int size, int arm) {
  BinaryMask m(size, size);
  const int c = size / 2;
  for (int i = c - arm; i <= c + arm; ++i) {
    for (int t = -1; t <= 1; ++t) {
      m.set(i, c + t);
      m.set(c + t, i);
    }
  }
  return m;
}

BinaryMask ring_mask(int size, double r_in, double r_out) {
  BinaryMask m(size, size);
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double d = std::hypot(x - c, y - c);
      if (d >= r_in && d <= r_out) m.set(x, y);
    }
  }
  return m;
}

BinaryMask overlay(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out = a;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (b.get(x, y)) out.set(x, y);
    }
  }
  return out;
}

std::vector<BinaryMask> shape_suite() {
  std::vector<BinaryMask> s;
  s.push_back(filled_rect(40, 30, 5, 10, 25, 6));
  s.push_back(filled_rect(30, 40, 12, 3, 7, 30));
  s.push_back(cross_mask(41, 15));
  s.push_back(overlay(filled_rect(60, 60, 10, 27, 40, 6), filled_rect(60, 60, 27, 5, 6, 50)));
  s.push_back(ring_mask(50, 12, 17));
  s.push_back(ring_mask(80, 25, 31));
  for (std::uint64_t seed : {3u, 14u, 15u, 92u}) {
    s.push_back(pad(sealkit::synthetic_glyph(seed, 96), 4));
  }
  return s;
}

std::vector<sealkit::Point> blob(int cx, int cy) {
  std::vector<sealkit::Point> out;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) out.push_back({cx + dx, cy + dy});
  }
  out.push_back({cx + 2, cy});
  return out;
}

sealkit::PointSet two_blobs() {
  std::vector<sealkit::Point> pts = blob(2, 2);
  const auto b = blob(102, 102);
  pts.insert(pts.end(), b.begin(), b.end());
  return sealkit::make_unique_points(pts);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
