#include "sealkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "sealkit/error.hpp"
#include "sealkit/rng.hpp"

namespace sealkit {
namespace {

struct Vec2 {
  double x, y;
};

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

template <typename Plot>
void thick_segment(Vec2 a, Vec2 b, double thickness, int width, int height, Plot&& plot) {
  const double r = thickness / 2.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (segment_distance({double(x), double(y)}, a, b) <= r) plot(x, y);
    }
  }
}

std::uint8_t clamp_channel(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

Rgb noisy(Rgb c, int amplitude, Rng& rng) {
  if (amplitude <= 0) return c;
  return {clamp_channel(c.r + rng.uniform_int(-amplitude, amplitude)),
          clamp_channel(c.g + rng.uniform_int(-amplitude, amplitude)),
          clamp_channel(c.b + rng.uniform_int(-amplitude, amplitude))};
}

// Nearest-neighbor rescale of the content bbox so its longest side is `target`.
BinaryMask fit_glyph(const BinaryMask& src, int target) {
  const PointSet pts = mask_to_points(src);
  if (pts.empty()) fail(ErrorCode::kDataError, "glyph image has no foreground");
  const BinaryMask tight = crop(src, points_to_bbox(pts));
  const double scale = static_cast<double>(target) / std::max(tight.width(), tight.height());
  const int w = std::max(1, static_cast<int>(std::lround(tight.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(tight.height() * scale)));
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(tight.height() - 1, static_cast<int>((y + 0.5) * tight.height() / h));
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(tight.width() - 1, static_cast<int>((x + 0.5) * tight.width() / w));
      out.set(x, y, tight.get(sx, sy));
    }
  }
  return out;
}

}  // namespace

const char* to_string(SealShape shape) noexcept {
  switch (shape) {
    case SealShape::kSquare: return "square";
    case SealShape::kRect: return "rect";
    case SealShape::kCircleBorder: return "circle-border";
  }
  return "square";
}

SealShape parse_seal_shape(const std::string& name) {
  if (name == "square") return SealShape::kSquare;
  if (name == "rect") return SealShape::kRect;
  if (name == "circle-border" || name == "circle") return SealShape::kCircleBorder;
  fail(ErrorCode::kInvalidArgument, "unknown seal shape: " + name);
}

BinaryMask synthetic_glyph(std::uint64_t seed, int size) {
  if (size < 16) fail(ErrorCode::kInvalidArgument, "glyph size must be >= 16");
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL);
  BinaryMask mask(size, size);
  const double margin = size / 10.0;
  const double span = size - 2 * margin;
  const double thickness = std::max(3.0, size / 12.0);
  auto anchor = [&](int i) { return margin + span * i / 4.0; };
  auto plot = [&](int x, int y) { mask.set(x, y); };
  auto stroke = [&](int c0, int r0, int c1, int r1) {
    thick_segment({anchor(c0), anchor(r0)}, {anchor(c1), anchor(r1)}, thickness, size, size, plot);
  };

  // Two full-span strokes fix the extent and connect the extras.
  const int r = rng.uniform_int(0, 4);
  stroke(0, r, 4, r);
  const int c = rng.uniform_int(0, 4);
  stroke(c, 0, c, 4);
  const int extra = rng.uniform_int(4, 8);
  for (int s = 0; s < extra; ++s) {
    const int kind = rng.uniform_int(0, 4);
    const int c0 = rng.uniform_int(0, 3);
    const int r0 = rng.uniform_int(0, 3);
    switch (kind) {
      case 0: stroke(c0, r0, rng.uniform_int(c0 + 1, 4), r0); break;  // horizontal
      case 1: stroke(c0, r0, c0, rng.uniform_int(r0 + 1, 4)); break;  // vertical
      case 2: stroke(c0, r0, std::min(4, c0 + rng.uniform_int(1, 2)),
                     std::min(4, r0 + rng.uniform_int(1, 2))); break;  // falling diagonal
      case 3: stroke(c0 + 1, r0, c0, std::min(4, r0 + rng.uniform_int(1, 2))); break;
      default: {  // box
        const int c1 = rng.uniform_int(c0 + 1, 4);
        const int r1 = rng.uniform_int(r0 + 1, 4);
        stroke(c0, r0, c1, r0);
        stroke(c0, r1, c1, r1);
        stroke(c0, r0, c0, r1);
        stroke(c1, r0, c1, r1);
      }
    }
  }
  return mask;
}

GlyphSource procedural_glyph_source() {
  return [](const std::string& id) {
    if (id.rfind("syn-", 0) != 0) {
      fail(ErrorCode::kNotFound, "no procedural glyph for id: " + id);
    }
    try {
      return synthetic_glyph(std::stoull(id.substr(4)));
    } catch (const std::logic_error&) {
      fail(ErrorCode::kInvalidArgument, "malformed procedural glyph id: " + id);
    }
  };
}

SyntheticSeal synth_seal(const SyntheticSealSpec& spec, const GlyphSource& glyphs) {
  const std::size_t slots = spec.slot_count();
  if (spec.offsets.empty() && (spec.rows < 1 || spec.cols < 1)) {
    fail(ErrorCode::kInvalidArgument, "grid layout needs rows, cols >= 1");
  }
  if (spec.glyph_ids.size() != slots) {
    fail(ErrorCode::kInvalidArgument, "glyph count does not match layout slot count");
  }
  if (!spec.scales.empty() && spec.scales.size() != slots) {
    fail(ErrorCode::kInvalidArgument, "per-glyph scale count does not match slot count");
  }
  if (spec.jitter < 0 || spec.cell_size < 8) {
    fail(ErrorCode::kInvalidArgument, "invalid jitter or cell size");
  }

  Rng rng(spec.seed);
  const int margin = spec.cell_size / 5;
  const int cell_w = spec.cell_size;
  const int cell_h = spec.cell_size;

  // Layout block and canvas.
  std::vector<Vec2> anchors;
  int width = spec.canvas_width;
  int height = spec.canvas_height;
  double ring_radius = 0.0;
  if (spec.offsets.empty()) {
    const int block_w = spec.cols * cell_w;
    const int block_h = spec.rows * cell_h;
    if (spec.shape == SealShape::kCircleBorder) {
      const int side =
          static_cast<int>(std::ceil(2 * std::hypot(block_w / 2.0, block_h / 2.0))) + 2 * margin;
      if (width == 0) width = side;
      if (height == 0) height = side;
    } else {
      if (width == 0) width = block_w + 2 * margin;
      if (height == 0) height = block_h + 2 * margin;
    }
    const double ox = (width - block_w) / 2.0;
    const double oy = (height - block_h) / 2.0;
    // Seals read top-to-bottom, right-to-left; slot order is row-major here.
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        anchors.push_back({ox + (c + 0.5) * cell_w, oy + (r + 0.5) * cell_h});
      }
    }
  } else {
    if (width <= 0 || height <= 0) {
      fail(ErrorCode::kInvalidArgument, "irregular layouts need an explicit canvas size");
    }
    for (const Point& p : spec.offsets) anchors.push_back({double(p.x), double(p.y)});
  }
  if (width < 1 || height < 1) fail(ErrorCode::kInvalidArgument, "canvas must be non-empty");

  // Place glyph masks.
  struct Placed {
    BinaryMask mask;
    int x0, y0;
  };
  std::vector<Placed> placed;
  for (std::size_t i = 0; i < slots; ++i) {
    const double scale = spec.scales.empty() ? 1.0 : spec.scales[i];
    if (!(scale > 0.0)) fail(ErrorCode::kInvalidArgument, "glyph scale must be positive");
    const int target = std::max(4, static_cast<int>(std::lround(std::min(cell_w, cell_h) *
                                                                spec.fill * scale)));
    BinaryMask g = fit_glyph(glyphs(spec.glyph_ids[i]), target);
    const int jx = spec.jitter > 0 ? rng.uniform_int(-spec.jitter, spec.jitter) : 0;
    const int jy = spec.jitter > 0 ? rng.uniform_int(-spec.jitter, spec.jitter) : 0;
    const int x0 = static_cast<int>(std::lround(anchors[i].x - g.width() / 2.0)) + jx;
    const int y0 = static_cast<int>(std::lround(anchors[i].y - g.height() / 2.0)) + jy;
    if (x0 < 0 || y0 < 0 || x0 + g.width() > width || y0 + g.height() > height) {
      fail(ErrorCode::kInvalidArgument, "glyph " + spec.glyph_ids[i] + " leaves the canvas");
    }
    placed.push_back({std::move(g), x0, y0});
  }
  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      const auto& a = placed[i];
      const auto& b = placed[j];
      const int iw = std::min(a.x0 + a.mask.width(), b.x0 + b.mask.width()) - std::max(a.x0, b.x0);
      const int ih = std::min(a.y0 + a.mask.height(), b.y0 + b.mask.height()) - std::max(a.y0, b.y0);
      if (iw <= 0 || ih <= 0) continue;
      const double smaller = std::min(double(a.mask.width()) * a.mask.height(),
                                      double(b.mask.width()) * b.mask.height());
      if (double(iw) * ih > 0.05 * smaller) {
        fail(ErrorCode::kInvalidArgument, "glyphs overlap by more than 5% at this jitter");
      }
    }
  }

  SyntheticSeal out{RasterImage(width, height), {}};
  out.truth.width = width;
  out.truth.height = height;
  RasterImage& img = out.image;
  for (auto& px : img.pixels()) px = noisy(kPaperWhite, spec.noise, rng);

  // Handwriting passes under the seal.
  if (spec.handwriting) {
    const int strokes = rng.uniform_int(1, 3);
    for (int s = 0; s < strokes; ++s) {
      Vec2 a{rng.uniform(0, width), 0.0};
      Vec2 b{rng.uniform(0, width), static_cast<double>(height - 1)};
      if (rng.uniform() < 0.5) {
        a = {0.0, rng.uniform(0, height)};
        b = {static_cast<double>(width - 1), rng.uniform(0, height)};
      }
      thick_segment(a, b, 3.0, width, height,
                    [&](int x, int y) { img.at(x, y) = noisy(kInkGray, spec.noise, rng); });
    }
  }

  BinaryMask owned(width, height);
  for (std::size_t i = 0; i < placed.size(); ++i) {
    GroundTruthGlyph gt;
    gt.glyph_id = spec.glyph_ids[i];
    const auto& p = placed[i];
    for (int y = 0; y < p.mask.height(); ++y) {
      for (int x = 0; x < p.mask.width(); ++x) {
        if (!p.mask.get(x, y)) continue;
        const int cx = p.x0 + x, cy = p.y0 + y;
        img.at(cx, cy) = noisy(kSealRed, spec.noise, rng);
        if (owned.get(cx, cy)) continue;
        owned.set(cx, cy);
        gt.pixels.points.push_back({cx, cy});
      }
    }
    std::sort(gt.pixels.points.begin(), gt.pixels.points.end(), RowMajorLess{});
    gt.box = points_to_bbox(gt.pixels);
    out.truth.glyphs.push_back(std::move(gt));
  }

  if (spec.shape == SealShape::kRect) {
    // Frame clears the glyph union box by a fixed gap.
    BoundingBox u = out.truth.glyphs.front().box;
    for (const auto& g : out.truth.glyphs) {
      u.x_min = std::min(u.x_min, g.box.x_min);
      u.y_min = std::min(u.y_min, g.box.y_min);
      u.x_max = std::max(u.x_max, g.box.x_max);
      u.y_max = std::max(u.y_max, g.box.y_max);
    }
    const BoundingBox outer{u.x_min - 9, u.y_min - 9, u.x_max + 9, u.y_max + 9};
    if (outer.x_min < 0 || outer.y_min < 0 || outer.x_max >= width || outer.y_max >= height) {
      fail(ErrorCode::kInvalidArgument, "canvas too small for the rectangular frame");
    }
    for (int y = outer.y_min; y <= outer.y_max; ++y) {
      for (int x = outer.x_min; x <= outer.x_max; ++x) {
        const bool inner = x > outer.x_min + 2 && x < outer.x_max - 2 && y > outer.y_min + 2 &&
                           y < outer.y_max - 2;
        if (inner || owned.get(x, y)) continue;
        img.at(x, y) = noisy(kSealRed, spec.noise, rng);
        out.truth.border.points.push_back({x, y});
      }
    }
  }
  if (spec.shape == SealShape::kCircleBorder) {
    // Ring clears the outermost glyph pixel by a fixed gap.
    const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
    for (const auto& g : out.truth.glyphs) {
      for (const Point& p : g.pixels) ring_radius = std::max(ring_radius, std::hypot(p.x - cx, p.y - cy));
    }
    ring_radius += 6.0;
    if (ring_radius + 2.0 > std::min(width, height) / 2.0) {
      fail(ErrorCode::kInvalidArgument, "canvas too small for the circular border");
    }
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (std::abs(std::hypot(x - cx, y - cy) - ring_radius) > 1.5) continue;
        if (owned.get(x, y)) continue;
        img.at(x, y) = noisy(kSealRed, spec.noise, rng);
        out.truth.border.points.push_back({x, y});
      }
    }
  }
  return out;
}

SealVerdict score_segmentation(const std::vector<BoundingBox>& hypotheses,
                               const GroundTruth& truth) {
  SealVerdict v;
  v.hypothesis_count = hypotheses.size();
  for (const auto& g : truth.glyphs) v.glyphs.push_back({g.glyph_id, 0.0, -1});

  struct Pair {
    double iou;
    std::size_t t, h;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < truth.glyphs.size(); ++t) {
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
      const double iou = box_iou(truth.glyphs[t].box, hypotheses[h]);
      if (iou > 0.0) pairs.push_back({iou, t, h});
    }
  }
  // Ties broken by truth index then box coordinates, so the matching does
  // not depend on hypothesis order.
  auto box_key = [&](std::size_t h) {
    const auto& b = hypotheses[h];
    return std::tuple(b.y_min, b.x_min, b.y_max, b.x_max);
  };
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.t != b.t) return a.t < b.t;
    return box_key(a.h) < box_key(b.h);
  });
  std::vector<bool> hyp_used(hypotheses.size(), false);
  for (const Pair& p : pairs) {
    if (v.glyphs[p.t].matched_hypothesis >= 0 || hyp_used[p.h]) continue;
    hyp_used[p.h] = true;
    v.glyphs[p.t].matched_hypothesis = static_cast<int>(p.h);
    v.glyphs[p.t].iou = p.iou;
  }
  v.correct = hypotheses.size() == truth.glyphs.size() &&
              std::all_of(v.glyphs.begin(), v.glyphs.end(),
                          [](const GlyphVerdict& g) { return g.iou >= kMatchIou; });
  return v;
}

SealVerdict score_segmentation(const SegmentationResult& result, const GroundTruth& truth) {
  std::vector<BoundingBox> boxes;
  for (const auto& h : result.hypotheses) boxes.push_back(h.bbox);
  return score_segmentation(boxes, truth);
}

double corpus_accuracy(const std::vector<SealVerdict>& verdicts) {
  if (verdicts.empty()) return 0.0;
  const auto ok = std::count_if(verdicts.begin(), verdicts.end(),
                                [](const SealVerdict& v) { return v.correct; });
  return static_cast<double>(ok) / static_cast<double>(verdicts.size());
}

std::vector<SyntheticSealSpec> make_seal_corpus(const SealCorpusOptions& options) {
  if (options.jitter < 0 || !(options.scale_min > 0.0) || options.scale_max < options.scale_min) {
    fail(ErrorCode::kInvalidArgument, "invalid seal corpus options");
  }
  static constexpr SealShape kShapes[] = {SealShape::kSquare, SealShape::kRect,
                                          SealShape::kCircleBorder};
  Rng rng(options.seed);
  std::vector<SyntheticSealSpec> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    SyntheticSealSpec spec;
    const std::size_t layout = i % 3;
    spec.rows = layout == 0 ? 1 : 2;
    spec.cols = layout == 2 ? 3 : 2;
    spec.shape = kShapes[(i / 3) % 3];
    spec.seed = options.first_seal_seed + i;
    spec.jitter = options.jitter;
    for (std::size_t s = 0; s < spec.slot_count(); ++s) {
      spec.glyph_ids.push_back("syn-" + std::to_string(rng.uniform_int(0, 9999)));
      spec.scales.push_back(rng.uniform(options.scale_min, options.scale_max));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace sealkit
