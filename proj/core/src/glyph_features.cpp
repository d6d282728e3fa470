#include "sealkit/glyph_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sealkit/error.hpp"

namespace sealkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Above this many grid cells the exact distance transform is skipped.
constexpr long long kMaxTransformCells = 1 << 22;

// Neighbours P2..P9 clockwise from north.
constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable convolution with replicated borders.
std::vector<double> smooth(const std::vector<double>& src, int w, int h,
                           const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + r] * src[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + r] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

// Exact squared distance along one line (Felzenszwalb-Huttenlocher).
// Infinite samples never enter the lower envelope.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s = -kInf;
    while (k >= 0) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double t = q - v[j];
    d[q] = t * t + f[v[j]];
  }
}

// Squared distance from every cell of box to the nearest point of `to`.
std::vector<double> squared_distance_field(const PointSet& to, const BoundingBox& box) {
  const int w = box.width();
  const int h = box.height();
  std::vector<double> grid(static_cast<std::size_t>(w) * h, kInf);
  for (const Point& p : to) {
    grid[static_cast<std::size_t>(p.y - box.y_min) * w + (p.x - box.x_min)] = 0.0;
  }
  const int n = std::max(w, h);
  std::vector<double> f, d;
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  f.resize(static_cast<std::size_t>(h));
  d.resize(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(static_cast<std::size_t>(w));
  d.resize(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    double* row = grid.data() + static_cast<std::size_t>(y) * w;
    std::copy(row, row + w, f.begin());
    edt_1d(f, d, v, z);
    std::copy(d.begin(), d.end(), row);
  }
  return grid;
}

double mean_nearest(const PointSet& from, const std::vector<double>& field,
                    const BoundingBox& box) {
  double acc = 0.0;
  for (const Point& p : from) {
    acc += std::sqrt(
        field[static_cast<std::size_t>(p.y - box.y_min) * box.width() + (p.x - box.x_min)]);
  }
  return acc / static_cast<double>(from.size());
}

double mean_nearest_brute(const PointSet& from, const PointSet& to) {
  double acc = 0.0;
  for (const Point& a : from) {
    long long best = std::numeric_limits<long long>::max();
    for (const Point& b : to) {
      const long long dx = a.x - b.x;
      const long long dy = a.y - b.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    acc += std::sqrt(static_cast<double>(best));
  }
  return acc / static_cast<double>(from.size());
}

}  // namespace

const char* to_string(GlyphOrigin origin) noexcept {
  return origin == GlyphOrigin::kTypeface ? "typeface" : "query-segment";
}

const char* to_string(HogInput input) noexcept {
  return input == HogInput::kSkeleton ? "skeleton" : "regular";
}

HogInput parse_hog_input(const std::string& name) {
  if (name == "skeleton") return HogInput::kSkeleton;
  if (name == "regular") return HogInput::kRegular;
  fail(ErrorCode::kInvalidArgument, "unknown HOG input: " + name);
}

StandardGlyph standardize(const BinaryMask& mask, GlyphOrigin source) {
  const PointSet pts = mask_to_points(mask);
  if (pts.empty()) fail(ErrorCode::kInvalidArgument, "cannot standardize an empty mask");
  const BoundingBox box = points_to_bbox(pts);
  const int w = box.width();
  const int h = box.height();
  const double scale = static_cast<double>(kStandardSize) / std::max(w, h);
  const int nw = std::clamp(static_cast<int>(std::lround(w * scale)), 1, kStandardSize);
  const int nh = std::clamp(static_cast<int>(std::lround(h * scale)), 1, kStandardSize);
  const int ox = (kStandardSize - nw) / 2;
  const int oy = (kStandardSize - nh) / 2;

  StandardGlyph out{BinaryMask(kStandardSize, kStandardSize), source};
  for (int j = 0; j < nh; ++j) {
    const int sy = std::min(h - 1, static_cast<int>((j + 0.5) / scale));
    for (int i = 0; i < nw; ++i) {
      const int sx = std::min(w - 1, static_cast<int>((i + 0.5) / scale));
      if (mask.get(box.x_min + sx, box.y_min + sy)) out.mask.set(ox + i, oy + j);
    }
  }
  return out;
}

SkeletonMap zhang_suen_thin(const BinaryMask& mask) {
  BinaryMask img = mask;
  const int w = img.width();
  const int h = img.height();
  std::vector<Point> doomed;
  for (bool changed = true; changed;) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!img.get(x, y)) continue;
          bool p[8];
          int b = 0;
          for (int i = 0; i < 8; ++i) {
            p[i] = img.get_or_zero(x + kDx[i], y + kDy[i]);
            b += p[i];
          }
          if (b < 2 || b > 6) continue;
          int a = 0;
          for (int i = 0; i < 8; ++i) a += !p[i] && p[(i + 1) % 8];
          if (a != 1) continue;
          // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
          const bool cut = pass == 0 ? !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6])
                                     : !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6]);
          if (cut) doomed.push_back({x, y});
        }
      }
      for (const Point& q : doomed) img.set(q.x, q.y, false);
      changed = changed || !doomed.empty();
    }
  }
  SkeletonMap out;
  out.points = mask_to_points(img);
  out.mask = std::move(img);
  return out;
}

std::vector<double> harris_response(const BinaryMask& mask, double k, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "sigma must be positive");
  const int w = mask.width();
  const int h = mask.height();
  auto at = [&](int x, int y) {
    return mask.get(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)) ? 1.0 : 0.0;
  };
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> ixx(n), iyy(n), ixy(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = gx * gx;
      iyy[i] = gy * gy;
      ixy[i] = gx * gy;
    }
  }
  const std::vector<double> g = gaussian_kernel(sigma);
  ixx = smooth(ixx, w, h, g);
  iyy = smooth(iyy, w, h, g);
  ixy = smooth(ixy, w, h, g);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double det = ixx[i] * iyy[i] - ixy[i] * ixy[i];
    const double tr = ixx[i] + iyy[i];
    r[i] = det - k * tr * tr;
  }
  return r;
}

CornerSet harris_corners(const BinaryMask& mask, const HarrisOptions& options) {
  if (options.k < 0.04 || options.k > 0.06) {
    fail(ErrorCode::kInvalidArgument, "Harris k must lie in [0.04, 0.06]");
  }
  if (!(options.rel_threshold > 0.0 && options.rel_threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "Harris rel_threshold must lie in (0, 1)");
  }
  if (options.nms_radius < 1) fail(ErrorCode::kInvalidArgument, "nms_radius must be >= 1");
  CornerSet out;
  const int w = mask.width();
  const int h = mask.height();
  if (w == 0 || h == 0) return out;
  const std::vector<double> r = harris_response(mask, options.k, options.sigma);
  const double peak = *std::max_element(r.begin(), r.end());
  if (!(peak > 0.0)) return out;
  const double threshold = options.rel_threshold * peak;
  const int rad = options.nms_radius;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = r[static_cast<std::size_t>(y) * w + x];
      if (!(v > threshold)) continue;
      bool keep = true;
      for (int yy = std::max(0, y - rad); keep && yy <= std::min(h - 1, y + rad); ++yy) {
        for (int xx = std::max(0, x - rad); xx <= std::min(w - 1, x + rad); ++xx) {
          if (xx == x && yy == y) continue;
          const double u = r[static_cast<std::size_t>(yy) * w + xx];
          const bool earlier = yy < y || (yy == y && xx < x);
          if (earlier ? u >= v : u > v) {
            keep = false;
            break;
          }
        }
      }
      if (keep) {
        out.points.points.push_back({x, y});
        out.responses.push_back(v);
      }
    }
  }
  return out;
}

HogDescriptor hog(const BinaryMask& mask) {
  if (mask.width() != kStandardSize || mask.height() != kStandardSize) {
    fail(ErrorCode::kInvalidArgument, "HOG needs a 225x225 standardized mask");
  }
  constexpr int kCell = HogLayout::kCellSize;
  constexpr int kCells = HogLayout::kCells;
  constexpr int kBins = HogLayout::kBins;
  constexpr double kBinWidth = 180.0 / kBins;
  std::vector<double> hist(static_cast<std::size_t>(kCells) * kCells * kBins, 0.0);
  auto at = [&](int x, int y) { return mask.get_or_zero(x, y) ? 1.0 : 0.0; };
  for (int y = 0; y < kCells * kCell; ++y) {
    for (int x = 0; x < kCells * kCell; ++x) {
      const double gx = at(x + 1, y) - at(x - 1, y);
      const double gy = at(x, y + 1) - at(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double theta = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (theta < 0.0) theta += 180.0;
      if (theta >= 180.0) theta -= 180.0;
      // Bin b is centred at (b + 0.5)·20°; votes split linearly, wrapping.
      const double pos = theta / kBinWidth - 0.5;
      const double lo = std::floor(pos);
      const double frac = pos - lo;
      const int b0 = (static_cast<int>(lo) + kBins) % kBins;
      const int b1 = (b0 + 1) % kBins;
      double* cell = hist.data() +
                     (static_cast<std::size_t>(y / kCell) * kCells + x / kCell) * kBins;
      cell[b0] += mag * (1.0 - frac);
      cell[b1] += mag * frac;
    }
  }

  HogDescriptor out;
  out.values.reserve(HogLayout::kLength);
  std::vector<double> block(4 * kBins);
  for (int by = 0; by < HogLayout::kBlocks; ++by) {
    for (int bx = 0; bx < HogLayout::kBlocks; ++bx) {
      for (int c = 0; c < 4; ++c) {
        const int cx = bx + c % 2;
        const int cy = by + c / 2;
        const double* cell =
            hist.data() + (static_cast<std::size_t>(cy) * kCells + cx) * kBins;
        std::copy(cell, cell + kBins, block.begin() + c * kBins);
      }
      double norm = 0.0;
      for (double v : block) norm += v * v;
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        double norm2 = 0.0;
        for (double& v : block) {
          v = std::min(v / norm, 0.2);
          norm2 += v * v;
        }
        norm2 = std::sqrt(norm2);
        for (double& v : block) v /= norm2;
      }
      out.values.insert(out.values.end(), block.begin(), block.end());
    }
  }
  return out;
}

double point_set_distance(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) {
    fail(ErrorCode::kInvalidArgument, "point_set_distance needs non-empty sets");
  }
  BoundingBox box = points_to_bbox(a);
  const BoundingBox bb = points_to_bbox(b);
  box.x_min = std::min(box.x_min, bb.x_min);
  box.y_min = std::min(box.y_min, bb.y_min);
  box.x_max = std::max(box.x_max, bb.x_max);
  box.y_max = std::max(box.y_max, bb.y_max);
  if (box.area() > kMaxTransformCells ||
      static_cast<long long>(a.size()) * static_cast<long long>(b.size()) < box.area()) {
    return std::max(mean_nearest_brute(a, b), mean_nearest_brute(b, a));
  }
  const double ab = mean_nearest(a, squared_distance_field(b, box), box);
  const double ba = mean_nearest(b, squared_distance_field(a, box), box);
  return std::max(ab, ba);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInvalidArgument, "vector length mismatch");
  if (std::equal(a.begin(), a.end(), b.begin())) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return 1.0 - std::clamp(c, -1.0, 1.0);
}

GeometricFeature extract_features(const StandardGlyph& glyph, const FeatureOptions& options) {
  GeometricFeature f;
  f.skeleton = zhang_suen_thin(glyph.mask);
  f.corners = harris_corners(glyph.mask, options.harris);
  f.hog = hog(options.hog_input == HogInput::kSkeleton ? f.skeleton.mask : glyph.mask);
  return f;
}

}  // namespace sealkit
