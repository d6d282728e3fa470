#include "sealkit/color_separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sealkit/error.hpp"
#include "sealkit/rng.hpp"

namespace sealkit {
namespace {

std::uint32_t pack(const Rgb& c) noexcept {
  return (std::uint32_t{c.r} << 16) | (std::uint32_t{c.g} << 8) | c.b;
}

ColorVec unpack(std::uint32_t v) noexcept {
  return {static_cast<double>((v >> 16) & 0xff),
          static_cast<double>((v >> 8) & 0xff), static_cast<double>(v & 0xff)};
}

double squared(const ColorVec& a, const ColorVec& b) noexcept {
  const double dr = a[0] - b[0];
  const double dg = a[1] - b[1];
  const double db = a[2] - b[2];
  return dr * dr + dg * dg + db * db;
}

// Distinct colors with multiplicities. k-means on this weighted set gives
// exactly the same assignments as on the raw pixels.
struct Palette {
  std::vector<std::uint32_t> colors;
  std::vector<ColorVec> values;
  std::vector<std::int64_t> weights;
  std::vector<std::uint32_t> pixel_to_color;
};

Palette build_palette(const RasterImage& image) {
  std::vector<std::uint32_t> packed(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) packed[i] = pack(image.pixels()[i]);
  Palette p;
  p.colors = packed;
  std::sort(p.colors.begin(), p.colors.end());
  p.colors.erase(std::unique(p.colors.begin(), p.colors.end()), p.colors.end());
  p.weights.assign(p.colors.size(), 0);
  p.pixel_to_color.resize(packed.size());
  for (std::size_t i = 0; i < packed.size(); ++i) {
    const auto it = std::lower_bound(p.colors.begin(), p.colors.end(), packed[i]);
    const auto idx = static_cast<std::uint32_t>(it - p.colors.begin());
    p.pixel_to_color[i] = idx;
    ++p.weights[idx];
  }
  p.values.reserve(p.colors.size());
  for (auto c : p.colors) p.values.push_back(unpack(c));
  return p;
}

std::vector<ColorVec> seed_plus_plus(const Palette& p, int k, Rng& rng) {
  const std::size_t n = p.values.size();
  std::vector<ColorVec> centers;
  centers.reserve(static_cast<std::size_t>(k));

  // First center: pixel drawn uniformly, i.e. color weighted by count.
  const std::int64_t total = std::accumulate(p.weights.begin(), p.weights.end(),
                                             std::int64_t{0});
  std::int64_t pick = static_cast<std::int64_t>(rng.uniform_index(
      static_cast<std::uint64_t>(total)));
  std::size_t first = 0;
  for (; first < n; ++first) {
    pick -= p.weights[first];
    if (pick < 0) break;
  }
  centers.push_back(p.values[first]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared(p.values[i], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d2[i] * static_cast<double>(p.weights[i]);
    std::size_t chosen = n - 1;
    if (sum > 0.0) {
      double target = rng.uniform() * sum;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i] * static_cast<double>(p.weights[i]);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
      // Rounding can leave target >= 0; fall back to the farthest color.
      if (target >= 0.0) {
        chosen = static_cast<std::size_t>(
            std::max_element(d2.begin(), d2.end()) - d2.begin());
      }
    }
    centers.push_back(p.values[chosen]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared(p.values[i], centers.back()));
    }
  }
  return centers;
}

}  // namespace

double color_distance(const ColorVec& a, const ColorVec& b) noexcept {
  return std::sqrt(squared(a, b));
}

double color_distance(const Rgb& a, const Rgb& b) noexcept {
  return color_distance(ColorVec{double(a.r), double(a.g), double(a.b)},
                        ColorVec{double(b.r), double(b.g), double(b.b)});
}

double redness(const ColorVec& c) noexcept { return c[0] - (c[1] + c[2]) / 2.0; }

SeparationResult kmeans_rgb(const RasterImage& image, int k, std::uint64_t seed,
                            int max_iters) {
  if (k < 2) fail(ErrorCode::kInvalidArgument, "k-means requires K >= 2");
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "empty image");
  if (max_iters < 1) max_iters = 1;

  const Palette palette = build_palette(image);
  const std::size_t n = palette.values.size();
  k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), n));
  const auto kk = static_cast<std::size_t>(k);

  Rng rng(seed);
  std::vector<ColorVec> centers = seed_plus_plus(palette, k, rng);
  std::vector<std::size_t> assign(n, kk);

  SeparationResult result;
  result.seed = seed;
  result.k = k;

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared(palette.values[i], centers[0]);
      for (std::size_t c = 1; c < kk; ++c) {
        const double d = squared(palette.values[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
      wcss += best_d * static_cast<double>(palette.weights[i]);
    }
    result.iterations = iter + 1;

    // Integer accumulation keeps centroids independent of summation order.
    std::vector<std::array<std::int64_t, 3>> sums(kk, {0, 0, 0});
    std::vector<std::int64_t> counts(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t c = palette.colors[i];
      const std::int64_t w = palette.weights[i];
      sums[assign[i]][0] += w * ((c >> 16) & 0xff);
      sums[assign[i]][1] += w * ((c >> 8) & 0xff);
      sums[assign[i]][2] += w * (c & 0xff);
      counts[assign[i]] += w;
    }

    // Empty-cluster repair: move the color farthest from its center in the
    // largest cluster.
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] != 0) continue;
      const std::size_t largest = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] != largest) continue;
        const double d = squared(palette.values[i], centers[largest]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n || palette.weights[far] == counts[largest]) continue;
      const std::uint32_t col = palette.colors[far];
      const std::int64_t w = palette.weights[far];
      const std::array<std::int64_t, 3> v{w * ((col >> 16) & 0xff),
                                          w * ((col >> 8) & 0xff), w * (col & 0xff)};
      for (int ch = 0; ch < 3; ++ch) {
        sums[largest][ch] -= v[ch];
        sums[c][ch] = v[ch];
      }
      counts[largest] -= w;
      counts[c] = w;
      assign[far] = c;
      changed = true;
    }

    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] == 0) continue;
      for (int ch = 0; ch < 3; ++ch) {
        centers[c][ch] = static_cast<double>(sums[c][ch]) / static_cast<double>(counts[c]);
      }
    }

    double after = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      after += squared(palette.values[i], centers[assign[i]]) *
               static_cast<double>(palette.weights[i]);
    }
    result.wcss_history.push_back(std::min(wcss, after));
    if (!changed && iter > 0) break;
  }

  std::vector<ColorCluster> clusters(kk);
  for (std::size_t c = 0; c < kk; ++c) {
    clusters[c].centroid = centers[c];
    clusters[c].redness = redness(centers[c]);
  }
  for (std::size_t px = 0; px < image.size(); ++px) {
    clusters[assign[palette.pixel_to_color[px]]].member_indices.push_back(px);
  }
  std::erase_if(clusters, [](const ColorCluster& c) { return c.member_indices.empty(); });
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const ColorCluster& a, const ColorCluster& b) {
                     if (a.redness != b.redness) return a.redness > b.redness;
                     return a.member_indices.size() > b.member_indices.size();
                   });
  result.k = static_cast<int>(clusters.size());
  result.clusters = std::move(clusters);
  return result;
}

std::size_t select_red_cluster(const SeparationResult& result) {
  if (result.clusters.empty()) {
    fail(ErrorCode::kInvalidArgument, "separation result has no clusters");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.clusters.size(); ++i) {
    const ColorCluster& c = result.clusters[i];
    const ColorCluster& b = result.clusters[best];
    const double rc = redness(c.centroid);
    const double rb = redness(b.centroid);
    if (rc > rb || (rc == rb && c.member_indices.size() > b.member_indices.size())) {
      best = i;
    }
  }
  return best;
}

BinaryMask cluster_to_mask(const RasterImage& image, const ColorCluster& cluster) {
  if (cluster.member_indices.empty()) {
    fail(ErrorCode::kInvalidArgument, "color cluster has no members");
  }
  std::vector<std::uint8_t> bits(image.size(), 0);
  for (std::size_t idx : cluster.member_indices) {
    if (idx >= bits.size()) {
      fail(ErrorCode::kInvalidArgument, "cluster member index out of range");
    }
    bits[idx] = 1;
  }
  return BinaryMask(image.width(), image.height(), std::move(bits));
}

NormalizedPoints normalize_size_with_transform(const PointSet& points, int extent) {
  if (points.empty()) fail(ErrorCode::kInvalidArgument, "cannot normalize an empty point set");
  const BoundingBox box = points_to_bbox(points);
  const int span = std::max(box.x_max - box.x_min, box.y_max - box.y_min);
  const double scale = span > 0 ? static_cast<double>(extent) / span : 1.0;
  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    out.push_back({static_cast<int>(std::lround(scale * (p.x - box.x_min))),
                   static_cast<int>(std::lround(scale * (p.y - box.y_min)))});
  }
  return {make_unique_points(std::move(out)), {{box.x_min, box.y_min}, scale}};
}

PointSet normalize_size(const PointSet& points) {
  return normalize_size_with_transform(points).points;
}

}  // namespace sealkit
