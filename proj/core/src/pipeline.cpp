#include "sealkit/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sealkit/error.hpp"

namespace sealkit {

SealSegmentation segment_seal(const RasterImage& image, const PipelineConfig& config) {
  SeparationResult sep = kmeans_rgb(image, config.k, config.seed, config.kmeans_iters);
  const std::size_t idx = config.cluster ? *config.cluster : select_red_cluster(sep);
  return segment_cluster(image, std::move(sep), idx, config);
}

SealSegmentation segment_cluster(const RasterImage& image, SeparationResult separation,
                                 std::size_t cluster_index, const PipelineConfig& config) {
  if (cluster_index >= separation.clusters.size()) {
    fail(ErrorCode::kInvalidArgument, "cluster index out of range");
  }
  SealSegmentation out;
  out.width = image.width();
  out.height = image.height();
  out.cluster_index = cluster_index;

  BinaryMask layer = cluster_to_mask(image, separation.clusters[cluster_index]);
  if (config.strip_border) layer = strip_enclosing_border(layer);
  const PointSet source_points = mask_to_points(layer);
  if (source_points.size() < 2) {
    fail(ErrorCode::kDataError, "selected layer has fewer than 2 foreground pixels");
  }
  NormalizedPoints norm = normalize_size_with_transform(source_points);
  out.transform = norm.transform;

  SegmentConfig seg_cfg = config.segment;
  seg_cfg.seed = config.seed;
  out.segmentation = segment(ForegroundSet(std::move(norm.points)), seg_cfg);
  out.separation = std::move(separation);

  // Each source pixel belongs to every hypothesis containing its normalized
  // image.
  const int extent = kNormalizedExtent + 1;
  std::vector<std::vector<std::uint16_t>> owners(static_cast<std::size_t>(extent) * extent);
  for (std::size_t h = 0; h < out.segmentation.hypotheses.size(); ++h) {
    for (const Point& p : out.segmentation.hypotheses[h].pixels) {
      owners[static_cast<std::size_t>(p.y) * extent + p.x].push_back(static_cast<std::uint16_t>(h));
    }
  }
  out.hypotheses.resize(out.segmentation.hypotheses.size());
  const BoundingBox src_box = points_to_bbox(source_points);
  const double s = out.transform.scale;
  for (const Point& p : source_points) {
    const int nx = static_cast<int>(std::lround(s * (p.x - src_box.x_min)));
    const int ny = static_cast<int>(std::lround(s * (p.y - src_box.y_min)));
    if (nx < 0 || ny < 0 || nx >= extent || ny >= extent) continue;
    for (auto h : owners[static_cast<std::size_t>(ny) * extent + nx]) {
      out.hypotheses[h].pixels.points.push_back(p);
    }
  }
  for (std::size_t h = 0; h < out.hypotheses.size(); ++h) {
    auto& sh = out.hypotheses[h];
    const auto& nh = out.segmentation.hypotheses[h];
    sh.source_bandwidth = nh.source_bandwidth;
    sh.cluster_label = nh.cluster_label;
    sh.bbox = points_to_bbox(sh.pixels);
  }
  return out;
}

BinaryMask hypothesis_mask(const SourceHypothesis& h) {
  BinaryMask m(h.bbox.width(), h.bbox.height());
  for (const Point& p : h.pixels) m.set(p.x - h.bbox.x_min, p.y - h.bbox.y_min);
  return m;
}

RasterImage render_overlay(const RasterImage& image,
                           const std::vector<SourceHypothesis>& hypotheses) {
  static constexpr std::array<Rgb, 8> kPalette{{{31, 119, 180},
                                                {255, 127, 14},
                                                {44, 160, 44},
                                                {148, 103, 189},
                                                {23, 190, 207},
                                                {188, 189, 34},
                                                {227, 119, 194},
                                                {140, 86, 75}}};
  RasterImage out = image;
  auto blend = [](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>((a + 2 * b) / 3);
  };
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    const Rgb c = kPalette[h % kPalette.size()];
    for (const Point& p : hypotheses[h].pixels) {
      Rgb& px = out.at(p.x, p.y);
      px = {blend(px.r, c.r), blend(px.g, c.g), blend(px.b, c.b)};
    }
    const auto& b = hypotheses[h].bbox;
    for (int x = b.x_min; x <= b.x_max; ++x) {
      out.at(x, b.y_min) = c;
      out.at(x, b.y_max) = c;
    }
    for (int y = b.y_min; y <= b.y_max; ++y) {
      out.at(b.x_min, y) = c;
      out.at(b.x_max, y) = c;
    }
  }
  return out;
}

}  // namespace sealkit
