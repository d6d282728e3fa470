#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sealkit/raster.hpp"

namespace sealkit {

inline constexpr double kDefaultRatioMin = 0.01;
inline constexpr double kDefaultRatioMax = 0.3;

/// Normalized seal foreground: the clustering substrate.
class ForegroundSet {
 public:
  explicit ForegroundSet(PointSet points);

  const PointSet& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  PointSet points_;
};

struct BandwidthSample {
  double bandwidth = 0.0;
  int n_clusters = 0;

  friend bool operator==(const BandwidthSample&, const BandwidthSample&) = default;
};

/// Cluster count as a function of bandwidth, ascending in bandwidth.
struct BandwidthCurve {
  std::vector<BandwidthSample> samples;
};

/// Least-squares polynomial in the affine variable t = (b - center) / scale.
/// Coefficients are lowest degree first.
struct PolynomialFit {
  std::vector<double> coefficients;
  int degree = 0;
  double center = 0.0;
  double scale = 1.0;

  double operator()(double b) const noexcept;
  /// d²Q/db² at b.
  double second_derivative(double b) const noexcept;
};

struct SegmentHypothesis {
  PointSet pixels;
  BoundingBox bbox;
  double source_bandwidth = 0.0;
  int cluster_label = 0;
};

/// How candidate bandwidths are chosen from the cluster-count curve.
enum class SelectionRule {
  /// Longest run of constant cluster count > 1.
  kPlateau,
  /// Minimum-spread group of the concave (Q'' < 0) region, plateau when empty.
  kConcaveBand,
};

const char* to_string(SelectionRule rule) noexcept;
/// Accepts "plateau" and "concave-band"; throws kInvalidArgument otherwise.
SelectionRule parse_selection_rule(const std::string& name);

struct CandidateSelection {
  PolynomialFit fit;
  /// Sampled bandwidths where Q'' < 0, ascending.
  std::vector<double> descent_band;
  std::vector<double> candidates;
  SelectionRule rule = SelectionRule::kPlateau;
  /// True when kConcaveBand found no concave region and used the plateau.
  bool used_fallback = false;
};

struct SegmentationResult {
  std::vector<SegmentHypothesis> hypotheses;
  std::vector<double> candidate_bandwidths;
  BandwidthCurve curve;
  CandidateSelection selection;
};

struct MeanShiftOptions {
  double tol = 1e-3;
  int max_iters = 300;
  /// Enables kernel truncation, lattice binning at large bandwidths and
  /// trajectory reuse. Off gives the textbook per-point iteration.
  bool accelerate = true;
};

struct MeanShiftResult {
  std::vector<int> labels;  // one per foreground point
  std::vector<std::array<double, 2>> modes;

  int cluster_count() const noexcept { return static_cast<int>(modes.size()); }
};

struct SegmentConfig {
  int ratio_count = 100;
  double ratio_min = kDefaultRatioMin;
  double ratio_max = kDefaultRatioMax;
  std::uint64_t seed = 0;
  SelectionRule rule = SelectionRule::kPlateau;
  int interval = 5;
  int poly_degree = 4;
  std::size_t min_pixels = 30;
  MeanShiftOptions mean_shift;
};

/// Sorted ratios drawn uniformly from [lo, hi].
std::vector<double> draw_ratios(int count, std::uint64_t seed,
                                double lo = kDefaultRatioMin,
                                double hi = kDefaultRatioMax);

/// For every ratio r: k = clamp(round(r * n), 2, n) neighbors counted with the
/// point itself; per point, the distance to the farthest of its k nearest
/// neighbors; bandwidth = mean over points. Sorted, deduplicated, positive.
std::vector<double> estimate_bandwidths(const ForegroundSet& fg,
                                        std::span<const double> ratios);
std::vector<double> estimate_bandwidths(const ForegroundSet& fg, int ratio_count,
                                        std::uint64_t seed,
                                        double lo = kDefaultRatioMin,
                                        double hi = kDefaultRatioMax);

struct DensityGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double step = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, ny rows of nx samples

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
};

/// Isotropic bivariate Gaussian kernel density estimate.
double kde_at(const ForegroundSet& fg, double bandwidth, double x, double y);
/// Samples the density at grid.x_min + i*step, grid.y_min + j*step up to the
/// box's max corner.
DensityGrid kde_density(const ForegroundSet& fg, double bandwidth,
                        const BoundingBox& grid, double step);

MeanShiftResult mean_shift(const ForegroundSet& fg, double bandwidth,
                           const MeanShiftOptions& options = {});

BandwidthCurve cluster_count_curve(const ForegroundSet& fg,
                                   std::span<const double> bandwidths,
                                   const MeanShiftOptions& options = {});

PolynomialFit fit_polynomial(std::span<const double> xs,
                             std::span<const double> ys, int degree);

/// Descent-band grouping. Throws kDataError when no concave region exists.
CandidateSelection select_candidate_bandwidths(const BandwidthCurve& curve,
                                               int interval = 5,
                                               int poly_degree = 4);

/// Like select_candidate_bandwidths, but an empty descent band falls back to
/// the longest run of constant cluster count > 1.
CandidateSelection select_candidates_or_plateau(const BandwidthCurve& curve,
                                                int interval = 5,
                                                int poly_degree = 4);

/// Longest maximal run of consecutive samples sharing n_clusters > 1 (ties:
/// lower bandwidths). If every sample has one cluster the whole curve is the
/// run.
std::vector<double> plateau_bandwidths(const BandwidthCurve& curve);

/// Drops the smaller of any pair sharing more than 90% of the smaller one's
/// pixels. Output is ordered by descending pixel count.
std::vector<SegmentHypothesis> overlap_filter(std::vector<SegmentHypothesis> hypotheses);

std::size_t pixel_overlap(const PointSet& a, const PointSet& b);

/// A pixel claimed by several hypotheses stays with the one from the smallest
/// bandwidth (first on ties). Boxes are recomputed; hypotheses left with
/// fewer than min_pixels are dropped. Order is preserved.
std::vector<SegmentHypothesis> resolve_shared_pixels(std::vector<SegmentHypothesis> hypotheses,
                                                     std::size_t min_pixels);

/// Fits Q and records the descent band, then picks candidates by `rule`.
CandidateSelection select_candidates(const BandwidthCurve& curve, SelectionRule rule,
                                     int interval = 5, int poly_degree = 4);

/// Full bandwidth sweep: estimate, count curve, candidate choice, clustering
/// at each candidate, noise floor, overlap filter and shared-pixel
/// resolution. Output hypotheses are pixel-disjoint.
SegmentationResult segment(const ForegroundSet& fg, const SegmentConfig& config = {});

/// Removes an outline component that spans the foreground and encloses all
/// other foreground pixels (a seal border). Returns the mask unchanged when
/// no such component exists.
BinaryMask strip_enclosing_border(const BinaryMask& mask, double span_fraction = 0.9);

}  // namespace sealkit
