#include "sealkit/segmentation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "sealkit/error.hpp"
#include "sealkit/rng.hpp"

namespace sealkit {
namespace {

// Truncated-kernel radius in bandwidths; exp(-12.5) ~ 3.7e-6.
constexpr double kKernelCutoff = 5.0;
// Lattice spacing is bandwidth / kBinsPerBandwidth once that reaches 2 px.
constexpr double kBinsPerBandwidth = 6.0;
// Above this many squared-distance buckets the k-NN scan falls back to sorting.
constexpr long long kMaxHistogram = 1 << 22;

long long squared_distance(const Point& a, const Point& b) noexcept {
  const long long dx = a.x - b.x;
  const long long dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Weighted points on a regular lattice. With spacing 1 every foreground
// point is its own bin and the kernel sums are exact.
struct Lattice {
  int spacing = 1;
  int x0 = 0;
  int y0 = 0;
  int cols = 0;
  int rows = 0;
  std::vector<int> bin_col;
  std::vector<int> bin_row;
  std::vector<double> bin_weight;
  std::vector<int> row_start;  // CSR over rows, size rows + 1
  std::vector<int> point_bin;

  double center_x(int col) const noexcept {
    return x0 + col * spacing + (spacing - 1) / 2.0;
  }
  double center_y(int row) const noexcept {
    return y0 + row * spacing + (spacing - 1) / 2.0;
  }
};

Lattice build_lattice(const PointSet& pts, int spacing) {
  const BoundingBox box = points_to_bbox(pts);
  Lattice lat;
  lat.spacing = spacing;
  lat.x0 = box.x_min;
  lat.y0 = box.y_min;
  lat.cols = (box.x_max - box.x_min) / spacing + 1;
  lat.rows = (box.y_max - box.y_min) / spacing + 1;

  // Row-major bin keys in first-seen-independent (sorted) order.
  std::vector<std::pair<long long, int>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int c = (pts[i].x - lat.x0) / spacing;
    const int r = (pts[i].y - lat.y0) / spacing;
    keyed[i] = {static_cast<long long>(r) * lat.cols + c, static_cast<int>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  lat.point_bin.assign(pts.size(), -1);
  lat.row_start.assign(static_cast<std::size_t>(lat.rows) + 1, 0);
  long long prev = -1;
  for (const auto& [key, idx] : keyed) {
    if (key != prev) {
      lat.bin_col.push_back(static_cast<int>(key % lat.cols));
      lat.bin_row.push_back(static_cast<int>(key / lat.cols));
      lat.bin_weight.push_back(0.0);
      prev = key;
    }
    lat.bin_weight.back() += 1.0;
    lat.point_bin[static_cast<std::size_t>(idx)] = static_cast<int>(lat.bin_col.size()) - 1;
  }
  for (int row : lat.bin_row) ++lat.row_start[static_cast<std::size_t>(row) + 1];
  for (int r = 0; r < lat.rows; ++r) lat.row_start[r + 1] += lat.row_start[r];
  return lat;
}

class KernelShift {
 public:
  KernelShift(const Lattice& lat, double bandwidth, bool truncate)
      : lat_(lat),
        inv_two_h2_(1.0 / (2.0 * bandwidth * bandwidth)),
        radius_(truncate ? kKernelCutoff * bandwidth
                         : std::numeric_limits<double>::infinity()),
        gx_(static_cast<std::size_t>(lat.cols)),
        gy_(static_cast<std::size_t>(lat.rows)) {}

  // Gaussian-weighted mean of the lattice around (px, py).
  std::array<double, 2> operator()(double px, double py) {
    const auto [c0, c1] = range(px, lat_.x0, lat_.cols);
    const auto [r0, r1] = range(py, lat_.y0, lat_.rows);
    for (int c = c0; c <= c1; ++c) {
      const double d = lat_.center_x(c) - px;
      gx_[c] = std::exp(-d * d * inv_two_h2_);
    }
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (int r = r0; r <= r1; ++r) {
      const double d = lat_.center_y(r) - py;
      const double wy = std::exp(-d * d * inv_two_h2_);
      const int b_end = lat_.row_start[r + 1];
      double row_w = 0.0, row_x = 0.0;
      for (int b = lat_.row_start[r]; b < b_end; ++b) {
        const int c = lat_.bin_col[b];
        if (c < c0 || c > c1) continue;
        const double w = gx_[c] * lat_.bin_weight[b];
        row_w += w;
        row_x += w * lat_.center_x(c);
      }
      sw += wy * row_w;
      sx += wy * row_x;
      sy += wy * row_w * lat_.center_y(r);
    }
    if (sw <= 0.0) return {px, py};
    return {sx / sw, sy / sw};
  }

 private:
  std::pair<int, int> range(double p, int origin, int count) const {
    if (!std::isfinite(radius_)) return {0, count - 1};
    const double s = lat_.spacing;
    const double off = (s - 1) / 2.0;
    int lo = static_cast<int>(std::ceil((p - radius_ - origin - off) / s));
    int hi = static_cast<int>(std::floor((p + radius_ - origin - off) / s));
    return {std::max(lo, 0), std::min(hi, count - 1)};
  }

  const Lattice& lat_;
  double inv_two_h2_;
  double radius_;
  std::vector<double> gx_;
  std::vector<double> gy_;
};

void check_bandwidth(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    fail(ErrorCode::kInvalidArgument, "bandwidth must be positive and finite");
  }
}

std::vector<MeanShiftResult> run_sweep(const ForegroundSet& fg,
                                       std::span<const double> bandwidths,
                                       const MeanShiftOptions& options) {
  std::vector<MeanShiftResult> out;
  out.reserve(bandwidths.size());
  for (double b : bandwidths) out.push_back(mean_shift(fg, b, options));
  return out;
}

double population_std(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / v.size());
}

BandwidthCurve sorted_curve(std::span<const double> bandwidths,
                            const std::vector<MeanShiftResult>& results) {
  BandwidthCurve curve;
  for (std::size_t i = 0; i < bandwidths.size(); ++i) {
    curve.samples.push_back({bandwidths[i], results[i].cluster_count()});
  }
  std::stable_sort(curve.samples.begin(), curve.samples.end(),
                   [](const auto& a, const auto& b) { return a.bandwidth < b.bandwidth; });
  curve.samples.erase(std::unique(curve.samples.begin(), curve.samples.end(),
                                  [](const auto& a, const auto& b) {
                                    return a.bandwidth == b.bandwidth;
                                  }),
                      curve.samples.end());
  return curve;
}

}  // namespace

ForegroundSet::ForegroundSet(PointSet points) : points_(std::move(points)) {
  if (points_.empty()) fail(ErrorCode::kInvalidArgument, "foreground set is empty");
}

double PolynomialFit::operator()(double b) const noexcept {
  const double t = (b - center) / scale;
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double PolynomialFit::second_derivative(double b) const noexcept {
  const double t = (b - center) / scale;
  double acc = 0.0;
  for (int j = degree; j >= 2; --j) {
    acc = acc * t + static_cast<double>(j) * (j - 1) * coefficients[static_cast<std::size_t>(j)];
  }
  return acc / (scale * scale);
}

namespace {

// Q'' below a tolerance relative to the count scale; a fit of exactly linear
// data leaves rounding noise of either sign in the higher coefficients.
std::vector<double> concave_samples(const PolynomialFit& fit, std::span<const double> xs,
                                    std::span<const double> ys) {
  double y_scale = 1.0;
  for (double y : ys) y_scale = std::max(y_scale, std::abs(y));
  const double eps = 1e-9 * y_scale / (fit.scale * fit.scale);
  std::vector<double> out;
  for (double b : xs) {
    if (fit.second_derivative(b) < -eps) out.push_back(b);
  }
  return out;
}

}  // namespace

const char* to_string(SelectionRule rule) noexcept {
  return rule == SelectionRule::kPlateau ? "plateau" : "concave-band";
}

SelectionRule parse_selection_rule(const std::string& name) {
  if (name == "plateau") return SelectionRule::kPlateau;
  if (name == "concave-band") return SelectionRule::kConcaveBand;
  fail(ErrorCode::kInvalidArgument, "unknown selection rule: " + name);
}

std::vector<double> draw_ratios(int count, std::uint64_t seed, double lo, double hi) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "ratio count must be positive");
  if (lo < 0.0 || hi > 1.0 || lo > hi) {
    fail(ErrorCode::kInvalidArgument, "ratio range must lie within [0, 1]");
  }
  Rng rng(seed);
  std::vector<double> r(static_cast<std::size_t>(count));
  for (double& v : r) v = rng.uniform(lo, hi);
  std::sort(r.begin(), r.end());
  return r;
}

std::vector<double> estimate_bandwidths(const ForegroundSet& fg,
                                        std::span<const double> ratios) {
  const PointSet& pts = fg.points();
  const std::size_t n = pts.size();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "bandwidth estimation needs at least 2 points");
  if (ratios.empty()) fail(ErrorCode::kInvalidArgument, "no ratios given");

  // Distinct neighbor counts, ascending.
  std::vector<std::size_t> ks;
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) fail(ErrorCode::kInvalidArgument, "ratio outside [0, 1]");
    const auto k = static_cast<std::size_t>(std::llround(r * static_cast<double>(n)));
    ks.push_back(std::clamp<std::size_t>(k, 2, n));
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const BoundingBox box = points_to_bbox(pts);
  const long long max_d2 = static_cast<long long>(box.width() - 1) * (box.width() - 1) +
                           static_cast<long long>(box.height() - 1) * (box.height() - 1);

  std::vector<double> sums(ks.size(), 0.0);
  std::vector<long long> kth(ks.size());
  if (max_d2 < kMaxHistogram) {
    std::vector<std::uint32_t> hist(static_cast<std::size_t>(max_d2) + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      long long local_max = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const long long d2 = squared_distance(pts[i], pts[j]);
        ++hist[static_cast<std::size_t>(d2)];
        local_max = std::max(local_max, d2);
      }
      std::size_t cum = 0;
      std::size_t q = 0;
      for (long long d2 = 0; d2 <= local_max && q < ks.size(); ++d2) {
        cum += hist[static_cast<std::size_t>(d2)];
        while (q < ks.size() && cum >= ks[q]) kth[q++] = d2;
      }
      std::fill(hist.begin(), hist.begin() + local_max + 1, 0u);
      for (std::size_t q2 = 0; q2 < ks.size(); ++q2) {
        sums[q2] += std::sqrt(static_cast<double>(kth[q2]));
      }
    }
  } else {
    std::vector<long long> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d2[j] = squared_distance(pts[i], pts[j]);
      std::sort(d2.begin(), d2.end());
      for (std::size_t q = 0; q < ks.size(); ++q) {
        sums[q] += std::sqrt(static_cast<double>(d2[ks[q] - 1]));
      }
    }
  }

  std::vector<double> out;
  for (double s : sums) {
    const double bw = s / static_cast<double>(n);
    if (bw > 0.0) out.push_back(bw);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) {
    fail(ErrorCode::kDataError, "all bandwidth estimates are zero (degenerate foreground)");
  }
  return out;
}

std::vector<double> estimate_bandwidths(const ForegroundSet& fg, int ratio_count,
                                        std::uint64_t seed, double lo, double hi) {
  const std::vector<double> ratios = draw_ratios(ratio_count, seed, lo, hi);
  return estimate_bandwidths(fg, ratios);
}

double kde_at(const ForegroundSet& fg, double bandwidth, double x, double y) {
  check_bandwidth(bandwidth);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  double acc = 0.0;
  for (const Point& p : fg.points()) {
    const double dx = x - p.x;
    const double dy = y - p.y;
    acc += std::exp(-(dx * dx + dy * dy) * inv);
  }
  return acc / (static_cast<double>(fg.size()) * 2.0 * std::numbers::pi * bandwidth * bandwidth);
}

DensityGrid kde_density(const ForegroundSet& fg, double bandwidth,
                        const BoundingBox& grid, double step) {
  check_bandwidth(bandwidth);
  if (!(step > 0.0)) fail(ErrorCode::kInvalidArgument, "grid step must be positive");
  DensityGrid out;
  out.origin_x = grid.x_min;
  out.origin_y = grid.y_min;
  out.step = step;
  out.nx = static_cast<int>(std::floor((grid.x_max - grid.x_min) / step)) + 1;
  out.ny = static_cast<int>(std::floor((grid.y_max - grid.y_min) / step)) + 1;
  out.values.assign(static_cast<std::size_t>(out.nx) * out.ny, 0.0);

  // Separable evaluation: exp(-(dx²+dy²)k) = exp(-dx²k)·exp(-dy²k).
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  const double norm =
      1.0 / (static_cast<double>(fg.size()) * 2.0 * std::numbers::pi * bandwidth * bandwidth);
  std::vector<double> gx(static_cast<std::size_t>(out.nx));
  std::vector<double> gy(static_cast<std::size_t>(out.ny));
  for (const Point& p : fg.points()) {
    for (int i = 0; i < out.nx; ++i) {
      const double dx = out.origin_x + i * step - p.x;
      gx[i] = std::exp(-dx * dx * inv);
    }
    for (int j = 0; j < out.ny; ++j) {
      const double dy = out.origin_y + j * step - p.y;
      gy[j] = std::exp(-dy * dy * inv);
    }
    for (int j = 0; j < out.ny; ++j) {
      double* row = out.values.data() + static_cast<std::size_t>(j) * out.nx;
      for (int i = 0; i < out.nx; ++i) row[i] += gy[j] * gx[i];
    }
  }
  for (double& v : out.values) v *= norm;
  return out;
}

MeanShiftResult mean_shift(const ForegroundSet& fg, double bandwidth,
                           const MeanShiftOptions& options) {
  check_bandwidth(bandwidth);
  const int spacing =
      options.accelerate
          ? std::max(1, static_cast<int>(std::floor(bandwidth / kBinsPerBandwidth)))
          : 1;
  const Lattice lat = build_lattice(fg.points(), spacing);
  KernelShift shift(lat, bandwidth, options.accelerate);
  const std::size_t nbins = lat.bin_col.size();
  const double merge_radius2 = (bandwidth / 2.0) * (bandwidth / 2.0);
  const double tol2 = options.tol * options.tol;

  // Basin cache: lattice cell -> mode reached by a finished trajectory.
  std::vector<int> cache;
  if (options.accelerate) cache.assign(static_cast<std::size_t>(lat.cols) * lat.rows, -1);
  auto cell_of = [&](double x, double y) {
    const int c = std::clamp(static_cast<int>(std::floor((x - lat.x0) / spacing)), 0, lat.cols - 1);
    const int r = std::clamp(static_cast<int>(std::floor((y - lat.y0) / spacing)), 0, lat.rows - 1);
    return static_cast<std::size_t>(r) * lat.cols + c;
  };

  MeanShiftResult result;
  std::vector<int> bin_label(nbins, -1);
  std::vector<std::size_t> visited;
  for (std::size_t b = 0; b < nbins; ++b) {
    double x = lat.center_x(lat.bin_col[b]);
    double y = lat.center_y(lat.bin_row[b]);
    int label = -1;
    visited.clear();
    if (options.accelerate) {
      const std::size_t c = cell_of(x, y);
      if (cache[c] >= 0) label = cache[c];
      visited.push_back(c);
    }
    for (int it = 0; label < 0 && it < options.max_iters; ++it) {
      const auto [nx, ny] = shift(x, y);
      const double step2 = (nx - x) * (nx - x) + (ny - y) * (ny - y);
      x = nx;
      y = ny;
      if (options.accelerate) {
        const std::size_t c = cell_of(x, y);
        if (cache[c] >= 0) {
          label = cache[c];
          break;
        }
        visited.push_back(c);
      }
      if (step2 < tol2) break;
    }
    if (label < 0) {
      for (std::size_t m = 0; m < result.modes.size(); ++m) {
        const double dx = result.modes[m][0] - x;
        const double dy = result.modes[m][1] - y;
        if (dx * dx + dy * dy < merge_radius2) {
          label = static_cast<int>(m);
          break;
        }
      }
      if (label < 0) {
        label = static_cast<int>(result.modes.size());
        result.modes.push_back({x, y});
      }
    }
    if (options.accelerate) {
      for (std::size_t c : visited) {
        if (cache[c] < 0) cache[c] = label;
      }
    }
    bin_label[b] = label;
  }

  // Renumber modes by first appearance in point order.
  std::vector<int> remap(result.modes.size(), -1);
  std::vector<std::array<double, 2>> modes;
  result.labels.resize(fg.size());
  for (std::size_t i = 0; i < fg.size(); ++i) {
    const int old = bin_label[static_cast<std::size_t>(lat.point_bin[i])];
    if (remap[old] < 0) {
      remap[old] = static_cast<int>(modes.size());
      modes.push_back(result.modes[old]);
    }
    result.labels[i] = remap[old];
  }
  result.modes = std::move(modes);
  return result;
}

BandwidthCurve cluster_count_curve(const ForegroundSet& fg,
                                   std::span<const double> bandwidths,
                                   const MeanShiftOptions& options) {
  for (double b : bandwidths) check_bandwidth(b);
  return sorted_curve(bandwidths, run_sweep(fg, bandwidths, options));
}

PolynomialFit fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                             int degree) {
  if (degree < 0) fail(ErrorCode::kInvalidArgument, "polynomial degree must be >= 0");
  if (xs.size() != ys.size()) fail(ErrorCode::kInvalidArgument, "x/y length mismatch");
  if (xs.size() < static_cast<std::size_t>(degree) + 1) {
    fail(ErrorCode::kInvalidArgument, "too few samples for the polynomial degree");
  }
  PolynomialFit fit;
  fit.degree = degree;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  fit.center = (*lo + *hi) / 2.0;
  fit.scale = *hi > *lo ? (*hi - *lo) / 2.0 : 1.0;

  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd v(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (xs[i] - fit.center) / fit.scale;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      v(i, j) = p;
      p *= t;
    }
    y(i) = ys[i];
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(y);
  fit.coefficients.assign(c.data(), c.data() + c.size());
  return fit;
}

CandidateSelection select_candidate_bandwidths(const BandwidthCurve& curve, int interval,
                                               int poly_degree) {
  if (interval < 2) fail(ErrorCode::kInvalidArgument, "interval must be >= 2");
  if (curve.samples.size() < static_cast<std::size_t>(poly_degree) + 1) {
    fail(ErrorCode::kInvalidArgument, "bandwidth curve too short for the polynomial degree");
  }
  std::vector<double> xs, ys;
  for (const auto& s : curve.samples) {
    xs.push_back(s.bandwidth);
    ys.push_back(static_cast<double>(s.n_clusters));
  }
  CandidateSelection sel;
  sel.rule = SelectionRule::kConcaveBand;
  sel.fit = fit_polynomial(xs, ys, poly_degree);
  sel.descent_band = concave_samples(sel.fit, xs, ys);
  std::sort(sel.descent_band.begin(), sel.descent_band.end());

  double best_std = std::numeric_limits<double>::infinity();
  const std::size_t step = static_cast<std::size_t>(interval);
  for (std::size_t start = 0; start < sel.descent_band.size(); start += step) {
    const std::size_t len = std::min(step, sel.descent_band.size() - start);
    if (len < 2) continue;
    const std::span<const double> group(sel.descent_band.data() + start, len);
    const double sd = population_std(group);
    if (sd < best_std) {
      best_std = sd;
      sel.candidates.assign(group.begin(), group.end());
    }
  }
  if (sel.candidates.empty()) {
    fail(ErrorCode::kDataError, "no concave region in the bandwidth curve");
  }
  return sel;
}

std::vector<double> plateau_bandwidths(const BandwidthCurve& curve) {
  const auto& s = curve.samples;
  if (s.empty()) fail(ErrorCode::kInvalidArgument, "empty bandwidth curve");
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j].n_clusters == s[i].n_clusters) ++j;
    if (s[i].n_clusters > 1 && j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len == 0) {
    best_start = 0;
    best_len = s.size();
  }
  std::vector<double> out;
  for (std::size_t i = best_start; i < best_start + best_len; ++i) out.push_back(s[i].bandwidth);
  return out;
}

CandidateSelection select_candidates_or_plateau(const BandwidthCurve& curve, int interval,
                                                int poly_degree) {
  try {
    return select_candidate_bandwidths(curve, interval, poly_degree);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDataError) throw;
  }
  CandidateSelection sel = select_candidates(curve, SelectionRule::kPlateau, interval, poly_degree);
  sel.rule = SelectionRule::kConcaveBand;
  sel.used_fallback = true;
  return sel;
}

CandidateSelection select_candidates(const BandwidthCurve& curve, SelectionRule rule,
                                     int interval, int poly_degree) {
  if (rule == SelectionRule::kConcaveBand) {
    return select_candidates_or_plateau(curve, interval, poly_degree);
  }
  if (curve.samples.size() < static_cast<std::size_t>(poly_degree) + 1) {
    fail(ErrorCode::kInvalidArgument, "bandwidth curve too short for the polynomial degree");
  }
  std::vector<double> xs, ys;
  for (const auto& s : curve.samples) {
    xs.push_back(s.bandwidth);
    ys.push_back(static_cast<double>(s.n_clusters));
  }
  CandidateSelection sel;
  sel.rule = SelectionRule::kPlateau;
  sel.fit = fit_polynomial(xs, ys, poly_degree);
  sel.descent_band = concave_samples(sel.fit, xs, ys);
  sel.candidates = plateau_bandwidths(curve);
  return sel;
}

std::size_t pixel_overlap(const PointSet& a, const PointSet& b) {
  std::vector<Point> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end(), RowMajorLess{});
  std::sort(sb.begin(), sb.end(), RowMajorLess{});
  std::size_t count = 0;
  auto i = sa.begin();
  auto j = sb.begin();
  while (i != sa.end() && j != sb.end()) {
    if (RowMajorLess{}(*i, *j)) {
      ++i;
    } else if (RowMajorLess{}(*j, *i)) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<SegmentHypothesis> overlap_filter(std::vector<SegmentHypothesis> hypotheses) {
  std::stable_sort(hypotheses.begin(), hypotheses.end(),
                   [](const SegmentHypothesis& a, const SegmentHypothesis& b) {
                     return a.pixels.size() > b.pixels.size();
                   });
  std::vector<SegmentHypothesis> kept;
  for (auto& h : hypotheses) {
    bool dominated = false;
    for (const auto& k : kept) {
      const double smaller = static_cast<double>(std::min(h.pixels.size(), k.pixels.size()));
      if (static_cast<double>(pixel_overlap(h.pixels, k.pixels)) > 0.9 * smaller) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(std::move(h));
  }
  return kept;
}

std::vector<SegmentHypothesis> resolve_shared_pixels(std::vector<SegmentHypothesis> hypotheses,
                                                     std::size_t min_pixels) {
  std::map<Point, std::size_t> owner;
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    for (const Point& p : hypotheses[h].pixels) {
      const auto [it, inserted] = owner.emplace(p, h);
      if (!inserted && hypotheses[h].source_bandwidth < hypotheses[it->second].source_bandwidth) {
        it->second = h;
      }
    }
  }
  std::vector<SegmentHypothesis> out;
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    auto& pts = hypotheses[h].pixels.points;
    std::erase_if(pts, [&](const Point& p) { return owner.at(p) != h; });
    if (pts.size() < std::max<std::size_t>(min_pixels, 1)) continue;
    hypotheses[h].bbox = points_to_bbox(hypotheses[h].pixels);
    out.push_back(std::move(hypotheses[h]));
  }
  return out;
}

SegmentationResult segment(const ForegroundSet& fg, const SegmentConfig& config) {
  SegmentationResult result;
  const std::vector<double> bandwidths = estimate_bandwidths(
      fg, config.ratio_count, config.seed, config.ratio_min, config.ratio_max);
  const std::vector<MeanShiftResult> runs = run_sweep(fg, bandwidths, config.mean_shift);
  result.curve = sorted_curve(bandwidths, runs);

  if (result.curve.samples.size() < static_cast<std::size_t>(config.poly_degree) + 1) {
    // Too few distinct bandwidths to fit; every sample is a candidate.
    for (const auto& s : result.curve.samples) result.selection.candidates.push_back(s.bandwidth);
    result.selection.rule = config.rule;
    result.selection.used_fallback = true;
  } else {
    result.selection =
        select_candidates(result.curve, config.rule, config.interval, config.poly_degree);
  }
  result.candidate_bandwidths = result.selection.candidates;

  std::vector<SegmentHypothesis> hyps;
  for (double b : result.candidate_bandwidths) {
    const auto it = std::lower_bound(bandwidths.begin(), bandwidths.end(), b);
    const MeanShiftResult ms = (it != bandwidths.end() && *it == b)
                                   ? runs[static_cast<std::size_t>(it - bandwidths.begin())]
                                   : mean_shift(fg, b, config.mean_shift);
    std::vector<SegmentHypothesis> per(ms.modes.size());
    for (std::size_t i = 0; i < fg.size(); ++i) {
      per[static_cast<std::size_t>(ms.labels[i])].pixels.points.push_back(fg.points()[i]);
    }
    for (std::size_t m = 0; m < per.size(); ++m) {
      per[m].source_bandwidth = b;
      per[m].cluster_label = static_cast<int>(m);
      per[m].bbox = points_to_bbox(per[m].pixels);
      if (per[m].pixels.size() >= config.min_pixels) hyps.push_back(std::move(per[m]));
    }
  }
  result.hypotheses =
      resolve_shared_pixels(overlap_filter(std::move(hyps)), config.min_pixels);
  std::stable_sort(result.hypotheses.begin(), result.hypotheses.end(),
                   [](const SegmentHypothesis& a, const SegmentHypothesis& b) {
                     if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
                     return a.bbox.x_min < b.bbox.x_min;
                   });
  return result;
}

BinaryMask strip_enclosing_border(const BinaryMask& mask, double span_fraction) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
  std::vector<BoundingBox> boxes;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.get(x, y) || comp[idx] >= 0) continue;
      const int id = static_cast<int>(boxes.size());
      boxes.push_back({x, y, x, y});
      sizes.push_back(0);
      comp[idx] = id;
      stack.push_back(idx);
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const int cx = static_cast<int>(cur % w);
        const int cy = static_cast<int>(cur / w);
        ++sizes[id];
        auto& b = boxes[id];
        b.x_min = std::min(b.x_min, cx);
        b.x_max = std::max(b.x_max, cx);
        b.y_min = std::min(b.y_min, cy);
        b.y_max = std::max(b.y_max, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!mask.contains(nx, ny) || !mask.get(nx, ny)) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (comp[n] < 0) {
              comp[n] = id;
              stack.push_back(n);
            }
          }
        }
      }
    }
  }
  if (boxes.size() < 2) return mask;

  BoundingBox all = boxes[0];
  for (const auto& b : boxes) {
    all.x_min = std::min(all.x_min, b.x_min);
    all.y_min = std::min(all.y_min, b.y_min);
    all.x_max = std::max(all.x_max, b.x_max);
    all.y_max = std::max(all.y_max, b.y_max);
  }

  // Largest spanning component first.
  std::vector<int> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sizes[a] > sizes[b]; });
  for (int id : order) {
    const auto& b = boxes[id];
    if (b.width() < span_fraction * all.width() || b.height() < span_fraction * all.height()) {
      continue;
    }
    // 4-connected background flood from outside the padded image, walled by
    // this component only.
    const int pw = w + 2, ph = h + 2;
    std::vector<std::uint8_t> reached(static_cast<std::size_t>(pw) * ph, 0);
    auto wall = [&](int px, int py) {
      const int x = px - 1, y = py - 1;
      return x >= 0 && y >= 0 && x < w && y < h &&
             comp[static_cast<std::size_t>(y) * w + x] == id;
    };
    stack.assign(1, 0);
    reached[0] = 1;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int cx = static_cast<int>(cur % pw);
      const int cy = static_cast<int>(cur / pw);
      const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& d : nbr) {
        const int nx = cx + d[0], ny = cy + d[1];
        if (nx < 0 || ny < 0 || nx >= pw || ny >= ph) continue;
        const std::size_t n = static_cast<std::size_t>(ny) * pw + nx;
        if (reached[n] || wall(nx, ny)) continue;
        reached[n] = 1;
        stack.push_back(n);
      }
    }
    bool encloses = true;
    for (int y = 0; y < h && encloses; ++y) {
      for (int x = 0; x < w; ++x) {
        const int c = comp[static_cast<std::size_t>(y) * w + x];
        if (c >= 0 && c != id &&
            reached[static_cast<std::size_t>(y + 1) * pw + (x + 1)]) {
          encloses = false;
          break;
        }
      }
    }
    if (!encloses) continue;
    BinaryMask out = mask;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (comp[static_cast<std::size_t>(y) * w + x] == id) out.set(x, y, false);
      }
    }
    return out;
  }
  return mask;
}

}  // namespace sealkit
