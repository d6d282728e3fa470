#pragma once

// Slow, direct reference implementations used as test oracles. None of them
// shares code with the library under test.

#include <cstdint>
#include <vector>

#include "sealkit/raster.hpp"

namespace oracle {

using sealkit::BinaryMask;
using sealkit::Point;

/// Mean over points of the distance to the k-th nearest point, where the
/// point itself is the first neighbour and k = clamp(round(r·n), 2, n).
double knn_bandwidth(const std::vector<Point>& pts, double ratio);

/// Standard bivariate Gaussian KDE at (x, y).
double kde(const std::vector<Point>& pts, double h, double x, double y);

/// Plain Gaussian mean-shift from every point over all points, then modes
/// closer than h/2 merged in first-seen order.
std::vector<int> mean_shift_labels(const std::vector<Point>& pts, double h, double tol = 1e-3,
                                   int max_iters = 300);

/// True when a and b induce the same partition (labels up to renaming).
bool same_partition(const std::vector<int>& a, const std::vector<int>& b);

/// Harris response from dense 3×3 Sobel and 2-D Gaussian window sums, both
/// with replicated borders. Window radius ceil(3σ), weights normalised.
std::vector<double> harris_response(const BinaryMask& mask, double k, double sigma);

/// HOG over the top-left 224×224 window: centred differences (outside is
/// background), 9 unsigned bins centred at 10°, 30°, …, linear vote split,
/// 2×2-cell blocks, L2-Hys with clip 0.2.
std::vector<double> hog(const BinaryMask& mask);

/// max(mean_a min_b |a-b|, mean_b min_a |a-b|) by double loop.
double modified_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

/// Classical PCA scores of row vectors: centred data times the top `dims`
/// covariance eigenvectors.
std::vector<std::vector<double>> pca_scores(const std::vector<std::vector<double>>& rows,
                                            std::size_t dims);

/// 8-connected foreground components by flood fill.
int components8(const BinaryMask& mask);

/// Foreground pixels that still satisfy a Zhang-Suen deletion condition in
/// either subiteration.
int deletable_pixels(const BinaryMask& mask);

}  // namespace oracle
