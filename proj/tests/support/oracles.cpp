#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace oracle {
namespace {

double dist(const Point& a, const Point& b) {
  return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

double px(const BinaryMask& m, int x, int y) {
  x = std::clamp(x, 0, m.width() - 1);
  y = std::clamp(y, 0, m.height() - 1);
  return m.get(x, y) ? 1.0 : 0.0;
}

}  // namespace

double knn_bandwidth(const std::vector<Point>& pts, double ratio) {
  const int n = static_cast<int>(pts.size());
  const int k = std::clamp(static_cast<int>(std::lround(ratio * n)), 2, n);
  double total = 0.0;
  for (const Point& p : pts) {
    std::vector<double> d;
    for (const Point& q : pts) d.push_back(dist(p, q));
    std::sort(d.begin(), d.end());
    total += d[static_cast<std::size_t>(k - 1)];
  }
  return total / n;
}

double kde(const std::vector<Point>& pts, double h, double x, double y) {
  double s = 0.0;
  for (const Point& p : pts) {
    const double dx = x - p.x;
    const double dy = y - p.y;
    s += std::exp(-(dx * dx + dy * dy) / (2 * h * h));
  }
  return s / (pts.size() * 2 * std::numbers::pi * h * h);
}

std::vector<int> mean_shift_labels(const std::vector<Point>& pts, double h, double tol,
                                   int max_iters) {
  std::vector<std::array<double, 2>> modes;
  std::vector<int> labels;
  for (const Point& start : pts) {
    double x = start.x;
    double y = start.y;
    for (int it = 0; it < max_iters; ++it) {
      double sw = 0, sx = 0, sy = 0;
      for (const Point& q : pts) {
        const double w = std::exp(-((x - q.x) * (x - q.x) + (y - q.y) * (y - q.y)) / (2 * h * h));
        sw += w;
        sx += w * q.x;
        sy += w * q.y;
      }
      const double nx = sx / sw;
      const double ny = sy / sw;
      const double shift = std::hypot(nx - x, ny - y);
      x = nx;
      y = ny;
      if (shift < tol) break;
    }
    int label = -1;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (std::hypot(modes[m][0] - x, modes[m][1] - y) < h / 2) {
        label = static_cast<int>(m);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(modes.size());
      modes.push_back({x, y});
    }
    labels.push_back(label);
  }
  return labels;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto [f, fnew] = fwd.emplace(a[i], b[i]);
    const auto [r, rnew] = back.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

std::vector<double> harris_response(const BinaryMask& m, double k, double sigma) {
  const int w = m.width();
  const int h = m.height();
  const int rad = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> gx(static_cast<std::size_t>(w) * h), gy(gx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      static const int sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
      double ax = 0, ay = 0;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          const double v = px(m, x + i, y + j);
          ax += sx[j + 1][i + 1] * v;
          ay += sx[i + 1][j + 1] * v;
        }
      }
      gx[static_cast<std::size_t>(y) * w + x] = ax;
      gy[static_cast<std::size_t>(y) * w + x] = ay;
    }
  }
  double wsum = 0;
  for (int j = -rad; j <= rad; ++j) {
    for (int i = -rad; i <= rad; ++i) wsum += std::exp(-(i * i + j * j) / (2 * sigma * sigma));
  }
  std::vector<double> r(gx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0, b = 0, c = 0;
      for (int j = -rad; j <= rad; ++j) {
        for (int i = -rad; i <= rad; ++i) {
          const int xx = std::clamp(x + i, 0, w - 1);
          const int yy = std::clamp(y + j, 0, h - 1);
          const std::size_t idx = static_cast<std::size_t>(yy) * w + xx;
          const double wt = std::exp(-(i * i + j * j) / (2 * sigma * sigma)) / wsum;
          a += wt * gx[idx] * gx[idx];
          b += wt * gy[idx] * gy[idx];
          c += wt * gx[idx] * gy[idx];
        }
      }
      r[static_cast<std::size_t>(y) * w + x] = (a * b - c * c) - k * (a + b) * (a + b);
    }
  }
  return r;
}

std::vector<double> hog(const BinaryMask& m) {
  constexpr int cells = 28, bins = 9, cs = 8;
  std::vector<std::array<double, bins>> hist(cells * cells);
  for (auto& c : hist) c.fill(0.0);
  auto at = [&](int x, int y) { return m.contains(x, y) && m.get(x, y) ? 1.0 : 0.0; };
  for (int y = 0; y < cells * cs; ++y) {
    for (int x = 0; x < cells * cs; ++x) {
      const double dx = at(x + 1, y) - at(x - 1, y);
      const double dy = at(x, y + 1) - at(x, y - 1);
      const double mag = std::sqrt(dx * dx + dy * dy);
      if (mag == 0) continue;
      double deg = std::atan2(dy, dx) * 180 / std::numbers::pi;
      deg = std::fmod(deg + 360.0, 180.0);
      // Centres at 10 + 20b; find the two centres bracketing deg, wrapping.
      auto& cell = hist[(y / cs) * cells + x / cs];
      for (int b = 0; b < bins; ++b) {
        double d = std::abs(deg - (10.0 + 20.0 * b));
        d = std::min(d, 180.0 - d);
        if (d < 20.0) cell[b] += mag * (1.0 - d / 20.0);
      }
    }
  }
  std::vector<double> out;
  for (int by = 0; by < cells - 1; ++by) {
    for (int bx = 0; bx < cells - 1; ++bx) {
      std::vector<double> v;
      for (const auto& [cy, cx] : {std::pair{by, bx}, {by, bx + 1}, {by + 1, bx}, {by + 1, bx + 1}}) {
        const auto& c = hist[cy * cells + cx];
        v.insert(v.end(), c.begin(), c.end());
      }
      double n = 0;
      for (double e : v) n += e * e;
      if (n > 0) {
        for (double& e : v) e = std::min(e / std::sqrt(n), 0.2);
        double n2 = 0;
        for (double e : v) n2 += e * e;
        for (double& e : v) e /= std::sqrt(n2);
      }
      out.insert(out.end(), v.begin(), v.end());
    }
  }
  return out;
}

double modified_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    double s = 0;
    for (const Point& p : from) {
      double best = INFINITY;
      for (const Point& q : to) best = std::min(best, dist(p, q));
      s += best;
    }
    return s / from.size();
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<std::vector<double>> pca_scores(const std::vector<std::vector<double>>& rows,
                                            std::size_t dims) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[i][j];
  }
  x.rowwise() -= x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * x);
  std::vector<std::vector<double>> out(rows.size(), std::vector<double>(dims));
  for (std::size_t c = 0; c < dims; ++c) {
    const Eigen::VectorXd axis = es.eigenvectors().col(d - 1 - static_cast<Eigen::Index>(c));
    const Eigen::VectorXd s = x * axis;
    for (Eigen::Index i = 0; i < n; ++i) out[i][c] = s(i);
  }
  return out;
}

int components8(const BinaryMask& m) {
  std::vector<char> seen(m.size(), 0);
  int count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen[static_cast<std::size_t>(y) * m.width() + x]) continue;
      ++count;
      std::vector<Point> stack{{x, y}};
      seen[static_cast<std::size_t>(y) * m.width() + x] = 1;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = p.x + dx, qy = p.y + dy;
            if (!m.contains(qx, qy) || !m.get(qx, qy)) continue;
            char& s = seen[static_cast<std::size_t>(qy) * m.width() + qx];
            if (!s) {
              s = 1;
              stack.push_back({qx, qy});
            }
          }
        }
      }
    }
  }
  return count;
}

int deletable_pixels(const BinaryMask& m) {
  auto at = [&](int x, int y) { return m.contains(x, y) && m.get(x, y) ? 1 : 0; };
  int count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      // P2..P9: N, NE, E, SE, S, SW, W, NW.
      const int p2 = at(x, y - 1), p3 = at(x + 1, y - 1), p4 = at(x + 1, y),
                p5 = at(x + 1, y + 1), p6 = at(x, y + 1), p7 = at(x - 1, y + 1),
                p8 = at(x - 1, y), p9 = at(x - 1, y - 1);
      const int ring[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
      const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
      int a = 0;
      for (int i = 0; i < 8; ++i) a += ring[i] == 0 && ring[i + 1] == 1;
      if (b < 2 || b > 6 || a != 1) continue;
      const bool first = p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
      const bool second = p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
      count += first || second;
    }
  }
  return count;
}

}  // namespace oracle
