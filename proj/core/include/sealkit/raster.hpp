#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sealkit {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB image. x is the column, y the row, origin top-left.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = {255, 255, 255});
  RasterImage(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<Rgb> pixels() noexcept { return pixels_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Row-major foreground flags.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool get(int x, int y) const noexcept {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  /// Out-of-bounds reads are background.
  bool get_or_zero(int x, int y) const noexcept {
    return contains(x, y) && get(x, y);
  }
  void set(int x, int y, bool v = true) noexcept {
    bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Point {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Sorts row-major: by y, then x.
struct RowMajorLess {
  bool operator()(const Point& a, const Point& b) const noexcept {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

/// Ordered collection of unique integer coordinates.
struct PointSet {
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  auto begin() const noexcept { return points.begin(); }
  auto end() const noexcept { return points.end(); }
  const Point& operator[](std::size_t i) const { return points[i]; }

  friend bool operator==(const PointSet&, const PointSet&) = default;
};

/// Inclusive pixel bounds.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min + 1; }
  int height() const noexcept { return y_max - y_min + 1; }
  long long area() const noexcept {
    return static_cast<long long>(width()) * height();
  }
  bool contains(Point p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double box_iou(const BoundingBox& a, const BoundingBox& b) noexcept;

// PNG I/O. Alpha is composited over white; 16-bit and palette images are
// reduced to 8-bit RGB.
RasterImage load_image(const std::filesystem::path& path);
RasterImage decode_png(std::span<const std::uint8_t> bytes);
void save_image(const RasterImage& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const RasterImage& image);
/// Writes a mask as 8-bit grayscale, foreground 255.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

PointSet mask_to_points(const BinaryMask& mask);
/// Points outside the mask dimensions are rejected.
BinaryMask points_to_mask(const PointSet& points, int width, int height);
BoundingBox points_to_bbox(const PointSet& points);
/// Removes duplicates, keeping the first occurrence order.
PointSet make_unique_points(std::vector<Point> points);

RasterImage crop(const RasterImage& image, const BoundingBox& box);
BinaryMask crop(const BinaryMask& mask, const BoundingBox& box);

/// ITU-R BT.601 luma in [0, 255].
double luminance(const Rgb& c) noexcept;
/// Foreground where luminance < threshold (dark ink on light paper).
BinaryMask binarize_dark(const RasterImage& image, double threshold = 128.0);
RasterImage mask_to_image(const BinaryMask& mask);

}  // namespace sealkit
