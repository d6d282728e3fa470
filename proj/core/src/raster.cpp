#include "sealkit/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "sealkit/error.hpp"

namespace sealkit {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
}

std::size_t pixel_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

// RAII holder for the libpng simplified API.
struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

RasterImage finish_read(PngImage& png) {
  png.image.format = PNG_FORMAT_RGB;
  const int width = static_cast<int>(png.image.width);
  const int height = static_cast<int>(png.image.height);
  check_dims(width, height);
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png.image));
  png_color white{255, 255, 255};
  if (png_image_finish_read(&png.image, &white, buffer.data(), 0, nullptr) == 0) {
    fail(ErrorCode::kDataError,
         std::string("corrupt or unsupported PNG: ") + png.image.message);
  }
  std::vector<Rgb> pixels(pixel_count(width, height));
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return RasterImage(width, height, std::move(pixels));
}

std::vector<std::uint8_t> encode(const std::uint8_t* data, int width,
                                 int height, png_uint_32 format) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&png.image, nullptr, &size, 0, data, 0,
                                nullptr) == 0) {
    fail(ErrorCode::kDataError,
         std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&png.image, out.data(), &size, 0, data, 0,
                                nullptr) == 0) {
    fail(ErrorCode::kDataError,
         std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::kNotFound, "cannot open for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kDataError, "write failed: " + path.string());
}

}  // namespace

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(pixel_count(width, height), fill);
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count(width, height)) {
    fail(ErrorCode::kInvalidArgument, "pixel array does not match dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(pixel_count(width, height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != pixel_count(width, height)) {
    fail(ErrorCode::kInvalidArgument, "bit array does not match dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

double box_iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const int ix0 = std::max(a.x_min, b.x_min);
  const int iy0 = std::max(a.y_min, b.y_min);
  const int ix1 = std::min(a.x_max, b.x_max);
  const int iy1 = std::min(a.y_max, b.y_max);
  if (ix1 < ix0 || iy1 < iy0) return 0.0;
  const double inter =
      static_cast<double>(ix1 - ix0 + 1) * static_cast<double>(iy1 - iy0 + 1);
  return inter / (static_cast<double>(a.area()) +
                  static_cast<double>(b.area()) - inter);
}

RasterImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::kNotFound, "file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "file not found: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    fail(ErrorCode::kDataError, "not a PNG file");
  }
  PngImage png;
  if (png_image_begin_read_from_memory(&png.image, bytes.data(),
                                       bytes.size()) == 0) {
    fail(ErrorCode::kDataError,
         std::string("corrupt or unsupported PNG: ") + png.image.message);
  }
  return finish_read(png);
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  std::vector<std::uint8_t> raw(image.size() * 3);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Rgb& c = image.pixels()[i];
    raw[3 * i] = c.r;
    raw[3 * i + 1] = c.g;
    raw[3 * i + 2] = c.b;
  }
  return encode(raw.data(), image.width(), image.height(), PNG_FORMAT_RGB);
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
  write_file(path, encode_png(image));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> raw(mask.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.bits()[i] ? 255 : 0;
  write_file(path, encode(raw.data(), mask.width(), mask.height(),
                          PNG_FORMAT_GRAY));
}

PointSet mask_to_points(const BinaryMask& mask) {
  PointSet out;
  out.points.reserve(mask.count());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) out.points.push_back({x, y});
    }
  }
  return out;
}

BinaryMask points_to_mask(const PointSet& points, int width, int height) {
  BinaryMask mask(width, height);
  for (const Point& p : points) {
    if (!mask.contains(p.x, p.y)) {
      fail(ErrorCode::kInvalidArgument, "point outside mask bounds");
    }
    mask.set(p.x, p.y);
  }
  return mask;
}

BoundingBox points_to_bbox(const PointSet& points) {
  if (points.empty()) {
    fail(ErrorCode::kInvalidArgument, "bounding box of an empty point set");
  }
  BoundingBox box{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Point& p : points) {
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x);
    box.y_max = std::max(box.y_max, p.y);
  }
  return box;
}

PointSet make_unique_points(std::vector<Point> points) {
  std::set<Point> seen;
  PointSet out;
  out.points.reserve(points.size());
  for (const Point& p : points) {
    if (seen.insert(p).second) out.points.push_back(p);
  }
  return out;
}

namespace {
void check_crop_box(int width, int height, const BoundingBox& box) {
  if (box.x_min < 0 || box.y_min < 0 || box.x_max >= width ||
      box.y_max >= height || box.x_min > box.x_max || box.y_min > box.y_max) {
    fail(ErrorCode::kInvalidArgument, "crop box outside image bounds");
  }
}
}  // namespace

RasterImage crop(const RasterImage& image, const BoundingBox& box) {
  check_crop_box(image.width(), image.height(), box);
  RasterImage out(box.width(), box.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = image.at(box.x_min + x, box.y_min + y);
    }
  }
  return out;
}

BinaryMask crop(const BinaryMask& mask, const BoundingBox& box) {
  check_crop_box(mask.width(), mask.height(), box);
  BinaryMask out(box.width(), box.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.set(x, y, mask.get(box.x_min + x, box.y_min + y));
    }
  }
  return out;
}

double luminance(const Rgb& c) noexcept {
  // Integer weights keep gray levels exact (128,128,128 -> 128).
  return (299 * c.r + 587 * c.g + 114 * c.b) / 1000.0;
}

BinaryMask binarize_dark(const RasterImage& image, double threshold) {
  BinaryMask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      mask.set(x, y, luminance(image.at(x, y)) < threshold);
    }
  }
  return mask;
}

RasterImage mask_to_image(const BinaryMask& mask) {
  RasterImage out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.get(x, y)) out.at(x, y) = {0, 0, 0};
    }
  }
  return out;
}

}  // namespace sealkit
