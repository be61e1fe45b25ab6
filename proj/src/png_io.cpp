#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include <fmt/format.h>
#include <png.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/io.hpp"

namespace stackgrasp {

namespace {

struct FileCloser {
  void operator()(std::FILE *f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports through these instead of stderr; the text ends up in the
// thrown Error.
thread_local std::string png_message;

void on_png_error(png_structp png, png_const_charp message) {
  png_message = message ? message : "unknown error";
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Rows are given top to bottom; bit_depth is 8 or 16, big-endian samples.
void write_png(const std::filesystem::path &path, int width, int height, int channels,
               int bit_depth, const std::vector<std::uint8_t> &rows) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw Error(ErrorKind::kStorage, fmt::format("{}: cannot open for writing", path.string()));
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                            on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kStorage, fmt::format("{}: libpng init failed", path.string()));
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::kStorage,
                fmt::format("{}: PNG write failed: {}", path.string(), png_message));
  }
  png_init_io(png, file.get());
  const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, width, height, bit_depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_depth_png(const std::filesystem::path &path, int width, int height,
                     std::span<const float> depth_m) {
  if (depth_m.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::kInvalidArgument, "depth buffer size does not match image size");
  }
  std::vector<std::uint8_t> rows(depth_m.size() * 2);
  for (std::size_t i = 0; i < depth_m.size(); ++i) {
    const long long mm = std::llround(static_cast<double>(depth_m[i]) * 1000.0);
    if (mm < 0 || mm > 65535) {
      throw Error(ErrorKind::kStorage,
                  fmt::format("{}: depth {} m does not fit a 16-bit millimeter image",
                              path.string(), depth_m[i]));
    }
    rows[2 * i] = static_cast<std::uint8_t>(mm >> 8);
    rows[2 * i + 1] = static_cast<std::uint8_t>(mm & 0xff);
  }
  write_png(path, width, height, 1, 16, rows);
}

void write_mask_png(const std::filesystem::path &path, const Mask &mask) {
  std::vector<std::uint8_t> rows = mask.dense();
  for (std::uint8_t &v : rows) v = v ? 255 : 0;
  write_png(path, mask.image_width(), mask.image_height(), 1, 8, rows);
}

void write_placeholder_rgb(const std::filesystem::path &path, int width, int height) {
  const std::vector<std::uint8_t> rows(static_cast<std::size_t>(width) * height * 3, 128);
  write_png(path, width, height, 3, 8, rows);
}

std::vector<float> read_depth_png(const std::filesystem::path &path, int &width,
                                  int &height) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    throw Error(ErrorKind::kParse, fmt::format("{}: cannot open depth image", path.string()));
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                           on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kParse, fmt::format("{}: libpng init failed", path.string()));
  }
  std::vector<std::uint8_t> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kParse,
                fmt::format("{}: corrupt PNG: {}", path.string(), png_message));
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::kParse,
                fmt::format("{}: expected a 16-bit grayscale depth image", path.string()));
  }
  rows.resize(static_cast<std::size_t>(w) * h * 2);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, rows.data() + static_cast<std::size_t>(y) * w * 2, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  width = w;
  height = h;
  std::vector<float> depth(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const int mm = (rows[2 * i] << 8) | rows[2 * i + 1];
    depth[i] = static_cast<float>(mm / 1000.0);
  }
  return depth;
}

}  // namespace stackgrasp
