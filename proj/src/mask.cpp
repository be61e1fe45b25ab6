#include "stackgrasp/mask.hpp"

#include <algorithm>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

PixelRect intersect(const PixelRect &a, const PixelRect &b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.width, b.x + b.width);
  const int y1 = std::min(a.y + a.height, b.y + b.height);
  if (x1 <= x0 || y1 <= y0) return {};
  return {x0, y0, x1 - x0, y1 - y0};
}

Mask::Mask(int image_width, int image_height)
    : Mask(image_width, image_height, PixelRect{}) {}

Mask::Mask(int image_width, int image_height, const PixelRect &roi)
    : image_width_(image_width), image_height_(image_height) {
  if (image_width < 0 || image_height < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative mask size");
  }
  roi_ = intersect(roi, {0, 0, image_width, image_height});
  bits_.assign(static_cast<std::size_t>(roi_.width) * roi_.height, 0);
}

bool Mask::at(int x, int y) const {
  if (!roi_.contains(x, y)) return false;
  return bits_[static_cast<std::size_t>(y - roi_.y) * roi_.width + (x - roi_.x)] != 0;
}

void Mask::set(int x, int y, bool value) {
  if (!roi_.contains(x, y)) {
    throw Error(ErrorKind::kInvalidArgument, "mask write outside region of interest");
  }
  bits_[static_cast<std::size_t>(y - roi_.y) * roi_.width + (x - roi_.x)] = value ? 1 : 0;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

PixelRect Mask::bounds() const {
  int x0 = roi_.x + roi_.width, y0 = roi_.y + roi_.height, x1 = -1, y1 = -1;
  for (int y = 0; y < roi_.height; ++y) {
    for (int x = 0; x < roi_.width; ++x) {
      if (!bits_[static_cast<std::size_t>(y) * roi_.width + x]) continue;
      x0 = std::min(x0, roi_.x + x);
      x1 = std::max(x1, roi_.x + x);
      y0 = std::min(y0, roi_.y + y);
      y1 = std::max(y1, roi_.y + y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Mask Mask::eroded(int radius) const {
  if (radius < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative erosion radius");
  }
  if (radius == 0) return *this;
  const int w = roi_.width, h = roi_.height;
  // Separable min filter; anything outside the ROI counts as unset.
  std::vector<std::uint8_t> rows(bits_.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = x - radius >= 0 && x + radius < w;
      for (int k = -radius; keep && k <= radius; ++k) {
        keep = bits_[static_cast<std::size_t>(y) * w + x + k] != 0;
      }
      rows[static_cast<std::size_t>(y) * w + x] = keep ? 1 : 0;
    }
  }
  Mask out(image_width_, image_height_, roi_);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool keep = y - radius >= 0 && y + radius < h;
      for (int k = -radius; keep && k <= radius; ++k) {
        keep = rows[static_cast<std::size_t>(y + k) * w + x] != 0;
      }
      out.bits_[static_cast<std::size_t>(y) * w + x] = keep ? 1 : 0;
    }
  }
  return out;
}

Mask Mask::intersected(const Mask &other) const {
  Mask out(image_width_, image_height_, intersect(roi_, other.roi_));
  const PixelRect &r = out.roi_;
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) {
      if (at(x, y) && other.at(x, y)) out.set(x, y);
    }
  }
  return out;
}

bool Mask::is_subset_of(const Mask &other) const {
  for (int y = 0; y < roi_.height; ++y) {
    for (int x = 0; x < roi_.width; ++x) {
      if (bits_[static_cast<std::size_t>(y) * roi_.width + x] &&
          !other.at(roi_.x + x, roi_.y + y)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::uint8_t> Mask::dense() const {
  std::vector<std::uint8_t> out(
      static_cast<std::size_t>(image_width_) * image_height_, 0);
  for (int y = 0; y < roi_.height; ++y) {
    for (int x = 0; x < roi_.width; ++x) {
      out[static_cast<std::size_t>(roi_.y + y) * image_width_ + roi_.x + x] =
          bits_[static_cast<std::size_t>(y) * roi_.width + x];
    }
  }
  return out;
}

Mask Mask::from_dense(int image_width, int image_height,
                      const std::vector<std::uint8_t> &pixels) {
  if (pixels.size() != static_cast<std::size_t>(image_width) * image_height) {
    throw Error(ErrorKind::kInvalidArgument, "dense mask size mismatch");
  }
  int x0 = image_width, y0 = image_height, x1 = -1, y1 = -1;
  for (int y = 0; y < image_height; ++y) {
    for (int x = 0; x < image_width; ++x) {
      if (!pixels[static_cast<std::size_t>(y) * image_width + x]) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return Mask(image_width, image_height);
  Mask out(image_width, image_height, {x0, y0, x1 - x0 + 1, y1 - y0 + 1});
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (pixels[static_cast<std::size_t>(y) * image_width + x]) out.set(x, y);
    }
  }
  return out;
}

bool operator==(const Mask &a, const Mask &b) {
  return a.image_width_ == b.image_width_ &&
         a.image_height_ == b.image_height_ && a.is_subset_of(b) &&
         b.is_subset_of(a);
}

std::size_t intersection_count(const Mask &a, const Mask &b) {
  const PixelRect r = intersect(a.roi(), b.roi());
  std::size_t n = 0;
  for (int y = r.y; y < r.y + r.height; ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) {
      if (a.at(x, y) && b.at(x, y)) ++n;
    }
  }
  return n;
}

RunLengthMask encode_rle(const Mask &mask) {
  RunLengthMask rle{mask.image_height(), mask.image_width(), {}};
  bool current = false;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.image_width(); ++x) {
    for (int y = 0; y < mask.image_height(); ++y) {
      const bool v = mask.at(x, y);
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

Mask decode_rle(const RunLengthMask &rle) {
  if (rle.height < 0 || rle.width < 0) {
    throw Error(ErrorKind::kParse, "run-length mask has a negative size");
  }
  const std::size_t n = static_cast<std::size_t>(rle.height) * rle.width;
  std::vector<std::uint8_t> dense(n, 0);
  std::size_t pos = 0;
  bool value = false;
  for (std::uint32_t run : rle.counts) {
    if (run > n - pos) {
      throw Error(ErrorKind::kParse, "run-length counts exceed the image size");
    }
    for (std::uint32_t k = 0; k < run; ++k, ++pos) {
      if (value) {
        const std::size_t x = pos / rle.height;
        const std::size_t y = pos % rle.height;
        dense[y * rle.width + x] = 1;
      }
    }
    value = !value;
  }
  if (pos != n) {
    throw Error(ErrorKind::kParse, "run-length counts do not cover the image");
  }
  return Mask::from_dense(rle.width, rle.height, dense);
}

}  // namespace stackgrasp
