#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stackgrasp {

// Pixel rectangle [x, x + width) x [y, y + height).
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
};

PixelRect intersect(const PixelRect &a, const PixelRect &b);

// Binary image of fixed size whose set pixels are confined to a region of
// interest. Pixels outside the ROI are always unset.
class Mask {
 public:
  Mask() = default;
  Mask(int image_width, int image_height);
  Mask(int image_width, int image_height, const PixelRect &roi);

  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  const PixelRect &roi() const { return roi_; }

  bool at(int x, int y) const;
  // (x, y) must lie inside the ROI.
  void set(int x, int y, bool value = true);

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  // Tight bounding rectangle of the set pixels (empty rect if none).
  PixelRect bounds() const;

  // Square structuring element of side 2 * radius + 1.
  Mask eroded(int radius) const;
  Mask intersected(const Mask &other) const;
  bool is_subset_of(const Mask &other) const;

  // Dense row-major 0/1 image of the full size.
  std::vector<std::uint8_t> dense() const;
  static Mask from_dense(int image_width, int image_height,
                         const std::vector<std::uint8_t> &pixels);

  friend bool operator==(const Mask &a, const Mask &b);

 private:
  int image_width_ = 0;
  int image_height_ = 0;
  PixelRect roi_;
  std::vector<std::uint8_t> bits_;
};

std::size_t intersection_count(const Mask &a, const Mask &b);

// Uncompressed COCO run-length encoding: column-major runs over the full
// image, alternating unset/set and starting with an unset run.
struct RunLengthMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;
};

RunLengthMask encode_rle(const Mask &mask);
// Throws ErrorKind::kParse when the runs do not cover the image exactly.
Mask decode_rle(const RunLengthMask &rle);

}  // namespace stackgrasp
