#pragma once

#include <array>
#include <span>

namespace vgkit {

// Axis-aligned box in continuous pixel corner coordinates. No +1 convention:
// area is (x_br - x_tl) * (y_br - y_tl).
struct BBox {
  double x_tl = 0.0;
  double y_tl = 0.0;
  double x_br = 0.0;
  double y_br = 0.0;

  double width() const { return x_br - x_tl; }
  double height() const { return y_br - y_tl; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_tl + x_br); }
  double center_y() const { return 0.5 * (y_tl + y_br); }
  bool is_valid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// [x_tl/W, y_tl/H, x_br/W, y_br/H, wh/WH]
using SpatialFeature = std::array<double, 5>;

// Center/log-size offsets of a target box relative to a proposal.
struct RegressionTarget {
  double tx = 0.0;
  double ty = 0.0;
  double tw = 0.0;
  double th = 0.0;

  std::array<double, 4> as_array() const { return {tx, ty, tw, th}; }
  static RegressionTarget from_array(std::span<const double> v);

  friend bool operator==(const RegressionTarget&, const RegressionTarget&) = default;
};

// Intersection over union; 0 when either box is empty or the union is empty.
double iou(const BBox& a, const BBox& b);

SpatialFeature spatial_feature(const BBox& box, ImageSize image);

// Throws std::invalid_argument for a proposal without positive width and
// height. Zero-size targets are floored to 1 pixel before encoding.
RegressionTarget encode_regression(const BBox& proposal, const BBox& target);

// Inverse of encode_regression, clipped to [0,W]x[0,H].
BBox decode_regression(const BBox& proposal, const RegressionTarget& t, ImageSize image);
// Same inverse without clipping.
BBox decode_regression_unclipped(const BBox& proposal, const RegressionTarget& t);

BBox clip_box(const BBox& box, ImageSize image);

// Smallest box containing every input box.
BBox union_box(std::span<const BBox> boxes);

}  // namespace vgkit
