#include "vgkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vgkit {

namespace {

void require_image(ImageSize image) {
  if (image.width <= 0 || image.height <= 0) {
    throw std::invalid_argument("image size must be positive, got " + std::to_string(image.width) + "x" +
                                std::to_string(image.height));
  }
}

void require_positive(const BBox& proposal, const char* what) {
  if (!(proposal.width() > 0.0) || !(proposal.height() > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": proposal must have positive width and height");
  }
}

}  // namespace

bool BBox::is_valid() const {
  return std::isfinite(x_tl) && std::isfinite(y_tl) && std::isfinite(x_br) && std::isfinite(y_br) && x_br >= x_tl &&
         y_br >= y_tl;
}

RegressionTarget RegressionTarget::from_array(std::span<const double> v) {
  if (v.size() != 4) throw std::invalid_argument("regression target needs 4 values");
  return {v[0], v[1], v[2], v[3]};
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_br, b.x_br) - std::max(a.x_tl, b.x_tl);
  const double ih = std::min(a.y_br, b.y_br) - std::max(a.y_tl, b.y_tl);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

SpatialFeature spatial_feature(const BBox& box, ImageSize image) {
  require_image(image);
  const double w = image.width;
  const double h = image.height;
  return {box.x_tl / w, box.y_tl / h, box.x_br / w, box.y_br / h, box.width() * box.height() / (w * h)};
}

RegressionTarget encode_regression(const BBox& proposal, const BBox& target) {
  require_positive(proposal, "encode_regression");
  const double pw = proposal.width();
  const double ph = proposal.height();
  const double tw = std::max(target.width(), 1.0);
  const double th = std::max(target.height(), 1.0);
  return {(target.center_x() - proposal.center_x()) / pw, (target.center_y() - proposal.center_y()) / ph,
          std::log(tw / pw), std::log(th / ph)};
}

BBox decode_regression_unclipped(const BBox& proposal, const RegressionTarget& t) {
  require_positive(proposal, "decode_regression");
  if (!std::isfinite(t.tx) || !std::isfinite(t.ty) || !std::isfinite(t.tw) || !std::isfinite(t.th)) {
    throw std::invalid_argument("decode_regression: non-finite offsets");
  }
  const double pw = proposal.width();
  const double ph = proposal.height();
  const double cx = proposal.center_x() + t.tx * pw;
  const double cy = proposal.center_y() + t.ty * ph;
  const double w = pw * std::exp(t.tw);
  const double h = ph * std::exp(t.th);
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

BBox decode_regression(const BBox& proposal, const RegressionTarget& t, ImageSize image) {
  require_image(image);
  return clip_box(decode_regression_unclipped(proposal, t), image);
}

BBox clip_box(const BBox& box, ImageSize image) {
  const double w = image.width;
  const double h = image.height;
  BBox out{std::clamp(box.x_tl, 0.0, w), std::clamp(box.y_tl, 0.0, h), std::clamp(box.x_br, 0.0, w),
           std::clamp(box.y_br, 0.0, h)};
  // A box that decodes entirely outside the image collapses onto the border.
  out.x_br = std::max(out.x_br, out.x_tl);
  out.y_br = std::max(out.y_br, out.y_tl);
  return out;
}

BBox union_box(std::span<const BBox> boxes) {
  if (boxes.empty()) throw std::invalid_argument("union_box: no boxes");
  BBox out = boxes.front();
  for (const auto& b : boxes.subspan(1)) {
    out.x_tl = std::min(out.x_tl, b.x_tl);
    out.y_tl = std::min(out.y_tl, b.y_tl);
    out.x_br = std::max(out.x_br, b.x_br);
    out.y_br = std::max(out.y_br, b.y_br);
  }
  return out;
}

}  // namespace vgkit
