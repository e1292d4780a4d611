#pragma once

#include <memory>

#include "vgkit/tensor.hpp"

namespace vgkit {

struct TensorAccess {
  static const std::shared_ptr<detail::Node>& node(const Tensor& t) { return t.node_; }
  static Tensor wrap(std::shared_ptr<detail::Node> node) { return Tensor(std::move(node)); }
};

}  // namespace vgkit
