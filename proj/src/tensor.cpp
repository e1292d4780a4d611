#include "vgkit/tensor.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "tensor_internal.hpp"

namespace vgkit {

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::vector<double>& detail::Node::grad_buffer() {
  if (grad.empty()) grad.assign(values.size(), 0.0);
  return grad;
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor: shape must have at least one dimension");
  for (auto d : shape) {
    if (d == 0) throw std::invalid_argument("tensor: zero dimension in shape " + shape_to_string(shape));
  }
}

const detail::Node& require(const std::shared_ptr<detail::Node>& node) {
  if (!node) throw std::logic_error("tensor: use of an undefined tensor");
  return *node;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool track_grad) { return filled(std::move(shape), 0.0, track_grad); }

Tensor Tensor::filled(Shape shape, double value, bool track_grad) {
  validate_shape(shape);
  std::vector<double> values(shape_numel(shape), value);
  return from(std::move(shape), std::move(values), track_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool track_grad) {
  validate_shape(shape);
  if (values.size() != shape_numel(shape)) {
    throw std::invalid_argument("tensor: " + std::to_string(values.size()) + " values do not fill shape " +
                                shape_to_string(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->track_grad = track_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::vector(std::vector<double> values, bool track_grad) {
  Shape shape{values.size()};
  return from(std::move(shape), std::move(values), track_grad);
}

Tensor Tensor::scalar(double value, bool track_grad) { return from({1}, {value}, track_grad); }

const Shape& Tensor::shape() const { return require(node_).shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) throw std::out_of_range("tensor: axis out of range for shape " + shape_to_string(s));
  return s[axis];
}

std::size_t Tensor::numel() const { return require(node_).values.size(); }

std::span<const double> Tensor::values() const { return require(node_).values; }

std::span<double> Tensor::mutable_values() {
  require(node_);
  return node_->values;
}

double Tensor::item() const {
  if (numel() != 1) throw std::invalid_argument("tensor: item() on shape " + shape_to_string(shape()));
  return node_->values[0];
}

bool Tensor::tracks_grad() const { return require(node_).track_grad; }

bool Tensor::has_grad() const { return !require(node_).grad.empty(); }

std::span<const double> Tensor::grad() const { return require(node_).grad; }

std::span<double> Tensor::mutable_grad() {
  require(node_);
  return node_->grad;
}

void Tensor::zero_grad() {
  require(node_);
  if (!node_->track_grad) return;
  node_->grad.assign(node_->values.size(), 0.0);
}

void Tensor::clear_grad() {
  require(node_);
  node_->grad.clear();
  node_->grad.shrink_to_fit();
}

std::string_view Tensor::op_name() const { return require(node_).op; }

Tensor Tensor::clone(bool track_grad) const {
  const auto& n = require(node_);
  return from(n.shape, n.values, track_grad);
}

ComputationRecord ComputationRecord::trace(const Tensor& root) {
  ComputationRecord record;
  const auto& root_node = TensorAccess::node(root);
  require(root_node);
  if (!root_node->track_grad) return record;

  // Iterative post-order DFS restricted to tracked nodes.
  std::unordered_set<const detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root_node.get(), 0);
  visited.insert(root_node.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->track_grad && visited.insert(child).second) stack.emplace_back(child, 0);
      continue;
    }
    record.mutable_order_.push_back(node);
    record.order_.push_back(node);
    stack.pop_back();
  }
  return record;
}

std::size_t ComputationRecord::position(const Tensor& t) const {
  const auto* target = t.id();
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == target) return i;
  }
  return order_.size();
}

void backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " + shape_to_string(loss.shape()));
  }
  if (!loss.tracks_grad()) return;
  auto record = ComputationRecord::trace(loss);
  auto& order = record.mutable_order_;
  // Interior buffers are rebuilt on every pass; only leaves accumulate.
  for (detail::Node* node : order) {
    if (node->backward) node->grad.assign(node->values.size(), 0.0);
  }
  const auto& root = TensorAccess::node(loss);
  root->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
}

}  // namespace vgkit
