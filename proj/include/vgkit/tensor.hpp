#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vgkit {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

namespace detail {

// One value in the differentiable graph. Leaf nodes (parameters, inputs) have
// no inputs and no backward function.
struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty until the first accumulation
  bool track_grad = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  std::vector<double>& grad_buffer();
};

}  // namespace detail

// Shaped row-major array of doubles. Copies share the underlying node, so a
// Tensor behaves like a handle; use clone() for a deep copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool track_grad = false);
  static Tensor filled(Shape shape, double value, bool track_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool track_grad = false);
  static Tensor vector(std::vector<double> values, bool track_grad = false);
  static Tensor scalar(double value, bool track_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;
  double operator[](std::size_t i) const { return values()[i]; }

  bool tracks_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  // Allocates a zero gradient buffer (no-op on untracked tensors).
  void zero_grad();
  // Releases the gradient buffer so has_grad() becomes false.
  void clear_grad();

  std::string_view op_name() const;
  Tensor clone(bool track_grad) const;
  Tensor detach() const { return clone(false); }

  // Identity of the underlying node, used to compare handles.
  const detail::Node* id() const { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;

  friend struct TensorAccess;
};

// Topologically ordered list of the differentiable operations that produced a
// scalar. Every node appears after all of its inputs.
class ComputationRecord {
 public:
  static ComputationRecord trace(const Tensor& root);

  std::size_t size() const { return order_.size(); }
  std::span<const detail::Node* const> operations() const { return order_; }
  // Position of a node in the record, or size() when absent.
  std::size_t position(const Tensor& t) const;

 private:
  std::vector<const detail::Node*> order_;
  std::vector<detail::Node*> mutable_order_;

  friend void backward(const Tensor& loss);
};

// Populates grad on every tracked tensor reachable from loss. Gradients add
// into existing buffers, so repeated calls accumulate.
void backward(const Tensor& loss);

}  // namespace vgkit
