#include "vgkit/ops.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>

#include "tensor_internal.hpp"

namespace vgkit::ops {

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

[[noreturn]] void shape_error(std::string_view kernel, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(kernel) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                              shape_to_string(b.shape()));
}

[[noreturn]] void shape_error(std::string_view kernel, const Tensor& a, const std::string& why) {
  throw std::invalid_argument(std::string(kernel) + ": " + why + " for shape " + shape_to_string(a.shape()));
}

Tensor make_result(std::string_view op, Shape shape, std::vector<double> values, std::initializer_list<Tensor> inputs,
                   std::function<void(Node&)> backward_fn) {
  bool track = false;
  for (const auto& t : inputs) track = track || t.tracks_grad();
  Tensor out = Tensor::from(std::move(shape), std::move(values), track);
  const auto& node = TensorAccess::node(out);
  node->op = op;
  if (track) {
    for (const auto& t : inputs) node->inputs.push_back(TensorAccess::node(t));
    node->backward = std::move(backward_fn);
  }
  return out;
}

// Gradient buffer of the i-th input, or nullptr when it does not track.
std::vector<double>* input_grad(Node& self, std::size_t i) {
  Node& in = *self.inputs[i];
  return in.track_grad ? &in.grad_buffer() : nullptr;
}

std::size_t rows_of(const Tensor& x) { return x.rank() == 1 ? 1 : x.dim(0); }
std::size_t cols_of(const Tensor& x) { return x.rank() == 1 ? x.dim(0) : x.dim(1); }

void require_rank_le2(std::string_view kernel, const Tensor& x) {
  if (x.rank() > 2) shape_error(kernel, x, "expected a 1-D or 2-D tensor");
}

template <typename Fwd, typename Deriv>
Tensor unary(std::string_view op, const Tensor& x, Fwd fwd, Deriv deriv) {
  auto in = x.values();
  std::vector<double> out(in.size());
  std::transform(in.begin(), in.end(), out.begin(), fwd);
  return make_result(op, x.shape(), std::move(out), {x}, [deriv](Node& self) {
    auto* g = input_grad(self, 0);
    if (!g) return;
    const auto& xv = self.inputs[0]->values;
    for (std::size_t i = 0; i < xv.size(); ++i) (*g)[i] += self.grad[i] * deriv(xv[i], self.values[i]);
  });
}

void require_same_shape(std::string_view kernel, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error(kernel, a, b);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) shape_error("matmul", a, b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    const auto& av = self.inputs[0]->values;
    const auto& bv = self.inputs[1]->values;
    const auto& go = self.grad;
    if (auto* ga = input_grad(self, 0)) {
      // dA = dOut * B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += go[i * n + j] * bv[p * n + j];
          (*ga)[i * k + p] += acc;
        }
      }
    }
    if (auto* gb = input_grad(self, 1)) {
      // dB = A^T * dOut
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) (*gb)[p * n + j] += aip * go[i * n + j];
        }
      }
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank_le2("add_bias", x);
  if (bias.rank() != 1 || bias.dim(0) != cols_of(x)) shape_error("add_bias", x, bias);
  const std::size_t rows = rows_of(x), cols = cols_of(x);
  std::vector<double> out(x.values().begin(), x.values().end());
  auto bv = bias.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bv[c];
  }
  return make_result("add_bias", x.shape(), std::move(out), {x, bias}, [rows, cols](Node& self) {
    if (auto* gx = input_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*gx)[i] += self.grad[i];
    }
    if (auto* gb = input_grad(self, 1)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) (*gb)[c] += self.grad[r * cols + c];
      }
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return make_result("add", a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (auto* g = input_grad(self, k)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return make_result("sub", a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (auto* ga = input_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i];
    }
    if (auto* gb = input_grad(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*gb)[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return make_result("mul", a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& av = self.inputs[0]->values;
    const auto& bv = self.inputs[1]->values;
    if (auto* ga = input_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i] * bv[i];
    }
    if (auto* gb = input_grad(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*gb)[i] += self.grad[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      "scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary(
      "add_scalar", x, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Tensor concat(const Tensor& a, const Tensor& b) {
  require_rank_le2("concat", a);
  require_rank_le2("concat", b);
  if (a.rank() != b.rank() || rows_of(a) != rows_of(b)) shape_error("concat", a, b);
  const std::size_t rows = rows_of(a), ca = cols_of(a), cb = cols_of(b);
  std::vector<double> out(rows * (ca + cb));
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(&av[r * ca], ca, &out[r * (ca + cb)]);
    std::copy_n(&bv[r * cb], cb, &out[r * (ca + cb) + ca]);
  }
  Shape shape = a.rank() == 1 ? Shape{ca + cb} : Shape{rows, ca + cb};
  return make_result("concat", std::move(shape), std::move(out), {a, b}, [rows, ca, cb](Node& self) {
    const std::size_t width = ca + cb;
    if (auto* ga = input_grad(self, 0)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < ca; ++c) (*ga)[r * ca + c] += self.grad[r * width + c];
      }
    }
    if (auto* gb = input_grad(self, 1)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cb; ++c) (*gb)[r * cb + c] += self.grad[r * width + ca + c];
      }
    }
  });
}

Tensor repeat_rows(const Tensor& v, std::size_t rows) {
  if (v.rank() != 1) shape_error("repeat_rows", v, "expected a 1-D tensor");
  if (rows == 0) shape_error("repeat_rows", v, "zero repetitions");
  const std::size_t n = v.dim(0);
  std::vector<double> out(rows * n);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(v.values().begin(), n, out.begin() + r * n);
  return make_result("repeat_rows", {rows, n}, std::move(out), {v}, [rows, n](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < n; ++c) (*g)[c] += self.grad[r * n + c];
      }
    }
  });
}

Tensor gather(const Tensor& x, std::span<const std::size_t> indices) {
  require_rank_le2("gather", x);
  if (indices.empty()) shape_error("gather", x, "empty index list");
  const bool table = x.rank() == 2;
  const std::size_t limit = x.dim(0);
  const std::size_t width = table ? x.dim(1) : 1;
  for (auto idx : indices) {
    if (idx >= limit) shape_error("gather", x, "index " + std::to_string(idx) + " out of range");
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::vector<double> out(idx.size() * width);
  auto xv = x.values();
  for (std::size_t r = 0; r < idx.size(); ++r) std::copy_n(&xv[idx[r] * width], width, &out[r * width]);
  Shape shape = table ? Shape{idx.size(), width} : Shape{idx.size()};
  return make_result("gather", std::move(shape), std::move(out), {x}, [idx = std::move(idx), width](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) (*g)[idx[r] * width + c] += self.grad[r * width + c];
      }
    }
  });
}

Tensor slice_last(const Tensor& x, std::size_t begin, std::size_t count) {
  require_rank_le2("slice_last", x);
  const std::size_t rows = rows_of(x), cols = cols_of(x);
  if (count == 0 || begin + count > cols) {
    shape_error("slice_last", x, "range [" + std::to_string(begin) + "," + std::to_string(begin + count) + ")");
  }
  std::vector<double> out(rows * count);
  auto xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(&xv[r * cols + begin], count, &out[r * count]);
  Shape shape = x.rank() == 1 ? Shape{count} : Shape{rows, count};
  return make_result("slice_last", std::move(shape), std::move(out), {x}, [rows, cols, begin, count](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < count; ++c) (*g)[r * cols + begin + c] += self.grad[r * count + c];
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw std::invalid_argument("reshape: shape mismatch " + shape_to_string(x.shape()) + " vs " +
                                shape_to_string(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return make_result("reshape", std::move(shape), std::move(out), {x}, [](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i];
    }
  });
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.values()) {
    if (!(v > 0.0)) {
      throw std::domain_error("log: non-positive input " + std::to_string(v) + " in shape " +
                              shape_to_string(x.shape()));
    }
  }
  return unary(
      "log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor smooth_l1(const Tensor& x) {
  return unary(
      "smooth_l1", x,
      [](double v) {
        const double a = std::abs(v);
        return a < 1.0 ? 0.5 * v * v : a - 0.5;
      },
      [](double v, double) {
        if (v >= 1.0) return 1.0;
        if (v <= -1.0) return -1.0;
        return v;
      });
}

Tensor softmax(const Tensor& x) {
  auto xv = x.values();
  const double peak = *std::max_element(xv.begin(), xv.end());
  std::vector<double> out(xv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = std::exp(xv[i] - peak);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return make_result("softmax", x.shape(), std::move(out), {x}, [](Node& self) {
    auto* g = input_grad(self, 0);
    if (!g) return;
    const auto& y = self.values;
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += self.grad[i] * y[i];
    for (std::size_t i = 0; i < y.size(); ++i) (*g)[i] += y[i] * (self.grad[i] - dot);
  });
}

Tensor l2_normalize(const Tensor& x) {
  auto xv = x.values();
  double sq = 0.0;
  for (double v : xv) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out(xv.begin(), xv.end());
  if (norm > 0.0) {
    for (auto& v : out) v /= norm;
  }
  return make_result("l2_normalize", x.shape(), std::move(out), {x}, [norm](Node& self) {
    auto* g = input_grad(self, 0);
    if (!g) return;
    if (norm == 0.0) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*g)[i] += self.grad[i];
      return;
    }
    // d(x/|x|) = (I - y y^T) / |x|
    const auto& y = self.values;
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += self.grad[i] * y[i];
    for (std::size_t i = 0; i < y.size(); ++i) (*g)[i] += (self.grad[i] - y[i] * dot) / norm;
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return make_result("sum", {1}, {total}, {x}, [](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (auto& v : *g) v += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  double total = 0.0;
  for (double v : x.values()) total += v;
  return make_result("mean", {1}, {total / n}, {x}, [n](Node& self) {
    if (auto* g = input_grad(self, 0)) {
      for (auto& v : *g) v += self.grad[0] / n;
    }
  });
}

}  // namespace vgkit::ops
