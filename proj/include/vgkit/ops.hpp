#pragma once

#include <cstddef>
#include <span>

#include "vgkit/tensor.hpp"

// Differentiable kernels. Each validates shapes and throws std::invalid_argument
// naming the kernel and the offending shapes. Results track gradients when any
// input does.
namespace vgkit::ops {

// [m,k] x [k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);
// x [m,n] plus bias [n] broadcast over rows; a 1-D x is treated as one row.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);

// Concatenates along the last axis. Both inputs are 1-D, or both 2-D with the
// same row count.
Tensor concat(const Tensor& a, const Tensor& b);
// Stacks a 1-D vector into `rows` identical rows.
Tensor repeat_rows(const Tensor& v, std::size_t rows);
// Rows of a 2-D table (embedding lookup) or elements of a 1-D vector.
Tensor gather(const Tensor& x, std::span<const std::size_t> indices);
// Columns [begin, begin+count) of a 2-D tensor, or elements of a 1-D one.
Tensor slice_last(const Tensor& x, std::size_t begin, std::size_t count);
Tensor reshape(const Tensor& x, Shape shape);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
// Natural log; throws std::domain_error on any non-positive entry.
Tensor log(const Tensor& x);
// Elementwise smooth-L1: 0.5x^2 for |x| < 1, |x| - 0.5 otherwise.
Tensor smooth_l1(const Tensor& x);

// Softmax over all entries, preserving shape.
Tensor softmax(const Tensor& x);
// Divides by the Euclidean norm of all entries; the zero tensor is returned
// unchanged.
Tensor l2_normalize(const Tensor& x);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

}  // namespace vgkit::ops
