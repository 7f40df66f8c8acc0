// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ffsing/numerics/rng.hpp"
#include "ffsing/numerics/tensor.hpp"

// Differentiable primitives. Matrices are rank-2 row-major tensors with one
// row per time step. Every op records a backward closure when any input
// requires a gradient and grad mode is enabled.
namespace ffsing::num {

enum class Mode { train, eval };

enum class Padding {
  same,   // centred taps, output length == input length, zero fill
  valid,  // no padding, output length T - k + 1
};

inline constexpr double kLayerNormEps = 1e-5;

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
// x[T x C] + bias[C] broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// mean(|pred - target|); the subgradient at zero difference is 0.
Tensor mean_abs_error(const Tensor& pred, const Tensor& target);

// x[T x C_in] convolved with w[k x C_in x C_out] along rows.
Tensor conv1d(const Tensor& x, const Tensor& w, Padding padding = Padding::same);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = kLayerNormEps);
Tensor softmax_rows(const Tensor& x);
// Train mode zeroes each element with probability p and scales survivors by
// 1/(1-p); eval mode and p == 0 return x unchanged.
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng);

// Adds M[j,k] = -(j-k)^2 / (2 sigma^2) to square scores; sigma is a
// one-element tensor and receives a gradient.
Tensor gaussian_bias(const Tensor& scores, const Tensor& sigma);

// out[i] = table[index[i]]; used for embeddings and state repetition.
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& x, Shape shape);
// Means of consecutive groups of r rows; the tail is padded by repeating the
// last row, giving ceil(T / r) output rows.
Tensor pool_rows(const Tensor& x, std::size_t r);

}  // namespace ffsing::num
