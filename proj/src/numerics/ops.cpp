// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/numerics/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include "ffsing/error.hpp"

namespace ffsing::num {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

using Backward = std::function<void(detail::Node&)>;

MatMap view(std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return MatMap(v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

// Wraps a computed value into a tensor, attaching the graph only when needed.
Tensor make_result(Shape shape, std::vector<double> value, std::initializer_list<Tensor> inputs,
                   Backward backward) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool track = false;
  if (grad_enabled()) {
    for (const Tensor& t : inputs) {
      track = track || t.requires_grad();
    }
  }
  if (track) {
    node->requires_grad = true;
    for (const Tensor& t : inputs) {
      node->parents.push_back(t.node());
    }
    node->backward = std::move(backward);
  }
  return Tensor::from_node(std::move(node));
}

void require_rank2(const Tensor& t, const char* op) {
  if (!t.defined() || t.rank() != 2) {
    throw ShapeMismatch(std::string(op) + ": expected a matrix, got " +
                        (t.defined() ? to_string(t.shape()) : std::string("undefined")));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(op) + ": " + to_string(a.shape()) + " vs " +
                        to_string(b.shape()));
  }
}

template <typename F>
Tensor elementwise_unary(const Tensor& x, F&& fwd, std::vector<double> (*local)(const std::vector<double>&, const std::vector<double>&)) {
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = fwd(in[i]);
  }
  return make_result(x.shape(), std::move(out), {x}, [local](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (!px.requires_grad) {
      return;
    }
    const std::vector<double> d = local(px.value, self.value);
    for (std::size_t i = 0; i < d.size(); ++i) {
      px.grad[i] += self.grad[i] * d[i];
    }
  });
}

double stable_sigmoid(double v) {
  if (v >= 0.0) {
    return 1.0 / (1.0 + std::exp(-v));
  }
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  if (b.rows() != k) {
    throw ShapeMismatch("matmul: inner extents differ, " + to_string(a.shape()) + " x " +
                        to_string(b.shape()));
  }
  std::vector<double> out(m * n);
  view(out, m, n).noalias() = view(a.node()->value, m, k) * view(b.node()->value, k, n);
  return make_result({m, n}, std::move(out), {a, b}, [m, k, n](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    const auto g = view(self.grad, m, n);
    if (pa.requires_grad) {
      view(pa.grad, m, k).noalias() += g * view(pb.value, k, n).transpose();
    }
    if (pb.requires_grad) {
      view(pb.grad, k, n).noalias() += view(pa.value, m, k).transpose() * g;
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<double> out(m * n);
  view(out, n, m) = view(a.node()->value, m, n).transpose();
  return make_result({n, m}, std::move(out), {a}, [m, n](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    if (pa.requires_grad) {
      view(pa.grad, m, n) += view(self.grad, n, m).transpose();
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = va[i] + vb[i];
  }
  return make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (auto& parent : self.parents) {
      if (parent->requires_grad) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          parent->grad[i] += self.grad[i];
        }
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = va[i] - vb[i];
  }
  return make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (pa.requires_grad) {
        pa.grad[i] += self.grad[i];
      }
      if (pb.requires_grad) {
        pb.grad[i] -= self.grad[i];
      }
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = va[i] * vb[i];
  }
  return make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (pa.requires_grad) {
        pa.grad[i] += self.grad[i] * pb.value[i];
      }
      if (pb.requires_grad) {
        pb.grad[i] += self.grad[i] * pa.value[i];
      }
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) {
    v *= factor;
  }
  return make_result(a.shape(), std::move(out), {a}, [factor](detail::Node& self) {
    detail::Node& pa = *self.parents[0];
    if (pa.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        pa.grad[i] += factor * self.grad[i];
      }
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank2(x, "add_bias");
  const std::size_t t = x.rows();
  const std::size_t c = x.cols();
  if (bias.size() != c) {
    throw ShapeMismatch("add_bias: bias " + to_string(bias.shape()) + " for " +
                        to_string(x.shape()));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  const auto b = bias.values();
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t j = 0; j < c; ++j) {
      out[r * c + j] += b[j];
    }
  }
  return make_result(x.shape(), std::move(out), {x, bias}, [t, c](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    detail::Node& pb = *self.parents[1];
    if (px.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        px.grad[i] += self.grad[i];
      }
    }
    if (pb.requires_grad) {
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t j = 0; j < c; ++j) {
          pb.grad[j] += self.grad[r * c + j];
        }
      }
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  return elementwise_unary(x, stable_sigmoid, [](const std::vector<double>&, const std::vector<double>& y) {
    std::vector<double> d(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      d[i] = y[i] * (1.0 - y[i]);
    }
    return d;
  });
}

Tensor softplus(const Tensor& x) {
  const auto fwd = [](double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); };
  return elementwise_unary(x, fwd, [](const std::vector<double>& in, const std::vector<double>&) {
    std::vector<double> d(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      d[i] = stable_sigmoid(in[i]);
    }
    return d;
  });
}

Tensor square(const Tensor& x) {
  return elementwise_unary(x, [](double v) { return v * v; },
                           [](const std::vector<double>& in, const std::vector<double>&) {
                             std::vector<double> d(in.size());
                             for (std::size_t i = 0; i < in.size(); ++i) {
                               d[i] = 2.0 * in[i];
                             }
                             return d;
                           });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) {
    total += v;
  }
  return make_result({1}, {total}, {x}, [](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (px.requires_grad) {
      for (double& g : px.grad) {
        g += self.grad[0];
      }
    }
  });
}

Tensor mean(const Tensor& x) {
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor mean_abs_error(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mean_abs_error");
  const auto p = pred.values();
  const auto q = target.values();
  const double n = static_cast<double>(pred.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += std::abs(p[i] - q[i]);
  }
  return make_result({1}, {total / n}, {pred, target}, [n](detail::Node& self) {
    detail::Node& pp = *self.parents[0];
    detail::Node& pt = *self.parents[1];
    const double g = self.grad[0] / n;
    for (std::size_t i = 0; i < pp.value.size(); ++i) {
      const double diff = pp.value[i] - pt.value[i];
      const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      if (pp.requires_grad) {
        pp.grad[i] += g * s;
      }
      if (pt.requires_grad) {
        pt.grad[i] -= g * s;
      }
    }
  });
}

Tensor conv1d(const Tensor& x, const Tensor& w, Padding padding) {
  require_rank2(x, "conv1d");
  if (w.rank() != 3) {
    throw ShapeMismatch("conv1d: kernel must be k x C_in x C_out, got " + to_string(w.shape()));
  }
  const std::size_t t_in = x.rows();
  const std::size_t c_in = x.cols();
  const std::size_t k = w.shape()[0];
  const std::size_t c_out = w.shape()[2];
  if (w.shape()[1] != c_in) {
    throw ShapeMismatch("conv1d: input has " + std::to_string(c_in) + " channels, kernel " +
                        to_string(w.shape()));
  }
  std::ptrdiff_t pad = 0;
  std::size_t t_out = 0;
  if (padding == Padding::same) {
    if (k % 2 == 0) {
      throw ShapeMismatch("conv1d: same padding needs an odd kernel, got " + std::to_string(k));
    }
    pad = static_cast<std::ptrdiff_t>(k / 2);
    t_out = t_in;
  } else {
    if (k > t_in) {
      throw ShapeMismatch("conv1d: kernel longer than input");
    }
    t_out = t_in - k + 1;
  }

  // out[t] = sum_j x[t + j - pad] * W_j, taps outside [0, t_in) read zero.
  struct Span {
    Eigen::Index out_begin;
    Eigen::Index in_begin;
    Eigen::Index count;
  };
  std::vector<Span> spans(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j) - pad;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t_out),
                                                       static_cast<std::ptrdiff_t>(t_in) - offset);
    spans[j] = {lo, lo + offset, std::max<std::ptrdiff_t>(0, hi - lo)};
  }

  std::vector<double> out(t_out * c_out, 0.0);
  {
    auto o = view(out, t_out, c_out);
    const auto xin = view(x.node()->value, t_in, c_in);
    const double* wd = w.node()->value.data();
    for (std::size_t j = 0; j < k; ++j) {
      if (spans[j].count == 0) {
        continue;
      }
      const ConstMatMap wj(wd + j * c_in * c_out, static_cast<Eigen::Index>(c_in),
                           static_cast<Eigen::Index>(c_out));
      o.middleRows(spans[j].out_begin, spans[j].count).noalias() +=
          xin.middleRows(spans[j].in_begin, spans[j].count) * wj;
    }
  }
  return make_result({t_out, c_out}, std::move(out), {x, w},
                     [spans, t_in, t_out, c_in, c_out, k](detail::Node& self) {
                       detail::Node& px = *self.parents[0];
                       detail::Node& pw = *self.parents[1];
                       const auto g = view(self.grad, t_out, c_out);
                       for (std::size_t j = 0; j < k; ++j) {
                         const Span& s = spans[j];
                         if (s.count == 0) {
                           continue;
                         }
                         const std::size_t woff = j * c_in * c_out;
                         if (px.requires_grad) {
                           const ConstMatMap wj(pw.value.data() + woff, static_cast<Eigen::Index>(c_in),
                                                static_cast<Eigen::Index>(c_out));
                           view(px.grad, t_in, c_in).middleRows(s.in_begin, s.count).noalias() +=
                               g.middleRows(s.out_begin, s.count) * wj.transpose();
                         }
                         if (pw.requires_grad) {
                           MatMap gw(pw.grad.data() + woff, static_cast<Eigen::Index>(c_in),
                                     static_cast<Eigen::Index>(c_out));
                           gw.noalias() += view(px.value, t_in, c_in).middleRows(s.in_begin, s.count).transpose() *
                                           g.middleRows(s.out_begin, s.count);
                         }
                       }
                     });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_rank2(x, "layer_norm");
  const std::size_t t = x.rows();
  const std::size_t c = x.cols();
  if (gain.size() != c || bias.size() != c) {
    throw ShapeMismatch("layer_norm: affine parameters must have " + std::to_string(c) + " entries");
  }
  std::vector<double> normalized(t * c);
  std::vector<double> inv_std(t);
  std::vector<double> out(t * c);
  const auto in = x.values();
  const auto g = gain.values();
  const auto b = bias.values();
  for (std::size_t r = 0; r < t; ++r) {
    const double* row = in.data() + r * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      mu += row[j];
    }
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      var += (row[j] - mu) * (row[j] - mu);
    }
    var /= static_cast<double>(c);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      const double xhat = (row[j] - mu) * inv_std[r];
      normalized[r * c + j] = xhat;
      out[r * c + j] = xhat * g[j] + b[j];
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [normalized = std::move(normalized), inv_std = std::move(inv_std), t, c](detail::Node& self) {
        detail::Node& px = *self.parents[0];
        detail::Node& pg = *self.parents[1];
        detail::Node& pb = *self.parents[2];
        const double inv_c = 1.0 / static_cast<double>(c);
        for (std::size_t r = 0; r < t; ++r) {
          const double* dy = self.grad.data() + r * c;
          const double* xhat = normalized.data() + r * c;
          if (pg.requires_grad || pb.requires_grad) {
            for (std::size_t j = 0; j < c; ++j) {
              if (pg.requires_grad) {
                pg.grad[j] += dy[j] * xhat[j];
              }
              if (pb.requires_grad) {
                pb.grad[j] += dy[j];
              }
            }
          }
          if (px.requires_grad) {
            double sum_d = 0.0;
            double sum_dx = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double d = dy[j] * pg.value[j];
              sum_d += d;
              sum_dx += d * xhat[j];
            }
            for (std::size_t j = 0; j < c; ++j) {
              const double d = dy[j] * pg.value[j];
              px.grad[r * c + j] += inv_std[r] * (d - inv_c * sum_d - xhat[j] * inv_c * sum_dx);
            }
          }
        }
      });
}

Tensor softmax_rows(const Tensor& x) {
  require_rank2(x, "softmax_rows");
  const std::size_t t = x.rows();
  const std::size_t c = x.cols();
  std::vector<double> out(t * c);
  const auto in = x.values();
  for (std::size_t r = 0; r < t; ++r) {
    const double* row = in.data() + r * c;
    double* o = out.data() + r * c;
    const double peak = *std::max_element(row, row + c);
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      o[j] = std::exp(row[j] - peak);
      total += o[j];
    }
    for (std::size_t j = 0; j < c; ++j) {
      o[j] /= total;
    }
  }
  return make_result(x.shape(), std::move(out), {x}, [t, c](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (!px.requires_grad) {
      return;
    }
    for (std::size_t r = 0; r < t; ++r) {
      const double* y = self.value.data() + r * c;
      const double* dy = self.grad.data() + r * c;
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        dot += y[j] * dy[j];
      }
      for (std::size_t j = 0; j < c; ++j) {
        px.grad[r * c + j] += y[j] * (dy[j] - dot);
      }
    }
  });
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidProbability("dropout: probability must lie in [0, 1), got " + std::to_string(p));
  }
  if (mode == Mode::eval || p == 0.0) {
    return x;
  }
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(x.size());
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    mask[i] = rng.uniform() < p ? 0.0 : keep_scale;
    out[i] = in[i] * mask[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [mask = std::move(mask)](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (px.requires_grad) {
      for (std::size_t i = 0; i < mask.size(); ++i) {
        px.grad[i] += self.grad[i] * mask[i];
      }
    }
  });
}

Tensor gaussian_bias(const Tensor& scores, const Tensor& sigma) {
  require_rank2(scores, "gaussian_bias");
  const std::size_t t = scores.rows();
  if (scores.cols() != t) {
    throw ShapeMismatch("gaussian_bias: scores must be square, got " + to_string(scores.shape()));
  }
  if (sigma.size() != 1) {
    throw ShapeMismatch("gaussian_bias: sigma must be a single value");
  }
  const double s = sigma[0];
  const double coeff = 1.0 / (2.0 * s * s);
  std::vector<double> out(scores.values().begin(), scores.values().end());
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t k = 0; k < t; ++k) {
      const double d = static_cast<double>(j) - static_cast<double>(k);
      out[j * t + k] -= d * d * coeff;
    }
  }
  return make_result(scores.shape(), std::move(out), {scores, sigma}, [t, s](detail::Node& self) {
    detail::Node& ps = *self.parents[0];
    detail::Node& psig = *self.parents[1];
    if (ps.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        ps.grad[i] += self.grad[i];
      }
    }
    if (psig.requires_grad) {
      // dM/dsigma = (j-k)^2 / sigma^3
      double acc = 0.0;
      for (std::size_t j = 0; j < t; ++j) {
        for (std::size_t k = 0; k < t; ++k) {
          const double d = static_cast<double>(j) - static_cast<double>(k);
          acc += self.grad[j * t + k] * d * d;
        }
      }
      psig.grad[0] += acc / (s * s * s);
    }
  });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index) {
  require_rank2(table, "gather_rows");
  const std::size_t n = table.rows();
  const std::size_t c = table.cols();
  if (index.empty()) {
    throw ShapeMismatch("gather_rows: empty index");
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::vector<double> out(idx.size() * c);
  const auto in = table.values();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) {
      throw ShapeMismatch("gather_rows: index " + std::to_string(idx[i]) + " out of " +
                          std::to_string(n) + " rows");
    }
    std::copy_n(in.data() + idx[i] * c, c, out.data() + i * c);
  }
  const std::size_t rows_out = idx.size();
  return make_result({rows_out, c}, std::move(out), {table}, [idx = std::move(idx), c](detail::Node& self) {
    detail::Node& pt = *self.parents[0];
    if (!pt.requires_grad) {
      return;
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        pt.grad[idx[i] * c + j] += self.grad[i * c + j];
      }
    }
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) {
    throw ShapeMismatch("concat_cols: nothing to concatenate");
  }
  const std::size_t t = parts[0].rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_rank2(p, "concat_cols");
    if (p.rows() != t) {
      throw ShapeMismatch("concat_cols: row counts differ");
    }
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(t * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].values();
    for (std::size_t r = 0; r < t; ++r) {
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    }
    offset += widths[k];
  }

  auto node = std::make_shared<detail::Node>();
  node->shape = {t, total};
  node->value = std::move(out);
  bool track = false;
  if (grad_enabled()) {
    for (const Tensor& p : parts) {
      track = track || p.requires_grad();
    }
  }
  if (track) {
    node->requires_grad = true;
    for (const Tensor& p : parts) {
      node->parents.push_back(p.node());
    }
    node->backward = [widths, t, total](detail::Node& self) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < widths.size(); ++k) {
        detail::Node& pk = *self.parents[k];
        if (pk.requires_grad) {
          for (std::size_t r = 0; r < t; ++r) {
            for (std::size_t j = 0; j < widths[k]; ++j) {
              pk.grad[r * widths[k] + j] += self.grad[r * total + off + j];
            }
          }
        }
        off += widths[k];
      }
    };
  }
  return Tensor::from_node(std::move(node));
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_cols");
  const std::size_t t = x.rows();
  const std::size_t c = x.cols();
  if (begin >= end || end > c) {
    throw ShapeMismatch("slice_cols: bad range [" + std::to_string(begin) + ", " +
                        std::to_string(end) + ") of " + std::to_string(c));
  }
  const std::size_t w = end - begin;
  std::vector<double> out(t * w);
  const auto in = x.values();
  for (std::size_t r = 0; r < t; ++r) {
    std::copy_n(in.data() + r * c + begin, w, out.data() + r * w);
  }
  return make_result({t, w}, std::move(out), {x}, [t, c, w, begin](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (px.requires_grad) {
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t j = 0; j < w; ++j) {
          px.grad[r * c + begin + j] += self.grad[r * w + j];
        }
      }
    }
  });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_rows");
  const std::size_t c = x.cols();
  if (begin >= end || end > x.rows()) {
    throw ShapeMismatch("slice_rows: bad range [" + std::to_string(begin) + ", " +
                        std::to_string(end) + ") of " + std::to_string(x.rows()));
  }
  std::vector<double> out(x.values().begin() + static_cast<std::ptrdiff_t>(begin * c),
                          x.values().begin() + static_cast<std::ptrdiff_t>(end * c));
  return make_result({end - begin, c}, std::move(out), {x}, [begin, c](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (px.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        px.grad[begin * c + i] += self.grad[i];
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (element_count(shape) != x.size()) {
    throw ShapeMismatch("reshape: " + to_string(x.shape()) + " to " + to_string(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return make_result(std::move(shape), std::move(out), {x}, [](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (px.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        px.grad[i] += self.grad[i];
      }
    }
  });
}

Tensor pool_rows(const Tensor& x, std::size_t r) {
  require_rank2(x, "pool_rows");
  if (r == 0) {
    throw ShapeMismatch("pool_rows: factor must be >= 1");
  }
  if (r == 1) {
    return x;
  }
  const std::size_t t = x.rows();
  const std::size_t c = x.cols();
  const std::size_t t_out = (t + r - 1) / r;
  const double inv_r = 1.0 / static_cast<double>(r);
  std::vector<double> out(t_out * c, 0.0);
  const auto in = x.values();
  for (std::size_t i = 0; i < t_out; ++i) {
    for (std::size_t m = 0; m < r; ++m) {
      const std::size_t src = std::min(i * r + m, t - 1);
      for (std::size_t j = 0; j < c; ++j) {
        out[i * c + j] += in[src * c + j];
      }
    }
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] *= inv_r;
    }
  }
  return make_result({t_out, c}, std::move(out), {x}, [t, c, t_out, r, inv_r](detail::Node& self) {
    detail::Node& px = *self.parents[0];
    if (!px.requires_grad) {
      return;
    }
    for (std::size_t i = 0; i < t_out; ++i) {
      for (std::size_t m = 0; m < r; ++m) {
        const std::size_t src = std::min(i * r + m, t - 1);
        for (std::size_t j = 0; j < c; ++j) {
          px.grad[src * c + j] += inv_r * self.grad[i * c + j];
        }
      }
    }
  });
}

}  // namespace ffsing::num
