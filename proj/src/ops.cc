#include "radars/ops.h"

#include <algorithm>
#include <cmath>

#include "radars/error.h"
#include "radars/parallel.h"

namespace radars::nn {
namespace {

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  Check(a.shape() == b.shape(), ErrorKind::kShapeMismatch,
        std::string(op) + ": shapes " + ShapeString(a.shape()) + " and " + ShapeString(b.shape()));
}

void RequireRank(const Tensor& t, std::size_t rank, const char* op) {
  Check(t.shape().size() == rank, ErrorKind::kShapeMismatch,
        std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
            ShapeString(t.shape()));
}

// Grad slot of a parent, or nullptr when the parent does not need one.
double* GradOf(TensorImpl& self, std::size_t i) {
  auto& p = self.parents[i];
  return p->requires_grad ? p->grad.data() : nullptr;
}

const double* ValueOf(TensorImpl& self, std::size_t i) { return self.parents[i]->value.data(); }

}  // namespace

void QuantSpec::Validate() const {
  Check(int_bits >= 1 && frac_bits >= 1, ErrorKind::kInvalidArgument,
        "quantization needs at least one integer and one fraction bit");
}

double QuantSpec::resolution() const { return std::ldexp(1.0, -frac_bits); }
double QuantSpec::lower() const { return -std::ldexp(1.0, int_bits); }
double QuantSpec::upper() const { return std::ldexp(1.0, int_bits) - resolution(); }

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return MakeResult(a.shape(), std::move(out), {a, b}, [](TensorImpl& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (double* g = GradOf(self, k)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return MakeResult(a.shape(), std::move(out), {a, b}, [](TensorImpl& self) {
    const double* av = ValueOf(self, 0);
    const double* bv = ValueOf(self, 1);
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
    }
    if (double* g = GradOf(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
    }
  });
}

Tensor Scale(const Tensor& a, double s) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * s;
  return MakeResult(a.shape(), std::move(out), {a}, [s](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * s;
    }
  });
}

Tensor Sum(const Tensor& a) {
  double total = 0;
  for (double v : a.values()) total += v;
  return MakeResult({}, {total}, {a}, [](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      const std::size_t n = self.parents[0]->value.size();
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    }
  });
}

Tensor Relu(const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x.at(i));
  return MakeResult(x.shape(), std::move(out), {x}, [](TensorImpl& self) {
    const double* xv = ValueOf(self, 0);
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        if (xv[i] > 0) g[i] += self.grad[i];
      }
    }
  });
}

Tensor FakeQuantize(const Tensor& x, const QuantSpec& q) {
  q.Validate();
  const double scale = std::ldexp(1.0, q.frac_bits);
  const double lo = q.lower();
  const double hi = q.upper();
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(std::round(x.at(i) * scale) / scale, lo, hi);
  }
  return MakeResult(x.shape(), std::move(out), {x}, [lo, hi](TensorImpl& self) {
    const double* xv = ValueOf(self, 0);
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        if (xv[i] >= lo && xv[i] <= hi) g[i] += self.grad[i];
      }
    }
  });
}

Tensor Conv2d(const Tensor& x, const Tensor& w, int stride) {
  RequireRank(x, 4, "Conv2d input");
  RequireRank(w, 4, "Conv2d weights");
  const int B = x.dim(0), CI = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int CO = w.dim(0), K = w.dim(2);
  Check(w.dim(1) == CI, ErrorKind::kShapeMismatch,
        "Conv2d: input has " + std::to_string(CI) + " channels, weights expect " +
            std::to_string(w.dim(1)));
  Check(w.dim(3) == K && K % 2 == 1, ErrorKind::kShapeMismatch, "Conv2d: kernel must be square and odd");
  Check(stride >= 1, ErrorKind::kInvalidArgument, "Conv2d: stride must be positive");
  const int HO = (H + stride - 1) / stride, WO = (W + stride - 1) / stride;
  const int pad = K / 2;

  struct Geometry {
    int B, CI, H, W, CO, K, HO, WO, pad, stride;
    // Output rows oy for which oy*stride - pad + k lies in [0, extent).
    static int FloorDiv(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
    int First(int k) const { return std::max(0, -FloorDiv(k - pad, stride)); }
    int Last(int k, int extent, int out) const {
      return std::max(0, std::min(out, FloorDiv(extent - 1 + pad - k, stride) + 1));
    }
  };
  const Geometry g{B, CI, H, W, CO, K, HO, WO, pad, stride};

  std::vector<double> out(static_cast<std::size_t>(B) * CO * HO * WO, 0.0);
  const double* xv = x.values().data();
  const double* wv = w.values().data();
  const std::size_t plane_cost = static_cast<std::size_t>(CI) * K * K * HO * WO;
  ParallelFor(static_cast<std::size_t>(B) * CO, plane_cost, [&](std::size_t begin, std::size_t end) {
    for (std::size_t bc = begin; bc < end; ++bc) {
      const int b = static_cast<int>(bc / CO), co = static_cast<int>(bc % CO);
      double* o = out.data() + bc * HO * WO;
      for (int ci = 0; ci < CI; ++ci) {
        const double* xp = xv + (static_cast<std::size_t>(b) * CI + ci) * H * W;
        const double* wp = wv + (static_cast<std::size_t>(co) * CI + ci) * K * K;
        for (int ky = 0; ky < K; ++ky) {
          const int oy0 = g.First(ky), oy1 = g.Last(ky, H, HO);
          for (int kx = 0; kx < K; ++kx) {
            const double wk = wp[ky * K + kx];
            const int ox0 = g.First(kx), ox1 = g.Last(kx, W, WO);
            for (int oy = oy0; oy < oy1; ++oy) {
              const double* row = xp + (oy * stride - pad + ky) * W;
              double* orow = o + oy * WO;
              for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wk * row[ox * stride - pad + kx];
            }
          }
        }
      }
    }
  });

  return MakeResult({B, CO, HO, WO}, std::move(out), {x, w}, [g](TensorImpl& self) {
    const double* xv = ValueOf(self, 0);
    const double* wv = ValueOf(self, 1);
    const double* gv = self.grad.data();
    const int K = g.K, W = g.W, H = g.H, WO = g.WO, HO = g.HO, CI = g.CI, CO = g.CO;
    const std::size_t work = static_cast<std::size_t>(CO) * K * K * HO * WO;
    if (double* gx = GradOf(self, 0)) {
      ParallelFor(static_cast<std::size_t>(g.B) * CI, work, [&](std::size_t begin, std::size_t end) {
        for (std::size_t bc = begin; bc < end; ++bc) {
          const int b = static_cast<int>(bc / CI), ci = static_cast<int>(bc % CI);
          double* dx = gx + bc * H * W;
          for (int co = 0; co < CO; ++co) {
            const double* go = gv + (static_cast<std::size_t>(b) * CO + co) * HO * WO;
            const double* wp = wv + (static_cast<std::size_t>(co) * CI + ci) * K * K;
            for (int ky = 0; ky < K; ++ky) {
              const int oy0 = g.First(ky), oy1 = g.Last(ky, H, HO);
              for (int kx = 0; kx < K; ++kx) {
                const double wk = wp[ky * K + kx];
                const int ox0 = g.First(kx), ox1 = g.Last(kx, W, WO);
                for (int oy = oy0; oy < oy1; ++oy) {
                  double* row = dx + (oy * g.stride - g.pad + ky) * W;
                  const double* grow = go + oy * WO;
                  for (int ox = ox0; ox < ox1; ++ox) row[ox * g.stride - g.pad + kx] += wk * grow[ox];
                }
              }
            }
          }
        }
      });
    }
    if (double* gw = GradOf(self, 1)) {
      ParallelFor(static_cast<std::size_t>(CO), work * g.B / std::max(1, CO) * CI,
                  [&](std::size_t begin, std::size_t end) {
        for (std::size_t co = begin; co < end; ++co) {
          for (int ci = 0; ci < CI; ++ci) {
            double* dw = gw + (co * CI + ci) * K * K;
            for (int b = 0; b < g.B; ++b) {
              const double* xp = xv + (static_cast<std::size_t>(b) * CI + ci) * H * W;
              const double* go = gv + (static_cast<std::size_t>(b) * CO + co) * HO * WO;
              for (int ky = 0; ky < K; ++ky) {
                const int oy0 = g.First(ky), oy1 = g.Last(ky, H, HO);
                for (int kx = 0; kx < K; ++kx) {
                  const int ox0 = g.First(kx), ox1 = g.Last(kx, W, WO);
                  double acc = 0;
                  for (int oy = oy0; oy < oy1; ++oy) {
                    const double* row = xp + (oy * g.stride - g.pad + ky) * W;
                    const double* grow = go + oy * WO;
                    for (int ox = ox0; ox < ox1; ++ox) acc += grow[ox] * row[ox * g.stride - g.pad + kx];
                  }
                  dw[ky * K + kx] += acc;
                }
              }
            }
          }
        }
      });
    }
  });
}

Tensor GlobalAvgPool(const Tensor& x) {
  RequireRank(x, 4, "GlobalAvgPool");
  const int B = x.dim(0), C = x.dim(1);
  const std::size_t area = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  std::vector<double> out(static_cast<std::size_t>(B) * C);
  for (std::size_t bc = 0; bc < out.size(); ++bc) {
    double s = 0;
    for (std::size_t i = 0; i < area; ++i) s += x.at(bc * area + i);
    out[bc] = s / static_cast<double>(area);
  }
  return MakeResult({B, C}, std::move(out), {x}, [area](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      for (std::size_t bc = 0; bc < self.grad.size(); ++bc) {
        const double d = self.grad[bc] / static_cast<double>(area);
        for (std::size_t i = 0; i < area; ++i) g[bc * area + i] += d;
      }
    }
  });
}

Tensor Dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  RequireRank(x, 2, "Dense input");
  RequireRank(w, 2, "Dense weights");
  RequireRank(b, 1, "Dense bias");
  const int B = x.dim(0), I = x.dim(1), O = w.dim(0);
  Check(w.dim(1) == I && b.dim(0) == O, ErrorKind::kShapeMismatch,
        "Dense: input " + ShapeString(x.shape()) + ", weights " + ShapeString(w.shape()) +
            ", bias " + ShapeString(b.shape()));
  std::vector<double> out(static_cast<std::size_t>(B) * O);
  for (int n = 0; n < B; ++n) {
    for (int o = 0; o < O; ++o) {
      double s = b.at(o);
      for (int i = 0; i < I; ++i) s += x.at(n * I + i) * w.at(o * I + i);
      out[n * O + o] = s;
    }
  }
  return MakeResult({B, O}, std::move(out), {x, w, b}, [B, I, O](TensorImpl& self) {
    const double* xv = ValueOf(self, 0);
    const double* wv = ValueOf(self, 1);
    double* gx = GradOf(self, 0);
    double* gw = GradOf(self, 1);
    double* gb = GradOf(self, 2);
    for (int n = 0; n < B; ++n) {
      for (int o = 0; o < O; ++o) {
        const double d = self.grad[n * O + o];
        if (gb) gb[o] += d;
        for (int i = 0; i < I; ++i) {
          if (gx) gx[n * I + i] += d * wv[o * I + i];
          if (gw) gw[o * I + i] += d * xv[n * I + i];
        }
      }
    }
  });
}

std::vector<double> SoftmaxValues(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double z = 0;
  for (double& v : p) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

Tensor SoftmaxCrossEntropy(const Tensor& logits, const std::vector<int>& labels) {
  RequireRank(logits, 2, "SoftmaxCrossEntropy");
  const int B = logits.dim(0), C = logits.dim(1);
  Check(static_cast<int>(labels.size()) == B && B > 0, ErrorKind::kShapeMismatch,
        "SoftmaxCrossEntropy: label count differs from batch size");
  std::vector<double> probs(static_cast<std::size_t>(B) * C);
  double loss = 0;
  for (int n = 0; n < B; ++n) {
    Check(labels[n] >= 0 && labels[n] < C, ErrorKind::kLabelOutOfRange,
          "label " + std::to_string(labels[n]) + " outside [0," + std::to_string(C) + ")");
    auto p = SoftmaxValues(logits.values().subspan(static_cast<std::size_t>(n) * C, C));
    std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::ptrdiff_t>(n) * C);
    // log-sum-exp form keeps the value finite when p underflows.
    const auto row = logits.values().subspan(static_cast<std::size_t>(n) * C, C);
    const double m = *std::max_element(row.begin(), row.end());
    double z = 0;
    for (double v : row) z += std::exp(v - m);
    loss += m + std::log(z) - row[labels[n]];
  }
  loss /= B;
  return MakeResult({}, {loss}, {logits},
                    [probs = std::move(probs), labels, B, C](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      const double d = self.grad[0] / B;
      for (int n = 0; n < B; ++n) {
        for (int c = 0; c < C; ++c) {
          const double onehot = c == labels[n] ? 1.0 : 0.0;
          g[n * C + c] += d * (probs[n * C + c] - onehot);
        }
      }
    }
  });
}

Tensor Softmax(const Tensor& x) {
  RequireRank(x, 1, "Softmax");
  auto p = SoftmaxValues(x.values());
  return MakeResult(x.shape(), p, {x}, [](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      const auto& p = self.value;
      double dot = 0;
      for (std::size_t i = 0; i < p.size(); ++i) dot += self.grad[i] * p[i];
      for (std::size_t i = 0; i < p.size(); ++i) g[i] += p[i] * (self.grad[i] - dot);
    }
  });
}

Tensor Mixture(const std::vector<Tensor>& outputs, const Tensor& alpha) {
  RequireRank(alpha, 1, "Mixture weights");
  const std::size_t n = outputs.size();
  Check(n >= 1 && static_cast<std::size_t>(alpha.dim(0)) == n, ErrorKind::kShapeMismatch,
        "Mixture: " + std::to_string(n) + " outputs for " + std::to_string(alpha.dim(0)) + " weights");
  for (const auto& o : outputs) RequireSameShape(o, outputs[0], "Mixture");
  const auto p = SoftmaxValues(alpha.values());
  std::vector<double> out(outputs[0].numel(), 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const auto v = outputs[c].values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[c] * v[i];
  }
  std::vector<Tensor> inputs(outputs);
  inputs.push_back(alpha);
  return MakeResult(outputs[0].shape(), std::move(out), std::move(inputs), [p, n](TensorImpl& self) {
    std::vector<double> dp(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      const double* v = ValueOf(self, c);
      double s = 0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) s += self.grad[i] * v[i];
      dp[c] = s;
      if (double* g = GradOf(self, c)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += p[c] * self.grad[i];
      }
    }
    if (double* ga = GradOf(self, n)) {
      double dot = 0;
      for (std::size_t c = 0; c < n; ++c) dot += dp[c] * p[c];
      for (std::size_t c = 0; c < n; ++c) ga[c] += p[c] * (dp[c] - dot);
    }
  });
}

Tensor Dot(const Tensor& a, const Tensor& b) {
  Check(a.numel() == b.numel(), ErrorKind::kShapeMismatch, "Dot: element counts differ");
  double s = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += a.at(i) * b.at(i);
  return MakeResult({}, {s}, {a, b}, [](TensorImpl& self) {
    const double* av = ValueOf(self, 0);
    const double* bv = ValueOf(self, 1);
    const std::size_t n = self.parents[0]->value.size();
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0] * bv[i];
    }
    if (double* g = GradOf(self, 1)) {
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0] * av[i];
    }
  });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireRank(a, 2, "MatMul lhs");
  RequireRank(b, 2, "MatMul rhs");
  const int N = a.dim(0), K = a.dim(1), M = b.dim(1);
  Check(b.dim(0) == K, ErrorKind::kShapeMismatch,
        "MatMul: " + ShapeString(a.shape()) + " x " + ShapeString(b.shape()));
  std::vector<double> out(static_cast<std::size_t>(N) * M, 0.0);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < K; ++k) {
      const double av = a.at(i * K + k);
      for (int j = 0; j < M; ++j) out[i * M + j] += av * b.at(k * M + j);
    }
  }
  return MakeResult({N, M}, std::move(out), {a, b}, [N, K, M](TensorImpl& self) {
    const double* av = ValueOf(self, 0);
    const double* bv = ValueOf(self, 1);
    double* ga = GradOf(self, 0);
    double* gb = GradOf(self, 1);
    for (int i = 0; i < N; ++i) {
      for (int k = 0; k < K; ++k) {
        for (int j = 0; j < M; ++j) {
          const double d = self.grad[i * M + j];
          if (ga) ga[i * K + k] += d * bv[k * M + j];
          if (gb) gb[k * M + j] += d * av[i * K + k];
        }
      }
    }
  });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  Check(NumElements(shape) == x.numel(), ErrorKind::kShapeMismatch,
        "Reshape: " + ShapeString(x.shape()) + " to " + ShapeString(shape));
  std::vector<double> out(x.values().begin(), x.values().end());
  return MakeResult(std::move(shape), std::move(out), {x}, [](TensorImpl& self) {
    if (double* g = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

}  // namespace radars::nn
