#ifndef RADARS_OPS_H_
#define RADARS_OPS_H_

#include <vector>

#include "radars/tensor.h"

namespace radars::nn {

/// Fixed-point format: sign bit, `int_bits` integer bits, `frac_bits`
/// fraction bits. Representable range [-2^i, 2^i - 2^-f] on a 2^-f grid.
struct QuantSpec {
  int int_bits = 3;
  int frac_bits = 6;

  void Validate() const;
  double resolution() const;
  double lower() const;
  double upper() const;
};

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor Sum(const Tensor& a);
Tensor Relu(const Tensor& x);

/// Rounds onto the fixed-point grid and clamps to its range. Straight-through
/// gradient: passed unchanged where x lies inside the range, zero outside.
Tensor FakeQuantize(const Tensor& x, const QuantSpec& q);

/// x (B,CI,H,W) * w (CO,CI,K,K) with "same" zero padding and the given
/// stride; output (B,CO,ceil(H/s),ceil(W/s)). K must be odd.
Tensor Conv2d(const Tensor& x, const Tensor& w, int stride);

/// (B,C,H,W) -> (B,C).
Tensor GlobalAvgPool(const Tensor& x);

/// x (B,I) . w(O,I)^T + b(O) -> (B,O).
Tensor Dense(const Tensor& x, const Tensor& w, const Tensor& b);

/// Mean over the batch of -log softmax(logits)[label].
Tensor SoftmaxCrossEntropy(const Tensor& logits, const std::vector<int>& labels);

/// Softmax of a 1-D tensor.
Tensor Softmax(const Tensor& x);

/// sum_c softmax(alpha)[c] * outputs[c]; all outputs share one shape.
Tensor Mixture(const std::vector<Tensor>& outputs, const Tensor& alpha);

/// Inner product of two same-sized tensors -> scalar.
Tensor Dot(const Tensor& a, const Tensor& b);

/// a (n,k) . b (k,m) -> (n,m).
Tensor MatMul(const Tensor& a, const Tensor& b);

Tensor Reshape(const Tensor& x, Shape shape);

/// Plain softmax of a value list (no graph).
std::vector<double> SoftmaxValues(std::span<const double> logits);

}  // namespace radars::nn

#endif  // RADARS_OPS_H_
