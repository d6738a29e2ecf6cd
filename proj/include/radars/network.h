#ifndef RADARS_NETWORK_H_
#define RADARS_NETWORK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "radars/ops.h"
#include "radars/space.h"

namespace radars::nn {

/// Quantized convolution: input and weights are fake-quantized with the same
/// spec before the multiply-accumulate.
struct ConvLayer {
  Tensor weights;  // (CO, CI, K, K)
  QuantSpec quant;
  int stride = 1;

  int kernel() const { return weights.dim(2); }
  Tensor Forward(const Tensor& x) const;
};

QuantSpec QuantFor(const SearchSpace& space, const CandidateTuple& c);

/// He-uniform initialised layer for one candidate of one layer.
ConvLayer MakeConvLayer(const LayerTemplate& t, int kernel, const QuantSpec& q, Rng& rng);

struct Classifier {
  Tensor weights;  // (num_classes, C)
  Tensor bias;     // (num_classes)

  Tensor Forward(const Tensor& features) const { return Dense(features, weights, bias); }
};

Classifier MakeClassifier(int in_features, int num_classes, Rng& rng);

/// Conv+ReLU stack, global average pool, dense classifier.
class ChildNetwork {
 public:
  ChildNetwork(std::vector<ConvLayer> convs, Classifier head);

  Tensor Forward(const Tensor& x) const;
  Tensor Loss(const Tensor& x, const std::vector<int>& labels) const;
  std::vector<Tensor> Parameters() const;
  std::size_t ParameterCount() const;

  const std::vector<ConvLayer>& convs() const { return convs_; }
  const Classifier& head() const { return head_; }

  void Save(const std::string& path) const;
  static ChildNetwork Load(const std::string& path);

 private:
  std::vector<ConvLayer> convs_;
  Classifier head_;
};

/// Builds the child network of `arch`; identical seeds give identical weights.
ChildNetwork BuildChildNetwork(const SearchSpace& space, const Architecture& arch,
                               std::uint64_t seed);

/// p <- p - lr * grad, then clears the grads. Throws MissingGrad when a
/// parameter has no gradient.
void SgdStep(std::vector<Tensor>& params, double lr);

void ZeroGrad(std::vector<Tensor>& params);

/// Checkpoint file: 8-byte magic "RADARSCK", little-endian uint64 header
/// length, UTF-8 JSON header, then every tensor as little-endian float32 in
/// header order.
struct Checkpoint {
  Json header;
  std::vector<Tensor> tensors;
};

void WriteCheckpoint(const std::string& path, Json header, const std::vector<Tensor>& tensors);
Checkpoint ReadCheckpoint(const std::string& path);

}  // namespace radars::nn

#endif  // RADARS_NETWORK_H_
