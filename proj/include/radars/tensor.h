#ifndef RADARS_TENSOR_H_
#define RADARS_TENSOR_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace radars::nn {

using Shape = std::vector<int>;

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

struct TensorImpl {
  Shape shape;
  std::vector<double> value;
  // Empty until a backward pass (or the caller) allocates it.
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorImpl>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(TensorImpl&)> backward_fn;

  void EnsureGrad();
};

/// Dense row-major tensor with an optional gradient. Copies share storage;
/// use Clone() for a deep copy. Operations on tensors that require gradients
/// record a tape that Backward() walks in reverse.
class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor FromData(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor Scalar(double v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int dim(int i) const { return impl_->shape.at(i); }
  std::size_t numel() const { return impl_->value.size(); }

  std::span<const double> values() const { return impl_->value; }
  std::span<double> mutable_values() { return impl_->value; }
  double item() const;
  double at(std::size_t i) const { return impl_->value.at(i); }

  bool requires_grad() const { return impl_->requires_grad; }
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const double> grad() const { return impl_->grad; }
  std::span<double> mutable_grad();
  void ClearGrad() { impl_->grad.clear(); }
  /// True when produced by a recorded operation rather than created directly.
  bool has_graph() const { return static_cast<bool>(impl_->backward_fn); }

  Tensor Clone(bool requires_grad = false) const;

  TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<TensorImpl>& shared() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  friend Tensor MakeResult(Shape, std::vector<double>, std::vector<Tensor>,
                           std::function<void(TensorImpl&)>);

  std::shared_ptr<TensorImpl> impl_;
};

/// Builds an op output. The tape entry is recorded only when some input needs
/// a gradient and recording is enabled.
Tensor MakeResult(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                  std::function<void(TensorImpl&)> backward_fn);

/// Disables tape recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

/// Reverse-mode accumulation from a scalar loss into every tensor of its
/// graph. Throws GraphNotRecorded when the loss has no recorded graph and
/// ShapeMismatch when it is not a scalar.
void Backward(const Tensor& loss);

}  // namespace radars::nn

#endif  // RADARS_TENSOR_H_
