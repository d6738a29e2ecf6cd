#include "radars/tensor.h"

#include <unordered_set>

#include "radars/error.h"

namespace radars::nn {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    Check(d >= 0, ErrorKind::kShapeMismatch, "negative dimension in shape " + ShapeString(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

void TensorImpl::EnsureGrad() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  const auto n = NumElements(shape);
  return FromData(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::FromData(Shape shape, std::vector<double> values, bool requires_grad) {
  Check(NumElements(shape) == values.size(), ErrorKind::kShapeMismatch,
        "value count " + std::to_string(values.size()) + " does not fit shape " + ShapeString(shape));
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->value = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::Scalar(double v, bool requires_grad) { return FromData({}, {v}, requires_grad); }

double Tensor::item() const {
  Check(numel() == 1, ErrorKind::kShapeMismatch, "item() on tensor of shape " + ShapeString(shape()));
  return impl_->value[0];
}

std::span<double> Tensor::mutable_grad() {
  impl_->EnsureGrad();
  return impl_->grad;
}

Tensor Tensor::Clone(bool requires_grad) const {
  return FromData(impl_->shape, impl_->value, requires_grad);
}

Tensor MakeResult(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                  std::function<void(TensorImpl&)> backward_fn) {
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->value = std::move(value);
  bool needs = false;
  for (const auto& in : inputs) needs = needs || in.requires_grad();
  if (needs && g_grad_enabled) {
    impl->requires_grad = true;
    for (const auto& in : inputs) impl->parents.push_back(in.shared());
    impl->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(impl));
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool GradEnabled() { return g_grad_enabled; }

void Backward(const Tensor& loss) {
  Check(loss.defined() && loss.requires_grad(), ErrorKind::kGraphNotRecorded,
        "loss was not produced by a recorded graph");
  Check(loss.numel() == 1, ErrorKind::kShapeMismatch,
        "backward needs a scalar loss, got " + ShapeString(loss.shape()));

  // Iterative post-order DFS gives parents before children; walk it reversed.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  std::vector<std::pair<TensorImpl*, std::size_t>> stack{{loss.impl(), 0}};
  seen.insert(loss.impl());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorImpl* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (auto* node : order) {
    if (node->backward_fn) node->grad.assign(node->value.size(), 0.0);
    else node->EnsureGrad();
  }
  loss.impl()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* node = *it;
    if (!node->backward_fn) continue;
    for (auto& p : node->parents) {
      if (p->requires_grad) p->EnsureGrad();
    }
    node->backward_fn(*node);
  }
}

}  // namespace radars::nn
