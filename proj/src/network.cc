#include "radars/network.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "radars/error.h"

namespace radars::nn {
namespace {

constexpr char kMagic[8] = {'R', 'A', 'D', 'A', 'R', 'S', 'C', 'K'};

Tensor Uniform(Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(NumElements(shape));
  for (double& x : v) x = dist(rng);
  return Tensor::FromData(std::move(shape), std::move(v), true);
}

void PutU64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetU64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    const int c = in.get();
    Check(c != EOF, ErrorKind::kIo, "checkpoint truncated in header length");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

Json QuantJson(const QuantSpec& q) { return {{"int_bits", q.int_bits}, {"frac_bits", q.frac_bits}}; }

}  // namespace

Tensor ConvLayer::Forward(const Tensor& x) const {
  return Conv2d(FakeQuantize(x, quant), FakeQuantize(weights, quant), stride);
}

QuantSpec QuantFor(const SearchSpace& space, const CandidateTuple& c) {
  return {space.IntBits(c), space.FracBits(c)};
}

ConvLayer MakeConvLayer(const LayerTemplate& t, int kernel, const QuantSpec& q, Rng& rng) {
  const double bound = std::sqrt(6.0 / (t.in_channels * kernel * kernel));
  return {Uniform({t.out_channels, t.in_channels, kernel, kernel}, bound, rng), q, t.stride};
}

Classifier MakeClassifier(int in_features, int num_classes, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  return {Uniform({num_classes, in_features}, bound, rng), Tensor::Zeros({num_classes}, true)};
}

ChildNetwork::ChildNetwork(std::vector<ConvLayer> convs, Classifier head)
    : convs_(std::move(convs)), head_(std::move(head)) {}

Tensor ChildNetwork::Forward(const Tensor& x) const {
  Tensor h = x;
  for (const auto& c : convs_) h = Relu(c.Forward(h));
  return head_.Forward(GlobalAvgPool(h));
}

Tensor ChildNetwork::Loss(const Tensor& x, const std::vector<int>& labels) const {
  return SoftmaxCrossEntropy(Forward(x), labels);
}

std::vector<Tensor> ChildNetwork::Parameters() const {
  std::vector<Tensor> params;
  for (const auto& c : convs_) params.push_back(c.weights);
  params.push_back(head_.weights);
  params.push_back(head_.bias);
  return params;
}

std::size_t ChildNetwork::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& p : Parameters()) n += p.numel();
  return n;
}

void ChildNetwork::Save(const std::string& path) const {
  Json layers = Json::array();
  for (const auto& c : convs_) {
    layers.push_back({{"stride", c.stride}, {"quant", QuantJson(c.quant)}});
  }
  WriteCheckpoint(path, {{"kind", "child"}, {"layers", layers}}, Parameters());
}

ChildNetwork ChildNetwork::Load(const std::string& path) {
  auto ck = ReadCheckpoint(path);
  Check(ck.header.value("kind", "") == "child", ErrorKind::kIo, path + " is not a child checkpoint");
  const auto& layers = ck.header.at("layers");
  Check(ck.tensors.size() == layers.size() + 2, ErrorKind::kIo, "checkpoint tensor count mismatch");
  std::vector<ConvLayer> convs;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& q = layers[i].at("quant");
    convs.push_back({ck.tensors[i], {q.at("int_bits").get<int>(), q.at("frac_bits").get<int>()},
                     layers[i].at("stride").get<int>()});
  }
  Classifier head{ck.tensors[layers.size()], ck.tensors[layers.size() + 1]};
  return ChildNetwork(std::move(convs), std::move(head));
}

ChildNetwork BuildChildNetwork(const SearchSpace& space, const Architecture& arch,
                               std::uint64_t seed) {
  Check(arch.IsValidIn(space), ErrorKind::kInvalidArgument, "architecture not valid in space");
  Rng rng(seed);
  std::vector<ConvLayer> convs;
  for (int l = 0; l < space.num_layers(); ++l) {
    const auto c = arch.tuple(l);
    convs.push_back(MakeConvLayer(space.layer(l), space.KernelSize(c), QuantFor(space, c), rng));
  }
  auto head = MakeClassifier(space.layers().back().out_channels, space.num_classes(), rng);
  return ChildNetwork(std::move(convs), std::move(head));
}

void SgdStep(std::vector<Tensor>& params, double lr) {
  Check(lr >= 0 && std::isfinite(lr), ErrorKind::kInvalidArgument, "learning rate must be finite and >= 0");
  for (auto& p : params) {
    Check(p.has_grad(), ErrorKind::kMissingGrad, "parameter of shape " + ShapeString(p.shape()) +
                                                     " has no gradient");
  }
  for (auto& p : params) {
    auto v = p.mutable_values();
    const auto g = p.grad();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
    p.ClearGrad();
  }
}

void ZeroGrad(std::vector<Tensor>& params) {
  for (auto& p : params) p.ClearGrad();
}

void WriteCheckpoint(const std::string& path, Json header, const std::vector<Tensor>& tensors) {
  Json shapes = Json::array();
  for (const auto& t : tensors) shapes.push_back(t.shape());
  header["format"] = 1;
  header["shapes"] = shapes;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  Check(static_cast<bool>(out), ErrorKind::kIo, "cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  PutU64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : tensors) {
    for (double v : t.values()) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int i = 0; i < 4; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  Check(static_cast<bool>(out), ErrorKind::kIo, "failed writing checkpoint " + path);
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(static_cast<bool>(in), ErrorKind::kIo, "cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  Check(in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0, ErrorKind::kIo,
        path + " is not a checkpoint");
  const std::uint64_t len = GetU64(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  Check(static_cast<std::uint64_t>(in.gcount()) == len, ErrorKind::kIo, "checkpoint header truncated");

  Checkpoint ck;
  try {
    ck.header = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorKind::kIo, std::string("checkpoint header: ") + e.what());
  }
  for (const auto& s : ck.header.at("shapes")) {
    Shape shape = s.get<Shape>();
    std::vector<double> v(NumElements(shape));
    for (double& x : v) {
      unsigned char b[4];
      in.read(reinterpret_cast<char*>(b), 4);
      Check(in.gcount() == 4, ErrorKind::kIo, "checkpoint blob truncated");
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      x = std::bit_cast<float>(bits);
    }
    ck.tensors.push_back(Tensor::FromData(std::move(shape), std::move(v), true));
  }
  return ck;
}

}  // namespace radars::nn
