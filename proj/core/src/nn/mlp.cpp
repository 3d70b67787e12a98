#include "safelight/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "safelight/common/error.hpp"

namespace safelight::nn {

const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw Error("unknown activation '" + name + "'");
}

void MlpGradients::add(const MlpGradients& other) {
  if (other.layers.size() != layers.size())
    throw DimensionError("MlpGradients::add layer count", layers.size(), other.layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
}

void MlpGradients::scale(double factor) {
  for (auto& l : layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

bool MlpGradients::all_finite() const {
  for (const auto& l : layers)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

std::vector<std::span<const double>> MlpGradients::views() const {
  std::vector<std::span<const double>> out;
  out.reserve(layers.size() * 2);
  for (const auto& l : layers) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

namespace {

void check_chain(const std::vector<DenseLayer>& layers) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].bias.size() != layers[i].weight.rows())
      throw DimensionError("layer " + std::to_string(i) + " bias length",
                           static_cast<std::size_t>(layers[i].weight.rows()),
                           static_cast<std::size_t>(layers[i].bias.size()));
    if (i + 1 < layers.size() && layers[i].output_dim() != layers[i + 1].input_dim())
      throw DimensionError("layer " + std::to_string(i + 1) + " input dim",
                           layers[i].output_dim(), layers[i + 1].input_dim());
  }
}

void apply_activation(Matrix& m, Activation a) {
  if (a == Activation::relu) m = m.cwiseMax(0.0);
}

}  // namespace

Mlp::Mlp(const std::vector<std::size_t>& dims, Activation hidden, Activation output, Rng& rng) {
  if (dims.size() < 2) throw Error("Mlp needs at least input and output dims");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    DenseLayer layer;
    const auto in = static_cast<Eigen::Index>(dims[i]);
    const auto out = static_cast<Eigen::Index>(dims[i + 1]);
    layer.weight.resize(out, in);
    layer.bias.resize(out);
    const double bound = in > 0 ? 1.0 / std::sqrt(static_cast<double>(in)) : 0.0;
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = rng.uniform(-bound, bound);
    layer.activation = (i + 2 == dims.size()) ? output : hidden;
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { check_chain(layers_); }

Mlp Mlp::zeros(const std::vector<std::size_t>& dims, Activation hidden, Activation output) {
  if (dims.size() < 2) throw Error("Mlp needs at least input and output dims");
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    DenseLayer layer;
    layer.weight = Matrix::Zero(static_cast<Eigen::Index>(dims[i + 1]),
                                static_cast<Eigen::Index>(dims[i]));
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(dims[i + 1]));
    layer.activation = (i + 2 == dims.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::size_t Mlp::input_dim() const { return layers_.empty() ? 0 : layers_.front().input_dim(); }
std::size_t Mlp::output_dim() const { return layers_.empty() ? 0 : layers_.back().output_dim(); }

std::vector<std::size_t> Mlp::dims() const {
  std::vector<std::size_t> d;
  if (layers_.empty()) return d;
  d.push_back(input_dim());
  for (const auto& l : layers_) d.push_back(l.output_dim());
  return d;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (input.size() != input_dim()) throw DimensionError("Mlp::forward input", input_dim(), input.size());
  Matrix x(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = input[i];
  const Matrix y = forward_batch(x);
  return std::vector<double>(y.data(), y.data() + y.size());
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_dim())
    throw DimensionError("Mlp::forward input", input_dim(), static_cast<std::size_t>(inputs.cols()));
  if (!inputs.allFinite()) throw NumericError("Mlp::forward: non-finite input");
  Matrix x = inputs;
  for (const auto& l : layers_) {
    Matrix z = x * l.weight.transpose();
    z.rowwise() += l.bias.transpose();
    apply_activation(z, l.activation);
    x = std::move(z);
  }
  if (!x.allFinite()) throw NumericError("Mlp::forward: non-finite output");
  return x;
}

ForwardCache Mlp::forward_cached(const Matrix& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_dim())
    throw DimensionError("Mlp::forward input", input_dim(), static_cast<std::size_t>(inputs.cols()));
  if (!inputs.allFinite()) throw NumericError("Mlp::forward: non-finite input");
  ForwardCache cache;
  cache.inputs_.reserve(layers_.size());
  cache.pre_.reserve(layers_.size());
  Matrix x = inputs;
  for (const auto& l : layers_) {
    Matrix z = x * l.weight.transpose();
    z.rowwise() += l.bias.transpose();
    cache.inputs_.push_back(std::move(x));
    x = z;
    apply_activation(x, l.activation);
    cache.pre_.push_back(std::move(z));
  }
  if (!x.allFinite()) throw NumericError("Mlp::forward: non-finite output");
  cache.output_ = std::move(x);
  return cache;
}

MlpGradients Mlp::backward(const ForwardCache& cache, const Matrix& upstream, Matrix* input_grad) const {
  if (cache.empty() || cache.inputs_.size() != layers_.size())
    throw Error("Mlp::backward: no cached forward pass for this network");
  if (upstream.rows() != cache.output_.rows() || upstream.cols() != cache.output_.cols())
    throw DimensionError("Mlp::backward upstream cols", static_cast<std::size_t>(cache.output_.cols()),
                         static_cast<std::size_t>(upstream.cols()));
  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Matrix g = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    if (l.activation == Activation::relu) g = g.cwiseProduct((cache.pre_[k].array() > 0.0).cast<double>().matrix());
    grads.layers[k].weight = g.transpose() * cache.inputs_[k];
    grads.layers[k].bias = g.colwise().sum().transpose();
    if (k > 0 || input_grad != nullptr) g = g * l.weight;
  }
  if (input_grad != nullptr) *input_grad = std::move(g);
  if (!grads.all_finite()) throw NumericError("Mlp::backward: non-finite gradient");
  return grads;
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients g;
  for (const auto& l : layers_)
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  return g;
}

std::vector<std::span<double>> Mlp::parameters() {
  std::vector<std::span<double>> out;
  for (auto& l : layers_) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

std::vector<std::span<const double>> Mlp::parameters() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers_) {
    out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

bool Mlp::same_architecture(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.activation != b.activation)
      return false;
  }
  return true;
}

MlpGradients backward(const Mlp& net, std::span<const double> input, std::span<const double> upstream) {
  if (input.size() != net.input_dim()) throw DimensionError("backward input", net.input_dim(), input.size());
  if (upstream.size() != net.output_dim())
    throw DimensionError("backward upstream", net.output_dim(), upstream.size());
  Matrix x(1, static_cast<Eigen::Index>(input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = input[i];
  Matrix g(1, static_cast<Eigen::Index>(upstream.size()));
  for (std::size_t i = 0; i < upstream.size(); ++i) g(0, static_cast<Eigen::Index>(i)) = upstream[i];
  return net.backward(net.forward_cached(x), g);
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  const auto cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionError("rows_to_matrix row length", cols, rows[r].size());
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

void soft_sync(const Mlp& online, Mlp& target, double tau) {
  if (!online.same_architecture(target)) throw Error("soft_sync: architecture mismatch");
  if (tau < 0.0 || tau > 1.0) throw Error("soft_sync: tau must lie in [0, 1]");
  auto& dst = target.layers();
  const auto& src = online.layers();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (tau == 1.0) {
      dst[i].weight = src[i].weight;
      dst[i].bias = src[i].bias;
    } else {
      dst[i].weight = tau * src[i].weight + (1.0 - tau) * dst[i].weight;
      dst[i].bias = tau * src[i].bias + (1.0 - tau) * dst[i].bias;
    }
  }
}

}  // namespace safelight::nn
