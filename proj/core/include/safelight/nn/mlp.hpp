#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "safelight/common/rng.hpp"
#include "safelight/nn/tensor.hpp"

namespace safelight::nn {

enum class Activation { relu, identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::identity;

  std::size_t input_dim() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weight.rows()); }
};

struct LayerGradient {
  Matrix weight;
  Vector bias;
};

struct MlpGradients {
  std::vector<LayerGradient> layers;

  void add(const MlpGradients& other);
  void scale(double factor);
  bool all_finite() const;
  std::vector<std::span<const double>> views() const;
};

// Intermediates of one batched forward pass, consumed by Mlp::backward.
class ForwardCache {
 public:
  bool empty() const { return inputs_.empty(); }
  const Matrix& output() const { return output_; }
  std::size_t batch_size() const { return static_cast<std::size_t>(output_.rows()); }

 private:
  friend class Mlp;
  std::vector<Matrix> inputs_;  // input to layer i, batch x in_i
  std::vector<Matrix> pre_;     // pre-activation of layer i, batch x out_i
  Matrix output_;
};

// Fully connected feed-forward network. Parameters are dense, row-major.
class Mlp {
 public:
  Mlp() = default;

  // dims = {input, hidden..., output}. Weights uniform in +-1/sqrt(fan_in),
  // biases likewise, drawn from `rng` in layer order.
  Mlp(const std::vector<std::size_t>& dims, Activation hidden, Activation output, Rng& rng);
  explicit Mlp(std::vector<DenseLayer> layers);

  static Mlp zeros(const std::vector<std::size_t>& dims, Activation hidden, Activation output);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t depth() const { return layers_.size(); }
  std::vector<std::size_t> dims() const;
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  std::vector<double> forward(std::span<const double> input) const;
  Matrix forward_batch(const Matrix& inputs) const;
  ForwardCache forward_cached(const Matrix& inputs) const;

  // upstream: d(loss)/d(output), batch x output_dim. When input_grad is given
  // it receives d(loss)/d(input).
  MlpGradients backward(const ForwardCache& cache, const Matrix& upstream,
                        Matrix* input_grad = nullptr) const;

  MlpGradients zero_gradients() const;
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;

  bool same_architecture(const Mlp& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

// Single-sample convenience over forward_cached/backward.
MlpGradients backward(const Mlp& net, std::span<const double> input,
                      std::span<const double> upstream);

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows);

// target <- tau * online + (1 - tau) * target. tau == 1 copies bitwise.
void soft_sync(const Mlp& online, Mlp& target, double tau);
inline void hard_sync(const Mlp& online, Mlp& target) { soft_sync(online, target, 1.0); }

}  // namespace safelight::nn
