#include "safelight/agents/dueling.hpp"

#include "safelight/common/error.hpp"

namespace safelight::agents {

std::vector<std::span<const double>> DuelingGradients::views() const {
  std::vector<std::span<const double>> out;
  for (const auto* g : {&embedding, &trunk, &value, &advantage}) {
    auto v = g->views();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void DuelingGradients::scale(double f) {
  embedding.scale(f);
  trunk.scale(f);
  value.scale(f);
  advantage.scale(f);
}

double DuelingGradients::squared_norm() const {
  double s = 0.0;
  for (auto v : views())
    for (double x : v) s += x * x;
  return s;
}

DuelingQNetwork::DuelingQNetwork(std::size_t base_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
                                 std::size_t embed_dim, Rng& rng)
    : base_dim_(base_dim), actions_(actions) {
  if (hidden.empty()) throw ConfigError("agent.hidden", "need at least one hidden layer");
  if (actions == 0) throw ConfigError("actions", "must be positive");
  embedding_ = safety::SafetyEmbedding(actions, embed_dim, rng);
  std::vector<std::size_t> dims{base_dim + embed_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  trunk_ = nn::Mlp(dims, nn::Activation::relu, nn::Activation::relu, rng);
  value_ = nn::Mlp({hidden.back(), 1}, nn::Activation::identity, nn::Activation::identity, rng);
  advantage_ = nn::Mlp({hidden.back(), actions}, nn::Activation::identity, nn::Activation::identity, rng);
}

DuelingQNetwork DuelingQNetwork::from_parts(std::size_t base_dim, std::size_t actions,
                                            safety::SafetyEmbedding embedding, nn::Mlp trunk, nn::Mlp value,
                                            nn::Mlp advantage) {
  DuelingQNetwork q;
  q.base_dim_ = base_dim;
  q.actions_ = actions;
  q.embedding_ = std::move(embedding);
  q.trunk_ = std::move(trunk);
  q.value_ = std::move(value);
  q.advantage_ = std::move(advantage);
  if (q.trunk_.input_dim() != base_dim + q.embedding_.dim() || q.value_.output_dim() != 1 ||
      q.advantage_.output_dim() != actions || q.value_.input_dim() != q.trunk_.output_dim() ||
      q.advantage_.input_dim() != q.trunk_.output_dim() ||
      (q.embedding_.enabled() && q.embedding_.flag_dim() != actions))
    throw ConfigError("q_network", "inconsistent part dimensions");
  return q;
}

nn::Matrix DuelingQNetwork::trunk_input(const nn::Matrix& states, DuelingCache* cache) const {
  if (static_cast<std::size_t>(states.cols()) != input_dim())
    throw DimensionError("Q-network input", input_dim(), static_cast<std::size_t>(states.cols()));
  if (!embedding_.enabled()) return states;
  const auto b = states.rows();
  const auto base = static_cast<Eigen::Index>(base_dim_);
  const auto acts = static_cast<Eigen::Index>(actions_);
  nn::Matrix flags = states.rightCols(acts);
  nn::Matrix emb;
  if (cache) {
    cache->embedding = embedding_.layer().forward_cached(flags);
    emb = cache->embedding.output();
  } else {
    emb = embedding_.layer().forward_batch(flags);
  }
  nn::Matrix x(b, base + emb.cols());
  x.leftCols(base) = states.leftCols(base);
  x.rightCols(emb.cols()) = emb;
  return x;
}

DuelingCache DuelingQNetwork::forward(const nn::Matrix& states) const {
  DuelingCache c;
  const nn::Matrix x = trunk_input(states, &c);
  c.trunk = trunk_.forward_cached(x);
  c.value = value_.forward_cached(c.trunk.output());
  c.advantage = advantage_.forward_cached(c.trunk.output());
  const auto& a = c.advantage.output();
  const auto& v = c.value.output();
  c.q.resize(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double mean = a.row(i).mean();
    for (Eigen::Index j = 0; j < a.cols(); ++j) c.q(i, j) = v(i, 0) + a(i, j) - mean;
  }
  return c;
}

nn::Matrix DuelingQNetwork::q_batch(const nn::Matrix& states) const {
  const nn::Matrix x = trunk_input(states, nullptr);
  const nn::Matrix h = trunk_.forward_batch(x);
  const nn::Matrix v = value_.forward_batch(h);
  const nn::Matrix a = advantage_.forward_batch(h);
  nn::Matrix q(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double mean = a.row(i).mean();
    for (Eigen::Index j = 0; j < a.cols(); ++j) q(i, j) = v(i, 0) + a(i, j) - mean;
  }
  return q;
}

namespace {

nn::Matrix row(std::span<const double> x) {
  nn::Matrix m(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = x[i];
  return m;
}

std::vector<double> to_vector(const nn::Matrix& m) { return std::vector<double>(m.data(), m.data() + m.size()); }

}  // namespace

std::vector<double> DuelingQNetwork::q_values(std::span<const double> state) const {
  return to_vector(q_batch(row(state)));
}

std::vector<double> DuelingQNetwork::advantages(std::span<const double> state) const {
  const nn::Matrix x = trunk_input(row(state), nullptr);
  return to_vector(advantage_.forward_batch(trunk_.forward_batch(x)));
}

double DuelingQNetwork::value(std::span<const double> state) const {
  const nn::Matrix x = trunk_input(row(state), nullptr);
  return value_.forward_batch(trunk_.forward_batch(x))(0, 0);
}

DuelingGradients DuelingQNetwork::backward(const DuelingCache& c, const nn::Matrix& dq,
                                           const nn::Matrix& da_extra) const {
  const auto b = dq.rows();
  const auto n = dq.cols();
  nn::Matrix dv(b, 1);
  nn::Matrix da(b, n);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double s = dq.row(i).sum();
    dv(i, 0) = s;
    for (Eigen::Index j = 0; j < n; ++j) da(i, j) = dq(i, j) - s / static_cast<double>(n);
  }
  if (da_extra.size() > 0) da += da_extra;
  DuelingGradients g;
  nn::Matrix dh_v, dh_a;
  g.value = value_.backward(c.value, dv, &dh_v);
  g.advantage = advantage_.backward(c.advantage, da, &dh_a);
  const nn::Matrix dh = dh_v + dh_a;
  if (embedding_.enabled()) {
    nn::Matrix dx;
    g.trunk = trunk_.backward(c.trunk, dh, &dx);
    const auto m = static_cast<Eigen::Index>(embedding_.dim());
    g.embedding = embedding_.layer().backward(c.embedding, dx.rightCols(m));
  } else {
    g.trunk = trunk_.backward(c.trunk, dh);
  }
  return g;
}

std::vector<std::span<double>> DuelingQNetwork::parameters() {
  std::vector<std::span<double>> out;
  if (embedding_.enabled()) {
    auto e = embedding_.layer().parameters();
    out.insert(out.end(), e.begin(), e.end());
  }
  for (auto* net : {&trunk_, &value_, &advantage_}) {
    auto p = net->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<std::span<const double>> DuelingQNetwork::parameters() const {
  std::vector<std::span<const double>> out;
  if (embedding_.enabled()) {
    auto e = std::as_const(embedding_.layer()).parameters();
    out.insert(out.end(), e.begin(), e.end());
  }
  for (const auto* net : {&trunk_, &value_, &advantage_}) {
    auto p = net->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

bool DuelingQNetwork::same_architecture(const DuelingQNetwork& o) const {
  return base_dim_ == o.base_dim_ && actions_ == o.actions_ && embedding_.dim() == o.embedding_.dim() &&
         (!embedding_.enabled() || embedding_.layer().same_architecture(o.embedding_.layer())) &&
         trunk_.same_architecture(o.trunk_) && value_.same_architecture(o.value_) &&
         advantage_.same_architecture(o.advantage_);
}

void DuelingQNetwork::copy_from(const DuelingQNetwork& o, double tau) {
  if (!same_architecture(o)) throw Error("target network architecture mismatch");
  if (embedding_.enabled()) nn::soft_sync(o.embedding_.layer(), embedding_.layer(), tau);
  nn::soft_sync(o.trunk_, trunk_, tau);
  nn::soft_sync(o.value_, value_, tau);
  nn::soft_sync(o.advantage_, advantage_, tau);
}

}  // namespace safelight::agents
