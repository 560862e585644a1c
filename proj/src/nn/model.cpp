#include "intentforge/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace intentforge::nn {

namespace {

void glorot_fill(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.values()) v = dist(rng);
}

void set_forget_bias(LstmParams& p, double value) {
  std::fill_n(p.bias.begin() + static_cast<std::ptrdiff_t>(p.hidden_dim), p.hidden_dim, value);
}

template <class View, class Params, class F>
void visit(Params& p, bool include_state, F&& emit) {
  auto lstm = [&](auto& l, const std::string& name) {
    emit(name + ".w_input", std::vector<std::size_t>{l.w_input.rows(), l.w_input.cols()},
         l.w_input.values());
    emit(name + ".w_hidden", std::vector<std::size_t>{l.w_hidden.rows(), l.w_hidden.cols()},
         l.w_hidden.values());
    emit(name + ".bias", std::vector<std::size_t>{l.bias.size()}, std::span(l.bias));
  };
  auto bn = [&](auto& b, const std::string& name) {
    emit(name + ".gamma", std::vector<std::size_t>{b.dim}, std::span(b.gamma));
    emit(name + ".beta", std::vector<std::size_t>{b.dim}, std::span(b.beta));
    if (include_state) {
      emit(name + ".running_mean", std::vector<std::size_t>{b.dim}, std::span(b.running_mean));
      emit(name + ".running_var", std::vector<std::size_t>{b.dim}, std::span(b.running_var));
    }
  };
  auto dense = [&](auto& d, const std::string& name) {
    emit(name + ".w", std::vector<std::size_t>{d.w.rows(), d.w.cols()}, d.w.values());
    emit(name + ".b", std::vector<std::size_t>{d.b.size()}, std::span(d.b));
  };
  lstm(p.lstm1, "lstm1");
  bn(p.bn1, "bn1");
  lstm(p.lstm2, "lstm2");
  bn(p.bn2, "bn2");
  dense(p.dense1, "dense1");
  bn(p.bn3, "bn3");
  dense(p.dense2, "dense2");
}

double clamp_open_unit(double p) noexcept {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

}  // namespace

ModelParams ModelParams::zeros(std::size_t state_size) {
  require(state_size >= 1, ErrorKind::InvalidDimension, "state_size must be >= 1");
  ModelParams p;
  p.lstm1 = LstmParams::zeros(state_size, kLstm1Units);
  p.bn1 = BatchNormParams::identity(kLstm1Units);
  p.lstm2 = LstmParams::zeros(kLstm1Units, kLstm2Units);
  p.bn2 = BatchNormParams::identity(kLstm2Units);
  p.dense1 = DenseParams::zeros(kLstm2Units, kDenseUnits);
  p.bn3 = BatchNormParams::identity(kDenseUnits);
  p.dense2 = DenseParams::zeros(kDenseUnits, 1);
  return p;
}

ModelParams init_params(std::size_t state_size, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(state_size);
  Rng rng = make_stream(seed, Stream::Init);
  glorot_fill(p.lstm1.w_input, rng);
  glorot_fill(p.lstm1.w_hidden, rng);
  set_forget_bias(p.lstm1, 1.0);
  glorot_fill(p.lstm2.w_input, rng);
  glorot_fill(p.lstm2.w_hidden, rng);
  set_forget_bias(p.lstm2, 1.0);
  glorot_fill(p.dense1.w, rng);
  glorot_fill(p.dense2.w, rng);
  return p;
}

ModelGrads zeros_like(const ModelParams& params) {
  ModelGrads g = ModelParams::zeros(params.state_size());
  for (auto& t : tensors(g, true)) std::fill(t.data.begin(), t.data.end(), 0.0);
  g.dropout_rate = params.dropout_rate;
  return g;
}

std::vector<TensorView> tensors(ModelParams& params, bool include_state) {
  std::vector<TensorView> out;
  visit<TensorView>(params, include_state,
                    [&](std::string name, std::vector<std::size_t> shape, std::span<double> d) {
                      out.push_back({std::move(name), std::move(shape), d});
                    });
  return out;
}

std::vector<ConstTensorView> tensors(const ModelParams& params, bool include_state) {
  std::vector<ConstTensorView> out;
  visit<ConstTensorView>(
      params, include_state,
      [&](std::string name, std::vector<std::size_t> shape, std::span<const double> d) {
        out.push_back({std::move(name), std::move(shape), d});
      });
  return out;
}

ForwardResult model_forward(const ModelParams& params, std::span<const Matrix> steps,
                            bool training, Rng& rng) {
  require(!steps.empty(), ErrorKind::InvalidDimension, "model_forward: no timesteps");
  const std::size_t batch = steps.front().rows();
  for (const auto& s : steps) {
    require_shape(s, batch, params.state_size(), "model_forward timestep");
  }

  auto l1 = lstm_forward(params.lstm1, steps, training);
  auto n1 = batchnorm_forward(params.bn1, l1.h, training);
  auto d1 = dropout_forward(n1.y, params.dropout_rate, rng, training);

  const Matrix* l2_in = &d1.y;
  auto l2 = lstm_forward(params.lstm2, std::span(l2_in, 1), training);
  auto n2 = batchnorm_forward(params.bn2, l2.h, training);
  auto d2 = dropout_forward(n2.y, params.dropout_rate, rng, training);

  Matrix z1 = dense_forward(params.dense1, d2.y);
  Matrix r1 = relu(z1);
  auto n3 = batchnorm_forward(params.bn3, r1, training);
  Matrix z2 = dense_forward(params.dense2, n3.y);

  ForwardResult out;
  out.probs.resize(batch);
  for (std::size_t i = 0; i < batch; ++i) out.probs[i] = clamp_open_unit(sigmoid(z2(i, 0)));

  if (training) {
    ModelCache c;
    c.batch = batch;
    c.lstm1 = std::move(*l1.cache);
    c.bn1 = std::move(*n1.cache);
    c.drop1_mask = std::move(*d1.mask);
    c.lstm2 = std::move(*l2.cache);
    c.bn2 = std::move(*n2.cache);
    c.drop2_mask = std::move(*d2.mask);
    c.dense1_in = std::move(d2.y);
    c.dense1_out = std::move(z1);
    c.bn3 = std::move(*n3.cache);
    c.dense2_in = std::move(n3.y);
    out.cache = std::move(c);
  }
  return out;
}

void update_running_stats(ModelParams& params, const ModelCache& cache) {
  batchnorm_update_running(params.bn1, cache.bn1);
  batchnorm_update_running(params.bn2, cache.bn2);
  batchnorm_update_running(params.bn3, cache.bn3);
}

ModelGrads model_backward(const ModelParams& params, const std::optional<ModelCache>& cache,
                          std::span<const double> probs, std::span<const int> labels,
                          ClassWeights weights) {
  require(cache.has_value(), ErrorKind::StaleCache,
          "model_backward needs the cache of a training-mode forward");
  const ModelCache& c = *cache;
  require(c.batch == probs.size(), ErrorKind::StaleCache,
          "cache batch " + std::to_string(c.batch) + " != probs " + std::to_string(probs.size()));

  const auto dlogit = weighted_bce_logit_grad(probs, labels, weights);
  Matrix dz2(c.batch, 1, dlogit);

  ModelGrads g = zeros_like(params);

  auto gd2 = dense_backward(params.dense2, c.dense2_in, dz2);
  g.dense2.w = std::move(gd2.w);
  g.dense2.b = std::move(gd2.b);

  auto gn3 = batchnorm_backward(params.bn3, c.bn3, gd2.x);
  g.bn3.gamma = std::move(gn3.gamma);
  g.bn3.beta = std::move(gn3.beta);

  Matrix dz1 = relu_backward(c.dense1_out, gn3.x);
  auto gd1 = dense_backward(params.dense1, c.dense1_in, dz1);
  g.dense1.w = std::move(gd1.w);
  g.dense1.b = std::move(gd1.b);

  Matrix dn2 = dropout_backward(c.drop2_mask, gd1.x);
  auto gn2 = batchnorm_backward(params.bn2, c.bn2, dn2);
  g.bn2.gamma = std::move(gn2.gamma);
  g.bn2.beta = std::move(gn2.beta);

  auto gl2 = lstm_backward(params.lstm2, c.lstm2, std::span(&gn2.x, 1));
  g.lstm2.w_input = std::move(gl2.w_input);
  g.lstm2.w_hidden = std::move(gl2.w_hidden);
  g.lstm2.bias = std::move(gl2.bias);

  Matrix dn1 = dropout_backward(c.drop1_mask, gl2.inputs.front());
  auto gn1 = batchnorm_backward(params.bn1, c.bn1, dn1);
  g.bn1.gamma = std::move(gn1.gamma);
  g.bn1.beta = std::move(gn1.beta);

  const std::size_t steps = c.lstm1.inputs.size();
  std::vector<Matrix> dh1(steps, Matrix(c.batch, params.lstm1.hidden_dim));
  dh1.back() = std::move(gn1.x);
  auto gl1 = lstm_backward(params.lstm1, c.lstm1, dh1);
  g.lstm1.w_input = std::move(gl1.w_input);
  g.lstm1.w_hidden = std::move(gl1.w_hidden);
  g.lstm1.bias = std::move(gl1.bias);
  return g;
}

}  // namespace intentforge::nn
