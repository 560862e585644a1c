#include "intentforge/nn/adam.hpp"

#include <cmath>

namespace intentforge::nn {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state, double lr) {
  require(lr > 0.0, ErrorKind::InvalidRate, "adam: learning rate must be positive");
  require(params.size() == grads.size(), ErrorKind::InvalidDimension,
          "adam: " + std::to_string(params.size()) + " params vs " +
              std::to_string(grads.size()) + " grads");
  if (state.m.empty() && state.t == 0) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  require(state.m.size() == params.size(), ErrorKind::InvalidDimension,
          "adam: state tracks " + std::to_string(state.m.size()) + " tensors, got " +
              std::to_string(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    require(params[k].size() == grads[k].size() && state.m[k].size() == params[k].size(),
            ErrorKind::InvalidDimension, "adam: tensor " + std::to_string(k) + " shape mismatch");
  }

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    const auto g = grads[k];
    auto p = params[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, double lr) {
  auto pv = tensors(params);
  auto gv = tensors(grads);
  std::vector<std::span<double>> ps;
  std::vector<std::span<const double>> gs;
  ps.reserve(pv.size());
  gs.reserve(gv.size());
  for (auto& t : pv) ps.push_back(t.data);
  for (auto& t : gv) gs.push_back(t.data);
  adam_step(ps, gs, state, lr);
}

}  // namespace intentforge::nn
