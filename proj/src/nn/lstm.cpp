#include "intentforge/nn/lstm.hpp"

#include <cmath>

#include "intentforge/kernels.hpp"

namespace intentforge::nn {

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  require(input_dim > 0 && hidden_dim > 0, ErrorKind::InvalidDimension,
          "lstm dims must be positive");
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_input = Matrix(4 * hidden_dim, input_dim);
  p.w_hidden = Matrix(4 * hidden_dim, hidden_dim);
  p.bias.assign(4 * hidden_dim, 0.0);
  return p;
}

LstmOutput lstm_forward(const LstmParams& params, std::span<const Matrix> inputs,
                        const Matrix& h0, const Matrix& c0, bool training) {
  require(!inputs.empty(), ErrorKind::InvalidDimension, "lstm_forward: empty sequence");
  const std::size_t batch = inputs.front().rows();
  const std::size_t hd = params.hidden_dim;
  require_shape(h0, batch, hd, "lstm_forward h0");
  require_shape(c0, batch, hd, "lstm_forward c0");
  for (const auto& x : inputs) require_shape(x, batch, params.input_dim, "lstm_forward input");

  LstmOutput out;
  if (training) out.cache.emplace();
  out.hidden.reserve(inputs.size());

  Matrix h = h0;
  Matrix c = c0;
  Matrix z;
  Matrix zh;
  for (const auto& x : inputs) {
    kernels::matmul_nt(x, params.w_input, params.bias, z);
    kernels::matmul_nt(h, params.w_hidden, {}, zh);
    Matrix c_next(batch, hd);
    Matrix h_next(batch, hd);
    Matrix ct(batch, hd);
    for (std::size_t b = 0; b < batch; ++b) {
      auto zr = z.row(b);
      const auto zhr = zh.row(b);
      for (std::size_t k = 0; k < 4 * hd; ++k) zr[k] += zhr[k];
      for (std::size_t j = 0; j < hd; ++j) {
        const double ig = sigmoid(zr[j]);
        const double fg = sigmoid(zr[hd + j]);
        const double gg = std::tanh(zr[2 * hd + j]);
        const double og = sigmoid(zr[3 * hd + j]);
        zr[j] = ig;
        zr[hd + j] = fg;
        zr[2 * hd + j] = gg;
        zr[3 * hd + j] = og;
        const double cn = fg * c(b, j) + ig * gg;
        c_next(b, j) = cn;
        ct(b, j) = std::tanh(cn);
        h_next(b, j) = og * ct(b, j);
      }
    }
    if (out.cache) {
      out.cache->inputs.push_back(x);
      out.cache->h_prev.push_back(h);
      out.cache->c_prev.push_back(c);
      out.cache->gates.push_back(z);
      out.cache->cell_tanh.push_back(std::move(ct));
    }
    h = std::move(h_next);
    c = std::move(c_next);
    out.hidden.push_back(h);
  }
  out.h = std::move(h);
  out.c = std::move(c);
  return out;
}

LstmOutput lstm_forward(const LstmParams& params, std::span<const Matrix> inputs, bool training) {
  require(!inputs.empty(), ErrorKind::InvalidDimension, "lstm_forward: empty sequence");
  const Matrix zero(inputs.front().rows(), params.hidden_dim);
  return lstm_forward(params, inputs, zero, zero, training);
}

LstmGrads lstm_backward(const LstmParams& params, const LstmCache& cache,
                        std::span<const Matrix> grad_hidden) {
  const std::size_t steps = cache.inputs.size();
  require(steps > 0 && grad_hidden.size() == steps, ErrorKind::InvalidDimension,
          "lstm_backward: expected " + std::to_string(steps) + " hidden gradients, got " +
              std::to_string(grad_hidden.size()));
  const std::size_t batch = cache.inputs.front().rows();
  const std::size_t hd = params.hidden_dim;
  for (const auto& g : grad_hidden) require_shape(g, batch, hd, "lstm_backward grad");

  LstmGrads grads;
  grads.w_input = Matrix(4 * hd, params.input_dim);
  grads.w_hidden = Matrix(4 * hd, hd);
  grads.bias.assign(4 * hd, 0.0);
  grads.inputs.resize(steps);

  Matrix dh_next(batch, hd);
  Matrix dc_next(batch, hd);
  Matrix dz(batch, 4 * hd);
  for (std::size_t t = steps; t-- > 0;) {
    const Matrix& gates = cache.gates[t];
    const Matrix& ct = cache.cell_tanh[t];
    const Matrix& cp = cache.c_prev[t];
    for (std::size_t b = 0; b < batch; ++b) {
      const auto gr = gates.row(b);
      auto dzr = dz.row(b);
      for (std::size_t j = 0; j < hd; ++j) {
        const double ig = gr[j];
        const double fg = gr[hd + j];
        const double gg = gr[2 * hd + j];
        const double og = gr[3 * hd + j];
        const double dh = grad_hidden[t](b, j) + dh_next(b, j);
        const double tc = ct(b, j);
        const double dc = dc_next(b, j) + dh * og * (1.0 - tc * tc);
        dzr[j] = dc * gg * ig * (1.0 - ig);
        dzr[hd + j] = dc * cp(b, j) * fg * (1.0 - fg);
        dzr[2 * hd + j] = dc * ig * (1.0 - gg * gg);
        dzr[3 * hd + j] = dh * tc * og * (1.0 - og);
        dc_next(b, j) = dc * fg;
      }
    }
    kernels::matmul_tn_acc(dz, cache.inputs[t], grads.w_input);
    kernels::matmul_tn_acc(dz, cache.h_prev[t], grads.w_hidden);
    kernels::column_sum_acc(dz, grads.bias);
    kernels::matmul_nn(dz, params.w_input, grads.inputs[t]);
    kernels::matmul_nn(dz, params.w_hidden, dh_next);
  }
  grads.h0 = std::move(dh_next);
  grads.c0 = std::move(dc_next);
  return grads;
}

}  // namespace intentforge::nn
