#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "intentforge/matrix.hpp"

namespace intentforge::nn {

/// Gate blocks are stacked along the rows of every tensor in the order
/// [input, forget, cell, output], each hidden_dim rows tall.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_input;             // 4H × input_dim
  Matrix w_hidden;            // 4H × H
  std::vector<double> bias;   // 4H

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
};

enum class Gate : std::size_t { Input = 0, Forget = 1, Cell = 2, Output = 3 };

/// Per-timestep values retained for backpropagation through time.
struct LstmCache {
  std::vector<Matrix> inputs;     // x_t
  std::vector<Matrix> h_prev;     // h_{t-1}
  std::vector<Matrix> c_prev;     // c_{t-1}
  std::vector<Matrix> gates;      // activated i,f,g,o packed as batch × 4H
  std::vector<Matrix> cell_tanh;  // tanh(c_t)
};

struct LstmOutput {
  std::vector<Matrix> hidden;  // h_1..h_T
  Matrix h;                    // h_T
  Matrix c;                    // c_T
  std::optional<LstmCache> cache;
};

struct LstmGrads {
  Matrix w_input;
  Matrix w_hidden;
  std::vector<double> bias;
  std::vector<Matrix> inputs;  // dL/dx_t
  Matrix h0;
  Matrix c0;
};

/// Runs the recurrence over `inputs` (each batch × input_dim) from (h0, c0).
/// i,f,o = σ(·), g = tanh(·), c_t = f⊙c_{t-1} + i⊙g, h_t = o⊙tanh(c_t).
LstmOutput lstm_forward(const LstmParams& params, std::span<const Matrix> inputs,
                        const Matrix& h0, const Matrix& c0, bool training);

/// Convenience overload starting from the zero state.
LstmOutput lstm_forward(const LstmParams& params, std::span<const Matrix> inputs, bool training);

/// BPTT given dL/dh_t for every timestep.
LstmGrads lstm_backward(const LstmParams& params, const LstmCache& cache,
                        std::span<const Matrix> grad_hidden);

}  // namespace intentforge::nn
