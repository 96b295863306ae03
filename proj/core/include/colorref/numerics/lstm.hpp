#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "colorref/numerics/graph.hpp"
#include "colorref/rng.hpp"

namespace colorref::nn {

/// Weights of one LSTM layer. Gate blocks are laid out [input | forget |
/// candidate | output] along the 4*cell_size columns.
struct LstmWeights {
  Parameter wx;  // input_size x 4H
  Parameter wh;  // H x 4H
  Parameter b;   // 1 x 4H

  std::size_t input_size() const { return wx.value.rows(); }
  std::size_t cell_size() const { return wh.value.rows(); }
};

/// Uniform(-init_range, init_range) weights; forget-gate bias set to
/// `forget_bias`, every other bias zero.
LstmWeights make_lstm(const std::string& name, std::size_t input_size, std::size_t cell_size, double forget_bias,
                      double init_range, Rng& rng);

struct LstmState {
  Var h;
  Var c;
};

/// One step of the standard LSTM recurrence on a batch:
///   gates = x Wx + h Wh + b
///   c' = sigmoid(f) * c + sigmoid(i) * tanh(g)
///   h' = sigmoid(o) * tanh(c')
/// x is B x input_size, h and c are B x H. Trainable when `w` is non-const.
LstmState lstm_cell(Graph& g, Var x, LstmState prev, LstmWeights& w);
LstmState lstm_cell(Graph& g, Var x, LstmState prev, const LstmWeights& w);

/// Eager single-step evaluation on plain tensors.
std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h, const Tensor& c, const LstmWeights& w);

}  // namespace colorref::nn
