#include "colorref/numerics/lstm.hpp"

#include "colorref/error.hpp"

namespace colorref::nn {

namespace {

Tensor uniform_tensor(std::size_t rows, std::size_t cols, double range, Rng& rng) {
  Tensor t({rows, cols});
  for (auto& v : t.vec()) v = rng.uniform(-range, range);
  return t;
}

template <typename Weights>
LstmState step(Graph& g, Var x, LstmState prev, Weights& w) {
  const std::size_t hidden = w.cell_size();
  const auto& xv = g.value(x);
  if (xv.cols() != w.input_size()) {
    throw ShapeError("lstm_cell(" + w.wx.name + ")", "input width " + std::to_string(xv.cols()) + ", expected " +
                                                        std::to_string(w.input_size()));
  }
  if (g.value(prev.h).cols() != hidden || g.value(prev.c).cols() != hidden) {
    throw ShapeError("lstm_cell(" + w.wx.name + ")", "state width does not match cell size " + std::to_string(hidden));
  }

  auto gates = g.add(g.add(g.matmul(x, g.param(w.wx)), g.matmul(prev.h, g.param(w.wh))), g.param(w.b));
  auto i = g.sigmoid(g.slice(gates, 0, hidden));
  auto f = g.sigmoid(g.slice(gates, hidden, 2 * hidden));
  auto cand = g.tanh(g.slice(gates, 2 * hidden, 3 * hidden));
  auto o = g.sigmoid(g.slice(gates, 3 * hidden, 4 * hidden));
  auto c = g.add(g.mul(f, prev.c), g.mul(i, cand));
  auto h = g.mul(o, g.tanh(c));
  return {h, c};
}

}  // namespace

LstmWeights make_lstm(const std::string& name, std::size_t input_size, std::size_t cell_size, double forget_bias,
                      double init_range, Rng& rng) {
  LstmWeights w;
  w.wx = Parameter(name + ".wx", uniform_tensor(input_size, 4 * cell_size, init_range, rng));
  w.wh = Parameter(name + ".wh", uniform_tensor(cell_size, 4 * cell_size, init_range, rng));
  Tensor bias({1, 4 * cell_size});
  for (std::size_t k = cell_size; k < 2 * cell_size; ++k) bias[k] = forget_bias;
  w.b = Parameter(name + ".b", std::move(bias));
  return w;
}

LstmState lstm_cell(Graph& g, Var x, LstmState prev, LstmWeights& w) { return step(g, x, prev, w); }

LstmState lstm_cell(Graph& g, Var x, LstmState prev, const LstmWeights& w) { return step(g, x, prev, w); }

std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h, const Tensor& c, const LstmWeights& w) {
  Graph g;
  auto out = lstm_cell(g, g.constant(x, "x"), {g.constant(h, "h"), g.constant(c, "c")}, w);
  return {g.value(out.h), g.value(out.c)};
}

}  // namespace colorref::nn
