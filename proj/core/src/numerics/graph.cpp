#include "colorref/numerics/graph.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "colorref/error.hpp"

namespace colorref::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

MapC as_matrix(const Tensor& t) { return MapC(t.data().data(), t.rows(), t.cols()); }
Map as_matrix(Tensor& t) { return Map(t.data().data(), t.rows(), t.cols()); }

Tensor& accumulate_into(std::vector<Tensor>& grads, std::size_t index, const Shape& shape) {
  auto& g = grads[index];
  if (g.empty()) g = Tensor(shape);
  return g;
}

void softmax_rows(const Tensor& in, Tensor& out) {
  out = Tensor(in.shape());
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto x = in.row_span(r);
    auto y = out.row_span(r);
    const double m = *std::max_element(x.begin(), x.end());
    double z = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      y[c] = std::exp(x[c] - m);
      z += y[c];
    }
    for (auto& v : y) v /= z;
  }
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kConstant: return "constant";
    case Op::kParameter: return "parameter";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kRelu: return "relu";
    case Op::kSoftmax: return "softmax";
    case Op::kLogSoftmax: return "log_softmax";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kDropout: return "dropout";
    case Op::kGather: return "gather";
    case Op::kNll: return "nll";
    case Op::kSum: return "sum";
  }
  return "?";
}

std::string Graph::describe(std::size_t index) const {
  const auto& n = nodes_[index];
  std::string s = "#" + std::to_string(index) + " " + op_name(n.op);
  if (!n.label.empty()) s += " (" + n.label + ")";
  return s;
}

const Tensor& Graph::val(std::size_t index) const {
  const auto& n = nodes_[index];
  return n.param_ref ? n.param_ref->value : n.value;
}

const Tensor& Graph::value(Var v) const {
  if (v.id >= nodes_.size()) throw ContractError("Graph::value: unknown node");
  return val(v.id);
}

Var Graph::push(Node node) {
  for (auto in : node.inputs) {
    if (in.id >= nodes_.size()) throw ContractError("Graph: input node does not belong to this graph");
  }
  switch (node.op) {
    case Op::kInput: node.needs_grad = true; break;
    case Op::kConstant: node.needs_grad = false; break;
    case Op::kParameter: node.needs_grad = node.param != nullptr; break;
    default:
      node.needs_grad = std::any_of(node.inputs.begin(), node.inputs.end(),
                                    [&](Var v) { return nodes_[v.id].needs_grad; });
  }
  nodes_.push_back(std::move(node));
  const auto index = nodes_.size() - 1;
  try {
    compute(index);
  } catch (...) {
    nodes_.pop_back();
    throw;
  }
  return Var{index};
}

Var Graph::input(std::string name, Tensor value) {
  if (input_nodes_.count(name)) throw ContractError("Graph: duplicate input name '" + name + "'");
  Node n{Op::kInput, {}, std::move(value)};
  n.label = name;
  auto v = push(std::move(n));
  input_nodes_[name] = v.id;
  return v;
}

Var Graph::constant(Tensor value, std::string name) {
  Node n{Op::kConstant, {}, std::move(value)};
  n.label = std::move(name);
  return push(std::move(n));
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
    if (!nodes_[it->second].param) throw ContractError("Graph::param: '" + p.name + "' already bound read-only");
    return Var{it->second};
  }
  Node n{Op::kParameter, {}, {}};
  n.param = &p;
  n.param_ref = &p;
  n.label = p.name;
  auto v = push(std::move(n));
  param_nodes_[&p] = v.id;
  return v;
}

Var Graph::param(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  Node n{Op::kParameter, {}, {}};
  n.param_ref = &p;
  n.label = p.name;
  auto v = push(std::move(n));
  param_nodes_[&p] = v.id;
  return v;
}

Var Graph::matmul(Var a, Var b) { return push(Node{Op::kMatMul, {a, b}, {}}); }
Var Graph::add(Var a, Var b) { return push(Node{Op::kAdd, {a, b}, {}}); }
Var Graph::mul(Var a, Var b) { return push(Node{Op::kMul, {a, b}, {}}); }
Var Graph::tanh(Var a) { return push(Node{Op::kTanh, {a}, {}}); }
Var Graph::sigmoid(Var a) { return push(Node{Op::kSigmoid, {a}, {}}); }
Var Graph::relu(Var a) { return push(Node{Op::kRelu, {a}, {}}); }
Var Graph::softmax(Var a) { return push(Node{Op::kSoftmax, {a}, {}}); }
Var Graph::log_softmax(Var a) { return push(Node{Op::kLogSoftmax, {a}, {}}); }
Var Graph::sum(Var a) { return push(Node{Op::kSum, {a}, {}}); }

Var Graph::scale(Var a, double factor) {
  Node n{Op::kScale, {a}, {}};
  n.factor = factor;
  return push(std::move(n));
}

Var Graph::concat(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("Graph::concat: no parts");
  return push(Node{Op::kConcat, std::vector<Var>(parts.begin(), parts.end()), {}});
}

Var Graph::slice(Var a, std::size_t begin, std::size_t end) {
  Node n{Op::kSlice, {a}, {}};
  n.begin = begin;
  n.end = end;
  return push(std::move(n));
}

Var Graph::dropout(Var a, Tensor mask) {
  Node n{Op::kDropout, {a}, {}};
  n.aux = std::move(mask);
  return push(std::move(n));
}

Var Graph::gather(Var table, std::vector<int> ids) {
  Node n{Op::kGather, {table}, {}};
  n.ids = std::move(ids);
  return push(std::move(n));
}

Var Graph::nll(Var logprobs, std::vector<int> targets) {
  Node n{Op::kNll, {logprobs}, {}};
  n.ids = std::move(targets);
  return push(std::move(n));
}

void Graph::set_label(Var v, std::string label) { nodes_.at(v.id).label = std::move(label); }

void Graph::mark_output(std::string name, Var v) {
  if (v.id >= nodes_.size()) throw ContractError("Graph::mark_output: unknown node");
  outputs_[std::move(name)] = v;
}

void Graph::compute(std::size_t index) {
  auto& n = nodes_[index];
  auto in = [&](std::size_t k) -> const Tensor& { return val(n.inputs[k].id); };
  auto shape_error = [&](const std::string& detail) { return ShapeError(describe(index), detail); };
  auto require_rank2 = [&](const Tensor& t) {
    if (t.rank() != 2) throw shape_error("expected a rank-2 tensor, got " + to_string(t.shape()));
  };

  switch (n.op) {
    case Op::kInput:
    case Op::kConstant:
      require_rank2(n.value);
      break;
    case Op::kParameter:
      require_rank2(n.param_ref->value);
      break;
    case Op::kMatMul: {
      const auto& a = in(0);
      const auto& b = in(1);
      if (a.cols() != b.rows()) throw shape_error(to_string(a.shape()) + " x " + to_string(b.shape()));
      n.value = Tensor({a.rows(), b.cols()});
      as_matrix(n.value).noalias() = as_matrix(a) * as_matrix(b);
      break;
    }
    case Op::kAdd: {
      const auto& a = in(0);
      const auto& b = in(1);
      n.value = a;
      if (a.shape() == b.shape()) {
        for (std::size_t i = 0; i < a.size(); ++i) n.value[i] += b[i];
      } else if (b.rows() == 1 && b.cols() == a.cols()) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
          auto row = n.value.row_span(r);
          for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
        }
      } else {
        throw shape_error(to_string(a.shape()) + " + " + to_string(b.shape()));
      }
      break;
    }
    case Op::kMul: {
      const auto& a = in(0);
      const auto& b = in(1);
      if (a.shape() != b.shape()) throw shape_error(to_string(a.shape()) + " * " + to_string(b.shape()));
      n.value = a;
      for (std::size_t i = 0; i < a.size(); ++i) n.value[i] *= b[i];
      break;
    }
    case Op::kScale:
      n.value = in(0);
      for (auto& v : n.value.vec()) v *= n.factor;
      break;
    case Op::kTanh:
      n.value = in(0);
      for (auto& v : n.value.vec()) v = std::tanh(v);
      break;
    case Op::kSigmoid:
      n.value = in(0);
      for (auto& v : n.value.vec()) v = 1.0 / (1.0 + std::exp(-v));
      break;
    case Op::kRelu:
      n.value = in(0);
      for (auto& v : n.value.vec()) v = v > 0.0 ? v : 0.0;
      break;
    case Op::kSoftmax:
      softmax_rows(in(0), n.value);
      break;
    case Op::kLogSoftmax: {
      const auto& a = in(0);
      n.value = a;
      for (std::size_t r = 0; r < a.rows(); ++r) {
        auto x = n.value.row_span(r);
        const double m = *std::max_element(x.begin(), x.end());
        double z = 0.0;
        for (double v : x) z += std::exp(v - m);
        const double lse = m + std::log(z);
        for (auto& v : x) v -= lse;
      }
      break;
    }
    case Op::kConcat: {
      const auto rows = in(0).rows();
      std::size_t cols = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (in(k).rows() != rows) {
          throw shape_error("part " + std::to_string(k) + " has shape " + to_string(in(k).shape()) + ", expected " +
                            std::to_string(rows) + " rows");
        }
        cols += in(k).cols();
      }
      n.value = Tensor({rows, cols});
      for (std::size_t r = 0; r < rows; ++r) {
        auto out = n.value.row_span(r);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          auto src = in(k).row_span(r);
          std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
          offset += src.size();
        }
      }
      break;
    }
    case Op::kSlice: {
      const auto& a = in(0);
      if (n.begin >= n.end || n.end > a.cols()) {
        throw shape_error("slice [" + std::to_string(n.begin) + "," + std::to_string(n.end) + ") of " +
                          to_string(a.shape()));
      }
      n.value = Tensor({a.rows(), n.end - n.begin});
      for (std::size_t r = 0; r < a.rows(); ++r) {
        auto src = a.row_span(r).subspan(n.begin, n.end - n.begin);
        std::copy(src.begin(), src.end(), n.value.row_span(r).begin());
      }
      break;
    }
    case Op::kDropout: {
      const auto& a = in(0);
      if (a.shape() != n.aux.shape()) throw shape_error("mask " + to_string(n.aux.shape()) + " vs " + to_string(a.shape()));
      n.value = a;
      for (std::size_t i = 0; i < a.size(); ++i) n.value[i] *= n.aux[i];
      break;
    }
    case Op::kGather: {
      const auto& table = in(0);
      if (n.ids.empty()) throw shape_error("gather with no ids");
      n.value = Tensor({n.ids.size(), table.cols()});
      for (std::size_t r = 0; r < n.ids.size(); ++r) {
        const int id = n.ids[r];
        if (id < 0 || static_cast<std::size_t>(id) >= table.rows()) {
          throw shape_error("row id " + std::to_string(id) + " outside table " + to_string(table.shape()));
        }
        auto src = table.row_span(static_cast<std::size_t>(id));
        std::copy(src.begin(), src.end(), n.value.row_span(r).begin());
      }
      break;
    }
    case Op::kNll: {
      const auto& lp = in(0);
      if (n.ids.size() != lp.rows()) {
        throw shape_error(std::to_string(n.ids.size()) + " targets for " + to_string(lp.shape()));
      }
      double total = 0.0;
      for (std::size_t r = 0; r < lp.rows(); ++r) {
        const int t = n.ids[r];
        if (t < 0) continue;
        if (static_cast<std::size_t>(t) >= lp.cols()) throw shape_error("target id " + std::to_string(t) + " out of range");
        total -= lp(r, static_cast<std::size_t>(t));
      }
      n.value = Tensor::scalar(total);
      break;
    }
    case Op::kSum: {
      double total = 0.0;
      for (double v : in(0).vec()) total += v;
      n.value = Tensor::scalar(total);
      break;
    }
  }

  if (!val(index).all_finite()) throw NumericError("non-finite value at node '" + describe(index) + "'");
}

std::map<std::string, Tensor> Graph::forward(const std::map<std::string, Tensor>& inputs) {
  for (const auto& [name, index] : input_nodes_) {
    auto it = inputs.find(name);
    if (it == inputs.end()) throw ContractError("Graph::forward: input '" + name + "' is not bound");
    if (it->second.shape() != nodes_[index].value.shape()) {
      throw ShapeError(describe(index), "bound " + to_string(it->second.shape()) + ", declared " +
                                            to_string(nodes_[index].value.shape()));
    }
    nodes_[index].value = it->second;
  }
  for (const auto& [name, _] : inputs) {
    if (!input_nodes_.count(name)) throw ContractError("Graph::forward: no input named '" + name + "'");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) compute(i);
  grads_.clear();

  std::map<std::string, Tensor> out;
  for (const auto& [name, v] : outputs_) out[name] = val(v.id);
  return out;
}

void Graph::backward(Var loss) {
  if (loss.id >= nodes_.size()) throw ContractError("Graph::backward: unknown loss node");
  const auto& lv = val(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("Graph::backward: loss node " + describe(loss.id) + " is not scalar (" + to_string(lv.shape()) +
                        ")");
  }

  grads_.assign(nodes_.size(), Tensor{});
  grads_[loss.id] = Tensor::scalar(1.0);

  for (std::size_t k = loss.id + 1; k-- > 0;) {
    auto& n = nodes_[k];
    if (grads_[k].empty() || !n.needs_grad) continue;
    const Tensor& g = grads_[k];
    const Tensor& y = val(k);
    auto in = [&](std::size_t j) -> const Tensor& { return val(n.inputs[j].id); };
    auto need = [&](std::size_t j) { return nodes_[n.inputs[j].id].needs_grad; };
    auto acc = [&](std::size_t j) -> Tensor& { return accumulate_into(grads_, n.inputs[j].id, in(j).shape()); };

    switch (n.op) {
      case Op::kInput:
      case Op::kConstant:
      case Op::kParameter:
        break;
      case Op::kMatMul: {
        if (need(0)) as_matrix(acc(0)).noalias() += as_matrix(g) * as_matrix(in(1)).transpose();
        if (need(1)) as_matrix(acc(1)).noalias() += as_matrix(in(0)).transpose() * as_matrix(g);
        break;
      }
      case Op::kAdd: {
        if (need(0)) {
          auto& ga = acc(0);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        }
        if (!need(1)) break;
        auto& gb = acc(1);
        if (in(1).shape() == g.shape()) {
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
        } else {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            auto row = g.row_span(r);
            for (std::size_t c = 0; c < row.size(); ++c) gb[c] += row[c];
          }
        }
        break;
      }
      case Op::kMul: {
        const auto& a = in(0);
        const auto& b = in(1);
        if (need(0)) {
          auto& ga = acc(0);
          for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
        }
        if (need(1)) {
          auto& gb = acc(1);
          for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
        }
        break;
      }
      case Op::kScale: {
        auto& ga = acc(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.factor;
        break;
      }
      case Op::kTanh: {
        auto& ga = acc(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kSigmoid: {
        auto& ga = acc(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kRelu: {
        const auto& a = in(0);
        auto& ga = acc(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += a[i] > 0.0 ? g[i] : 0.0;
        break;
      }
      case Op::kSoftmax: {
        auto& ga = acc(0);
        for (std::size_t r = 0; r < y.rows(); ++r) {
          auto yr = y.row_span(r);
          auto gr = g.row_span(r);
          const double s = dot(yr, gr);
          auto out = ga.row_span(r);
          for (std::size_t c = 0; c < yr.size(); ++c) out[c] += yr[c] * (gr[c] - s);
        }
        break;
      }
      case Op::kLogSoftmax: {
        auto& ga = acc(0);
        for (std::size_t r = 0; r < y.rows(); ++r) {
          auto yr = y.row_span(r);
          auto gr = g.row_span(r);
          double s = 0.0;
          for (double v : gr) s += v;
          auto out = ga.row_span(r);
          for (std::size_t c = 0; c < yr.size(); ++c) out[c] += gr[c] - std::exp(yr[c]) * s;
        }
        break;
      }
      case Op::kConcat: {
        std::size_t offset = 0;
        for (std::size_t j = 0; j < n.inputs.size(); ++j) {
          const auto width = in(j).cols();
          if (!need(j)) {
            offset += width;
            continue;
          }
          auto& gj = acc(j);
          for (std::size_t r = 0; r < g.rows(); ++r) {
            auto src = g.row_span(r).subspan(offset, width);
            auto dst = gj.row_span(r);
            for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
          }
          offset += width;
        }
        break;
      }
      case Op::kSlice: {
        auto& ga = acc(0);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto src = g.row_span(r);
          auto dst = ga.row_span(r).subspan(n.begin, n.end - n.begin);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::kDropout: {
        auto& ga = acc(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.aux[i];
        break;
      }
      case Op::kGather: {
        auto& ga = acc(0);
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          auto src = g.row_span(r);
          auto dst = ga.row_span(static_cast<std::size_t>(n.ids[r]));
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::kNll: {
        auto& ga = acc(0);
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          if (n.ids[r] >= 0) ga(r, static_cast<std::size_t>(n.ids[r])) -= g[0];
        }
        break;
      }
      case Op::kSum: {
        auto& ga = acc(0);
        for (auto& v : ga.vec()) v += g[0];
        break;
      }
    }
  }

  for (const auto& [p, index] : param_nodes_) {
    auto* param = nodes_[index].param;
    if (!param) continue;
    if (param->grad.shape() != param->value.shape()) param->grad = Tensor(param->value.shape());
    const auto& g = grads_[index];
    if (g.empty()) continue;
    if (!g.all_finite()) throw NumericError("non-finite gradient for parameter '" + param->name + "'");
    for (std::size_t i = 0; i < g.size(); ++i) param->grad[i] += g[i];
  }
}

Tensor Graph::grad(Var v) const {
  if (v.id >= nodes_.size()) throw ContractError("Graph::grad: unknown node");
  if (grads_.empty()) throw ContractError("Graph::grad: backward() has not run");
  const auto& g = grads_[v.id];
  return g.empty() ? Tensor(val(v.id).shape()) : g;
}

std::map<std::string, Tensor> Graph::parameter_gradients() const {
  std::map<std::string, Tensor> out;
  for (const auto& [p, index] : param_nodes_) {
    if (!nodes_[index].param) continue;
    const auto& param = *nodes_[index].param;
    out[param.name] = param.grad.shape() == param.value.shape() ? param.grad : Tensor(param.value.shape());
  }
  return out;
}

}  // namespace colorref::nn
