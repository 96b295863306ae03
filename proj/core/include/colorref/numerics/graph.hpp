#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "colorref/numerics/tensor.hpp"

namespace colorref::nn {

/// A trainable tensor together with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad = Tensor(value.shape()); }
};

/// Handle to a node inside one Graph.
struct Var {
  std::size_t id = 0;
  friend bool operator==(Var, Var) = default;
};

enum class Op {
  kInput,
  kConstant,
  kParameter,
  kMatMul,
  kAdd,
  kMul,
  kScale,
  kTanh,
  kSigmoid,
  kRelu,
  kSoftmax,
  kLogSoftmax,
  kConcat,
  kSlice,
  kDropout,
  kGather,
  kNll,
  kSum,
};

const char* op_name(Op op);

/// Reverse-mode autodiff tape over rank-2 tensors.
///
/// Nodes are evaluated eagerly as they are added, so node order is a
/// topological order by construction. `forward()` rebinds named inputs and
/// replays every node in that order; dropout masks are fixed when the node is
/// created, so a replay with identical inputs is bit-identical.
///
/// Shape errors throw ShapeError naming the node. Any non-finite value throws
/// NumericError naming the node.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  /// Named placeholder; its current binding is `value`.
  Var input(std::string name, Tensor value);
  Var constant(Tensor value, std::string name = {});
  /// The same Parameter always maps to the same node within a graph. The
  /// parameter must outlive the graph and keep its shape.
  Var param(Parameter& p);
  /// Read-only binding: the value is used in place but no gradient is
  /// written back. Used for inference on const models.
  Var param(const Parameter& p);

  Var matmul(Var a, Var b);
  /// Elementwise sum. `b` may be a 1xN row broadcast over the rows of `a`.
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  /// Row-wise softmax / log-softmax.
  Var softmax(Var a);
  Var log_softmax(Var a);
  /// Column-wise concatenation; all parts share the row count.
  Var concat(std::span<const Var> parts);
  Var concat(std::initializer_list<Var> parts) { return concat(std::span<const Var>(parts.begin(), parts.size())); }
  /// Columns [begin, end).
  Var slice(Var a, std::size_t begin, std::size_t end);
  /// Elementwise product with a fixed mask (see dropout_mask()).
  Var dropout(Var a, Tensor mask);
  /// Row lookup: result row i is table row ids[i].
  Var gather(Var table, std::vector<int> ids);
  /// Sum over rows of -logprobs(i, targets[i]); rows with target < 0 are ignored.
  Var nll(Var logprobs, std::vector<int> targets);
  /// Sum of all entries, as a 1x1 tensor.
  Var sum(Var a);

  Var cross_entropy(Var logits, std::vector<int> targets) { return nll(log_softmax(logits), std::move(targets)); }

  void set_label(Var v, std::string label);
  void mark_output(std::string name, Var v);

  const Tensor& value(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  Op op(Var v) const { return nodes_.at(v.id).op; }
  std::span<const Var> inputs_of(Var v) const { return nodes_.at(v.id).inputs; }

  /// Rebinds every input placeholder from `inputs`, replays the graph, and
  /// returns the values of all marked outputs.
  std::map<std::string, Tensor> forward(const std::map<std::string, Tensor>& inputs);

  /// Backpropagates from a 1x1 loss node. Parameter gradients are added into
  /// Parameter::grad (every parameter node in the graph gets at least a zero
  /// gradient). Node gradients are available through grad() afterwards.
  void backward(Var loss);
  /// Zero for nodes that do not influence the loss.
  Tensor grad(Var v) const;

  /// Gradients of every parameter referenced by this graph, keyed by name.
  std::map<std::string, Tensor> parameter_gradients() const;

 private:
  struct Node {
    Op op;
    std::vector<Var> inputs;
    Tensor value;
    Parameter* param = nullptr;  // trainable binding
    const Parameter* param_ref = nullptr;
    std::string label;
    // op-specific attributes
    double factor = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<int> ids;
    Tensor aux;
    bool needs_grad = false;
  };

  Var push(Node node);
  void compute(std::size_t index);
  std::string describe(std::size_t index) const;
  const Tensor& val(std::size_t index) const;

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::map<const Parameter*, std::size_t> param_nodes_;
  std::map<std::string, std::size_t> input_nodes_;
  std::map<std::string, Var> outputs_;
};

}  // namespace colorref::nn
