// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "xlt/num/tensor.hpp"

namespace xlt::num {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; only valid while its graph lives.
class Var {
 public:
  Var() = default;

  Graph& graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

/// Append-only record of primitive ops. Nodes are created in topological
/// order, so backward is a single reverse sweep that visits every node once.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Leaf that owns its value.
  Var leaf(Tensor value, bool requires_grad = false);
  /// Leaf that refers to an external tensor, which must outlive the graph.
  Var leaf_ref(const Tensor& value, bool requires_grad);

  /// Used by op implementations. The node requires grad iff any input does;
  /// otherwise `fn` is dropped.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);

  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }

  /// Gradient buffer of node `id`, allocated as zeros on first access.
  Tensor& grad_buffer(std::size_t id);
  /// Gradient w.r.t. `v` from the latest backward pass; zeros if `v` is not
  /// on a path to the loss.
  Tensor grad(Var v) const;

  /// Reverse-mode sweep from a one-element loss. Recomputes all gradients
  /// from scratch on every call.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool grad_enabled_;
};

inline const Tensor& Var::value() const { return graph_->value(id_); }

}  // namespace xlt::num
