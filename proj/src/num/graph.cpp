// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/graph.hpp"

#include "xlt/error.hpp"

namespace xlt::num {

Var Graph::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad && grad_enabled_;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::leaf_ref(const Tensor& value, bool requires_grad) {
  Node node;
  node.external = &value;
  node.requires_grad = requires_grad && grad_enabled_;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_) {
    for (const Var& in : inputs) {
      if (in.graph_ != this) throw ContractError("op inputs belong to a different graph");
      needs = needs || nodes_[in.id_].requires_grad;
    }
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = needs;
  if (needs) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Graph::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

Tensor& Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor::zeros_like(value(id));
    n.has_grad = true;
  }
  return n.grad;
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (n.has_grad) return n.grad;
  return Tensor::zeros_like(value(v.id()));
}

void Graph::backward(Var loss) {
  if (loss.graph_ != this) throw ContractError("backward: loss belongs to a different graph");
  if (value(loss.id_).numel() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " + shape_str(value(loss.id_).shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  if (!nodes_[loss.id_].requires_grad) return;
  grad_buffer(loss.id_).fill(1.0);
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.has_grad && n.backward) n.backward(*this, i);
  }
}

}  // namespace xlt::num
