// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "xlt/num/graph.hpp"

// Differentiable primitives. Matrices are rank-2 row-major; rank-1 tensors act
// as row vectors where broadcasting is involved.
namespace xlt::num {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// a[m,n] + row[n], broadcast over rows.
Var add_row(Var a, Var row);
Var matmul(Var a, Var b);
/// x[m,k] · w[k,n] + b[n].
Var linear(Var x, Var w, Var b);

Var sum(Var a);
Var mean(Var a);

Var relu(Var a);
Var gelu(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);

Var softmax_rows(Var a);
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);

/// Rows of `table` selected by `ids`, shape [ids.size(), cols].
Var embedding(Var table, std::span<const std::int32_t> ids);
Var gather_rows(Var x, std::span<const std::size_t> rows);
/// Column `c` of a matrix as a rank-1 tensor.
Var column(Var x, std::size_t c);

struct AttentionLayout {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::size_t heads = 1;
  /// batch*seq_len flags; 0 marks a padding key that no query may attend to.
  std::span<const std::uint8_t> key_mask;
  /// Only position 0 of each sequence issues a query; output is [batch, d].
  bool first_query_only = false;
};

/// Multi-head scaled dot-product self-attention over a fused projection
/// qkv[batch*seq_len, 3d] laid out as [Q | K | V].
Var self_attention(Var qkv, const AttentionLayout& layout);

}  // namespace xlt::num
