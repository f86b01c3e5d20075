// Copyright 2026 The simulmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace simulmt::models {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Weights = std::map<std::string, Mat>;

/// Handle to a node of a Graph.
struct Var {
  int id = -1;
};

/// Reverse-mode differentiation tape over row-major matrices. Nodes are
/// appended in evaluation order; backward() walks them in reverse and adds
/// parameter gradients into the sink passed at construction.
class Graph {
 public:
  /// `weights` must outlive the graph. `gradients` may be null for
  /// forward-only use.
  explicit Graph(const Weights& weights, Weights* gradients = nullptr);

  const Mat& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }

  Var input(Mat value);
  /// Named weight; repeated calls return the same node.
  Var param(const std::string& name);

  /// Rows of `table` selected by `ids`.
  Var gather(Var table, const std::vector<int>& ids);
  /// First `count` rows of `table`.
  Var head_rows(Var table, std::size_t count);
  Var add(Var a, Var b);
  /// Adds the 1 x cols row vector `bias` to every row of `x`.
  Var add_bias(Var x, Var bias);
  Var matmul(Var a, Var b);
  Var relu(Var x);
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);

  /// Multi-head scaled dot-product attention. Query row i attends to key
  /// rows [0, limits[i]) only; masked keys never enter the computation.
  Var attention(Var q, Var k, Var v, std::size_t heads, const std::vector<std::size_t>& limits);

  /// Grid of (rows x cols) cells stored row-major as a (rows*cols) x C
  /// matrix: cell (i, j) = row_part[i] + col_part[j].
  Var grid(Var row_part, Var col_part);
  /// Convolution of odd width w = 2h + 1 over the grid, restricted to target
  /// offsets [-h, 0] and source offsets [-h, h]; positive source offsets are
  /// dropped when `source_causal`. `kernel` stacks the (h + 1) * w taps of
  /// size C x C in order (di + h) * w + (dj + h).
  Var masked_conv(Var grid, std::size_t rows, std::size_t cols, Var kernel, std::size_t width,
                  bool source_causal);
  /// Row i of the result is the column-wise max over grid cells (i, j) with
  /// j < limits[i].
  Var row_max_pool(Var grid, std::size_t rows, std::size_t cols, const std::vector<std::size_t>& limits);

  /// Summed negative log-likelihood of `targets` under row-wise softmax of
  /// `logits`; a 1 x 1 node.
  Var cross_entropy(Var logits, const std::vector<int>& targets);

  /// Seeds d(loss)/d(loss) = 1 and propagates.
  void backward(Var loss);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;
    const std::string* param = nullptr;
  };

  Var push(Mat value, std::function<void()> back = {});
  Mat& grad(int id);

  const Weights& weights_;
  Weights* gradients_;
  std::vector<Node> nodes_;
  std::map<std::string, int> param_ids_;
};

}  // namespace simulmt::models
