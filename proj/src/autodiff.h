// src/autodiff.h

// Copyright 2026 The labelseq Authors
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

// Minimal reverse-mode differentiation over dense matrices, enough for a
// one-layer encoder-decoder. Internal to the tiny-neural backend.
#ifndef LABELSEQ_SRC_AUTODIFF_H_
#define LABELSEQ_SRC_AUTODIFF_H_

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace labelseq::nn {

using Mat = Eigen::MatrixXd;

class Tape {
 public:
  using Var = size_t;

  // With record == false no backward closures are kept (scoring only).
  explicit Tape(bool record) : record_(record) {}

  // A parameter read in place; gradients accumulate into *grad (may be null
  // when not recording).
  Var param(const Mat &value, Mat *grad);
  Var constant(Mat value);

  const Mat &value(Var v) const;

  Var gather_rows(Var table, const std::vector<int> &ids);
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  // broadcast a 1 x m row over a's rows
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var scale(Var a, double s);
  Var tanh(Var a);
  // Row-wise softmax; with `causal`, entry (i, j > i) is excluded.
  Var softmax_rows(Var a, bool causal);
  // Row-wise log-softmax over the columns not flagged in `excluded`
  // (excluded columns hold -inf).
  Var log_softmax_rows(Var a, const std::vector<bool> &excluded);
  // Sum of a(i, cols[i]) over rows with cols[i] >= 0, as a 1 x 1 value.
  Var pick_sum(Var a, const std::vector<int> &cols);

  // Seeds d(out)/d(out) = seed and runs the recorded closures in reverse.
  void backward(Var out, double seed = 1.0);

 private:
  struct Node {
    const Mat *external = nullptr;
    Mat own;
    Mat grad;
    Mat *sink = nullptr;
    std::function<void()> back;
  };

  Var push(Mat value);
  Mat &grad(Var v);

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace labelseq::nn

#endif  // LABELSEQ_SRC_AUTODIFF_H_
