// src/autodiff.cc

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

#include "autodiff.h"

#include <cmath>
#include <limits>

namespace labelseq::nn {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Tape::Var Tape::push(Mat value) {
  Node n;
  n.own = std::move(value);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

Tape::Var Tape::param(const Mat &value, Mat *grad_sink) {
  Node n;
  n.external = &value;
  n.sink = grad_sink;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

Tape::Var Tape::constant(Mat value) { return push(std::move(value)); }

const Mat &Tape::value(Var v) const {
  const Node &n = nodes_[v];
  return n.external ? *n.external : n.own;
}

Mat &Tape::grad(Var v) {
  Node &n = nodes_[v];
  if (n.sink) return *n.sink;
  if (n.grad.size() == 0) n.grad = Mat::Zero(value(v).rows(), value(v).cols());
  return n.grad;
}

Tape::Var Tape::gather_rows(Var table, const std::vector<int> &ids) {
  const Mat &t = value(table);
  Mat out(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
  Var r = push(std::move(out));
  if (record_)
    nodes_[r].back = [this, table, r, ids] {
      Mat &g = grad(table);
      const Mat &gr = grad(r);
      for (size_t i = 0; i < ids.size(); ++i) g.row(ids[i]) += gr.row(static_cast<Eigen::Index>(i));
    };
  return r;
}

Tape::Var Tape::add(Var a, Var b) {
  Var r = push(value(a) + value(b));
  if (record_)
    nodes_[r].back = [this, a, b, r] {
      const Mat gr = grad(r);
      grad(a) += gr;
      grad(b) += gr;
    };
  return r;
}

Tape::Var Tape::add_row(Var a, Var row) {
  Mat out = value(a);
  out.rowwise() += value(row).row(0);
  Var r = push(std::move(out));
  if (record_)
    nodes_[r].back = [this, a, row, r] {
      const Mat gr = grad(r);
      grad(a) += gr;
      grad(row) += gr.colwise().sum();
    };
  return r;
}

Tape::Var Tape::matmul(Var a, Var b) {
  Var r = push(value(a) * value(b));
  if (record_)
    nodes_[r].back = [this, a, b, r] {
      const Mat gr = grad(r);
      grad(a).noalias() += gr * value(b).transpose();
      grad(b).noalias() += value(a).transpose() * gr;
    };
  return r;
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  Var r = push(value(a) * value(b).transpose());
  if (record_)
    nodes_[r].back = [this, a, b, r] {
      const Mat gr = grad(r);
      grad(a).noalias() += gr * value(b);
      grad(b).noalias() += gr.transpose() * value(a);
    };
  return r;
}

Tape::Var Tape::scale(Var a, double s) {
  Var r = push(value(a) * s);
  if (record_)
    nodes_[r].back = [this, a, r, s] { grad(a) += grad(r) * s; };
  return r;
}

Tape::Var Tape::tanh(Var a) {
  Var r = push(value(a).array().tanh().matrix());
  if (record_)
    nodes_[r].back = [this, a, r] {
      const Mat &y = value(r);
      grad(a).array() += grad(r).array() * (1.0 - y.array().square());
    };
  return r;
}

Tape::Var Tape::softmax_rows(Var a, bool causal) {
  const Mat &x = value(a);
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::Index n = causal ? std::min<Eigen::Index>(i + 1, x.cols()) : x.cols();
    const double hi = x.row(i).head(n).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) sum += out(i, j) = std::exp(x(i, j) - hi);
    out.row(i).head(n) /= sum;
  }
  Var r = push(std::move(out));
  if (record_)
    nodes_[r].back = [this, a, r] {
      const Mat &y = value(r);
      const Mat gr = grad(r);
      Mat &ga = grad(a);
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double dot = y.row(i).dot(gr.row(i));
        ga.row(i).array() += y.row(i).array() * (gr.row(i).array() - dot);
      }
    };
  return r;
}

Tape::Var Tape::log_softmax_rows(Var a, const std::vector<bool> &excluded) {
  const Mat &x = value(a);
  Mat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double hi = kNegInf;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!excluded[static_cast<size_t>(j)]) hi = std::max(hi, x(i, j));
    double sum = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!excluded[static_cast<size_t>(j)]) sum += std::exp(x(i, j) - hi);
    const double lse = hi + std::log(sum);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out(i, j) = excluded[static_cast<size_t>(j)] ? kNegInf : x(i, j) - lse;
  }
  Var r = push(std::move(out));
  if (record_)
    nodes_[r].back = [this, a, r, excluded] {
      const Mat &y = value(r);
      const Mat gr = grad(r);
      Mat &ga = grad(a);
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        double gsum = 0.0;
        for (Eigen::Index j = 0; j < y.cols(); ++j)
          if (!excluded[static_cast<size_t>(j)]) gsum += gr(i, j);
        for (Eigen::Index j = 0; j < y.cols(); ++j)
          if (!excluded[static_cast<size_t>(j)])
            ga(i, j) += gr(i, j) - std::exp(y(i, j)) * gsum;
      }
    };
  return r;
}

Tape::Var Tape::pick_sum(Var a, const std::vector<int> &cols) {
  const Mat &x = value(a);
  double s = 0.0;
  for (size_t i = 0; i < cols.size(); ++i)
    if (cols[i] >= 0) s += x(static_cast<Eigen::Index>(i), cols[i]);
  Mat out(1, 1);
  out(0, 0) = s;
  Var r = push(std::move(out));
  if (record_)
    nodes_[r].back = [this, a, r, cols] {
      const double g = grad(r)(0, 0);
      Mat &ga = grad(a);
      for (size_t i = 0; i < cols.size(); ++i)
        if (cols[i] >= 0) ga(static_cast<Eigen::Index>(i), cols[i]) += g;
    };
  return r;
}

void Tape::backward(Var out, double seed) {
  grad(out)(0, 0) += seed;
  for (size_t i = out + 1; i-- > 0;)
    if (nodes_[i].back) nodes_[i].back();
}

}  // namespace labelseq::nn
