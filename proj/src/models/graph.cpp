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

#include "simulmt/models/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simulmt/error.hpp"

namespace simulmt::models {

Graph::Graph(const Weights& weights, Weights* gradients) : weights_(weights), gradients_(gradients) {}

Var Graph::push(Mat value, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Mat(), std::move(back), nullptr});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Mat& Graph::grad(int id) {
  auto& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols()) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

Var Graph::input(Mat value) { return push(std::move(value)); }

Var Graph::param(const std::string& name) {
  if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var{it->second};
  auto w = weights_.find(name);
  if (w == weights_.end()) throw UsageError("model has no weight named '" + name + "'");
  Var v = push(w->second);
  nodes_.back().param = &w->first;
  param_ids_[name] = v.id;
  return v;
}

Var Graph::gather(Var table, const std::vector<int>& ids) {
  const Mat& t = value(table);
  Mat out(static_cast<Eigen::Index>(ids.size()), t.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= t.rows()) throw UsageError("token id out of vocabulary range");
    out.row(static_cast<Eigen::Index>(r)) = t.row(ids[r]);
  }
  Var v = push(std::move(out));
  nodes_.back().back = [this, table, v, ids] {
    Mat& dt = grad(table.id);
    const Mat& dy = grad(v.id);
    for (std::size_t r = 0; r < ids.size(); ++r) dt.row(ids[r]) += dy.row(static_cast<Eigen::Index>(r));
  };
  return v;
}

Var Graph::head_rows(Var table, std::size_t count) {
  const Mat& t = value(table);
  if (static_cast<Eigen::Index>(count) > t.rows()) {
    throw UsageError("sequence length " + std::to_string(count) + " exceeds the model's " +
                     std::to_string(t.rows()) + " positions");
  }
  Var v = push(t.topRows(static_cast<Eigen::Index>(count)));
  nodes_.back().back = [this, table, v, count] {
    grad(table.id).topRows(static_cast<Eigen::Index>(count)) += grad(v.id);
  };
  return v;
}

Var Graph::add(Var a, Var b) {
  Var v = push(value(a) + value(b));
  nodes_.back().back = [this, a, b, v] {
    grad(a.id) += grad(v.id);
    grad(b.id) += grad(v.id);
  };
  return v;
}

Var Graph::add_bias(Var x, Var bias) {
  Mat out = value(x);
  out.rowwise() += value(bias).row(0);
  Var v = push(std::move(out));
  nodes_.back().back = [this, x, bias, v] {
    grad(x.id) += grad(v.id);
    grad(bias.id).row(0) += grad(v.id).colwise().sum();
  };
  return v;
}

Var Graph::matmul(Var a, Var b) {
  Var v = push(value(a) * value(b));
  nodes_.back().back = [this, a, b, v] {
    const Mat& dy = grad(v.id);
    grad(a.id).noalias() += dy * value(b).transpose();
    grad(b.id).noalias() += value(a).transpose() * dy;
  };
  return v;
}

Var Graph::relu(Var x) {
  Var v = push(value(x).cwiseMax(0.0));
  nodes_.back().back = [this, x, v] {
    grad(x.id).array() += (value(x).array() > 0.0).select(grad(v.id).array(), 0.0);
  };
  return v;
}

Var Graph::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Mat& in = value(x);
  const auto rows = in.rows();
  const double d = static_cast<double>(in.cols());
  Mat xhat(rows, in.cols());
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mu = in.row(r).sum() / d;
    const double var = (in.row(r).array() - mu).square().sum() / d;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Mat out = xhat.array().rowwise() * value(gain).row(0).array();
  out.rowwise() += value(bias).row(0);
  Var v = push(std::move(out));
  nodes_.back().back = [this, x, gain, bias, v, xhat = std::move(xhat), inv_std = std::move(inv_std), d] {
    const Mat& dy = grad(v.id);
    grad(gain.id).row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
    grad(bias.id).row(0) += dy.colwise().sum();
    Mat& dx = grad(x.id);
    const auto g = value(gain).row(0).array();
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      const Eigen::ArrayXd dxhat = (dy.row(r).array() * g).transpose();
      const Eigen::ArrayXd xh = xhat.row(r).array().transpose();
      const double m1 = dxhat.sum() / d;
      const double m2 = (dxhat * xh).sum() / d;
      dx.row(r).array() += ((dxhat - m1 - xh * m2) * inv_std(r)).transpose();
    }
  };
  return v;
}

Var Graph::attention(Var q, Var k, Var v, std::size_t heads, const std::vector<std::size_t>& limits) {
  const Mat& Q = value(q);
  const Mat& K = value(k);
  const Mat& V = value(v);
  const auto m = Q.rows(), n = K.rows(), d = Q.cols();
  if (heads == 0 || d % static_cast<Eigen::Index>(heads) != 0) throw UsageError("attention: bad head count");
  if (static_cast<Eigen::Index>(limits.size()) != m) throw UsageError("attention: one limit per query row");
  const auto dh = d / static_cast<Eigen::Index>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<Mat> probs(heads, Mat::Zero(m, n));
  Mat out = Mat::Zero(m, d);
  for (std::size_t h = 0; h < heads; ++h) {
    const auto off = static_cast<Eigen::Index>(h) * dh;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto L = static_cast<Eigen::Index>(limits[static_cast<std::size_t>(i)]);
      if (L < 1 || L > n) throw UsageError("attention: limit outside [1, keys]");
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < L; ++j) {
        const double s = Q.row(i).segment(off, dh).dot(K.row(j).segment(off, dh)) * scale;
        probs[h](i, j) = s;
        mx = std::max(mx, s);
      }
      double sum = 0.0;
      for (Eigen::Index j = 0; j < L; ++j) {
        probs[h](i, j) = std::exp(probs[h](i, j) - mx);
        sum += probs[h](i, j);
      }
      for (Eigen::Index j = 0; j < L; ++j) {
        probs[h](i, j) /= sum;
        out.row(i).segment(off, dh) += probs[h](i, j) * V.row(j).segment(off, dh);
      }
    }
  }
  Var o = push(std::move(out));
  nodes_.back().back = [this, q, k, v, o, probs = std::move(probs), limits, dh, scale] {
    const Mat& dy = grad(o.id);
    const Mat& Q = value(q);
    const Mat& K = value(k);
    const Mat& V = value(v);
    Mat& dq = grad(q.id);
    Mat& dk = grad(k.id);
    Mat& dv = grad(v.id);
    std::vector<double> dp;
    for (std::size_t h = 0; h < probs.size(); ++h) {
      const auto off = static_cast<Eigen::Index>(h) * dh;
      for (Eigen::Index i = 0; i < dy.rows(); ++i) {
        const auto L = static_cast<Eigen::Index>(limits[static_cast<std::size_t>(i)]);
        const auto dyi = dy.row(i).segment(off, dh);
        dp.assign(static_cast<std::size_t>(L), 0.0);
        double dot = 0.0;
        for (Eigen::Index j = 0; j < L; ++j) {
          const double p = probs[h](i, j);
          dp[static_cast<std::size_t>(j)] = dyi.dot(V.row(j).segment(off, dh));
          dot += p * dp[static_cast<std::size_t>(j)];
          dv.row(j).segment(off, dh) += p * dyi;
        }
        for (Eigen::Index j = 0; j < L; ++j) {
          const double ds = probs[h](i, j) * (dp[static_cast<std::size_t>(j)] - dot) * scale;
          dq.row(i).segment(off, dh) += ds * K.row(j).segment(off, dh);
          dk.row(j).segment(off, dh) += ds * Q.row(i).segment(off, dh);
        }
      }
    }
  };
  return o;
}

Var Graph::grid(Var row_part, Var col_part) {
  const Mat& R = value(row_part);
  const Mat& C = value(col_part);
  if (R.cols() != C.cols()) throw UsageError("grid: channel mismatch");
  const auto m = R.rows(), n = C.rows();
  Mat out(m * n, R.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    out.middleRows(i * n, n) = C;
    out.middleRows(i * n, n).rowwise() += R.row(i);
  }
  Var v = push(std::move(out));
  nodes_.back().back = [this, row_part, col_part, v, m, n] {
    const Mat& dy = grad(v.id);
    Mat& dr = grad(row_part.id);
    Mat& dc = grad(col_part.id);
    for (Eigen::Index i = 0; i < m; ++i) {
      dr.row(i) += dy.middleRows(i * n, n).colwise().sum();
      dc += dy.middleRows(i * n, n);
    }
  };
  return v;
}

namespace {

struct Tap {
  int di, dj;
  Eigen::Index index;
};

std::vector<Tap> conv_taps(int width, bool source_causal) {
  const int h = width / 2;
  std::vector<Tap> taps;
  for (int di = -h; di <= 0; ++di) {
    for (int dj = -h; dj <= h; ++dj) {
      if (source_causal && dj > 0) continue;
      taps.push_back({di, dj, (di + h) * width + (dj + h)});
    }
  }
  return taps;
}

}  // namespace

Var Graph::masked_conv(Var grid_in, std::size_t rows, std::size_t cols, Var kernel, std::size_t width,
                       bool source_causal) {
  const Mat& H = value(grid_in);
  const Mat& W = value(kernel);
  const auto m = static_cast<Eigen::Index>(rows), n = static_cast<Eigen::Index>(cols), C = H.cols();
  if (H.rows() != m * n) throw UsageError("masked_conv: grid shape mismatch");
  if (width % 2 == 0) throw UsageError("masked_conv: filter width must be odd");
  const auto w = static_cast<Eigen::Index>(width);
  if (W.rows() != (w / 2 + 1) * w * C || W.cols() != C) throw UsageError("masked_conv: kernel shape mismatch");
  const auto taps = conv_taps(static_cast<int>(width), source_causal);
  Mat out = Mat::Zero(m * n, C);
  for (const auto& tap : taps) {
    const auto K = W.middleRows(tap.index * C, C);
    const Eigen::Index jlo = std::max<Eigen::Index>(0, -tap.dj);
    const Eigen::Index jhi = std::min<Eigen::Index>(n, n - tap.dj);
    if (jhi <= jlo) continue;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index si = i + tap.di;
      if (si < 0) continue;
      out.middleRows(i * n + jlo, jhi - jlo).noalias() += H.middleRows(si * n + jlo + tap.dj, jhi - jlo) * K;
    }
  }
  Var v = push(std::move(out));
  nodes_.back().back = [this, grid_in, kernel, v, taps, m, n, C] {
    const Mat& dy = grad(v.id);
    const Mat& H = value(grid_in);
    const Mat& W = value(kernel);
    Mat& dh = grad(grid_in.id);
    Mat& dw = grad(kernel.id);
    for (const auto& tap : taps) {
      const Eigen::Index jlo = std::max<Eigen::Index>(0, -tap.dj);
      const Eigen::Index jhi = std::min<Eigen::Index>(n, n - tap.dj);
      if (jhi <= jlo) continue;
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index si = i + tap.di;
        if (si < 0) continue;
        const auto dblock = dy.middleRows(i * n + jlo, jhi - jlo);
        const auto src = si * n + jlo + tap.dj;
        dh.middleRows(src, jhi - jlo).noalias() += dblock * W.middleRows(tap.index * C, C).transpose();
        dw.middleRows(tap.index * C, C).noalias() += H.middleRows(src, jhi - jlo).transpose() * dblock;
      }
    }
  };
  return v;
}

Var Graph::row_max_pool(Var grid_in, std::size_t rows, std::size_t cols, const std::vector<std::size_t>& limits) {
  const Mat& G = value(grid_in);
  const auto m = static_cast<Eigen::Index>(rows), n = static_cast<Eigen::Index>(cols), C = G.cols();
  if (G.rows() != m * n) throw UsageError("row_max_pool: grid shape mismatch");
  if (limits.size() != rows) throw UsageError("row_max_pool: one limit per row");
  Mat out(m, C);
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(m * C));
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto L = static_cast<Eigen::Index>(limits[static_cast<std::size_t>(i)]);
    if (L < 1 || L > n) throw UsageError("row_max_pool: limit outside [1, cols]");
    for (Eigen::Index c = 0; c < C; ++c) {
      Eigen::Index best = i * n;
      for (Eigen::Index j = 1; j < L; ++j) {
        if (G(i * n + j, c) > G(best, c)) best = i * n + j;
      }
      out(i, c) = G(best, c);
      arg[static_cast<std::size_t>(i * C + c)] = best;
    }
  }
  Var v = push(std::move(out));
  nodes_.back().back = [this, grid_in, v, arg = std::move(arg), C] {
    const Mat& dy = grad(v.id);
    Mat& dg = grad(grid_in.id);
    for (Eigen::Index i = 0; i < dy.rows(); ++i) {
      for (Eigen::Index c = 0; c < C; ++c) dg(arg[static_cast<std::size_t>(i * C + c)], c) += dy(i, c);
    }
  };
  return v;
}

Var Graph::cross_entropy(Var logits, const std::vector<int>& targets) {
  const Mat& Z = value(logits);
  if (static_cast<Eigen::Index>(targets.size()) != Z.rows()) throw UsageError("cross_entropy: one target per row");
  Mat probs(Z.rows(), Z.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= Z.cols()) throw UsageError("cross_entropy: target id out of range");
    const double mx = Z.row(r).maxCoeff();
    const double lse = mx + std::log((Z.row(r).array() - mx).exp().sum());
    probs.row(r) = (Z.row(r).array() - lse).exp();
    loss -= Z(r, t) - lse;
  }
  Var v = push(Mat::Constant(1, 1, loss));
  nodes_.back().back = [this, logits, v, probs = std::move(probs), targets] {
    const double g = grad(v.id)(0, 0);
    Mat& dz = grad(logits.id);
    dz += g * probs;
    for (std::size_t r = 0; r < targets.size(); ++r) dz(static_cast<Eigen::Index>(r), targets[r]) -= g;
  };
  return v;
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) throw UsageError("backward: loss must be a scalar");
  grad(loss.id)(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    auto& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0 && n.value.size() != 0) continue;
    if (n.back) n.back();
  }
  if (!gradients_) return;
  for (auto& n : nodes_) {
    if (!n.param || n.grad.size() == 0) continue;
    auto [it, fresh] = gradients_->try_emplace(*n.param, Mat());
    if (fresh) {
      it->second = n.grad;
    } else {
      it->second += n.grad;
    }
  }
}

}  // namespace simulmt::models
