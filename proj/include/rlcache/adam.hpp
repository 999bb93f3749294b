#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rlcache/mlp.hpp"

namespace rlcache {

template <typename Scalar>
struct AdamState {
  Scalar lr = Scalar(3e-4);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
  std::vector<Mat<Scalar>> m;
  std::vector<Mat<Scalar>> v;
  std::int64_t t = 0;
};

namespace detail {

template <typename Scalar>
void ensure_moments(AdamState<Scalar>& s, const std::vector<Mat<Scalar>>& params) {
  if (s.m.empty()) {
    for (const auto& p : params) {
      s.m.push_back(Mat<Scalar>::Zero(p.rows(), p.cols()));
      s.v.push_back(Mat<Scalar>::Zero(p.rows(), p.cols()));
    }
  }
  if (s.m.size() != params.size()) throw std::invalid_argument("adam_step: parameter count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (s.m[i].rows() != params[i].rows() || s.m[i].cols() != params[i].cols()) {
      throw std::invalid_argument("adam_step: parameter shape changed");
    }
  }
}

template <typename Scalar, typename P, typename M, typename V, typename G>
void adam_apply(const AdamState<Scalar>& s, Scalar c1, Scalar c2, P&& p, M&& m, V&& v, const G& g) {
  m = s.beta1 * m + (Scalar(1) - s.beta1) * g;
  v = s.beta2 * v + (Scalar(1) - s.beta2) * g.cwiseAbs2();
  p.array() -= s.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
}

}  // namespace detail

// One bias-corrected Adam update over a list of dense parameters.
template <typename Scalar>
void adam_step(AdamState<Scalar>& s, std::vector<Mat<Scalar>>& params, const std::vector<Mat<Scalar>>& grads) {
  if (grads.size() != params.size()) throw std::invalid_argument("adam_step: gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
  }
  detail::ensure_moments(s, params);
  ++s.t;
  const Scalar c1 = Scalar(1) - std::pow(s.beta1, Scalar(s.t));
  const Scalar c2 = Scalar(1) - std::pow(s.beta2, Scalar(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) detail::adam_apply(s, c1, c2, params[i], s.m[i], s.v[i], grads[i]);
}

// Network-aware step: dense layers as above, embedding tables lazily (only
// the columns the batch touched move, and only their moments decay).
template <typename Scalar>
void adam_step(AdamState<Scalar>& s, Mlp<Scalar>& net, const MlpGrad<Scalar>& g) {
  auto& params = net.params();
  const std::size_t n_emb = net.embedding_count();
  if (g.params.size() != params.size() || g.embeddings.size() != n_emb) throw std::invalid_argument("adam_step: gradient layout mismatch");
  for (std::size_t i = n_emb; i < params.size(); ++i) {
    if (g.params[i].rows() != params[i].rows() || g.params[i].cols() != params[i].cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
  }
  detail::ensure_moments(s, params);
  ++s.t;
  const Scalar c1 = Scalar(1) - std::pow(s.beta1, Scalar(s.t));
  const Scalar c2 = Scalar(1) - std::pow(s.beta2, Scalar(s.t));
  for (std::size_t e = 0; e < n_emb; ++e) {
    const ColumnGrad<Scalar>& cg = g.embeddings[e];
    for (std::size_t j = 0; j < cg.cols.size(); ++j) {
      const int c = cg.cols[j];
      detail::adam_apply(s, c1, c2, params[e].col(c), s.m[e].col(c), s.v[e].col(c), cg.values.col(static_cast<Eigen::Index>(j)));
    }
  }
  for (std::size_t i = n_emb; i < params.size(); ++i) detail::adam_apply(s, c1, c2, params[i], s.m[i], s.v[i], g.params[i]);
}

}  // namespace rlcache
