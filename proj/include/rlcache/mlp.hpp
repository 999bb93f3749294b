#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rlcache/rng.hpp"

namespace rlcache {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// An integer input looked up in a (dim x vocab) table instead of being fed
// to the first layer directly.
struct EmbeddingSpec {
  int position = 0;
  int vocab = 1;
  int dim = 1;
};

// Gradient of one embedding table restricted to the columns a batch touched.
template <typename Scalar>
struct ColumnGrad {
  std::vector<int> cols;
  Mat<Scalar> values;  // dim x cols.size()
};

template <typename Scalar>
struct MlpGrad {
  // Same layout as Mlp::params(); embedding slots are left empty and their
  // gradients live in `embeddings` instead.
  std::vector<Mat<Scalar>> params;
  std::vector<ColumnGrad<Scalar>> embeddings;
  // d loss / d input for numeric positions (rows of embedded positions are 0).
  Mat<Scalar> input;
};

// Intermediate activations kept by forward() for backward().
template <typename Scalar>
struct MlpTape {
  std::vector<Mat<Scalar>> acts;  // acts[0] = first-layer input, back() = output
};

// Fully connected ReLU network over column-major batches (input_dim x batch).
//
// params() = [embedding tables..., W0, b0, W1, b1, ...], b as (out x 1).
template <typename Scalar>
class Mlp {
 public:
  Mlp() = default;

  Mlp(int input_dim, std::vector<int> hidden, int output_dim, std::vector<EmbeddingSpec> embeddings = {})
      : input_dim_(input_dim), output_dim_(output_dim), embeddings_(std::move(embeddings)) {
    if (input_dim <= 0 || output_dim <= 0) throw std::invalid_argument("Mlp: dimensions must be positive");
    slot_.assign(static_cast<std::size_t>(input_dim), -1);
    offset_.assign(static_cast<std::size_t>(input_dim), 0);
    for (std::size_t e = 0; e < embeddings_.size(); ++e) {
      const auto& spec = embeddings_[e];
      if (spec.position < 0 || spec.position >= input_dim || slot_[spec.position] != -1 || spec.vocab <= 0 || spec.dim <= 0) {
        throw std::invalid_argument("Mlp: bad embedding spec");
      }
      slot_[spec.position] = static_cast<int>(e);
    }
    int rows = 0;
    for (int p = 0; p < input_dim; ++p) {
      offset_[p] = rows;
      rows += slot_[p] >= 0 ? embeddings_[slot_[p]].dim : 1;
    }
    feature_dim_ = rows;

    for (const auto& spec : embeddings_) params_.push_back(Mat<Scalar>::Zero(spec.dim, spec.vocab));
    std::vector<int> sizes{feature_dim_};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output_dim);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      params_.push_back(Mat<Scalar>::Zero(sizes[l + 1], sizes[l]));
      params_.push_back(Mat<Scalar>::Zero(sizes[l + 1], 1));
    }
  }

  // Uniform(+-1/sqrt(fan_in)) weights and biases, N(0, 0.1^2) embeddings.
  void initialize(Rng& rng) {
    for (std::size_t e = 0; e < embeddings_.size(); ++e) {
      for (Eigen::Index i = 0; i < params_[e].size(); ++i) params_[e](i) = static_cast<Scalar>(0.1 * rng.normal());
    }
    for (int l = 0; l < layers(); ++l) {
      Mat<Scalar>& w = weight(l);
      const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = static_cast<Scalar>(rng.uniform(-bound, bound));
      Mat<Scalar>& b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = static_cast<Scalar>(rng.uniform(-bound, bound));
    }
  }

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  int feature_dim() const { return feature_dim_; }
  int layers() const { return static_cast<int>((params_.size() - embeddings_.size()) / 2); }
  std::size_t embedding_count() const { return embeddings_.size(); }
  const std::vector<EmbeddingSpec>& embeddings() const { return embeddings_; }

  std::vector<Mat<Scalar>>& params() { return params_; }
  const std::vector<Mat<Scalar>>& params() const { return params_; }
  Mat<Scalar>& weight(int l) { return params_[embeddings_.size() + 2 * l]; }
  Mat<Scalar>& bias(int l) { return params_[embeddings_.size() + 2 * l + 1]; }
  const Mat<Scalar>& weight(int l) const { return params_[embeddings_.size() + 2 * l]; }
  const Mat<Scalar>& bias(int l) const { return params_[embeddings_.size() + 2 * l + 1]; }

  // Embedding lookup plus concatenation with the numeric inputs.
  Mat<Scalar> features(const Mat<Scalar>& x) const {
    if (x.rows() != input_dim_) {
      throw std::invalid_argument("Mlp: expected " + std::to_string(input_dim_) + " input rows, got " + std::to_string(x.rows()));
    }
    Mat<Scalar> f(feature_dim_, x.cols());
    for (int p = 0; p < input_dim_; ++p) {
      const int e = slot_[p];
      if (e < 0) {
        f.row(offset_[p]) = x.row(p);
        continue;
      }
      const int dim = embeddings_[e].dim;
      for (Eigen::Index b = 0; b < x.cols(); ++b) {
        f.block(offset_[p], b, dim, 1) = params_[e].col(index_at(x, p, b, e));
      }
    }
    return f;
  }

  Mat<Scalar> forward(const Mat<Scalar>& x) const {
    Mat<Scalar> h = features(x);
    for (int l = 0; l < layers(); ++l) {
      Mat<Scalar> z = weight(l) * h;
      z.colwise() += bias(l).col(0);
      h = (l + 1 < layers()) ? Mat<Scalar>(z.cwiseMax(Scalar(0))) : z;
    }
    return h;
  }

  Mat<Scalar> forward(const Mat<Scalar>& x, MlpTape<Scalar>& tape) const {
    tape.acts.clear();
    tape.acts.push_back(features(x));
    for (int l = 0; l < layers(); ++l) {
      Mat<Scalar> z = weight(l) * tape.acts.back();
      z.colwise() += bias(l).col(0);
      if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
      tape.acts.push_back(std::move(z));
    }
    return tape.acts.back();
  }

  // Gradients of sum(dy .* forward(x)) with respect to parameters and inputs.
  MlpGrad<Scalar> backward(const MlpTape<Scalar>& tape, const Mat<Scalar>& x, const Mat<Scalar>& dy) const {
    if (tape.acts.size() != static_cast<std::size_t>(layers()) + 1) throw std::invalid_argument("Mlp: tape does not match network");
    if (dy.rows() != output_dim_ || dy.cols() != x.cols() || x.rows() != input_dim_ || tape.acts[0].cols() != x.cols()) {
      throw std::invalid_argument("Mlp: gradient shape mismatch");
    }
    MlpGrad<Scalar> g;
    g.params.resize(params_.size());
    Mat<Scalar> delta = dy;
    for (int l = layers() - 1; l >= 0; --l) {
      const Mat<Scalar>& h = tape.acts[l];
      g.params[embeddings_.size() + 2 * l] = delta * h.transpose();
      g.params[embeddings_.size() + 2 * l + 1] = delta.rowwise().sum();
      Mat<Scalar> back = weight(l).transpose() * delta;
      if (l > 0) back = back.cwiseProduct((h.array() > Scalar(0)).template cast<Scalar>().matrix());
      delta = std::move(back);
    }
    // delta is now d/d features.
    g.input = Mat<Scalar>::Zero(input_dim_, x.cols());
    g.embeddings.resize(embeddings_.size());
    for (int p = 0; p < input_dim_; ++p) {
      const int e = slot_[p];
      if (e < 0) {
        g.input.row(p) = delta.row(offset_[p]);
        continue;
      }
      const int dim = embeddings_[e].dim;
      std::vector<int> idx(static_cast<std::size_t>(x.cols()));
      for (Eigen::Index b = 0; b < x.cols(); ++b) idx[b] = index_at(x, p, b, e);
      std::vector<int> cols = idx;
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      ColumnGrad<Scalar>& cg = g.embeddings[e];
      cg.cols = cols;
      cg.values = Mat<Scalar>::Zero(dim, static_cast<Eigen::Index>(cols.size()));
      for (Eigen::Index b = 0; b < x.cols(); ++b) {
        const auto at = std::lower_bound(cols.begin(), cols.end(), idx[b]) - cols.begin();
        cg.values.col(at) += delta.block(offset_[p], b, dim, 1);
      }
    }
    return g;
  }

 private:
  int index_at(const Mat<Scalar>& x, int p, Eigen::Index b, int e) const {
    const double raw = static_cast<double>(x(p, b));
    const int idx = static_cast<int>(std::lround(raw));
    if (idx < 0 || idx >= embeddings_[e].vocab || std::abs(raw - idx) > 1e-6) {
      throw std::invalid_argument("Mlp: index input " + std::to_string(raw) + " outside vocabulary");
    }
    return idx;
  }

  int input_dim_ = 0;
  int output_dim_ = 0;
  int feature_dim_ = 0;
  std::vector<EmbeddingSpec> embeddings_;
  std::vector<int> slot_;    // embedding slot per input position, -1 = numeric
  std::vector<int> offset_;  // first feature row per input position
  std::vector<Mat<Scalar>> params_;
};

// target <- tau * source + (1 - tau) * target, parameter by parameter.
template <typename Scalar>
void polyak_update(Mlp<Scalar>& target, const Mlp<Scalar>& source, Scalar tau) {
  auto& t = target.params();
  const auto& s = source.params();
  if (t.size() != s.size()) throw std::invalid_argument("polyak_update: parameter count mismatch");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].rows() != s[i].rows() || t[i].cols() != s[i].cols()) throw std::invalid_argument("polyak_update: shape mismatch");
    t[i] = tau * s[i] + (Scalar(1) - tau) * t[i];
  }
}

}  // namespace rlcache
