// Copyright 2026 The sparity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sparity/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "sparity/error.hpp"

namespace sparity {

MlpParams MlpParams::Zeros(int r, int n) {
  MlpParams p;
  p.W = RowMatrix::Zero(r, n);
  p.b = Eigen::VectorXd::Zero(r);
  p.u = Eigen::VectorXd::Zero(r);
  p.beta = 0.0;
  return p;
}

bool MlpParams::AllFinite() const {
  return W.allFinite() && b.allFinite() && u.allFinite() &&
         std::isfinite(beta);
}

MlpParams MlpParams::Subnetwork(std::span<const int> neurons) const {
  MlpParams sub = Zeros(static_cast<int>(neurons.size()), dim());
  for (std::size_t j = 0; j < neurons.size(); ++j) {
    const int i = neurons[j];
    Require(i >= 0 && i < width(), "subnetwork neuron index out of range");
    sub.W.row(static_cast<Eigen::Index>(j)) = W.row(i);
    sub.b(static_cast<Eigen::Index>(j)) = b(i);
    sub.u(static_cast<Eigen::Index>(j)) = u(i);
  }
  sub.beta = beta;
  return sub;
}

bool operator==(const MlpParams& a, const MlpParams& b) {
  return a.W.rows() == b.W.rows() && a.W.cols() == b.W.cols() &&
         a.W == b.W && a.b == b.b && a.u == b.u && a.beta == b.beta;
}

std::string ToString(InitVariant variant) {
  switch (variant) {
    case InitVariant::kUniformDense:
      return "uniform";
    case InitVariant::kOverSparse:
      return "oversparse";
    case InitVariant::kUnderSparse:
      return "undersparse";
  }
  return "unknown";
}

InitVariant ParseInitVariant(const std::string& name) {
  if (name == "uniform" || name == "dense") return InitVariant::kUniformDense;
  if (name == "oversparse" || name == "sparse") return InitVariant::kOverSparse;
  if (name == "undersparse") return InitVariant::kUnderSparse;
  Fail(ErrorCode::kConfig, "unknown init scheme '" + name + "'");
}

InitScheme InitScheme::UniformDense() { return InitScheme{}; }

InitScheme InitScheme::SparseExperiment(int s) {
  InitScheme scheme;
  scheme.variant = InitVariant::kOverSparse;
  scheme.s = s;
  return scheme;
}

InitScheme InitScheme::OverSparseTheory(int s, int k) {
  InitScheme scheme;
  scheme.variant = InitVariant::kOverSparse;
  scheme.s = s;
  scheme.bias_grid = OverSparseBiasGrid(k);
  scheme.second_layer = SecondLayerInit::kPlusMinusOne;
  scheme.symmetric_pairing = true;
  return scheme;
}

InitScheme InitScheme::UnderSparseTheory(int s, int k, double eps_init) {
  InitScheme scheme;
  scheme.variant = InitVariant::kUnderSparse;
  scheme.s = s;
  scheme.eps_init = eps_init;
  scheme.bias_grid = UnderSparseBiasGrid(k, eps_init);
  scheme.second_layer = SecondLayerInit::kPlusMinusOne;
  scheme.symmetric_pairing = true;
  return scheme;
}

void InitScheme::Validate(int r, int n) const {
  Require(r >= 1 && n >= 1, "width and dimension must be positive");
  if (symmetric_pairing) {
    Require(r % 2 == 0, "symmetric pairing needs an even width");
  }
  switch (variant) {
    case InitVariant::kUniformDense:
      break;
    case InitVariant::kOverSparse:
      Require(s >= 1 && s <= n, "sparsity s must satisfy 1 <= s <= n");
      break;
    case InitVariant::kUnderSparse:
      Require(s >= 0 && s < n, "sparsity s must satisfy 0 <= s < n");
      Require(eps_init > 0.0 && eps_init < 1.0 / (n - s),
              "background weight must satisfy 0 < eps < 1/(n - s)");
      break;
  }
}

std::vector<double> OverSparseBiasGrid(int k) {
  Require(k >= 2 && k % 2 == 0, "over-sparse bias grid needs even k >= 2");
  std::vector<double> grid;
  for (int i = 0; i <= k / 2 - 1; ++i) {
    grid.push_back((-k + 2 * i + 1.0 / 16.0) / (2.0 * k));
  }
  return grid;
}

std::vector<double> UnderSparseBiasGrid(int k, double eps_init) {
  Require(k >= 2 && k % 2 == 0, "under-sparse bias grid needs even k >= 2");
  std::vector<double> grid;
  for (int j = k / 2; j >= 1; --j) {
    grid.push_back(-eps_init * (2 * j - 1) / (2.0 * k));
  }
  for (int j = 1; j <= k / 2; ++j) {
    grid.push_back(eps_init * (2 * j - 1) / (2.0 * k));
  }
  return grid;
}

MlpParams init_params(const InitScheme& scheme, int r, int n,
                      std::uint64_t seed) {
  scheme.Validate(r, n);
  Rng rng(seed);
  MlpParams p = MlpParams::Zeros(r, n);
  const int drawn = scheme.symmetric_pairing ? r / 2 : r;
  const double w_bound = 1.0 / std::sqrt(static_cast<double>(n));
  const double u_bound = 1.0 / std::sqrt(static_cast<double>(r));

  for (int i = 0; i < drawn; ++i) {
    switch (scheme.variant) {
      case InitVariant::kUniformDense:
        for (int j = 0; j < n; ++j) p.W(i, j) = rng.Uniform(-w_bound, w_bound);
        break;
      case InitVariant::kOverSparse:
      case InitVariant::kUnderSparse: {
        const double background =
            scheme.variant == InitVariant::kUnderSparse ? scheme.eps_init : 0.0;
        p.W.row(i).setConstant(background);
        for (int j : rng.SampleSubset(n, scheme.s)) p.W(i, j) = 1.0;
        break;
      }
    }
    if (scheme.bias_grid.empty()) {
      p.b(i) = rng.Uniform(-w_bound, w_bound);
    } else {
      p.b(i) = scheme.bias_grid[rng.Below(scheme.bias_grid.size())];
    }
    if (scheme.second_layer == SecondLayerInit::kPlusMinusOne) {
      p.u(i) = rng.Sign();
    } else {
      p.u(i) = rng.Uniform(-u_bound, u_bound);
    }
  }
  if (scheme.symmetric_pairing) {
    for (int i = 0; i < drawn; ++i) {
      p.W.row(i + drawn) = p.W.row(i);
      p.b(i + drawn) = p.b(i);
      p.u(i + drawn) = -p.u(i);
    }
  }
  p.beta = scheme.second_layer == SecondLayerInit::kPlusMinusOne
               ? 0.0
               : rng.Uniform(-u_bound, u_bound);
  return p;
}

double forward(const MlpParams& params, std::span<const double> x) {
  Require(static_cast<int>(x.size()) == params.dim(),
          "input length does not match network dimension");
  Require(params.AllFinite(), "network has non-finite parameters");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(),
                                            static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd hidden = (params.W * v + params.b).cwiseMax(0.0);
  return params.u.dot(hidden) + params.beta;
}

Eigen::VectorXd ForwardBatch(const MlpParams& params, const RowMatrix& x) {
  Require(x.cols() == params.dim(), "input width does not match network");
  Require(params.AllFinite(), "network has non-finite parameters");
  RowMatrix hidden = x * params.W.transpose();
  hidden.rowwise() += params.b.transpose();
  hidden = hidden.cwiseMax(0.0);
  Eigen::VectorXd out = hidden * params.u;
  out.array() += params.beta;
  return out;
}

std::string ToString(Loss loss) {
  return loss == Loss::kHinge ? "hinge" : "square";
}

Loss ParseLoss(const std::string& name) {
  if (name == "hinge") return Loss::kHinge;
  if (name == "square") return Loss::kSquare;
  Fail(ErrorCode::kConfig, "unknown loss '" + name + "'");
}

double LossValue(Loss loss, double yhat, double y) {
  if (loss == Loss::kHinge) return std::max(1.0 - y * yhat, 0.0);
  const double diff = y - yhat;
  return 0.5 * diff * diff;
}

double LossDerivative(Loss loss, double yhat, double y) {
  if (loss == Loss::kHinge) return (y * yhat < 1.0) ? -y : 0.0;
  return -y + yhat;
}

MlpParams Backprop(const MlpParams& params, const RowMatrix& x,
                   const Eigen::VectorXd& dloss) {
  Require(x.rows() == dloss.size() && x.rows() > 0,
          "backprop needs one loss derivative per (nonempty) row");
  const double scale = 1.0 / static_cast<double>(x.rows());
  RowMatrix pre = x * params.W.transpose();
  pre.rowwise() += params.b.transpose();
  const RowMatrix act = pre.cwiseMax(0.0);

  MlpParams g;
  g.u = act.transpose() * dloss * scale;
  g.beta = dloss.sum() * scale;
  // d/d(pre) = dloss * u_i * 1[pre > 0]; the ReLU subgradient at 0 is 0.
  RowMatrix delta = (dloss * params.u.transpose()) * scale;
  delta.array() *= (pre.array() > 0.0).cast<double>();
  g.W = delta.transpose() * x;
  g.b = delta.colwise().sum().transpose();
  return g;
}

LossAndGrad loss_and_grad(const MlpParams& params, const Dataset& batch,
                          Loss loss) {
  Require(batch.size() > 0, "loss_and_grad needs a nonempty batch");
  const Eigen::VectorXd yhat = ForwardBatch(params, batch.x);
  Eigen::VectorXd dloss(yhat.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < yhat.size(); ++i) {
    const double y = batch.y(i);
    Require(y == 1.0 || y == -1.0, "labels must be +1 or -1");
    total += LossValue(loss, yhat(i), y);
    dloss(i) = LossDerivative(loss, yhat(i), y);
  }
  LossAndGrad out;
  out.loss = total / static_cast<double>(yhat.size());
  out.grad = Backprop(params, batch.x, dloss);
  return out;
}

void TrainConfig::Validate() const {
  for (double v : {eta.W, eta.b, eta.u, eta.beta}) {
    Require(v >= 0.0, "learning rates must be nonnegative");
  }
  for (double v : {lambda.W, lambda.b, lambda.u, lambda.beta}) {
    Require(v >= 0.0, "weight decay must be nonnegative");
  }
  Require(gamma >= 0.0, "truncation gamma must be nonnegative");
  Require(batch_size >= 1, "batch size must be at least 1");
  Require(steps >= 1, "step budget must be at least 1");
  Require(eval_interval >= 1, "evaluation interval must be at least 1");
  Require(test_size >= 1, "test size must be at least 1");
}

void Truncate(MlpParams& grads, double gamma) {
  if (gamma <= 0.0) return;
  auto cut = [gamma](double g) { return std::abs(g) <= gamma ? 0.0 : g; };
  grads.W = grads.W.unaryExpr(cut);
  grads.b = grads.b.unaryExpr(cut);
  grads.u = grads.u.unaryExpr(cut);
  grads.beta = cut(grads.beta);
}

MlpParams sgd_step(const MlpParams& params, const MlpParams& grads,
                   const TrainConfig& config, long /*step*/) {
  MlpParams g = grads;
  Truncate(g, config.gamma);
  auto decay = [&config](double eta, double lambda) {
    return 1.0 - (config.decay_coupled ? eta * lambda : lambda);
  };
  const auto& eta = config.eta;
  const auto& lam = config.lambda;
  MlpParams next;
  next.W = decay(eta.W, lam.W) * params.W - eta.W * g.W;
  next.b = decay(eta.b, lam.b) * params.b - eta.b * g.b;
  next.u = decay(eta.u, lam.u) * params.u - eta.u * g.u;
  next.beta = decay(eta.beta, lam.beta) * params.beta - eta.beta * g.beta;
  return next;
}

}  // namespace sparity
