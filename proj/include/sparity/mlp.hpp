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

// Two-layer ReLU network x -> u^T relu(W x + b) + beta with explicit
// backprop and the per-layer decayed SGD update
//   theta <- (1 - lambda) theta - eta * trunc(grad, gamma).

#ifndef SPARITY_MLP_HPP_
#define SPARITY_MLP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparity/dataset.hpp"

namespace sparity {

struct MlpParams {
  RowMatrix W;        // r x n
  Eigen::VectorXd b;  // r
  Eigen::VectorXd u;  // r
  double beta = 0.0;

  static MlpParams Zeros(int r, int n);

  int width() const { return static_cast<int>(W.rows()); }
  int dim() const { return static_cast<int>(W.cols()); }
  bool AllFinite() const;

  // Keeps only the listed neurons, in the given order.
  MlpParams Subnetwork(std::span<const int> neurons) const;

  friend bool operator==(const MlpParams& a, const MlpParams& b);
};

enum class InitVariant { kUniformDense, kOverSparse, kUnderSparse };

enum class SecondLayerInit {
  kDefaultUniform,  // u ~ U[-1/sqrt(r), 1/sqrt(r)], beta likewise
  kPlusMinusOne,    // u ~ {+1, -1}, beta = 0
};

std::string ToString(InitVariant variant);
InitVariant ParseInitVariant(const std::string& name);

struct InitScheme {
  InitVariant variant = InitVariant::kUniformDense;
  int s = 0;
  // Weight on inactive coordinates (under-sparse only).
  double eps_init = 0.0;
  // Biases are drawn uniformly from this list; empty means the default
  // uniform bias U[-1/sqrt(n), 1/sqrt(n)].
  std::vector<double> bias_grid;
  SecondLayerInit second_layer = SecondLayerInit::kDefaultUniform;
  // Neuron i + r/2 copies neuron i with a negated output weight, so the
  // network is the zero function at initialization.
  bool symmetric_pairing = false;

  static InitScheme UniformDense();
  // s-hot rows with default biases and second layer (experiment setting).
  static InitScheme SparseExperiment(int s);
  static InitScheme OverSparseTheory(int s, int k);
  static InitScheme UnderSparseTheory(int s, int k, double eps_init);

  void Validate(int r, int n) const;
};

// (1/2k)(-k + 2i + 1/16) for i = 0 .. k/2 - 1; k even.
std::vector<double> OverSparseBiasGrid(int k);

// +-eps (2j - 1) / (2k) for j = 1 .. k/2, ascending; k even.
std::vector<double> UnderSparseBiasGrid(int k, double eps_init);

MlpParams init_params(const InitScheme& scheme, int r, int n,
                      std::uint64_t seed);

double forward(const MlpParams& params, std::span<const double> x);

// Outputs for every row of x.
Eigen::VectorXd ForwardBatch(const MlpParams& params, const RowMatrix& x);

enum class Loss { kHinge, kSquare };

std::string ToString(Loss loss);
Loss ParseLoss(const std::string& name);

// l(yhat, y) and dl/dyhat. Hinge uses the zero subgradient at margin 1;
// square loss is (1/2)(y - yhat)^2, so dl/dyhat = -y + yhat.
double LossValue(Loss loss, double yhat, double y);
double LossDerivative(Loss loss, double yhat, double y);

struct LossAndGrad {
  double loss = 0.0;
  MlpParams grad;
};

// Mean loss over the batch and its exact gradient.
LossAndGrad loss_and_grad(const MlpParams& params, const Dataset& batch,
                          Loss loss);

// Mean over rows of dloss[row] * d yhat(x_row) / d theta.
MlpParams Backprop(const MlpParams& params, const RowMatrix& x,
                   const Eigen::VectorXd& dloss);

struct LayerValues {
  double W = 0.0;
  double b = 0.0;
  double u = 0.0;
  double beta = 0.0;

  static LayerValues All(double v) { return {v, v, v, v}; }
};

struct TrainConfig {
  LayerValues eta = LayerValues::All(0.1);
  LayerValues lambda = LayerValues::All(0.01);
  // When set, the per-step decay is eta * lambda (L2 penalty folded into
  // the gradient, as in common SGD implementations); otherwise lambda is
  // applied directly as the (1 - lambda) multiplier.
  bool decay_coupled = true;
  // Gradient entries with |g| <= gamma are zeroed before the update.
  double gamma = 0.0;
  int batch_size = 32;
  long steps = 100000;
  Loss loss = Loss::kHinge;
  std::uint64_t seed = 0;
  int eval_interval = 100;
  int test_size = 10000;
  double success_threshold = 0.10;
  bool stop_on_success = true;
  // Stop counting test mistakes once the threshold is exceeded; the
  // recorded test error is then a prefix estimate.
  bool eval_early_exit = true;
  // Record a snapshot at every evaluation (otherwise only the last one).
  bool keep_trajectory = true;

  void Validate() const;
};

// One update. `step` is the 1-based iteration index (reserved for
// schedules; the rates here are constant).
MlpParams sgd_step(const MlpParams& params, const MlpParams& grads,
                   const TrainConfig& config, long step);

// Zeroes entries with magnitude <= gamma.
void Truncate(MlpParams& grads, double gamma);

}  // namespace sparity

#endif  // SPARITY_MLP_HPP_
