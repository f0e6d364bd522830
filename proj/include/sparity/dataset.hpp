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

#ifndef SPARITY_DATASET_HPP_
#define SPARITY_DATASET_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>

#include "sparity/fourier.hpp"
#include "sparity/rng.hpp"

namespace sparity {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Labelled sample: one +1/-1 input per row of `x`.
struct Dataset {
  RowMatrix x;
  Eigen::VectorXd y;

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Writes chi_S of every row of `x` into `y`.
void LabelRows(const ParityInstance& inst, const RowMatrix& x,
               Eigen::VectorXd& y);

// m i.i.d. uniform inputs labelled by the parity; deterministic per seed.
Dataset generate_dataset(const ParityInstance& inst, std::size_t m,
                         std::uint64_t seed);

// Same as generate_dataset but drawing from an existing stream.
Dataset SampleDataset(const ParityInstance& inst, std::size_t m, Rng& rng);

// All 2^n cube points in table-index order; n <= 24.
Dataset FullCube(const ParityInstance& inst);

// Where training examples come from. Online draws a fresh batch every step;
// offline draws minibatches uniformly with replacement from a fixed sample.
class DataSource {
 public:
  static DataSource Online() { return DataSource(std::nullopt, std::nullopt); }
  static DataSource Offline(std::size_t m) { return DataSource(m, std::nullopt); }
  static DataSource Fixed(Dataset data) {
    const std::size_t m = data.size();
    return DataSource(m, std::move(data));
  }

  bool online() const { return !m_.has_value(); }
  std::optional<std::size_t> m() const { return m_; }
  const std::optional<Dataset>& fixed() const { return fixed_; }

 private:
  DataSource(std::optional<std::size_t> m, std::optional<Dataset> fixed)
      : m_(m), fixed_(std::move(fixed)) {}

  std::optional<std::size_t> m_;
  std::optional<Dataset> fixed_;
};

}  // namespace sparity

#endif  // SPARITY_DATASET_HPP_
