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

#include "sparity/dataset.hpp"

#include "sparity/error.hpp"

namespace sparity {

void LabelRows(const ParityInstance& inst, const RowMatrix& x,
               Eigen::VectorXd& y) {
  Require(x.cols() == inst.n(), "dataset dimension does not match parity");
  y.resize(x.rows());
  for (Eigen::Index row = 0; row < x.rows(); ++row) {
    double product = 1.0;
    for (int i : inst.support()) product *= x(row, i);
    y(row) = product;
  }
}

Dataset SampleDataset(const ParityInstance& inst, std::size_t m, Rng& rng) {
  Require(m >= 1, "dataset size m must be at least 1");
  Dataset data;
  data.x.resize(static_cast<Eigen::Index>(m), inst.n());
  rng.FillSigns(data.x.data(), m * static_cast<std::size_t>(inst.n()));
  LabelRows(inst, data.x, data.y);
  return data;
}

Dataset generate_dataset(const ParityInstance& inst, std::size_t m,
                         std::uint64_t seed) {
  Rng rng(seed);
  return SampleDataset(inst, m, rng);
}

Dataset FullCube(const ParityInstance& inst) {
  const int n = inst.n();
  if (n > kMaxTableDimension) {
    Fail(ErrorCode::kScaleGuard, "full-cube datasets need n <= 24");
  }
  const std::size_t size = std::size_t{1} << n;
  Dataset data;
  data.x.resize(static_cast<Eigen::Index>(size), n);
  for (std::size_t index = 0; index < size; ++index) {
    for (int i = 0; i < n; ++i) {
      data.x(static_cast<Eigen::Index>(index), i) =
          CubeCoordinate(static_cast<std::uint32_t>(index), i);
    }
  }
  LabelRows(inst, data.x, data.y);
  return data;
}

}  // namespace sparity
