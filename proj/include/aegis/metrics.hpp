// Copyright 2026 The AEGIS Authors.
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

#pragma once

#include <cstdint>
#include <vector>

namespace aegis {

struct EvalSet {
  std::vector<double> probabilities;
  std::vector<std::uint8_t> labels;  // 0 or 1, same length
};

// Mann-Whitney AUC with midrank tie handling, O(n log n).
double auc_roc(const EvalSet& e);

// Mean squared error between probabilities and labels.
double brier(const EvalSet& e);

}  // namespace aegis
