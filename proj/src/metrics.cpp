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

#include "aegis/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aegis {

double auc_roc(const EvalSet& e) {
  if (e.probabilities.size() != e.labels.size()) {
    throw std::invalid_argument("auc_roc: probability/label length mismatch");
  }
  const std::size_t n = e.labels.size();
  std::size_t n_pos = 0;
  for (std::uint8_t l : e.labels) n_pos += l;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc_roc: both classes must be present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return e.probabilities[a] < e.probabilities[b];
  });

  // Sum of midranks over positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && e.probabilities[order[j]] == e.probabilities[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (e.labels[order[t]]) rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double brier(const EvalSet& e) {
  if (e.probabilities.size() != e.labels.size()) {
    throw std::invalid_argument("brier: probability/label length mismatch");
  }
  if (e.probabilities.empty()) throw std::invalid_argument("brier: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    const double diff = e.probabilities[i] - static_cast<double>(e.labels[i]);
    sum += diff * diff;
  }
  return sum / static_cast<double>(e.labels.size());
}

}  // namespace aegis
