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

#include <map>
#include <string>
#include <vector>

namespace aegis {

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

struct PairedT {
  double t = 0.0;
  int df = 0;
  bool zero_variance = false;  // sd(diff) == 0 with nonzero mean; t is +-inf
};

// Two-tailed paired Student t on differences a_i - b_i, sample (n-1) SD.
PairedT paired_t(const std::vector<double>& a, const std::vector<double>& b);

// p = 2 * (1 - CDF_t(|t|; df)) = I_x(df/2, 1/2) with x = df / (df + t^2).
double t_two_tailed_p(double t, int df);

// mean(diff) / sd(diff); identically t / sqrt(n).
double cohens_d_paired(const std::vector<double>& a, const std::vector<double>& b);

struct StatRow {
  std::string method;
  double mean = 0.0;
  double sd = 0.0;          // per-method sample SD across seeds
  double delta = 0.0;       // mean(method) - mean(baseline)
  double t_stat = 0.0;      // paired t of (baseline - method), paper convention
  double p_value = 1.0;
  double cohens_d = 0.0;
  std::string stars = "ns";  // ns / * / ** / ***
  int n = 0;
  int df = 0;
  bool is_baseline = false;
};

std::string star_level(double p);

// One row per method; the baseline row carries no test fields. All
// methods must supply vectors of equal length (same seed set, aligned).
std::vector<StatRow> aggregate(const std::map<std::string, std::vector<double>>& method_runs,
                               const std::string& baseline);

// Table emission: machine CSV plus a Markdown table matching the
// Method | M +- SD | Delta | t(df) | p | d layout.
std::string stat_rows_to_csv(const std::vector<StatRow>& rows);
std::vector<StatRow> stat_rows_from_csv(const std::string& csv);
std::string stat_rows_to_markdown(const std::vector<StatRow>& rows,
                                  const std::string& metric_name);

}  // namespace aegis
