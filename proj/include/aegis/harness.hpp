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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aegis/augment.hpp"
#include "aegis/predictor.hpp"

namespace aegis {

struct DatasetConfig {
  std::string edges;       // edge-list path
  std::string features_u;  // optional; required for semantic_knn
  std::string features_v;
  std::uint32_t n_u = 0;
  std::uint32_t n_v = 0;
};

struct PercolationConfig {
  bool enabled = true;
  double q = 0.01;
  bool per_seed = true;  // re-percolate per seed vs one shared draw
};

struct SplitConfig {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  double negative_ratio = 1.0;
  // Accepted and recorded for config compatibility; the shallow scorer
  // uses all train positives as supervision.
  double disjoint_train_ratio = 0.0;
};

struct ExperimentConfig {
  std::string experiment = "experiment";
  DatasetConfig dataset;
  PercolationConfig percolation;
  SplitConfig split;
  std::vector<AugmentationPolicy> policies;  // must include `none`
  double phi = 100.0;                        // default for policies that do not override
  TrainConfig train;
  int n_seeds = 32;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";

  void validate() const;
};

// Parses the versioned JSON config; unknown keys are rejected. CLI
// overrides are applied by the caller before validate().
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& c);  // canonical form
std::string config_hash(const ExperimentConfig& c);

struct RunRecord {
  std::uint64_t seed = 0;
  std::string policy;
  double val_auc = 0.0, val_brier = 0.0;
  double test_auc = 0.0, test_brier = 0.0;
  std::uint64_t shortfall = 0;
  double duration_s = 0.0;
  std::string config_hash;
  bool failed = false;
  std::string error;
};

// seed x policy grid: percolate (benchmark path), split, augment train
// edges only, train, evaluate on untouched val/test. Every intermediate
// is persisted under <out>/<experiment>/<seed>/<policy>/.
std::vector<RunRecord> run_benchmark_pipeline(const ExperimentConfig& config, int jobs = 1);

// Same minus percolation, for naturally sparse graphs.
std::vector<RunRecord> run_case_study_pipeline(const ExperimentConfig& config, int jobs = 1);

// Dispatches on percolation.enabled.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int jobs = 1);

void write_results_csv(const std::vector<RunRecord>& records,
                       const std::filesystem::path& path);
std::vector<RunRecord> read_results_csv(const std::filesystem::path& path);

// Emits AUC and Brier tables (CSV + Markdown, test split headline plus
// validation variants) into dir.
void make_report(const std::vector<RunRecord>& records, const std::string& baseline,
                 const std::filesystem::path& dir);

// Output directory resolution: AEGIS_OUT_DIR env var overrides config.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

}  // namespace aegis
