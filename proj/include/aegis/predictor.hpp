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
#include <filesystem>
#include <string>
#include <vector>

#include "aegis/graph.hpp"
#include "aegis/rng.hpp"

namespace aegis {

enum class Scorer { kDot, kBilinear };

std::string to_string(Scorer s);
Scorer scorer_from_string(const std::string& s);

struct TrainConfig {
  int d_model = 32;
  // Gradients are batch-mean normalized, so the step size is independent
  // of batch size and a large rate is stable.
  double learning_rate = 0.5;
  int epochs = 200;
  int batch_size = 512;
  double l2 = 1e-5;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  Scorer scorer = Scorer::kDot;
  bool resample_negatives = false;  // fresh uniform negatives each epoch (ablation)

  void validate() const;
};

// Per-node embeddings defining s(u,v) and P(u,v) = sigmoid(s). The
// bilinear form W is identity-initialized and only present for the
// bilinear scorer.
struct TrainedModel {
  std::uint32_t n_u = 0;
  std::uint32_t n_v = 0;
  int d = 0;
  Scorer scorer = Scorer::kDot;
  std::vector<double> emb_u;  // n_u x d, row-major
  std::vector<double> emb_v;  // n_v x d
  std::vector<double> w;      // d x d when bilinear, empty otherwise

  double score(std::uint32_t u, std::uint32_t v) const;
};

struct Gradients {
  std::vector<double> emb_u, emb_v, w;
};

// Both class means carry constant weight 1/2 regardless of class counts.
inline constexpr double kPosClassWeight = 0.5;
inline constexpr double kNegClassWeight = 0.5;

// Scores are clamped here before the sigmoid so -log terms stay finite.
inline constexpr double kScoreClamp = 30.0;

double sigmoid_clamped(double s);

TrainedModel init_model(std::uint32_t n_u, std::uint32_t n_v, const TrainConfig& config,
                        Rng& rng);

// Full-batch class-balanced BCE and its exact analytic gradient.
// Duplicated positives contribute once per occurrence inside the
// positive mean.
std::pair<double, Gradients> loss_and_grad(const TrainedModel& model, const EdgeList& pos,
                                           const EdgeList& neg);

struct TrainResult {
  TrainedModel model;
  std::vector<double> epoch_loss;
};

TrainResult train(const EdgeList& train_pos, const EdgeList& train_neg, std::uint32_t n_u,
                  std::uint32_t n_v, const TrainConfig& config);

std::vector<double> predict(const TrainedModel& model, const EdgeList& pairs);

// Versioned text checkpoint: metadata JSON + full-precision tensor dump.
void save_model(const TrainedModel& model, const std::filesystem::path& path,
                std::uint64_t seed, const std::string& config_hash);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace aegis
