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
#include <string>
#include <vector>

#include "aegis/graph.hpp"
#include "aegis/rng.hpp"

namespace aegis {

enum class PolicyKind { kNone, kSimple, kDegreeAware, kRandomEr, kSynthetic, kSemanticKnn };

std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

struct AugmentationPolicy {
  PolicyKind kind = PolicyKind::kNone;
  double phi = 100.0;    // augmentation factor, >= 1
  double epsilon = 1.0;  // degree smoothing, > 0
  int radius = 2;        // synthetic perturbation radius, >= 0
  int k = 10;            // semantic neighbor count, >= 1
  double tau = 0.5;      // semantic similarity threshold, in [-1, 1]
  int alpha = 10;        // semantic per-node cap, >= 1
  bool knn_include_self = false;

  void validate() const;
};

// Per-node (neighbor, cosine) lists, similarity strictly descending,
// ties broken by lower index, filtered to similarity > tau.
struct NeighborLists {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> lists;
};

struct AugmentResult {
  EdgeList edges;             // E followed by E', original order preserved
  std::uint64_t shortfall = 0;  // budget the policy could not meet (semantic only)
};

// Added-edge budget: floor((phi - 1) * |E|).
std::uint64_t augment_budget(std::size_t n_edges, double phi);

// Uniform resampling of observed edges with replacement.
EdgeList augment_simple(const EdgeList& e, double phi, Rng& rng);

// Inverse-degree-biased resampling: w(e) = 1/(deg(u)+eps) + 1/(deg(v)+eps),
// normalized over E. Exposed for the statistical oracle in tests.
std::vector<double> degree_aware_weights(const EdgeList& e, const DegreeTable& deg,
                                         double epsilon);
EdgeList augment_degree_aware(const EdgeList& e, const DegreeTable& deg, double phi,
                              double epsilon, Rng& rng);

// Uniform random pairs over U x V, no membership check.
EdgeList augment_random_er(const EdgeList& e, std::uint32_t n_u, std::uint32_t n_v,
                           double phi, Rng& rng);

// Index perturbation of existing edges, deltas uniform on {-r..r} per
// axis, clamped into range.
EdgeList augment_synthetic(const EdgeList& e, std::uint32_t n_u, std::uint32_t n_v,
                           double phi, int radius, Rng& rng);

// Top-k cosine neighbors per node. The parallel version is the production
// kernel; the serial one is the reference used by tests and the benchmark.
NeighborLists knn_neighbors(const FeatureMatrix& x, int k, double tau,
                            bool include_self = false);
NeighborLists knn_neighbors_serial(const FeatureMatrix& x, int k, double tau,
                                   bool include_self = false);

// Deterministic neighbor-substitution completion: for each training edge,
// propose V-side neighbors first, then U-side, accepting pairs absent from
// E and E' while per-node caps allow. May return short of budget.
AugmentResult augment_semantic_knn(const EdgeList& e, const NeighborLists& s_u,
                                   const NeighborLists& s_v, double phi, int alpha);

struct FeaturePair {
  const FeatureMatrix* u = nullptr;
  const FeatureMatrix* v = nullptr;
};

// Dispatch on policy.kind; features are required only for semantic_knn.
AugmentResult apply_policy(const AugmentationPolicy& policy, const EdgeList& train_edges,
                           std::uint32_t n_u, std::uint32_t n_v, FeaturePair features,
                           Rng& rng);

}  // namespace aegis
