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

#include "aegis/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aegis {
namespace {

void require_nonempty(const EdgeList& e, double phi, const char* op) {
  if (e.empty() && phi > 1.0) {
    throw std::invalid_argument(std::string(op) + ": empty edge set with phi > 1");
  }
}

std::size_t weighted_index(const std::vector<double>& cumulative, double total, Rng& rng) {
  double x = rng.uniform01() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  if (it == cumulative.end()) --it;  // guards x == total
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kNone: return "none";
    case PolicyKind::kSimple: return "simple";
    case PolicyKind::kDegreeAware: return "degree_aware";
    case PolicyKind::kRandomEr: return "random";
    case PolicyKind::kSynthetic: return "synthetic";
    case PolicyKind::kSemanticKnn: return "semantic_knn";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "none") return PolicyKind::kNone;
  if (s == "simple") return PolicyKind::kSimple;
  if (s == "degree_aware") return PolicyKind::kDegreeAware;
  if (s == "random" || s == "random_er") return PolicyKind::kRandomEr;
  if (s == "synthetic") return PolicyKind::kSynthetic;
  if (s == "semantic_knn") return PolicyKind::kSemanticKnn;
  throw std::invalid_argument("unknown augmentation policy: " + s);
}

void AugmentationPolicy::validate() const {
  if (phi < 1.0) throw std::invalid_argument("policy: phi must be >= 1");
  if (epsilon <= 0.0) throw std::invalid_argument("policy: epsilon must be > 0");
  if (radius < 0) throw std::invalid_argument("policy: radius must be >= 0");
  if (k < 1) throw std::invalid_argument("policy: k must be >= 1");
  if (tau < -1.0 || tau > 1.0) throw std::invalid_argument("policy: tau must be in [-1, 1]");
  if (alpha < 1) throw std::invalid_argument("policy: alpha must be >= 1");
}

std::uint64_t augment_budget(std::size_t n_edges, double phi) {
  if (phi < 1.0) throw std::invalid_argument("augment_budget: phi must be >= 1");
  // 1e-9 guard keeps exact products like 99*67 from landing one below.
  return static_cast<std::uint64_t>(
      std::floor((phi - 1.0) * static_cast<double>(n_edges) + 1e-9));
}

EdgeList augment_simple(const EdgeList& e, double phi, Rng& rng) {
  require_nonempty(e, phi, "augment_simple");
  const std::uint64_t budget = augment_budget(e.size(), phi);
  EdgeList out = e;
  out.reserve(e.size() + budget);
  for (std::uint64_t i = 0; i < budget; ++i) {
    out.push_back(e[static_cast<std::size_t>(rng.bounded(e.size()))]);
  }
  return out;
}

std::vector<double> degree_aware_weights(const EdgeList& e, const DegreeTable& deg,
                                         double epsilon) {
  std::vector<double> w;
  w.reserve(e.size());
  for (const Edge& edge : e) {
    w.push_back(1.0 / (static_cast<double>(deg.deg_u[edge.u]) + epsilon) +
                1.0 / (static_cast<double>(deg.deg_v[edge.v]) + epsilon));
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

EdgeList augment_degree_aware(const EdgeList& e, const DegreeTable& deg, double phi,
                              double epsilon, Rng& rng) {
  require_nonempty(e, phi, "augment_degree_aware");
  if (epsilon <= 0.0) throw std::invalid_argument("augment_degree_aware: epsilon must be > 0");
  const std::uint64_t budget = augment_budget(e.size(), phi);

  std::vector<double> cumulative(e.size());
  double acc = 0.0;
  const std::vector<double> p = degree_aware_weights(e, deg, epsilon);
  for (std::size_t i = 0; i < e.size(); ++i) {
    acc += p[i];
    cumulative[i] = acc;
  }

  EdgeList out = e;
  out.reserve(e.size() + budget);
  for (std::uint64_t i = 0; i < budget; ++i) {
    out.push_back(e[weighted_index(cumulative, acc, rng)]);
  }
  return out;
}

EdgeList augment_random_er(const EdgeList& e, std::uint32_t n_u, std::uint32_t n_v,
                           double phi, Rng& rng) {
  if (n_u < 1 || n_v < 1) throw std::invalid_argument("augment_random_er: empty node mode");
  const std::uint64_t budget = augment_budget(e.size(), phi);
  EdgeList out = e;
  out.reserve(e.size() + budget);
  for (std::uint64_t i = 0; i < budget; ++i) {
    out.push_back({static_cast<std::uint32_t>(rng.bounded(n_u)),
                   static_cast<std::uint32_t>(rng.bounded(n_v))});
  }
  return out;
}

EdgeList augment_synthetic(const EdgeList& e, std::uint32_t n_u, std::uint32_t n_v,
                           double phi, int radius, Rng& rng) {
  require_nonempty(e, phi, "augment_synthetic");
  if (radius < 0) throw std::invalid_argument("augment_synthetic: radius must be >= 0");
  const std::uint64_t budget = augment_budget(e.size(), phi);
  const std::uint64_t span = 2ULL * static_cast<std::uint64_t>(radius) + 1;

  EdgeList out = e;
  out.reserve(e.size() + budget);
  for (std::uint64_t i = 0; i < budget; ++i) {
    const Edge base = e[static_cast<std::size_t>(rng.bounded(e.size()))];
    // Independent per-axis deltas on {-r, ..., r}.
    const std::int64_t du = static_cast<std::int64_t>(rng.bounded(span)) - radius;
    const std::int64_t dv = static_cast<std::int64_t>(rng.bounded(span)) - radius;
    const std::int64_t u = std::clamp<std::int64_t>(static_cast<std::int64_t>(base.u) + du,
                                                    0, static_cast<std::int64_t>(n_u) - 1);
    const std::int64_t v = std::clamp<std::int64_t>(static_cast<std::int64_t>(base.v) + dv,
                                                    0, static_cast<std::int64_t>(n_v) - 1);
    out.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
  }
  return out;
}

namespace {

std::vector<std::pair<std::uint32_t, double>> knn_row(const FeatureMatrix& x, std::size_t i,
                                                      int k, double tau, bool include_self) {
  const std::size_t n = x.n_rows;
  std::vector<std::pair<double, std::uint32_t>> sims;
  sims.reserve(n);
  const double* xi = x.row(i);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i && !include_self) continue;
    const double* xj = x.row(j);
    double dot = 0.0;
    for (std::size_t t = 0; t < x.dim; ++t) dot += xi[t] * xj[t];
    sims.emplace_back(dot, static_cast<std::uint32_t>(j));
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), sims.size());
  // Descending similarity, equal similarities by ascending index.
  auto cmp = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(keep),
                    sims.end(), cmp);
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(keep);
  for (std::size_t t = 0; t < keep; ++t) {
    if (sims[t].first > tau) out.emplace_back(sims[t].second, sims[t].first);
  }
  return out;
}

}  // namespace

NeighborLists knn_neighbors_serial(const FeatureMatrix& x, int k, double tau,
                                   bool include_self) {
  if (k < 1) throw std::invalid_argument("knn_neighbors: k must be >= 1");
  NeighborLists nl;
  nl.lists.resize(x.n_rows);
  for (std::size_t i = 0; i < x.n_rows; ++i) {
    nl.lists[i] = knn_row(x, i, k, tau, include_self);
  }
  return nl;
}

NeighborLists knn_neighbors(const FeatureMatrix& x, int k, double tau, bool include_self) {
  if (k < 1) throw std::invalid_argument("knn_neighbors: k must be >= 1");
  NeighborLists nl;
  nl.lists.resize(x.n_rows);
  const std::int64_t n = static_cast<std::int64_t>(x.n_rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    nl.lists[static_cast<std::size_t>(i)] =
        knn_row(x, static_cast<std::size_t>(i), k, tau, include_self);
  }
  return nl;
}

AugmentResult augment_semantic_knn(const EdgeList& e, const NeighborLists& s_u,
                                   const NeighborLists& s_v, double phi, int alpha) {
  if (alpha < 1) throw std::invalid_argument("augment_semantic_knn: alpha must be >= 1");
  const std::uint64_t budget = augment_budget(e.size(), phi);

  EdgeSet membership(e.begin(), e.end());
  std::vector<std::uint32_t> cap_u(s_u.lists.size(), 0), cap_v(s_v.lists.size(), 0);
  const std::uint32_t cap = static_cast<std::uint32_t>(alpha);

  EdgeList added;
  std::uint64_t remaining = budget;
  for (const Edge& base : e) {
    if (remaining == 0) break;
    // Substitute the V endpoint with its semantic neighbors first, ...
    for (const auto& [v_knn, sim] : s_v.lists[base.v]) {
      if (remaining == 0) break;
      Edge cand{base.u, v_knn};
      if (cap_u[base.u] < cap && cap_v[v_knn] < cap && membership.insert(cand).second) {
        added.push_back(cand);
        ++cap_u[base.u];
        ++cap_v[v_knn];
        --remaining;
      }
    }
    // ... then the U endpoint.
    for (const auto& [u_knn, sim] : s_u.lists[base.u]) {
      if (remaining == 0) break;
      Edge cand{u_knn, base.v};
      if (cap_u[u_knn] < cap && cap_v[base.v] < cap && membership.insert(cand).second) {
        added.push_back(cand);
        ++cap_u[u_knn];
        ++cap_v[base.v];
        --remaining;
      }
    }
  }

  AugmentResult r;
  r.edges = e;
  r.edges.insert(r.edges.end(), added.begin(), added.end());
  r.shortfall = remaining;
  return r;
}

AugmentResult apply_policy(const AugmentationPolicy& policy, const EdgeList& train_edges,
                           std::uint32_t n_u, std::uint32_t n_v, FeaturePair features,
                           Rng& rng) {
  policy.validate();
  switch (policy.kind) {
    case PolicyKind::kNone:
      return {train_edges, 0};
    case PolicyKind::kSimple:
      return {augment_simple(train_edges, policy.phi, rng), 0};
    case PolicyKind::kDegreeAware: {
      BipartiteGraph g{n_u, n_v, train_edges};
      return {augment_degree_aware(train_edges, degrees(g), policy.phi, policy.epsilon, rng),
              0};
    }
    case PolicyKind::kRandomEr:
      return {augment_random_er(train_edges, n_u, n_v, policy.phi, rng), 0};
    case PolicyKind::kSynthetic:
      return {augment_synthetic(train_edges, n_u, n_v, policy.phi, policy.radius, rng), 0};
    case PolicyKind::kSemanticKnn: {
      if (features.u == nullptr || features.v == nullptr) {
        throw std::invalid_argument("semantic_knn requires feature matrices for both modes");
      }
      NeighborLists s_u = knn_neighbors(*features.u, policy.k, policy.tau,
                                        policy.knn_include_self);
      NeighborLists s_v = knn_neighbors(*features.v, policy.k, policy.tau,
                                        policy.knn_include_self);
      return augment_semantic_knn(train_edges, s_u, s_v, policy.phi, policy.alpha);
    }
  }
  throw std::logic_error("apply_policy: unreachable");
}

}  // namespace aegis
