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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace aegis {

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    std::uint64_t k = (static_cast<std::uint64_t>(e.u) << 32) | e.v;
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

using EdgeList = std::vector<Edge>;
using EdgeSet = std::unordered_set<Edge, EdgeHash>;

// Two node modes with an ordered edge multiset between them. Duplicate
// edges are permitted and preserved in insertion order; augmentation
// never changes n_u or n_v.
struct BipartiteGraph {
  std::uint32_t n_u = 0;
  std::uint32_t n_v = 0;
  EdgeList edges;
};

struct DegreeTable {
  std::vector<std::uint64_t> deg_u;
  std::vector<std::uint64_t> deg_v;
};

// Dense per-mode feature rows, L2-normalized at load. All-zero rows are
// kept as zeros and their indices recorded.
struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major
  std::vector<std::uint32_t> zero_rows;

  const double* row(std::size_t i) const { return data.data() + i * dim; }
};

// Edge-list text format: one "u,v" or "u<TAB>v" pair per line, '#' lines
// skipped, delimiter auto-detected from the first data line.
BipartiteGraph load_edges(const std::filesystem::path& path, std::uint32_t n_u,
                          std::uint32_t n_v);
void save_edges(const EdgeList& edges, const std::filesystem::path& path);

FeatureMatrix load_features(const std::filesystem::path& path, std::size_t expected_rows);

DegreeTable degrees(const BipartiteGraph& g);

// Deduplicated view preserving first-occurrence order.
EdgeList distinct_edges(const EdgeList& edges);

// Ingest an edge file whose endpoints are arbitrary string IDs. Assigns
// dense 0-based indices per mode in first-appearance order and writes
// the dense edge list plus one "external_id,dense_index" sidecar per mode.
struct IngestResult {
  BipartiteGraph graph;
  std::vector<std::string> ids_u;
  std::vector<std::string> ids_v;
};
IngestResult ingest_edges(const std::filesystem::path& path);
void save_id_map(const std::vector<std::string>& ids, const std::filesystem::path& path);

}  // namespace aegis
