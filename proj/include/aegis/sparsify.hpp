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
#include <filesystem>

#include "aegis/graph.hpp"
#include "aegis/rng.hpp"

namespace aegis {

// Leakage boundary: disjoint positive partitions of the post-percolation
// edge set plus sampled non-edges. Negatives never intersect the full
// pre-split edge set and never repeat across splits.
struct LinkSplit {
  EdgeList train_pos, val_pos, test_pos;
  EdgeList train_neg, val_neg, test_neg;
  double negative_ratio = 1.0;
};

// Keep each edge independently with probability q. Node counts and the
// relative order of kept edges are preserved.
BipartiteGraph percolate(const BipartiteGraph& g, double q, Rng& rng);

LinkSplit split_links(const BipartiteGraph& g,
                      std::array<double, 3> ratios,  // train/val/test, sum 1
                      double negative_ratio, Rng& rng);

// One directory per split: six edge-list files plus metadata.json.
void save_split(const LinkSplit& s, const std::filesystem::path& dir,
                std::uint64_t seed, double q, std::array<double, 3> ratios);
LinkSplit load_split(const std::filesystem::path& dir, std::uint32_t n_u, std::uint32_t n_v);

}  // namespace aegis
