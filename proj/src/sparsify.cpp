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

#include "aegis/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aegis {
namespace {

using json = nlohmann::json;

// Largest-remainder apportionment of n into three parts.
std::array<std::size_t, 3> apportion(std::size_t n, std::array<double, 3> ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    frac[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  // Remaining units go to the largest fractional parts; ties favor the
  // earlier split (train > val > test).
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++sizes[order[r % 3]];
  return sizes;
}

}  // namespace

BipartiteGraph percolate(const BipartiteGraph& g, double q, Rng& rng) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("percolate: retain rate q must be in (0, 1], got " +
                                std::to_string(q));
  }
  BipartiteGraph out{g.n_u, g.n_v, {}};
  out.edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    if (rng.uniform01() < q) out.edges.push_back(e);
  }
  return out;
}

LinkSplit split_links(const BipartiteGraph& g, std::array<double, 3> ratios,
                      double negative_ratio, Rng& rng) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (!(ratios[0] > 0 && ratios[1] > 0 && ratios[2] > 0) || std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split_links: ratios must be positive and sum to 1");
  }
  if (negative_ratio < 0) throw std::invalid_argument("split_links: negative_ratio < 0");

  EdgeList distinct = distinct_edges(g.edges);
  if (distinct.size() < g.edges.size()) {
    std::cerr << "split_links: warning: " << (g.edges.size() - distinct.size())
              << " duplicate edges collapsed for splitting\n";
  }
  if (distinct.size() < 3) {
    throw std::invalid_argument("split_links: need at least 3 distinct edges, got " +
                                std::to_string(distinct.size()));
  }

  rng.shuffle(distinct);
  auto sizes = apportion(distinct.size(), ratios);

  LinkSplit s;
  s.negative_ratio = negative_ratio;
  auto it = distinct.begin();
  s.train_pos.assign(it, it + sizes[0]);
  it += sizes[0];
  s.val_pos.assign(it, it + sizes[1]);
  it += sizes[1];
  s.test_pos.assign(it, it + sizes[2]);

  std::array<std::size_t, 3> neg_counts{};
  std::size_t total_neg = 0;
  const std::array<std::size_t, 3> pos_counts{sizes[0], sizes[1], sizes[2]};
  for (int i = 0; i < 3; ++i) {
    neg_counts[i] = static_cast<std::size_t>(
        std::llround(negative_ratio * static_cast<double>(pos_counts[i])));
    total_neg += neg_counts[i];
  }

  EdgeSet forbidden(distinct.begin(), distinct.end());
  const std::uint64_t cells = static_cast<std::uint64_t>(g.n_u) * g.n_v;
  if (cells - distinct.size() < total_neg) {
    throw std::invalid_argument("split_links: graph too dense to supply " +
                                std::to_string(total_neg) + " negatives (" +
                                std::to_string(cells - distinct.size()) +
                                " non-edges available)");
  }

  EdgeList negatives;
  negatives.reserve(total_neg);
  const double density = static_cast<double>(distinct.size()) / static_cast<double>(cells);
  if (density > 0.5) {
    // Rejection sampling degenerates near completeness; enumerate the
    // complement instead.
    EdgeList complement;
    complement.reserve(cells - distinct.size());
    for (std::uint32_t u = 0; u < g.n_u; ++u) {
      for (std::uint32_t v = 0; v < g.n_v; ++v) {
        Edge e{u, v};
        if (!forbidden.contains(e)) complement.push_back(e);
      }
    }
    rng.shuffle(complement);
    negatives.assign(complement.begin(), complement.begin() + total_neg);
  } else {
    EdgeSet drawn;
    drawn.reserve(total_neg);
    while (negatives.size() < total_neg) {
      Edge e{static_cast<std::uint32_t>(rng.bounded(g.n_u)),
             static_cast<std::uint32_t>(rng.bounded(g.n_v))};
      if (forbidden.contains(e) || !drawn.insert(e).second) continue;
      negatives.push_back(e);
    }
  }

  auto nit = negatives.begin();
  s.train_neg.assign(nit, nit + neg_counts[0]);
  nit += neg_counts[0];
  s.val_neg.assign(nit, nit + neg_counts[1]);
  nit += neg_counts[1];
  s.test_neg.assign(nit, nit + neg_counts[2]);
  return s;
}

void save_split(const LinkSplit& s, const std::filesystem::path& dir, std::uint64_t seed,
                double q, std::array<double, 3> ratios) {
  std::filesystem::create_directories(dir);
  save_edges(s.train_pos, dir / "train_pos.txt");
  save_edges(s.train_neg, dir / "train_neg.txt");
  save_edges(s.val_pos, dir / "val_pos.txt");
  save_edges(s.val_neg, dir / "val_neg.txt");
  save_edges(s.test_pos, dir / "test_pos.txt");
  save_edges(s.test_neg, dir / "test_neg.txt");
  json meta{{"seed", seed},
            {"q", q},
            {"ratios", ratios},
            {"negative_ratio", s.negative_ratio}};
  std::ofstream out(dir / "metadata.json");
  out << meta.dump(2) << '\n';
}

LinkSplit load_split(const std::filesystem::path& dir, std::uint32_t n_u, std::uint32_t n_v) {
  LinkSplit s;
  s.train_pos = load_edges(dir / "train_pos.txt", n_u, n_v).edges;
  s.train_neg = load_edges(dir / "train_neg.txt", n_u, n_v).edges;
  s.val_pos = load_edges(dir / "val_pos.txt", n_u, n_v).edges;
  s.val_neg = load_edges(dir / "val_neg.txt", n_u, n_v).edges;
  s.test_pos = load_edges(dir / "test_pos.txt", n_u, n_v).edges;
  s.test_neg = load_edges(dir / "test_neg.txt", n_u, n_v).edges;
  std::ifstream in(dir / "metadata.json");
  if (in) {
    json meta = json::parse(in);
    s.negative_ratio = meta.value("negative_ratio", 1.0);
  }
  return s;
}

}  // namespace aegis
