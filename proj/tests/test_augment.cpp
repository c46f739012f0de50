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

#include <doctest.h>

#include <algorithm>
#include <map>

#include "aegis/augment.hpp"
#include "support.hpp"

using namespace aegis;

TEST_CASE("budget is floor((phi-1)|E|)") {
  CHECK(augment_budget(67, 100.0) == 6633);
  CHECK(augment_budget(10, 1.0) == 0);
  CHECK(augment_budget(10, 1.7) == 7);
  CHECK(augment_budget(3, 2.5) == 4);
}

TEST_CASE("simple resampling adds exactly the budget, all from E") {
  Rng rng(1);
  auto g = testsupport::random_graph(rng, 20, 20, 67);
  Rng arng(2);
  auto out = augment_simple(g.edges, 100.0, arng);
  CHECK(out.size() == 6700);
  CHECK(std::equal(g.edges.begin(), g.edges.end(), out.begin()));  // E is a prefix
  EdgeSet support(g.edges.begin(), g.edges.end());
  for (std::size_t i = 67; i < out.size(); ++i) CHECK(support.contains(out[i]));
}

TEST_CASE("simple with phi=1 returns E unchanged") {
  EdgeList e{{0, 0}, {1, 1}};
  Rng rng(1);
  CHECK(augment_simple(e, 1.0, rng) == e);
}

TEST_CASE("simple on a single edge duplicates it") {
  EdgeList e{{0, 0}};
  Rng rng(1);
  auto out = augment_simple(e, 5.0, rng);
  CHECK(out.size() == 5);
  for (const Edge& x : out) CHECK(x == Edge{0, 0});
}

TEST_CASE("empty edge set with phi > 1 is rejected") {
  EdgeList e;
  Rng rng(1);
  CHECK_THROWS_AS(augment_simple(e, 2.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(augment_synthetic(e, 2, 2, 2.0, 1, rng), std::invalid_argument);
}

TEST_CASE("degree-aware weights match the inverse-degree formula") {
  // deg_u = (1,1), deg_v = (2); eps = 1: both weights 1/2 + 1/3 = 5/6
  EdgeList e{{0, 0}, {1, 0}};
  DegreeTable deg{{1, 1}, {2}};
  auto p = degree_aware_weights(e, deg, 1.0);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("degree-aware sampling prefers low-degree endpoints") {
  // edge 0 endpoints have degree 1, edge 1 endpoints degree 100 (eps=1):
  // weight ratio (1/2+1/2)/(2/101) = 50.5
  EdgeList e{{0, 0}, {1, 1}};
  DegreeTable deg{{1, 100}, {1, 100}};
  auto p = degree_aware_weights(e, deg, 1.0);
  CHECK(p[0] / p[1] == doctest::Approx(50.5));

  const std::size_t n_draws = 100000;
  Rng rng(3);
  auto out = augment_degree_aware(e, deg, 1.0 + static_cast<double>(n_draws) / e.size(),
                                  1.0, rng);
  std::size_t hits0 = 0;
  for (std::size_t i = e.size(); i < out.size(); ++i) hits0 += out[i] == e[0] ? 1 : 0;
  const double expected = n_draws * p[0];
  const double sigma = std::sqrt(n_draws * p[0] * (1 - p[0]));
  CHECK(std::abs(static_cast<double>(hits0) - expected) < 3 * sigma);
}

TEST_CASE("degree-aware equals uniform when all endpoint degrees match") {
  EdgeList e{{0, 0}, {1, 1}, {2, 2}};
  DegreeTable deg{{4, 4, 4}, {4, 4, 4}};
  auto p = degree_aware_weights(e, deg, 1.0);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3));
}

TEST_CASE("random ER additions stay in range and hit cells uniformly") {
  EdgeList e{{0, 0}, {1, 1}};
  const std::size_t n_draws = 100000;
  Rng rng(7);
  auto out = augment_random_er(e, 4, 5, 1.0 + static_cast<double>(n_draws) / e.size(), rng);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
  for (std::size_t i = e.size(); i < out.size(); ++i) {
    REQUIRE(out[i].u < 4);
    REQUIRE(out[i].v < 5);
    ++counts[{out[i].u, out[i].v}];
  }
  const double expected = n_draws / 20.0;
  const double sigma = std::sqrt(n_draws * (1.0 / 20) * (19.0 / 20));
  for (std::uint32_t u = 0; u < 4; ++u) {
    for (std::uint32_t v = 0; v < 5; ++v) {
      CHECK(std::abs(static_cast<double>(counts[{u, v}]) - expected) < 3 * sigma);
    }
  }
}

TEST_CASE("random ER on a 1x1 graph only produces (0,0)") {
  EdgeList e{{0, 0}};
  Rng rng(1);
  auto out = augment_random_er(e, 1, 1, 10.0, rng);
  for (const Edge& x : out) CHECK(x == Edge{0, 0});
}

TEST_CASE("synthetic with r=0 only replays existing edges") {
  Rng rng(5);
  auto g = testsupport::random_graph(rng, 10, 10, 20);
  Rng arng(6);
  auto out = augment_synthetic(g.edges, 10, 10, 3.0, 0, arng);
  EdgeSet support(g.edges.begin(), g.edges.end());
  CHECK(out.size() == g.edges.size() + augment_budget(g.edges.size(), 3.0));
  for (const Edge& x : out) CHECK(support.contains(x));
}

TEST_CASE("synthetic clamps perturbed indices at the boundaries") {
  EdgeList e{{0, 0}};
  Rng rng(9);
  auto out = augment_synthetic(e, 2, 2, 50.0, 3, rng);
  for (const Edge& x : out) {
    CHECK(x.u < 2);
    CHECK(x.v < 2);
  }
}

TEST_CASE("synthetic additions lie within L-inf radius of some base edge") {
  Rng rng(11);
  auto g = testsupport::random_graph(rng, 30, 30, 25);
  const int r = 2;
  Rng arng(12);
  auto out = augment_synthetic(g.edges, 30, 30, 5.0, r, arng);
  // oracle: exhaustive min-distance scan over E
  for (std::size_t i = g.edges.size(); i < out.size(); ++i) {
    int best = 1 << 30;
    for (const Edge& b : g.edges) {
      int du = std::abs(static_cast<int>(out[i].u) - static_cast<int>(b.u));
      int dv = std::abs(static_cast<int>(out[i].v) - static_cast<int>(b.v));
      best = std::min(best, std::max(du, dv));
    }
    CHECK(best <= r);
  }
}

TEST_CASE("knn: identical rows are mutual top neighbors with similarity 1") {
  FeatureMatrix m;
  m.n_rows = 3;
  m.dim = 2;
  m.data = {1, 0, 1, 0, 0, 1};
  auto nl = knn_neighbors(m, 2, -1.0);
  REQUIRE(nl.lists[0].size() == 2);
  CHECK(nl.lists[0][0].first == 1);
  CHECK(nl.lists[0][0].second == doctest::Approx(1.0));
  CHECK(nl.lists[1][0].first == 0);
}

TEST_CASE("knn: strict threshold excludes orthogonal rows at tau=0") {
  FeatureMatrix m;
  m.n_rows = 2;
  m.dim = 2;
  m.data = {1, 0, 0, 1};
  auto nl = knn_neighbors(m, 2, 0.0);
  CHECK(nl.lists[0].empty());
  CHECK(nl.lists[1].empty());
}

TEST_CASE("knn include_self keeps the self-match") {
  FeatureMatrix m;
  m.n_rows = 2;
  m.dim = 2;
  m.data = {1, 0, 0, 1};
  auto nl = knn_neighbors(m, 1, -1.0, /*include_self=*/true);
  CHECK(nl.lists[0][0].first == 0);  // self wins every tie
}

TEST_CASE("knn matches an independent brute-force scan on random vectors") {
  Rng rng(17);
  auto m = testsupport::random_unit_features(rng, 100, 8);
  const int k = 5;
  const double tau = 0.1;
  auto nl = knn_neighbors(m, k, tau);
  auto serial = knn_neighbors_serial(m, k, tau);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    // oracle: full all-pairs ranking
    std::vector<std::pair<double, std::uint32_t>> sims;
    for (std::size_t j = 0; j < m.n_rows; ++j) {
      if (j == i) continue;
      double dot = 0;
      for (std::size_t t = 0; t < m.dim; ++t) dot += m.row(i)[t] * m.row(j)[t];
      sims.push_back({dot, static_cast<std::uint32_t>(j)});
    }
    std::sort(sims.begin(), sims.end(), [](auto a, auto b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::pair<std::uint32_t, double>> expected;
    for (int t = 0; t < k; ++t) {
      if (sims[t].first > tau) expected.push_back({sims[t].second, sims[t].first});
    }
    CHECK(nl.lists[i] == expected);
    CHECK(serial.lists[i] == nl.lists[i]);
  }
}

namespace {

NeighborLists make_lists(std::size_t n,
                         std::map<std::uint32_t,
                                  std::vector<std::pair<std::uint32_t, double>>> entries) {
  NeighborLists nl;
  nl.lists.resize(n);
  for (auto& [idx, list] : entries) nl.lists[idx] = std::move(list);
  return nl;
}

}  // namespace

TEST_CASE("semantic knn with empty neighbor lists returns E and a full shortfall") {
  EdgeList e{{0, 0}, {1, 1}};
  NeighborLists empty_u = make_lists(2, {});
  NeighborLists empty_v = make_lists(2, {});
  auto r = augment_semantic_knn(e, empty_u, empty_v, 3.0, 10);
  CHECK(r.edges == e);
  CHECK(r.shortfall == augment_budget(2, 3.0));
}

TEST_CASE("semantic knn replays the hand-simulated double loop on a 3-edge toy") {
  EdgeList e{{0, 0}, {1, 1}, {2, 2}};
  auto s_v = make_lists(3, {{0, {{1, 0.9}}}, {1, {{2, 0.8}}}});
  auto s_u = make_lists(3, {{0, {{1, 0.7}}}, {2, {{0, 0.6}}}});

  auto r = augment_semantic_knn(e, s_u, s_v, 3.0, 10);
  // hand simulation: (0,0)->add (0,1) then (1,0); (1,1)->add (1,2);
  // (2,2)->add (0,2); budget 6, 4 accepted
  EdgeList expected_added{{0, 1}, {1, 0}, {1, 2}, {0, 2}};
  REQUIRE(r.edges.size() == e.size() + expected_added.size());
  CHECK(EdgeList(r.edges.begin() + 3, r.edges.end()) == expected_added);
  CHECK(r.shortfall == 2);
}

TEST_CASE("semantic knn per-node cap alpha=1 limits each node to one addition") {
  EdgeList e{{0, 0}, {1, 1}, {2, 2}};
  auto s_v = make_lists(3, {{0, {{1, 0.9}}}, {1, {{2, 0.8}}}});
  auto s_u = make_lists(3, {{0, {{1, 0.7}}}, {2, {{0, 0.6}}}});

  auto r = augment_semantic_knn(e, s_u, s_v, 3.0, 1);
  EdgeList added(r.edges.begin() + 3, r.edges.end());
  CHECK(added == EdgeList{{0, 1}, {1, 0}});
  std::map<std::uint32_t, int> cu, cv;
  for (const Edge& x : added) {
    CHECK(++cu[x.u] <= 1);
    CHECK(++cv[x.v] <= 1);
  }
}

TEST_CASE("semantic knn output properties on random fixtures") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = testsupport::random_graph(rng, 12, 12, 15, true);
    auto fu = testsupport::random_unit_features(rng, 12, 4);
    auto fv = testsupport::random_unit_features(rng, 12, 4);
    const double tau = 0.2;
    const int alpha = 3;
    auto s_u = knn_neighbors(fu, 4, tau);
    auto s_v = knn_neighbors(fv, 4, tau);
    auto r = augment_semantic_knn(g.edges, s_u, s_v, 4.0, alpha);

    EdgeSet original(g.edges.begin(), g.edges.end());
    EdgeSet added_set;
    std::map<std::uint32_t, int> cu, cv;
    for (std::size_t i = g.edges.size(); i < r.edges.size(); ++i) {
      const Edge& x = r.edges[i];
      CHECK(!original.contains(x));
      CHECK(added_set.insert(x).second);  // no duplicates
      ++cu[x.u];
      ++cv[x.v];
    }
    for (auto [n, c] : cu) CHECK(c <= alpha);
    for (auto [n, c] : cv) CHECK(c <= alpha);
    CHECK(r.edges.size() - g.edges.size() + r.shortfall ==
          augment_budget(g.edges.size(), 4.0));
    // every added pair justified by a neighbor entry above tau
    for (const Edge& x : added_set) {
      bool justified = false;
      for (const Edge& base : g.edges) {
        if (base.u == x.u) {
          for (auto [nb, sim] : s_v.lists[base.v]) {
            if (nb == x.v && sim > tau) justified = true;
          }
        }
        if (base.v == x.v) {
          for (auto [nb, sim] : s_u.lists[base.u]) {
            if (nb == x.u && sim > tau) justified = true;
          }
        }
      }
      CHECK(justified);
    }
  }
}

TEST_CASE("all policies preserve node counts and are deterministic under a fixed seed") {
  Rng grng(31);
  auto g = testsupport::random_graph(grng, 10, 10, 20, true);
  auto fu = testsupport::random_unit_features(grng, 10, 4);
  auto fv = testsupport::random_unit_features(grng, 10, 4);

  for (auto kind : {PolicyKind::kNone, PolicyKind::kSimple, PolicyKind::kDegreeAware,
                    PolicyKind::kRandomEr, PolicyKind::kSynthetic,
                    PolicyKind::kSemanticKnn}) {
    AugmentationPolicy p;
    p.kind = kind;
    p.phi = 3.0;
    p.tau = 0.0;
    Rng r1(derive_seed(99, "augment:" + to_string(kind)));
    Rng r2(derive_seed(99, "augment:" + to_string(kind)));
    auto a = apply_policy(p, g.edges, 10, 10, {&fu, &fv}, r1);
    auto b = apply_policy(p, g.edges, 10, 10, {&fu, &fv}, r2);
    CHECK(a.edges == b.edges);
    CHECK(a.shortfall == b.shortfall);
    for (const Edge& x : a.edges) {
      CHECK(x.u < 10);
      CHECK(x.v < 10);
    }
    if (kind != PolicyKind::kSemanticKnn && kind != PolicyKind::kNone) {
      CHECK(a.edges.size() == g.edges.size() + augment_budget(g.edges.size(), 3.0));
    }
  }
}

TEST_CASE("policy parameter validation") {
  AugmentationPolicy p;
  p.phi = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.tau = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(policy_kind_from_string("bogus"), std::invalid_argument);
}
