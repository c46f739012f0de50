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

// Test-only helpers: fixture generators and independent statistical
// oracles. Nothing here may call back into the code paths under test.

#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "aegis/graph.hpp"
#include "aegis/rng.hpp"

namespace testsupport {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("aegis-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline aegis::BipartiteGraph random_graph(aegis::Rng& rng, std::uint32_t n_u,
                                          std::uint32_t n_v, std::size_t n_edges,
                                          bool distinct = false) {
  aegis::BipartiteGraph g{n_u, n_v, {}};
  aegis::EdgeSet seen;
  while (g.edges.size() < n_edges) {
    aegis::Edge e{static_cast<std::uint32_t>(rng.bounded(n_u)),
                  static_cast<std::uint32_t>(rng.bounded(n_v))};
    if (distinct && !seen.insert(e).second) continue;
    g.edges.push_back(e);
  }
  return g;
}

inline aegis::FeatureMatrix random_unit_features(aegis::Rng& rng, std::size_t n,
                                                 std::size_t d) {
  aegis::FeatureMatrix m;
  m.n_rows = n;
  m.dim = d;
  m.data.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm_sq = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      double x = rng.normal();
      m.data[i * d + t] = x;
      norm_sq += x * x;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t t = 0; t < d; ++t) m.data[i * d + t] *= inv;
  }
  return m;
}

// --- regularized incomplete gamma, for chi-square oracles ---

inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-14) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
  const double fpmin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-14) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// P(X <= x) for chi-square with df degrees of freedom.
inline double chi2_cdf(double x, double df) {
  const double a = df / 2.0, hx = x / 2.0;
  if (x <= 0) return 0.0;
  if (hx < a + 1.0) return gamma_p_series(a, hx);
  return 1.0 - gamma_q_cf(a, hx);
}

inline double chi2_p_value(double stat, double df) { return 1.0 - chi2_cdf(stat, df); }

// Chi-square goodness-of-fit p-value of observed counts against expected
// probabilities (expected counts = total * prob).
inline double chi2_gof_p(const std::vector<std::uint64_t>& observed,
                         const std::vector<double>& probs) {
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probs[i];
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  return chi2_p_value(stat, static_cast<double>(observed.size() - 1));
}

// Planted-block bipartite benchmark: b matched blocks per mode, positives
// exactly within matched blocks, features = block indicator plus Gaussian
// noise. Files written in edge-list / feature-table formats.
struct PlantedDataset {
  std::filesystem::path edges, features_u, features_v;
  std::uint32_t n_u = 0, n_v = 0;
};

inline PlantedDataset write_planted_dataset(const std::filesystem::path& dir,
                                            std::uint32_t nodes_per_mode, int blocks,
                                            double noise_sigma, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  PlantedDataset ds;
  ds.n_u = nodes_per_mode;
  ds.n_v = nodes_per_mode;
  ds.edges = dir / "edges.txt";
  ds.features_u = dir / "features_u.txt";
  ds.features_v = dir / "features_v.txt";

  const std::uint32_t per_block = nodes_per_mode / static_cast<std::uint32_t>(blocks);
  aegis::Rng rng(seed);
  {
    std::ofstream out(ds.edges);
    for (int b = 0; b < blocks; ++b) {
      const std::uint32_t lo = static_cast<std::uint32_t>(b) * per_block;
      for (std::uint32_t u = lo; u < lo + per_block; ++u) {
        for (std::uint32_t v = lo; v < lo + per_block; ++v) {
          out << u << ',' << v << '\n';
        }
      }
    }
  }
  auto write_features = [&](const std::filesystem::path& path) {
    std::ofstream out(path);
    for (std::uint32_t i = 0; i < nodes_per_mode; ++i) {
      const int block = static_cast<int>(i / per_block);
      for (int t = 0; t < blocks; ++t) {
        const double x = (t == block ? 1.0 : 0.0) + noise_sigma * rng.normal();
        out << x << (t + 1 == blocks ? '\n' : ',');
      }
    }
  };
  write_features(ds.features_u);
  write_features(ds.features_v);
  return ds;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace testsupport
