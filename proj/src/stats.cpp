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

#include "aegis/stats.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aegis {
namespace {

constexpr int kMaxIterations = 300;
constexpr double kCfTolerance = 1e-12;
constexpr double kFpMin = 1e-300;

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfTolerance) return h;
  }
  return h;  // converged to CF precision limit
}

struct DiffStats {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

DiffStats diff_stats(const std::vector<double>& a, const std::vector<double>& b,
                     const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": length mismatch");
  }
  if (a.size() < 2) {
    throw std::invalid_argument(std::string(op) + ": need at least 2 pairs");
  }
  DiffStats s;
  s.n = static_cast<int>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s.mean += a[i] - b[i];
  s.mean /= s.n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) - s.mean;
    ss += d * d;
  }
  s.sd = std::sqrt(ss / (s.n - 1));
  return s;
}

double sample_mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fmt(double x, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  // Symmetry keeps the continued fraction in its fast-convergence region.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

PairedT paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  const DiffStats s = diff_stats(a, b, "paired_t");
  PairedT r;
  r.df = s.n - 1;
  if (s.sd == 0.0) {
    if (s.mean == 0.0) {
      r.t = 0.0;
    } else {
      r.t = s.mean > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
      r.zero_variance = true;
    }
    return r;
  }
  r.t = s.mean / (s.sd / std::sqrt(static_cast<double>(s.n)));
  return r;
}

double t_two_tailed_p(double t, int df) {
  if (df < 1) throw std::invalid_argument("t_two_tailed_p: df must be >= 1");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

double cohens_d_paired(const std::vector<double>& a, const std::vector<double>& b) {
  const DiffStats s = diff_stats(a, b, "cohens_d_paired");
  if (s.sd == 0.0) {
    if (s.mean == 0.0) return 0.0;
    return s.mean > 0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  return s.mean / s.sd;
}

std::string star_level(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

std::vector<StatRow> aggregate(const std::map<std::string, std::vector<double>>& method_runs,
                               const std::string& baseline) {
  auto base_it = method_runs.find(baseline);
  if (base_it == method_runs.end()) {
    throw std::invalid_argument("aggregate: baseline '" + baseline + "' not present");
  }
  const std::vector<double>& base = base_it->second;
  if (base.size() < 2) throw std::invalid_argument("aggregate: need >= 2 seeds");
  for (const auto& [name, runs] : method_runs) {
    if (runs.size() != base.size()) {
      throw std::invalid_argument("aggregate: seed-set mismatch for method '" + name + "'");
    }
  }

  std::vector<StatRow> rows;
  // Baseline first, then the remaining methods in map order.
  StatRow base_row;
  base_row.method = baseline;
  base_row.mean = sample_mean(base);
  base_row.sd = sample_sd(base);
  base_row.n = static_cast<int>(base.size());
  base_row.df = base_row.n - 1;
  base_row.is_baseline = true;
  rows.push_back(base_row);

  for (const auto& [name, runs] : method_runs) {
    if (name == baseline) continue;
    StatRow row;
    row.method = name;
    row.mean = sample_mean(runs);
    row.sd = sample_sd(runs);
    row.delta = row.mean - base_row.mean;
    const PairedT pt = paired_t(base, runs);  // baseline - method, paper sign convention
    row.t_stat = pt.t;
    row.n = pt.df + 1;
    row.df = pt.df;
    if (pt.zero_variance) {
      std::cerr << "aggregate: warning: zero-variance differences for '" << name
                << "', reporting sentinel p = 0\n";
      row.p_value = 0.0;
      row.cohens_d = cohens_d_paired(base, runs);
    } else {
      row.p_value = t_two_tailed_p(pt.t, pt.df);
      row.cohens_d = cohens_d_paired(base, runs);
    }
    row.stars = star_level(row.p_value);
    rows.push_back(row);
  }
  return rows;
}

std::string stat_rows_to_csv(const std::vector<StatRow>& rows) {
  std::ostringstream out;
  out << "method,n,df,mean,sd,delta,t,p,d,stars,is_baseline\n";
  for (const StatRow& r : rows) {
    out << r.method << ',' << r.n << ',' << r.df << ',' << fmt(r.mean, "%.17g") << ','
        << fmt(r.sd, "%.17g") << ',';
    if (r.is_baseline) {
      out << "0,,,,," << 1 << '\n';
    } else {
      out << fmt(r.delta, "%.17g") << ',' << fmt(r.t_stat, "%.17g") << ','
          << fmt(r.p_value, "%.17g") << ',' << fmt(r.cohens_d, "%.17g") << ',' << r.stars
          << ",0\n";
    }
  }
  return out.str();
}

std::vector<StatRow> stat_rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<StatRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(11);
    StatRow r;
    r.method = cells[0];
    r.n = std::stoi(cells[1]);
    r.df = std::stoi(cells[2]);
    r.mean = std::stod(cells[3]);
    r.sd = std::stod(cells[4]);
    r.is_baseline = cells[10] == "1";
    if (!r.is_baseline) {
      r.delta = std::stod(cells[5]);
      r.t_stat = std::stod(cells[6]);
      r.p_value = std::stod(cells[7]);
      r.cohens_d = std::stod(cells[8]);
      r.stars = cells[9];
    } else {
      r.delta = 0.0;
      r.stars = "ns";
    }
    rows.push_back(r);
  }
  return rows;
}

std::string stat_rows_to_markdown(const std::vector<StatRow>& rows,
                                  const std::string& metric_name) {
  std::ostringstream out;
  int df = rows.empty() ? 0 : rows.front().df;
  out << "| Method | " << metric_name << " M ± SD | Δ | t(" << df << ") | p | d |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const StatRow& r : rows) {
    out << "| " << r.method << " | " << fmt(r.mean, "%.3f") << " ± " << fmt(r.sd, "%.3f")
        << " | ";
    if (r.is_baseline) {
      out << "+0.000 | — | — | — |\n";
      continue;
    }
    out << (r.delta >= 0 ? "+" : "") << fmt(r.delta, "%.3f");
    if (r.stars != "ns") {
      out << r.stars;
    } else {
      out << " (ns)";
    }
    out << " | " << fmt(r.t_stat, "%.2f") << " | "
        << (r.p_value < 0.001 ? std::string("<0.001") : fmt(r.p_value, "%.3f")) << " | "
        << fmt(r.cohens_d, "%.2f") << " |\n";
  }
  return out.str();
}

}  // namespace aegis
