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

#include <cmath>
#include <limits>

#include "aegis/rng.hpp"
#include "aegis/stats.hpp"
#include "support.hpp"

using namespace aegis;

namespace {

// Numeric oracle: two-tailed p = 2 * integral_{|t|}^{inf} f(x; df) dx by
// adaptive Simpson on the Student density, independent of the beta route.
double t_pdf(double x, int df) {
  const double v = df;
  return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2)) /
         std::sqrt(v * M_PI) * std::pow(1 + x * x / v, -(v + 1) / 2);
}

double simpson(double a, double b, int df, int n) {
  const double h = (b - a) / n;
  double s = t_pdf(a, df) + t_pdf(b, df);
  for (int i = 1; i < n; ++i) s += t_pdf(a + i * h, df) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3;
}

double p_oracle(double t, int df) {
  // valid for moderate-to-large df, where the density past the cutoff is
  // far below the comparison tolerance
  const double at = std::abs(t);
  const double cutoff = at + 50.0;
  return 2.0 * simpson(at, cutoff, df, 100000);
}

}  // namespace

TEST_CASE("incomplete beta: exact endpoints and symmetry") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x
  CHECK(incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  // I_x(a,b) = 1 - I_{1-x}(b,a)
  const double lhs = incomplete_beta(2.5, 4.0, 0.3);
  const double rhs = 1.0 - incomplete_beta(4.0, 2.5, 0.7);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  // I_x(1,b) = 1 - (1-x)^b
  CHECK(incomplete_beta(1.0, 5.0, 0.2) ==
        doctest::Approx(1.0 - std::pow(0.8, 5.0)).epsilon(1e-12));
}

TEST_CASE("t=0 gives p=1, and p is symmetric in the sign of t") {
  CHECK(t_two_tailed_p(0.0, 31) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t_two_tailed_p(2.4, 31) == doctest::Approx(t_two_tailed_p(-2.4, 31)).epsilon(1e-14));
}

TEST_CASE("p values match closed forms for df=1 and df=2") {
  for (double t : {0.5, 1.0, 2.4, 5.0, 10.0}) {
    // df=1: Cauchy tail, p = 1 - (2/pi) atan(|t|)
    CHECK(t_two_tailed_p(t, 1) ==
          doctest::Approx(1.0 - (2.0 / M_PI) * std::atan(t)).epsilon(1e-12));
    // df=2: p = 1 - |t| / sqrt(t^2 + 2)
    CHECK(t_two_tailed_p(t, 2) ==
          doctest::Approx(1.0 - t / std::sqrt(t * t + 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("p values match a numeric-integration oracle") {
  for (int df : {31, 101}) {
    for (double t : {0.8, 2.40, 3.66}) {
      CHECK(t_two_tailed_p(t, df) == doctest::Approx(p_oracle(t, df)).epsilon(1e-10));
    }
  }
}

TEST_CASE("p values at df=31 land in the published significance brackets") {
  // |t| = 2.40 at 31 df is a '*' result; |t| = 3.66 is '***'
  const double p1 = t_two_tailed_p(2.40, 31);
  CHECK(p1 > 0.0215);
  CHECK(p1 < 0.0235);
  const double p2 = t_two_tailed_p(3.66, 31);
  CHECK(p2 > 0.0007);
  CHECK(p2 < 0.0013);
}

TEST_CASE("p approaches the normal tail for large df") {
  for (double t : {1.0, 1.96, 3.0}) {
    const double normal_p = std::erfc(t / std::sqrt(2.0));
    CHECK(std::abs(t_two_tailed_p(t, 10000) - normal_p) < 1e-3);
  }
}

TEST_CASE("p is monotone decreasing in |t|") {
  double prev = 1.1;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const double p = t_two_tailed_p(t, 31);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("paired t on a hand-computed fixture") {
  // diffs = {1, 2, 3}: mean 2, sd 1, t = 2 / (1/sqrt(3)) = 2*sqrt(3)
  std::vector<double> a{2, 4, 6}, b{1, 2, 3};
  auto r = paired_t(a, b);
  CHECK(r.t == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.df == 2);
  CHECK(!r.zero_variance);
}

TEST_CASE("paired t input validation") {
  CHECK_THROWS_AS(paired_t({1.0}, {2.0}), std::invalid_argument);       // n < 2
  CHECK_THROWS_AS(paired_t({1.0, 2.0}, {2.0}), std::invalid_argument);  // mismatch
}

TEST_CASE("zero-variance differences") {
  // identical vectors: t = 0, not flagged
  auto r0 = paired_t({1, 2, 3}, {1, 2, 3});
  CHECK(r0.t == 0.0);
  CHECK(!r0.zero_variance);
  // constant nonzero difference: sentinel +-inf with the flag set
  auto r1 = paired_t({2, 3, 4}, {1, 2, 3});
  CHECK(r1.zero_variance);
  CHECK(std::isinf(r1.t));
  CHECK(r1.t > 0);
  CHECK(t_two_tailed_p(r1.t, r1.df) == 0.0);
}

TEST_CASE("paired t is antisymmetric in its arguments") {
  Rng rng(71);
  std::vector<double> a, b;
  for (int i = 0; i < 16; ++i) {
    a.push_back(rng.uniform01());
    b.push_back(rng.uniform01());
  }
  auto ab = paired_t(a, b);
  auto ba = paired_t(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
}

TEST_CASE("cohens d equals t / sqrt(n)") {
  Rng rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    const int n = 8 + static_cast<int>(rng.bounded(30));
    for (int i = 0; i < n; ++i) {
      a.push_back(rng.normal());
      b.push_back(rng.normal() + 0.2);
    }
    auto r = paired_t(a, b);
    CHECK(cohens_d_paired(a, b) ==
          doctest::Approx(r.t / std::sqrt(static_cast<double>(n))).epsilon(1e-12));
  }
}

TEST_CASE("star levels follow the fixed thresholds") {
  CHECK(star_level(0.2) == "ns");
  CHECK(star_level(0.05) == "ns");   // boundaries are strict
  CHECK(star_level(0.04) == "*");
  CHECK(star_level(0.01) == "*");
  CHECK(star_level(0.009) == "**");
  CHECK(star_level(0.001) == "**");
  CHECK(star_level(0.0009) == "***");
}

TEST_CASE("aggregate produces the expected rows on a hand fixture") {
  std::map<std::string, std::vector<double>> runs{
      {"none", {0.60, 0.62, 0.64, 0.66}},
      {"boost", {0.70, 0.73, 0.76, 0.79}},
  };
  auto rows = aggregate(runs, "none");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "none");
  CHECK(rows[0].is_baseline);
  CHECK(rows[0].mean == doctest::Approx(0.63).epsilon(1e-12));
  CHECK(rows[0].n == 4);

  const auto& m = rows[1];
  CHECK(m.method == "boost");
  CHECK(!m.is_baseline);
  CHECK(m.mean == doctest::Approx(0.745).epsilon(1e-12));
  CHECK(m.delta == doctest::Approx(0.115).epsilon(1e-12));
  // diffs baseline - method = {-0.10, -0.11, -0.12, -0.13}: mean -0.115,
  // sd = sqrt(sum((d-mean)^2)/3) = sqrt(0.0005/3)
  const double sd = std::sqrt(0.0005 / 3.0);
  const double expect_t = -0.115 / (sd / 2.0);
  CHECK(m.t_stat == doctest::Approx(expect_t).epsilon(1e-12));
  CHECK(m.df == 3);
  CHECK(m.cohens_d == doctest::Approx(expect_t / 2.0).epsilon(1e-12));
  CHECK(m.p_value == doctest::Approx(t_two_tailed_p(expect_t, 3)).epsilon(1e-12));
  CHECK(m.stars == star_level(m.p_value));
}

TEST_CASE("aggregate validation") {
  CHECK_THROWS_AS(aggregate({{"a", {1, 2}}}, "missing"), std::invalid_argument);
  CHECK_THROWS_AS(aggregate({{"a", {1, 2}}, {"b", {1, 2, 3}}}, "a"), std::invalid_argument);
}

TEST_CASE("stat rows survive a CSV round-trip") {
  std::map<std::string, std::vector<double>> runs{
      {"none", {0.61, 0.59, 0.64, 0.62, 0.60}},
      {"x", {0.70, 0.68, 0.71, 0.72, 0.69}},
      {"y", {0.55, 0.58, 0.52, 0.57, 0.54}},
  };
  auto rows = aggregate(runs, "none");
  auto back = stat_rows_from_csv(stat_rows_to_csv(rows));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].mean == rows[i].mean);
    CHECK(back[i].sd == rows[i].sd);
    CHECK(back[i].delta == rows[i].delta);
    CHECK(back[i].t_stat == rows[i].t_stat);
    CHECK(back[i].p_value == rows[i].p_value);
    CHECK(back[i].cohens_d == rows[i].cohens_d);
    CHECK(back[i].stars == rows[i].stars);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].df == rows[i].df);
    CHECK(back[i].is_baseline == rows[i].is_baseline);
  }
}

TEST_CASE("markdown table formats means, tests, and small p-values") {
  std::map<std::string, std::vector<double>> runs{
      {"none", {0.500, 0.510, 0.520, 0.530}},
      {"big", {0.901, 0.905, 0.911, 0.915}},
  };
  auto rows = aggregate(runs, "none");
  auto md = stat_rows_to_markdown(rows, "AUC");
  CHECK(md.find("AUC") != std::string::npos);
  CHECK(md.find("0.515") != std::string::npos);   // baseline mean, 3 dp
  CHECK(md.find("0.908") != std::string::npos);   // method mean, 3 dp
  CHECK(md.find("t(3)") != std::string::npos);    // df in header
  CHECK(md.find("<0.001") != std::string::npos);  // tiny p rendered as bound
  CHECK(md.find("***") != std::string::npos);
}
