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

#include "aegis/graph.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace aegis {
namespace {

std::runtime_error file_error(const std::filesystem::path& path, const std::string& msg) {
  return std::runtime_error(path.string() + ": " + msg);
}

// One delimiter decision per file, taken from the first data line.
char detect_delimiter(const std::string& line) {
  if (line.find(',') != std::string::npos) return ',';
  return '\t';
}

bool parse_u32(const std::string& s, std::uint32_t& out) {
  if (s.empty()) return false;
  std::uint64_t val = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    val = val * 10 + static_cast<std::uint64_t>(c - '0');
    if (val > 0xffffffffULL) return false;
  }
  out = static_cast<std::uint32_t>(val);
  return true;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

BipartiteGraph load_edges(const std::filesystem::path& path, std::uint32_t n_u,
                          std::uint32_t n_v) {
  std::ifstream in(path);
  if (!in) throw file_error(path, "cannot open");

  BipartiteGraph g{n_u, n_v, {}};
  std::string line;
  char delim = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (delim == 0) delim = detect_delimiter(s);
    std::size_t pos = s.find(delim);
    std::uint32_t u = 0, v = 0;
    if (pos == std::string::npos || !parse_u32(strip(s.substr(0, pos)), u) ||
        !parse_u32(strip(s.substr(pos + 1)), v)) {
      throw file_error(path, "malformed line at line " + std::to_string(lineno));
    }
    if (u >= n_u)
      throw file_error(path, "u index " + std::to_string(u) + " out of range at line " +
                                 std::to_string(lineno));
    if (v >= n_v)
      throw file_error(path, "v index " + std::to_string(v) + " out of range at line " +
                                 std::to_string(lineno));
    g.edges.push_back({u, v});
  }
  return g;
}

void save_edges(const EdgeList& edges, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw file_error(path, "cannot open for write");
  for (const Edge& e : edges) out << e.u << ',' << e.v << '\n';
  if (!out) throw file_error(path, "write failed");
}

FeatureMatrix load_features(const std::filesystem::path& path, std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw file_error(path, "cannot open");

  FeatureMatrix m;
  std::string line;
  char delim = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (delim == 0) delim = detect_delimiter(s);
    std::vector<double> row;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, delim)) {
      cell = strip(cell);
      try {
        std::size_t consumed = 0;
        double x = std::stod(cell, &consumed);
        if (consumed != cell.size()) throw std::invalid_argument(cell);
        row.push_back(x);
      } catch (const std::exception&) {
        throw file_error(path, "non-numeric cell '" + cell + "' at line " +
                                   std::to_string(lineno));
      }
    }
    if (m.dim == 0) {
      m.dim = row.size();
    } else if (row.size() != m.dim) {
      throw file_error(path, "ragged row at line " + std::to_string(lineno) + " (" +
                                 std::to_string(row.size()) + " columns, expected " +
                                 std::to_string(m.dim) + ")");
    }
    double norm_sq = 0.0;
    for (double x : row) norm_sq += x * x;
    if (norm_sq == 0.0) {
      m.zero_rows.push_back(static_cast<std::uint32_t>(m.n_rows));
    } else {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : row) x *= inv;
    }
    m.data.insert(m.data.end(), row.begin(), row.end());
    ++m.n_rows;
  }
  if (m.n_rows != expected_rows) {
    throw file_error(path, "row count " + std::to_string(m.n_rows) + " != " +
                               std::to_string(expected_rows));
  }
  return m;
}

DegreeTable degrees(const BipartiteGraph& g) {
  DegreeTable t;
  t.deg_u.assign(g.n_u, 0);
  t.deg_v.assign(g.n_v, 0);
  for (const Edge& e : g.edges) {
    ++t.deg_u[e.u];
    ++t.deg_v[e.v];
  }
  return t;
}

EdgeList distinct_edges(const EdgeList& edges) {
  EdgeList out;
  EdgeSet seen;
  seen.reserve(edges.size());
  for (const Edge& e : edges) {
    if (seen.insert(e).second) out.push_back(e);
  }
  return out;
}

IngestResult ingest_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw file_error(path, "cannot open");

  IngestResult r;
  std::unordered_map<std::string, std::uint32_t> map_u, map_v;
  std::string line;
  char delim = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (delim == 0) delim = detect_delimiter(s);
    std::size_t pos = s.find(delim);
    if (pos == std::string::npos)
      throw file_error(path, "malformed line at line " + std::to_string(lineno));
    std::string id_u = strip(s.substr(0, pos));
    std::string id_v = strip(s.substr(pos + 1));
    if (id_u.empty() || id_v.empty())
      throw file_error(path, "empty id at line " + std::to_string(lineno));
    auto [iu, new_u] = map_u.try_emplace(id_u, static_cast<std::uint32_t>(r.ids_u.size()));
    if (new_u) r.ids_u.push_back(id_u);
    auto [iv, new_v] = map_v.try_emplace(id_v, static_cast<std::uint32_t>(r.ids_v.size()));
    if (new_v) r.ids_v.push_back(id_v);
    r.graph.edges.push_back({iu->second, iv->second});
  }
  r.graph.n_u = static_cast<std::uint32_t>(r.ids_u.size());
  r.graph.n_v = static_cast<std::uint32_t>(r.ids_v.size());
  return r;
}

void save_id_map(const std::vector<std::string>& ids, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw file_error(path, "cannot open for write");
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << i << '\n';
  if (!out) throw file_error(path, "write failed");
}

}  // namespace aegis
