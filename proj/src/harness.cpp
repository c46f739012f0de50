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

#include "aegis/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aegis/metrics.hpp"
#include "aegis/sparsify.hpp"
#include "aegis/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aegis {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + context + key + "'");
    }
  }
}

AugmentationPolicy parse_policy(const json& j, double default_phi) {
  reject_unknown_keys(
      j, {"kind", "phi", "epsilon", "radius", "k", "tau", "alpha", "knn_include_self"},
      "policies[].");
  AugmentationPolicy p;
  p.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  p.phi = j.value("phi", default_phi);
  p.epsilon = j.value("epsilon", p.epsilon);
  p.radius = j.value("radius", p.radius);
  p.k = j.value("k", p.k);
  p.tau = j.value("tau", p.tau);
  p.alpha = j.value("alpha", p.alpha);
  p.knn_include_self = j.value("knn_include_self", p.knn_include_self);
  return p;
}

json policy_to_json(const AugmentationPolicy& p) {
  return json{{"kind", to_string(p.kind)},     {"phi", p.phi},
              {"epsilon", p.epsilon},          {"radius", p.radius},
              {"k", p.k},                      {"tau", p.tau},
              {"alpha", p.alpha},              {"knn_include_self", p.knn_include_self}};
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for write");
    out << content;
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

struct EvalResult {
  double auc = 0.0;
  double brier_score = 0.0;
};

EvalResult evaluate(const TrainedModel& model, const EdgeList& pos, const EdgeList& neg) {
  EdgeList pairs = pos;
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  EvalSet es;
  es.probabilities = predict(model, pairs);
  es.labels.assign(pos.size(), 1);
  es.labels.insert(es.labels.end(), neg.size(), 0);
  return {auc_roc(es), brier(es)};
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.edges.empty()) throw std::invalid_argument("config: dataset.edges is required");
  if (dataset.n_u == 0 || dataset.n_v == 0) {
    throw std::invalid_argument("config: dataset.n_u and n_v must be positive");
  }
  if (n_seeds < 2) throw std::invalid_argument("config: n_seeds must be >= 2");
  if (policies.empty()) throw std::invalid_argument("config: at least one policy required");
  bool has_none = false;
  for (const auto& p : policies) {
    p.validate();
    if (p.kind == PolicyKind::kNone) has_none = true;
    if (p.kind == PolicyKind::kSemanticKnn &&
        (dataset.features_u.empty() || dataset.features_v.empty())) {
      throw std::invalid_argument(
          "config: semantic_knn requires dataset.features_u and features_v");
    }
  }
  if (!has_none) {
    throw std::invalid_argument("config: the `none` baseline policy is mandatory");
  }
  if (phi < 1.0) throw std::invalid_argument("config: phi must be >= 1");
  double sum = split.ratios[0] + split.ratios[1] + split.ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("config: split.ratios must sum to 1");
  }
  if (percolation.enabled && !(percolation.q > 0.0 && percolation.q <= 1.0)) {
    throw std::invalid_argument("config: percolation.q must be in (0, 1]");
  }
  train.validate();
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  json j = json::parse(in);

  reject_unknown_keys(j,
                      {"schema_version", "experiment", "dataset", "percolation", "split",
                       "policies", "phi", "train", "n_seeds", "base_seed", "output_dir"},
                      "");
  const int version = j.at("schema_version").get<int>();
  if (version != 1) {
    throw std::invalid_argument("config: unsupported schema_version " +
                                std::to_string(version));
  }

  ExperimentConfig c;
  c.experiment = j.value("experiment", c.experiment);
  c.phi = j.value("phi", c.phi);

  const json& d = j.at("dataset");
  reject_unknown_keys(d, {"edges", "features_u", "features_v", "n_u", "n_v"}, "dataset.");
  c.dataset.edges = d.at("edges").get<std::string>();
  c.dataset.features_u = d.value("features_u", "");
  c.dataset.features_v = d.value("features_v", "");
  c.dataset.n_u = d.at("n_u").get<std::uint32_t>();
  c.dataset.n_v = d.at("n_v").get<std::uint32_t>();

  if (j.contains("percolation")) {
    const json& p = j.at("percolation");
    reject_unknown_keys(p, {"enabled", "q", "per_seed"}, "percolation.");
    c.percolation.enabled = p.value("enabled", c.percolation.enabled);
    c.percolation.q = p.value("q", c.percolation.q);
    c.percolation.per_seed = p.value("per_seed", c.percolation.per_seed);
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    reject_unknown_keys(s, {"ratios", "negative_ratio", "disjoint_train_ratio"}, "split.");
    if (s.contains("ratios")) c.split.ratios = s.at("ratios").get<std::array<double, 3>>();
    c.split.negative_ratio = s.value("negative_ratio", c.split.negative_ratio);
    c.split.disjoint_train_ratio =
        s.value("disjoint_train_ratio", c.split.disjoint_train_ratio);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    reject_unknown_keys(t,
                        {"d_model", "learning_rate", "epochs", "batch_size", "l2",
                         "init_scale", "scorer", "resample_negatives"},
                        "train.");
    c.train.d_model = t.value("d_model", c.train.d_model);
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.l2 = t.value("l2", c.train.l2);
    c.train.init_scale = t.value("init_scale", c.train.init_scale);
    if (t.contains("scorer")) c.train.scorer = scorer_from_string(t.at("scorer"));
    c.train.resample_negatives = t.value("resample_negatives", c.train.resample_negatives);
  }
  for (const json& pj : j.at("policies")) {
    c.policies.push_back(parse_policy(pj, c.phi));
  }
  c.n_seeds = j.value("n_seeds", c.n_seeds);
  c.base_seed = j.value("base_seed", c.base_seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = c.experiment;
  j["dataset"] = {{"edges", c.dataset.edges},
                  {"features_u", c.dataset.features_u},
                  {"features_v", c.dataset.features_v},
                  {"n_u", c.dataset.n_u},
                  {"n_v", c.dataset.n_v}};
  j["percolation"] = {{"enabled", c.percolation.enabled},
                      {"q", c.percolation.q},
                      {"per_seed", c.percolation.per_seed}};
  j["split"] = {{"ratios", c.split.ratios},
                {"negative_ratio", c.split.negative_ratio},
                {"disjoint_train_ratio", c.split.disjoint_train_ratio}};
  json policies = json::array();
  for (const auto& p : c.policies) policies.push_back(policy_to_json(p));
  j["policies"] = policies;
  j["phi"] = c.phi;
  j["train"] = {{"d_model", c.train.d_model},
                {"learning_rate", c.train.learning_rate},
                {"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"l2", c.train.l2},
                {"init_scale", c.train.init_scale},
                {"scorer", to_string(c.train.scorer)},
                {"resample_negatives", c.train.resample_negatives}};
  j["n_seeds"] = c.n_seeds;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(c))));
  return buf;
}

fs::path resolve_output_dir(const ExperimentConfig& config) {
  if (const char* env = std::getenv("AEGIS_OUT_DIR"); env != nullptr && env[0] != '\0') {
    return fs::path(env);
  }
  return fs::path(config.output_dir);
}

namespace {

std::vector<RunRecord> run_pipeline(const ExperimentConfig& config, int jobs) {
  config.validate();
  jobs = std::max(1, jobs);

  BipartiteGraph original =
      load_edges(config.dataset.edges, config.dataset.n_u, config.dataset.n_v);
  // Percolation operates on the deduplicated original graph.
  BipartiteGraph base_graph{original.n_u, original.n_v, distinct_edges(original.edges)};

  FeatureMatrix feat_u, feat_v;
  bool has_semantic = false;
  for (const auto& p : config.policies) {
    if (p.kind == PolicyKind::kSemanticKnn) has_semantic = true;
  }
  // Neighbor lists depend only on features and policy parameters, so they
  // are shared across seeds.
  std::vector<std::optional<std::pair<NeighborLists, NeighborLists>>> neighbor_cache(
      config.policies.size());
  if (has_semantic) {
    feat_u = load_features(config.dataset.features_u, config.dataset.n_u);
    feat_v = load_features(config.dataset.features_v, config.dataset.n_v);
    for (std::size_t i = 0; i < config.policies.size(); ++i) {
      const auto& p = config.policies[i];
      if (p.kind != PolicyKind::kSemanticKnn) continue;
      neighbor_cache[i] = {knn_neighbors(feat_u, p.k, p.tau, p.knn_include_self),
                           knn_neighbors(feat_v, p.k, p.tau, p.knn_include_self)};
    }
  }

  std::optional<BipartiteGraph> shared_percolated;
  if (config.percolation.enabled && !config.percolation.per_seed) {
    Rng rng(derive_seed(config.base_seed, "percolate"));
    shared_percolated = percolate(base_graph, config.percolation.q, rng);
  }

  const std::string hash = config_hash(config);
  const fs::path exp_dir = resolve_output_dir(config) / config.experiment;
  fs::create_directories(exp_dir);
  {
    std::ofstream out(exp_dir / "effective_config.json");
    out << config_to_json(config) << '\n';
  }

  const std::size_t n_policies = config.policies.size();
  std::vector<RunRecord> records(static_cast<std::size_t>(config.n_seeds) * n_policies);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
  for (int run_index = 0; run_index < config.n_seeds; ++run_index) {
    const std::uint64_t run_seed = config.base_seed + static_cast<std::uint64_t>(run_index);
    const fs::path seed_dir = exp_dir / std::to_string(run_seed);

    LinkSplit split;
    bool split_ok = true;
    std::string split_error;
    try {
      BipartiteGraph percolated = base_graph;
      if (config.percolation.enabled) {
        if (config.percolation.per_seed) {
          Rng rng(derive_seed(run_seed, "percolate"));
          percolated = percolate(base_graph, config.percolation.q, rng);
        } else {
          percolated = *shared_percolated;
        }
      }
      Rng split_rng(derive_seed(run_seed, "split"));
      split = split_links(percolated, config.split.ratios, config.split.negative_ratio,
                          split_rng);
      fs::path tmp = seed_dir;
      tmp += ".tmp";
      fs::remove_all(tmp);
      fs::remove_all(seed_dir);
      save_split(split, tmp / "split", run_seed,
                 config.percolation.enabled ? config.percolation.q : 1.0,
                 config.split.ratios);
      fs::rename(tmp, seed_dir);
    } catch (const std::exception& ex) {
      split_ok = false;
      split_error = ex.what();
    }

    for (std::size_t pi = 0; pi < n_policies; ++pi) {
      const AugmentationPolicy& policy = config.policies[pi];
      RunRecord& rec = records[static_cast<std::size_t>(run_index) * n_policies + pi];
      rec.seed = run_seed;
      rec.policy = to_string(policy.kind);
      rec.config_hash = hash;
      if (!split_ok) {
        rec.failed = true;
        rec.error = split_error;
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        AugmentResult aug;
        if (policy.kind == PolicyKind::kSemanticKnn) {
          const auto& [s_u, s_v] = *neighbor_cache[pi];
          aug = augment_semantic_knn(split.train_pos, s_u, s_v, policy.phi, policy.alpha);
        } else {
          Rng rng(derive_seed(run_seed, "augment:" + to_string(policy.kind)));
          aug = apply_policy(policy, split.train_pos, config.dataset.n_u,
                             config.dataset.n_v, {&feat_u, &feat_v}, rng);
        }
        rec.shortfall = aug.shortfall;

        TrainConfig tc = config.train;
        tc.seed = derive_seed(run_seed, "train");  // matched model init across policies
        TrainResult tr = train(aug.edges, split.train_neg, config.dataset.n_u,
                               config.dataset.n_v, tc);

        const EvalResult val = evaluate(tr.model, split.val_pos, split.val_neg);
        const EvalResult test = evaluate(tr.model, split.test_pos, split.test_neg);
        rec.val_auc = val.auc;
        rec.val_brier = val.brier_score;
        rec.test_auc = test.auc;
        rec.test_brier = test.brier_score;

        // Per-run artifacts, committed by atomic rename.
        const fs::path policy_dir = seed_dir / rec.policy;
        fs::path tmp = policy_dir;
        tmp += ".tmp";
        fs::remove_all(tmp);
        fs::remove_all(policy_dir);
        fs::create_directories(tmp);
        save_edges(aug.edges, tmp / "train_aug.txt");
        save_model(tr.model, tmp / "model.ckpt", tc.seed, hash);
        {
          std::ostringstream metrics_csv;
          metrics_csv << "run_seed,policy,split,auc,brier\n";
          metrics_csv << run_seed << ',' << rec.policy << ",val," << fmt17(rec.val_auc)
                      << ',' << fmt17(rec.val_brier) << '\n';
          metrics_csv << run_seed << ',' << rec.policy << ",test," << fmt17(rec.test_auc)
                      << ',' << fmt17(rec.test_brier) << '\n';
          write_text_atomic(tmp / "metrics.csv", metrics_csv.str());
        }
        {
          json meta = policy_to_json(policy);
          meta["seed"] = run_seed;
          meta["shortfall"] = aug.shortfall;
          meta["config_hash"] = hash;
          meta["final_train_loss"] = tr.epoch_loss.back();
          meta["disjoint_train_ratio"] = config.split.disjoint_train_ratio;
          write_text_atomic(tmp / "meta.json", meta.dump(2) + "\n");
        }
        fs::rename(tmp, policy_dir);
      } catch (const std::exception& ex) {
        rec.failed = true;
        rec.error = ex.what();
      }
      rec.duration_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  }

  // Canonical order so output is independent of worker completion order.
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    return a.seed < b.seed;
  });

  write_results_csv(records, exp_dir / "results.csv");
  try {
    make_report(records, "none", exp_dir);
  } catch (const std::exception& ex) {
    std::ofstream(exp_dir / "report_error.txt") << ex.what() << '\n';
  }
  return records;
}

}  // namespace

std::vector<RunRecord> run_benchmark_pipeline(const ExperimentConfig& config, int jobs) {
  if (!config.percolation.enabled) {
    throw std::invalid_argument(
        "benchmark pipeline requires percolation.enabled = true (use the case-study "
        "pipeline for naturally sparse graphs)");
  }
  return run_pipeline(config, jobs);
}

std::vector<RunRecord> run_case_study_pipeline(const ExperimentConfig& config, int jobs) {
  if (config.percolation.enabled) {
    throw std::invalid_argument(
        "case-study pipeline requires percolation.enabled = false");
  }
  return run_pipeline(config, jobs);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, int jobs) {
  return config.percolation.enabled ? run_benchmark_pipeline(config, jobs)
                                    : run_case_study_pipeline(config, jobs);
}

void write_results_csv(const std::vector<RunRecord>& records, const fs::path& path) {
  std::ostringstream out;
  out << "seed,policy,val_auc,val_brier,test_auc,test_brier,shortfall,config_hash,status\n";
  for (const RunRecord& r : records) {
    out << r.seed << ',' << r.policy << ',';
    if (r.failed) {
      out << ",,,," << r.shortfall << ',' << r.config_hash << ",failed\n";
    } else {
      out << fmt17(r.val_auc) << ',' << fmt17(r.val_brier) << ',' << fmt17(r.test_auc)
          << ',' << fmt17(r.test_brier) << ',' << r.shortfall << ',' << r.config_hash
          << ",ok\n";
    }
  }
  write_text_atomic(path, out.str());
}

std::vector<RunRecord> read_results_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string line;
  std::getline(in, line);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(9);
    RunRecord r;
    r.seed = std::stoull(cells[0]);
    r.policy = cells[1];
    r.failed = cells[8] == "failed";
    if (!r.failed) {
      r.val_auc = std::stod(cells[2]);
      r.val_brier = std::stod(cells[3]);
      r.test_auc = std::stod(cells[4]);
      r.test_brier = std::stod(cells[5]);
    }
    r.shortfall = std::stoull(cells[6].empty() ? "0" : cells[6]);
    r.config_hash = cells[7];
    records.push_back(r);
  }
  return records;
}

void make_report(const std::vector<RunRecord>& records, const std::string& baseline,
                 const fs::path& dir) {
  // Only seeds completed by every policy participate in the paired tests.
  std::map<std::string, std::map<std::uint64_t, const RunRecord*>> by_policy;
  for (const RunRecord& r : records) {
    if (!r.failed) by_policy[r.policy][r.seed] = &r;
  }
  if (!by_policy.contains(baseline)) {
    throw std::invalid_argument("make_report: baseline '" + baseline + "' has no records");
  }
  std::set<std::uint64_t> seeds;
  for (const auto& [seed, rec] : by_policy.at(baseline)) seeds.insert(seed);
  for (const auto& [policy, runs] : by_policy) {
    std::set<std::uint64_t> keep;
    for (std::uint64_t s : seeds) {
      if (runs.contains(s)) keep.insert(s);
    }
    seeds = keep;
  }
  if (seeds.size() < 2) {
    throw std::invalid_argument("make_report: fewer than 2 seeds completed for all policies");
  }

  auto emit = [&](auto accessor, const std::string& stem, const std::string& metric) {
    std::map<std::string, std::vector<double>> method_runs;
    for (const auto& [policy, runs] : by_policy) {
      std::vector<double>& v = method_runs[policy];
      for (std::uint64_t s : seeds) v.push_back(accessor(*runs.at(s)));
    }
    std::vector<StatRow> rows = aggregate(method_runs, baseline);
    const std::string csv = stat_rows_to_csv(rows);
    write_text_atomic(dir / (stem + ".csv"), csv);
    // Markdown rendered from the parsed CSV so the two stay consistent.
    std::string md = stat_rows_to_markdown(stat_rows_from_csv(csv), metric);
    md += "\nEvaluated on the " + std::string(stem.starts_with("val_") ? "validation" : "test") +
          " split; the evaluation split for reported tables is a protocol choice and both "
          "are emitted.\n";
    write_text_atomic(dir / (stem + ".md"), md);
  };

  emit([](const RunRecord& r) { return r.test_auc; }, "auc_table", "AUC");
  emit([](const RunRecord& r) { return r.test_brier; }, "brier_table", "Brier");
  emit([](const RunRecord& r) { return r.val_auc; }, "val_auc_table", "AUC");
  emit([](const RunRecord& r) { return r.val_brier; }, "val_brier_table", "Brier");
}

}  // namespace aegis
