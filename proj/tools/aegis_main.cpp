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

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aegis/augment.hpp"
#include "aegis/graph.hpp"
#include "aegis/harness.hpp"
#include "aegis/metrics.hpp"
#include "aegis/predictor.hpp"
#include "aegis/sparsify.hpp"
#include "aegis/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonGraphArgs {
  std::string edges;
  std::uint32_t n_u = 0;
  std::uint32_t n_v = 0;
};

void add_graph_options(CLI::App* cmd, CommonGraphArgs& args) {
  cmd->add_option("--edges", args.edges, "edge-list file (u,v per line)")->required();
  cmd->add_option("--n-u", args.n_u, "U-mode node count")->required();
  cmd->add_option("--n-v", args.n_v, "V-mode node count")->required();
}

int run(int argc, char** argv) {
  CLI::App app{"AEGIS: edge-sparsity stress test for bipartite link prediction"};
  app.require_subcommand(1);

  // --- ingest ---
  auto* ingest = app.add_subcommand(
      "ingest", "map string-ID edge file to dense indices with ID-map sidecars");
  std::string ingest_in, ingest_out;
  ingest->add_option("--edges", ingest_in, "raw edge file with external IDs")->required();
  ingest->add_option("--out-dir", ingest_out, "output directory")->required();
  ingest->callback([&] {
    auto r = aegis::ingest_edges(ingest_in);
    fs::create_directories(ingest_out);
    aegis::save_edges(r.graph.edges, fs::path(ingest_out) / "edges.txt");
    aegis::save_id_map(r.ids_u, fs::path(ingest_out) / "idmap_u.txt");
    aegis::save_id_map(r.ids_v, fs::path(ingest_out) / "idmap_v.txt");
    std::cout << "n_u=" << r.graph.n_u << " n_v=" << r.graph.n_v
              << " edges=" << r.graph.edges.size() << '\n';
  });

  // --- percolate ---
  auto* perc = app.add_subcommand("percolate", "random edge retention at rate q");
  CommonGraphArgs perc_args;
  double perc_q = 0.01;
  std::uint64_t perc_seed = 0;
  std::string perc_out;
  add_graph_options(perc, perc_args);
  perc->add_option("--q", perc_q, "retain rate in (0,1]")->required();
  perc->add_option("--seed", perc_seed, "random seed");
  perc->add_option("--out", perc_out, "output edge-list file")->required();
  perc->callback([&] {
    auto g = aegis::load_edges(perc_args.edges, perc_args.n_u, perc_args.n_v);
    aegis::Rng rng(aegis::derive_seed(perc_seed, "percolate"));
    auto kept = aegis::percolate(g, perc_q, rng);
    aegis::save_edges(kept.edges, perc_out);
    std::cout << "kept " << kept.edges.size() << " of " << g.edges.size() << " edges\n";
  });

  // --- split ---
  auto* split = app.add_subcommand("split", "train/val/test link split with negatives");
  CommonGraphArgs split_args;
  std::vector<double> split_ratios{0.8, 0.1, 0.1};
  double split_neg_ratio = 1.0;
  std::uint64_t split_seed = 0;
  std::string split_out;
  add_graph_options(split, split_args);
  split->add_option("--ratios", split_ratios, "train val test ratios")->expected(3);
  split->add_option("--negative-ratio", split_neg_ratio, "negatives per positive");
  split->add_option("--seed", split_seed, "random seed");
  split->add_option("--out-dir", split_out, "output directory")->required();
  split->callback([&] {
    auto g = aegis::load_edges(split_args.edges, split_args.n_u, split_args.n_v);
    aegis::Rng rng(aegis::derive_seed(split_seed, "split"));
    auto s = aegis::split_links(g, {split_ratios[0], split_ratios[1], split_ratios[2]},
                                split_neg_ratio, rng);
    aegis::save_split(s, split_out, split_seed, 1.0,
                      {split_ratios[0], split_ratios[1], split_ratios[2]});
    std::cout << "train/val/test positives: " << s.train_pos.size() << '/'
              << s.val_pos.size() << '/' << s.test_pos.size() << '\n';
  });

  // --- augment ---
  auto* aug = app.add_subcommand("augment", "apply one augmentation policy to an edge set");
  CommonGraphArgs aug_args;
  std::string aug_policy = "simple", aug_out, aug_feat_u, aug_feat_v;
  aegis::AugmentationPolicy aug_params;
  std::uint64_t aug_seed = 0;
  add_graph_options(aug, aug_args);
  aug->add_option("--policy", aug_policy,
                  "none|simple|degree_aware|random|synthetic|semantic_knn")
      ->required();
  aug->add_option("--phi", aug_params.phi, "augmentation factor (default 100)");
  aug->add_option("--epsilon", aug_params.epsilon, "degree smoothing");
  aug->add_option("--radius", aug_params.radius, "synthetic perturbation radius");
  aug->add_option("--k", aug_params.k, "semantic neighbor count");
  aug->add_option("--tau", aug_params.tau, "semantic similarity threshold");
  aug->add_option("--alpha", aug_params.alpha, "semantic per-node cap");
  aug->add_flag("--knn-include-self", aug_params.knn_include_self,
                "keep self-matches in neighbor lists");
  aug->add_option("--features-u", aug_feat_u, "U-mode feature file (semantic_knn)");
  aug->add_option("--features-v", aug_feat_v, "V-mode feature file (semantic_knn)");
  aug->add_option("--seed", aug_seed, "random seed");
  aug->add_option("--out", aug_out, "output edge-list file")->required();
  aug->callback([&] {
    aug_params.kind = aegis::policy_kind_from_string(aug_policy);
    auto g = aegis::load_edges(aug_args.edges, aug_args.n_u, aug_args.n_v);
    aegis::FeatureMatrix fu, fv;
    aegis::FeaturePair features;
    if (aug_params.kind == aegis::PolicyKind::kSemanticKnn) {
      fu = aegis::load_features(aug_feat_u, aug_args.n_u);
      fv = aegis::load_features(aug_feat_v, aug_args.n_v);
      features = {&fu, &fv};
    }
    aegis::Rng rng(aegis::derive_seed(aug_seed, "augment:" + aug_policy));
    auto result =
        aegis::apply_policy(aug_params, g.edges, aug_args.n_u, aug_args.n_v, features, rng);
    aegis::save_edges(result.edges, aug_out);
    json prov{{"policy", aegis::to_string(aug_params.kind)},
              {"phi", aug_params.phi},
              {"seed", aug_seed},
              {"shortfall", result.shortfall}};
    std::ofstream(aug_out + ".meta.json") << prov.dump(2) << '\n';
    std::cout << "edges " << g.edges.size() << " -> " << result.edges.size()
              << " (shortfall " << result.shortfall << ")\n";
  });

  // --- train ---
  auto* tr = app.add_subcommand("train", "train the link scorer on persisted edges");
  std::string tr_pos, tr_neg, tr_out, tr_scorer = "dot";
  std::uint32_t tr_nu = 0, tr_nv = 0;
  aegis::TrainConfig tr_cfg;
  tr->add_option("--train-pos", tr_pos, "positive training edge file")->required();
  tr->add_option("--train-neg", tr_neg, "negative training edge file")->required();
  tr->add_option("--n-u", tr_nu)->required();
  tr->add_option("--n-v", tr_nv)->required();
  tr->add_option("--d-model", tr_cfg.d_model);
  tr->add_option("--lr", tr_cfg.learning_rate);
  tr->add_option("--epochs", tr_cfg.epochs);
  tr->add_option("--batch-size", tr_cfg.batch_size);
  tr->add_option("--l2", tr_cfg.l2);
  tr->add_option("--init-scale", tr_cfg.init_scale);
  tr->add_option("--scorer", tr_scorer, "dot|bilinear");
  tr->add_option("--seed", tr_cfg.seed);
  tr->add_option("--out", tr_out, "model checkpoint path")->required();
  tr->callback([&] {
    tr_cfg.scorer = aegis::scorer_from_string(tr_scorer);
    auto pos = aegis::load_edges(tr_pos, tr_nu, tr_nv).edges;
    auto neg = aegis::load_edges(tr_neg, tr_nu, tr_nv).edges;
    auto result = aegis::train(pos, neg, tr_nu, tr_nv, tr_cfg);
    aegis::save_model(result.model, tr_out, tr_cfg.seed, "");
    std::cout << "final training loss " << result.epoch_loss.back() << '\n';
  });

  // --- eval ---
  auto* ev = app.add_subcommand("eval", "AUC and Brier of a checkpoint on labeled pairs");
  std::string ev_model, ev_pos, ev_neg;
  ev->add_option("--model", ev_model, "model checkpoint")->required();
  ev->add_option("--pos", ev_pos, "positive pair file")->required();
  ev->add_option("--neg", ev_neg, "negative pair file")->required();
  ev->callback([&] {
    auto model = aegis::load_model(ev_model);
    auto pos = aegis::load_edges(ev_pos, model.n_u, model.n_v).edges;
    auto neg = aegis::load_edges(ev_neg, model.n_u, model.n_v).edges;
    aegis::EdgeList pairs = pos;
    pairs.insert(pairs.end(), neg.begin(), neg.end());
    aegis::EvalSet es;
    es.probabilities = aegis::predict(model, pairs);
    es.labels.assign(pos.size(), 1);
    es.labels.insert(es.labels.end(), neg.size(), 0);
    std::cout << "auc=" << aegis::auc_roc(es) << " brier=" << aegis::brier(es) << '\n';
  });

  // --- experiment ---
  auto* exp = app.add_subcommand("experiment", "full seeded multi-run pipeline");
  std::string exp_config, exp_out;
  int exp_jobs = 1;
  std::int64_t exp_base_seed = -1;
  exp->add_option("--config", exp_config, "experiment config (JSON)")->required();
  exp->add_option("--jobs", exp_jobs, "parallel worker count");
  exp->add_option("--base-seed", exp_base_seed, "override config base_seed");
  exp->add_option("--out", exp_out, "override config output_dir");
  exp->callback([&] {
    auto config = aegis::load_config(exp_config);
    if (exp_base_seed >= 0) config.base_seed = static_cast<std::uint64_t>(exp_base_seed);
    if (!exp_out.empty()) config.output_dir = exp_out;
    auto records = aegis::run_experiment(config, exp_jobs);
    std::size_t failed = 0;
    for (const auto& r : records) failed += r.failed ? 1 : 0;
    std::cout << records.size() << " runs, " << failed << " failed; results in "
              << (aegis::resolve_output_dir(config) / config.experiment).string() << '\n';
  });

  // --- report ---
  auto* rep = app.add_subcommand("report", "statistical tables from a results.csv");
  std::string rep_results, rep_baseline = "none", rep_out;
  rep->add_option("--results", rep_results, "results.csv path")->required();
  rep->add_option("--baseline", rep_baseline, "baseline policy name");
  rep->add_option("--out-dir", rep_out, "output directory")->required();
  rep->callback([&] {
    auto records = aegis::read_results_csv(rep_results);
    fs::create_directories(rep_out);
    aegis::make_report(records, rep_baseline, rep_out);
    std::cout << "tables written to " << rep_out << '\n';
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
