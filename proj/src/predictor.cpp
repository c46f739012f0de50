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

#include "aegis/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace aegis {
namespace {

using json = nlohmann::json;

void check_pairs(const EdgeList& pairs, std::uint32_t n_u, std::uint32_t n_v,
                 const char* what) {
  for (const Edge& e : pairs) {
    if (e.u >= n_u || e.v >= n_v) {
      throw std::out_of_range(std::string(what) + ": pair (" + std::to_string(e.u) + "," +
                              std::to_string(e.v) + ") out of range");
    }
  }
}

}  // namespace

std::string to_string(Scorer s) {
  return s == Scorer::kDot ? "dot" : "bilinear";
}

Scorer scorer_from_string(const std::string& s) {
  if (s == "dot") return Scorer::kDot;
  if (s == "bilinear") return Scorer::kBilinear;
  throw std::invalid_argument("unknown scorer: " + s);
}

void TrainConfig::validate() const {
  if (d_model < 1) throw std::invalid_argument("train config: d_model must be >= 1");
  if (learning_rate <= 0) throw std::invalid_argument("train config: learning_rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (l2 < 0) throw std::invalid_argument("train config: l2 must be >= 0");
  if (init_scale < 0) throw std::invalid_argument("train config: init_scale must be >= 0");
}

double sigmoid_clamped(double s) {
  s = std::clamp(s, -kScoreClamp, kScoreClamp);
  return 1.0 / (1.0 + std::exp(-s));
}

double TrainedModel::score(std::uint32_t u, std::uint32_t v) const {
  const double* hu = emb_u.data() + static_cast<std::size_t>(u) * d;
  const double* hv = emb_v.data() + static_cast<std::size_t>(v) * d;
  if (scorer == Scorer::kDot) {
    double s = 0.0;
    for (int t = 0; t < d; ++t) s += hu[t] * hv[t];
    return s;
  }
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double wi = 0.0;
    for (int j = 0; j < d; ++j) wi += w[static_cast<std::size_t>(i) * d + j] * hv[j];
    s += hu[i] * wi;
  }
  return s;
}

TrainedModel init_model(std::uint32_t n_u, std::uint32_t n_v, const TrainConfig& config,
                        Rng& rng) {
  config.validate();
  TrainedModel m;
  m.n_u = n_u;
  m.n_v = n_v;
  m.d = config.d_model;
  m.scorer = config.scorer;
  m.emb_u.resize(static_cast<std::size_t>(n_u) * m.d);
  m.emb_v.resize(static_cast<std::size_t>(n_v) * m.d);
  for (double& x : m.emb_u) x = config.init_scale * rng.normal();
  for (double& x : m.emb_v) x = config.init_scale * rng.normal();
  if (config.scorer == Scorer::kBilinear) {
    m.w.assign(static_cast<std::size_t>(m.d) * m.d, 0.0);
    for (int i = 0; i < m.d; ++i) m.w[static_cast<std::size_t>(i) * m.d + i] = 1.0;
  }
  return m;
}

std::pair<double, Gradients> loss_and_grad(const TrainedModel& model, const EdgeList& pos,
                                           const EdgeList& neg) {
  if (pos.empty()) throw std::invalid_argument("loss_and_grad: no positive pairs");
  if (neg.empty()) throw std::invalid_argument("loss_and_grad: no negative pairs");
  check_pairs(pos, model.n_u, model.n_v, "loss_and_grad pos");
  check_pairs(neg, model.n_u, model.n_v, "loss_and_grad neg");

  Gradients g;
  g.emb_u.assign(model.emb_u.size(), 0.0);
  g.emb_v.assign(model.emb_v.size(), 0.0);
  g.w.assign(model.w.size(), 0.0);

  const int d = model.d;
  double loss = 0.0;
  auto accumulate = [&](const Edge& e, double coeff, bool positive, double inv_count) {
    const double s = model.score(e.u, e.v);
    const double p = sigmoid_clamped(s);
    loss += coeff * inv_count * (positive ? -std::log(p) : -std::log(1.0 - p));
    const double gs = coeff * inv_count * (positive ? p - 1.0 : p);
    const double* hu = model.emb_u.data() + static_cast<std::size_t>(e.u) * d;
    const double* hv = model.emb_v.data() + static_cast<std::size_t>(e.v) * d;
    double* gu = g.emb_u.data() + static_cast<std::size_t>(e.u) * d;
    double* gv = g.emb_v.data() + static_cast<std::size_t>(e.v) * d;
    if (model.scorer == Scorer::kDot) {
      for (int t = 0; t < d; ++t) {
        gu[t] += gs * hv[t];
        gv[t] += gs * hu[t];
      }
    } else {
      for (int i = 0; i < d; ++i) {
        double whv = 0.0, wthu = 0.0;
        for (int j = 0; j < d; ++j) {
          whv += model.w[static_cast<std::size_t>(i) * d + j] * hv[j];
          wthu += model.w[static_cast<std::size_t>(j) * d + i] * hu[j];
          g.w[static_cast<std::size_t>(i) * d + j] += gs * hu[i] * hv[j];
        }
        gu[i] += gs * whv;
        gv[i] += gs * wthu;
      }
    }
  };

  const double inv_pos = 1.0 / static_cast<double>(pos.size());
  const double inv_neg = 1.0 / static_cast<double>(neg.size());
  for (const Edge& e : pos) accumulate(e, kPosClassWeight, true, inv_pos);
  for (const Edge& e : neg) accumulate(e, kNegClassWeight, false, inv_neg);
  return {loss, std::move(g)};
}

namespace {

// Sparse mini-batch step: gradients accumulated per touched embedding row,
// then applied with L2 decay on touched parameters only.
class BatchUpdater {
 public:
  BatchUpdater(TrainedModel& model, const TrainConfig& cfg)
      : model_(model), cfg_(cfg) {
    if (model.scorer == Scorer::kBilinear) gw_.assign(model.w.size(), 0.0);
  }

  double run(const Edge* pos, std::size_t n_pos, const Edge* neg, std::size_t n_neg) {
    grad_u_.clear();
    grad_v_.clear();
    if (!gw_.empty()) std::fill(gw_.begin(), gw_.end(), 0.0);
    double loss = 0.0;
    const double inv_pos = 1.0 / static_cast<double>(n_pos);
    const double inv_neg = 1.0 / static_cast<double>(n_neg);
    for (std::size_t i = 0; i < n_pos; ++i)
      loss += contribute(pos[i], kPosClassWeight * inv_pos, true);
    for (std::size_t i = 0; i < n_neg; ++i)
      loss += contribute(neg[i], kNegClassWeight * inv_neg, false);
    apply();
    return loss;
  }

 private:
  double contribute(const Edge& e, double weight, bool positive) {
    const int d = model_.d;
    const double s = model_.score(e.u, e.v);
    const double p = sigmoid_clamped(s);
    const double gs = weight * (positive ? p - 1.0 : p);
    const double* hu = model_.emb_u.data() + static_cast<std::size_t>(e.u) * d;
    const double* hv = model_.emb_v.data() + static_cast<std::size_t>(e.v) * d;
    double* gu = row(grad_u_, e.u);
    double* gv = row(grad_v_, e.v);
    if (model_.scorer == Scorer::kDot) {
      for (int t = 0; t < d; ++t) {
        gu[t] += gs * hv[t];
        gv[t] += gs * hu[t];
      }
    } else {
      for (int i = 0; i < d; ++i) {
        double whv = 0.0, wthu = 0.0;
        for (int j = 0; j < d; ++j) {
          whv += model_.w[static_cast<std::size_t>(i) * d + j] * hv[j];
          wthu += model_.w[static_cast<std::size_t>(j) * d + i] * hu[j];
          gw_[static_cast<std::size_t>(i) * d + j] += gs * hu[i] * hv[j];
        }
        gu[i] += gs * whv;
        gv[i] += gs * wthu;
      }
    }
    return weight * (positive ? -std::log(p) : -std::log(1.0 - p));
  }

  double* row(std::unordered_map<std::uint32_t, std::vector<double>>& grads,
              std::uint32_t idx) {
    auto [it, fresh] = grads.try_emplace(idx);
    if (fresh) it->second.assign(static_cast<std::size_t>(model_.d), 0.0);
    return it->second.data();
  }

  void apply() {
    const int d = model_.d;
    const double lr = cfg_.learning_rate;
    for (const auto& [idx, grad] : grad_u_) {
      double* h = model_.emb_u.data() + static_cast<std::size_t>(idx) * d;
      for (int t = 0; t < d; ++t) h[t] -= lr * (grad[t] + cfg_.l2 * h[t]);
    }
    for (const auto& [idx, grad] : grad_v_) {
      double* h = model_.emb_v.data() + static_cast<std::size_t>(idx) * d;
      for (int t = 0; t < d; ++t) h[t] -= lr * (grad[t] + cfg_.l2 * h[t]);
    }
    for (std::size_t i = 0; i < gw_.size(); ++i) {
      model_.w[i] -= lr * (gw_[i] + cfg_.l2 * model_.w[i]);
    }
  }

  TrainedModel& model_;
  const TrainConfig& cfg_;
  std::unordered_map<std::uint32_t, std::vector<double>> grad_u_, grad_v_;
  std::vector<double> gw_;
};

}  // namespace

TrainResult train(const EdgeList& train_pos, const EdgeList& train_neg, std::uint32_t n_u,
                  std::uint32_t n_v, const TrainConfig& config) {
  config.validate();
  if (train_pos.empty()) throw std::invalid_argument("train: empty positive set");
  if (train_neg.empty()) throw std::invalid_argument("train: empty negative set");
  check_pairs(train_pos, n_u, n_v, "train pos");
  check_pairs(train_neg, n_u, n_v, "train neg");

  Rng init_rng(derive_seed(config.seed, "model-init"));
  Rng epoch_rng(derive_seed(config.seed, "train-epochs"));

  TrainResult result;
  result.model = init_model(n_u, n_v, config, init_rng);

  EdgeList pos = train_pos;
  EdgeList neg = train_neg;
  EdgeSet pos_set;
  if (config.resample_negatives) pos_set = EdgeSet(train_pos.begin(), train_pos.end());

  BatchUpdater updater(result.model, config);
  const std::size_t nb =
      (pos.size() + static_cast<std::size_t>(config.batch_size) - 1) /
      static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    epoch_rng.shuffle(pos);
    if (config.resample_negatives) {
      for (Edge& e : neg) {
        do {
          e = {static_cast<std::uint32_t>(epoch_rng.bounded(n_u)),
               static_cast<std::uint32_t>(epoch_rng.bounded(n_v))};
        } while (pos_set.contains(e));
      }
    } else {
      epoch_rng.shuffle(neg);
    }

    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t p0 = b * static_cast<std::size_t>(config.batch_size);
      const std::size_t p1 = std::min(pos.size(), p0 + static_cast<std::size_t>(config.batch_size));
      // Negatives sliced proportionally so each epoch consumes both sets once.
      const std::size_t q0 = b * neg.size() / nb;
      const std::size_t q1 = std::max(q0 + 1, (b + 1) * neg.size() / nb);
      epoch_loss += updater.run(pos.data() + p0, p1 - p0, neg.data() + q0,
                                std::min(neg.size(), q1) - q0);
    }
    epoch_loss /= static_cast<double>(nb);
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                               std::to_string(epoch));
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

std::vector<double> predict(const TrainedModel& model, const EdgeList& pairs) {
  check_pairs(pairs, model.n_u, model.n_v, "predict");
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const Edge& e : pairs) out.push_back(sigmoid_clamped(model.score(e.u, e.v)));
  return out;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path,
                std::uint64_t seed, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for write");
  json meta{{"format_version", 1},
            {"scorer", to_string(model.scorer)},
            {"d_model", model.d},
            {"n_u", model.n_u},
            {"n_v", model.n_v},
            {"seed", seed},
            {"config_hash", config_hash}};
  out << meta.dump() << '\n';
  char buf[32];
  auto dump = [&](const std::vector<double>& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", t[i]);
      out << buf << (((i + 1) % static_cast<std::size_t>(model.d)) == 0 ? '\n' : ' ');
    }
  };
  dump(model.emb_u);
  dump(model.emb_v);
  if (!model.w.empty()) dump(model.w);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string header;
  std::getline(in, header);
  json meta = json::parse(header);
  if (meta.at("format_version").get<int>() != 1) {
    throw std::runtime_error(path.string() + ": unsupported checkpoint version");
  }
  TrainedModel m;
  m.scorer = scorer_from_string(meta.at("scorer").get<std::string>());
  m.d = meta.at("d_model").get<int>();
  m.n_u = meta.at("n_u").get<std::uint32_t>();
  m.n_v = meta.at("n_v").get<std::uint32_t>();
  auto read_tensor = [&](std::vector<double>& t, std::size_t count) {
    t.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> t[i])) throw std::runtime_error(path.string() + ": truncated checkpoint");
    }
  };
  read_tensor(m.emb_u, static_cast<std::size_t>(m.n_u) * m.d);
  read_tensor(m.emb_v, static_cast<std::size_t>(m.n_v) * m.d);
  if (m.scorer == Scorer::kBilinear) {
    read_tensor(m.w, static_cast<std::size_t>(m.d) * m.d);
  }
  return m;
}

}  // namespace aegis
