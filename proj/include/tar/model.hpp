#pragma once

// Text-assisted insight ranker: four summed insight features, a key-value
// memory over the insights of one table, and an MLP scorer trained on gold
// similarity scores.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tar/autodiff.hpp"
#include "tar/insight.hpp"
#include "tar/metrics.hpp"
#include "tar/text_align.hpp"

namespace tar {

// Memory: full model. Semantics: no memory, the MLP scores I directly.
// Cnn: additionally drops f_semantics.
enum class ModelVariant { Memory, Semantics, Cnn };

inline std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Memory: return "tar_memory";
    case ModelVariant::Semantics: return "tar_semantics";
    case ModelVariant::Cnn: return "tar_cnn";
  }
  return "unknown";
}

inline ModelVariant model_variant_from_string(std::string_view s) {
  for (ModelVariant v : {ModelVariant::Memory, ModelVariant::Semantics, ModelVariant::Cnn}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown model variant '" + std::string(s) + "'");
}

// SummedL2: 1/2 sum (score - gold)^2 over a table. ListSoftmax: cross entropy
// between the per-table softmax of gold scores and of model scores.
enum class LossKind { SummedL2, ListSoftmax };

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t filters = 64;
  std::size_t window = 3;
  std::size_t seq_len = 16;
  std::size_t hidden = 64;
  double init_range = 0.1;
  ModelVariant variant = ModelVariant::Memory;
  LossKind loss = LossKind::SummedL2;
};

inline std::string type_token(InsightType t) { return "<" + std::string(to_string(t)) + ">"; }

class Vocabulary {
 public:
  Vocabulary() {
    for (InsightType t : kAllInsightTypes) add(type_token(t));
  }

  std::size_t add(const std::string& tok) {
    auto [it, inserted] = index_.try_emplace(tok, tokens_.size());
    if (inserted) tokens_.push_back(tok);
    return it->second;
  }

  std::optional<std::size_t> find(const std::string& tok) const {
    auto it = index_.find(tok);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t type_index(InsightType t) const {
    auto i = find(type_token(t));
    if (!i) throw std::out_of_range("vocabulary: missing insight type token " + type_token(t));
    return *i;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  static Vocabulary build(const std::vector<Insight>& insights) {
    Vocabulary v;
    for (const Insight& ins : insights) {
      for (const auto& tok : semantic_tokens(ins)) v.add(tok);
    }
    return v;
  }

  nlohmann::json to_json() const { return {{"tokens", tokens_}}; }

  static Vocabulary from_json(const nlohmann::json& j) {
    Vocabulary v;
    v.tokens_.clear();
    v.index_.clear();
    for (const auto& t : j.at("tokens")) v.add(t.get<std::string>());
    for (InsightType t : kAllInsightTypes) {
      if (!v.find(type_token(t))) throw DataError("vocabulary: missing insight type token " + type_token(t));
    }
    return v;
  }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Constant per-table inputs, computed once and reused every step.
struct TableInputs {
  std::size_t count = 0;
  nn::Matrix significance;  // M x 1
  nn::Matrix type_bag;      // M x V one-hot
  nn::Matrix semantic_bag;  // M x V counts
  nn::Matrix windows;       // (M * offsets) x window
  nn::Matrix gold;          // M x 1
  std::vector<std::string> ids;
};

// Recorded forward pass; every field lives on the same tape.
struct ForwardPass {
  nn::Var f_sig, f_type, f_subspace, f_semantics;
  nn::Var insight;    // I, M x d
  nn::Var keys;       // semantics s, M x d
  nn::Var attention;  // M x M, row i = attention of query i (memory variant only)
  nn::Var output;     // o, M x d
  nn::Var scores;     // M x 1
};

// Z-score within the sequence (all zeros when constant), keep the most recent
// `len` points, zero-pad on the right.
inline std::vector<double> normalize_sequence(const std::vector<double>& values, std::size_t len) {
  if (values.empty()) throw std::invalid_argument("encode_subspace: empty sequence");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(len, 0.0);
  const std::size_t keep = std::min(len, values.size());
  const std::size_t start = values.size() - keep;
  for (std::size_t i = 0; i < keep; ++i) out[i] = sd > 0.0 ? (values[start + i] - mean) / sd : 0.0;
  return out;
}

class TarModel {
 public:
  TarModel(ModelConfig cfg, Vocabulary vocab) : cfg_(cfg), vocab_(std::move(vocab)) {
    if (cfg_.window == 0 || cfg_.window > cfg_.seq_len) throw ConfigError("model: window must be in [1, seq_len]");
    if (cfg_.dim == 0 || cfg_.filters == 0 || cfg_.hidden == 0) throw ConfigError("model: sizes must be positive");
    const std::size_t d = cfg_.dim, V = vocab_.size();
    params_.add("A", nn::Matrix(d, V));
    params_.add("W_sig", nn::Matrix(1, d));
    params_.add("b_sig", nn::Matrix(1, d));
    params_.add("conv_W", nn::Matrix(cfg_.filters, cfg_.window));
    params_.add("conv_b", nn::Matrix(1, cfg_.filters));
    params_.add("P_sub", nn::Matrix(cfg_.filters, d));
    params_.add("mlp_W1", nn::Matrix(d, cfg_.hidden));
    params_.add("mlp_b1", nn::Matrix(1, cfg_.hidden));
    params_.add("mlp_W2", nn::Matrix(cfg_.hidden, 1));
    params_.add("mlp_b2", nn::Matrix(1, 1));
  }

  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    nn::init_uniform(params_, rng, -cfg_.init_range, cfg_.init_range);
  }

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  void set_params(nn::ParameterSet p) {
    if (p.size() != params_.size()) throw DataError("model: checkpoint has wrong parameter count");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i].name != params_[i].name || !p[i].value.same_shape(params_[i].value)) {
        throw DataError("model: checkpoint parameter '" + p[i].name + "' does not match the model");
      }
    }
    params_ = std::move(p);
  }

  std::size_t offsets() const { return cfg_.seq_len - cfg_.window + 1; }

  // ---- constant input construction

  nn::Matrix bag(const std::vector<std::vector<std::string>>& token_lists) const {
    nn::Matrix m(token_lists.size(), vocab_.size());
    for (std::size_t i = 0; i < token_lists.size(); ++i) {
      for (const auto& tok : token_lists[i]) {
        if (auto idx = vocab_.find(tok)) m(i, *idx) += 1.0;
      }
    }
    return m;
  }

  nn::Matrix type_onehot(const std::vector<InsightType>& types) const {
    nn::Matrix m(types.size(), vocab_.size());
    for (std::size_t i = 0; i < types.size(); ++i) m(i, vocab_.type_index(types[i])) = 1.0;
    return m;
  }

  nn::Matrix window_matrix(const std::vector<std::vector<double>>& sequences) const {
    const std::size_t K = offsets(), r = cfg_.window;
    nn::Matrix m(sequences.size() * K, r);
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      const auto seq = normalize_sequence(sequences[i], cfg_.seq_len);
      for (std::size_t o = 0; o < K; ++o) {
        for (std::size_t t = 0; t < r; ++t) m(i * K + o, t) = seq[o + t];
      }
    }
    return m;
  }

  TableInputs inputs(const std::vector<Insight>& insights, const std::vector<double>& gold = {}) const {
    TableInputs in;
    in.count = insights.size();
    in.significance = nn::Matrix(insights.size(), 1);
    std::vector<InsightType> types;
    std::vector<std::vector<std::string>> sem;
    std::vector<std::vector<double>> seqs;
    for (std::size_t i = 0; i < insights.size(); ++i) {
      in.significance(i, 0) = insights[i].significance;
      types.push_back(insights[i].itype);
      sem.push_back(semantic_tokens(insights[i]));
      seqs.push_back(insights[i].subspace.values);
      in.ids.push_back(insights[i].id);
    }
    in.type_bag = type_onehot(types);
    in.semantic_bag = bag(sem);
    in.windows = window_matrix(seqs);
    in.gold = nn::Matrix(insights.size(), 1);
    for (std::size_t i = 0; i < gold.size() && i < insights.size(); ++i) in.gold(i, 0) = gold[i];
    return in;
  }

  TableInputs inputs(const std::vector<LabeledInsight>& labeled) const {
    std::vector<Insight> ins;
    std::vector<double> gold;
    for (const auto& li : labeled) {
      ins.push_back(li.insight);
      gold.push_back(li.gold_score);
    }
    return inputs(ins, gold);
  }

  // ---- building blocks (each returns M x d unless noted)

  struct Leaves {
    nn::Var A, W_sig, b_sig, conv_W, conv_b, P_sub, W1, b1, W2, b2;
  };

  Leaves leaves(nn::Tape& tape) const {
    auto p = [&](std::size_t i) { return tape.param(params_, i); };
    return {p(0), p(1), p(2), p(3), p(4), p(5), p(6), p(7), p(8), p(9)};
  }

  // f_sig = v W_sig + b_sig (affine).
  static nn::Var encode_significance(nn::Tape& tape, const Leaves& w, const nn::Matrix& sig) {
    return nn::add(nn::matmul(tape.constant(sig), w.W_sig), w.b_sig);
  }

  // Rows of A^T selected by a bag over the vocabulary.
  static nn::Var embed_bag(nn::Tape& tape, const Leaves& w, const nn::Matrix& bag) {
    return nn::matmul(tape.constant(bag), nn::transpose(w.A));
  }

  // 1D convolution (tanh) over normalized values, max-pooled over offsets, projected to d.
  nn::Var encode_subspace(nn::Tape& tape, const Leaves& w, const nn::Matrix& windows) const {
    auto conv = nn::matmul(tape.constant(windows), nn::transpose(w.conv_W));
    auto z = nn::tanh(nn::add(conv, w.conv_b));
    auto pooled = nn::max_pool_rows(z, offsets());
    return nn::matmul(pooled, w.P_sub);
  }

  // alpha = softmax(q s_k), o = sum_k alpha_k I_k; one row per query.
  static std::pair<nn::Var, nn::Var> memory_read(nn::Var queries, nn::Var keys, nn::Var values) {
    if (keys.rows() == 0) throw std::invalid_argument("memory_read: empty memory");
    auto logits = nn::matmul(queries, nn::transpose(keys));
    auto attention = nn::softmax_rows(logits);
    return {attention, nn::matmul(attention, values)};
  }

  // sigmoid(tanh(o W1 + b1) W2 + b2), M x 1.
  static nn::Var score(const Leaves& w, nn::Var o) {
    auto h = nn::tanh(nn::add(nn::matmul(o, w.W1), w.b1));
    return nn::sigmoid(nn::add(nn::matmul(h, w.W2), w.b2));
  }

  ForwardPass forward(nn::Tape& tape, const TableInputs& in) const {
    return forward(tape, leaves(tape), in);
  }

  ForwardPass forward(nn::Tape& tape, const Leaves& w, const TableInputs& in) const {
    if (in.count == 0) throw std::invalid_argument("forward: table has no insights");
    ForwardPass f;
    f.f_sig = encode_significance(tape, w, in.significance);
    f.f_type = embed_bag(tape, w, in.type_bag);
    f.f_subspace = encode_subspace(tape, w, in.windows);
    f.f_semantics = embed_bag(tape, w, in.semantic_bag);
    f.keys = f.f_semantics;
    auto base = nn::add(nn::add(f.f_sig, f.f_type), f.f_subspace);
    f.insight = cfg_.variant == ModelVariant::Cnn ? base : nn::add(base, f.f_semantics);
#ifndef NDEBUG
    for (std::size_t i = 0; i < f.insight.value().size(); ++i) {
      const double sem = cfg_.variant == ModelVariant::Cnn ? 0.0 : f.f_semantics.value().data[i];
      const double parts = ((f.f_sig.value().data[i] + f.f_type.value().data[i]) + f.f_subspace.value().data[i]) + sem;
      assert(parts == f.insight.value().data[i]);
    }
#endif
    if (cfg_.variant == ModelVariant::Memory) {
      auto [att, o] = memory_read(f.keys, f.keys, f.insight);
      f.attention = att;
      f.output = o;
    } else {
      f.output = f.insight;
    }
    f.scores = score(w, f.output);
    return f;
  }

  nn::Var loss_from_scores(nn::Tape& tape, nn::Var scores, const nn::Matrix& gold) const {
    if (cfg_.loss == LossKind::SummedL2) {
      auto diff = nn::sub(scores, tape.constant(gold));
      return nn::scale(nn::sum(nn::mul(diff, diff)), 0.5);
    }
    auto target = nn::softmax_rows(nn::transpose(tape.constant(gold)));
    auto logp = nn::log(nn::softmax_rows(nn::transpose(scores)));
    return nn::scale(nn::sum(nn::mul(tape.constant(target.value()), logp)), -1.0);
  }

  nn::Var table_loss(nn::Tape& tape, const TableInputs& in) const {
    return loss_from_scores(tape, forward(tape, in).scores, in.gold);
  }

  double table_loss_value(const TableInputs& in) const {
    nn::Tape tape;
    return table_loss(tape, in).value().data[0];
  }

  std::vector<double> predict_scores(const TableInputs& in) const {
    nn::Tape tape;
    return forward(tape, in).scores.value().data;
  }

 private:
  ModelConfig cfg_;
  Vocabulary vocab_;
  nn::ParameterSet params_;
};

struct RankedPrediction {
  std::string table_id;
  std::string insight_id;
  double score = 0.0;
  std::size_t rank = 0;
};

// Descending score, ties by ascending id.
inline std::vector<RankedPrediction> rank_by_scores(const std::string& table_id, const std::vector<std::string>& ids,
                                                    const std::vector<double>& scores) {
  if (ids.size() != scores.size()) throw std::invalid_argument("rank_by_scores: size mismatch");
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::vector<RankedPrediction> out;
  for (std::size_t r = 0; r < order.size(); ++r) out.push_back({table_id, ids[order[r]], scores[order[r]], r + 1});
  return out;
}

inline std::vector<RankedPrediction> predict_ranking(const TarModel& model, const std::vector<Insight>& insights) {
  if (insights.empty()) return {};
  const auto in = model.inputs(insights);
  return rank_by_scores(insights.front().table_id, in.ids, model.predict_scores(in));
}

inline nlohmann::json to_json(const RankedPrediction& p, std::string_view method) {
  return {{"table_id", p.table_id}, {"insight_id", p.insight_id}, {"score", p.score}, {"rank", p.rank},
          {"method", method}};
}

inline RankingPair make_ranking_pair(const std::vector<RankedPrediction>& ranked,
                                     const std::vector<LabeledInsight>& labeled) {
  RankingPair p;
  if (!labeled.empty()) p.table_id = labeled.front().insight.table_id;
  for (const auto& r : ranked) p.predicted.push_back(r.insight_id);
  for (const auto& li : labeled) p.gold[li.insight.id] = li.gold_score;
  return p;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 7;
  std::size_t eval_k = 5;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean table loss over the epoch's steps
  double val_ndcg = 0.0;
};

struct TrainLog {
  double initial_train_loss = 0.0;  // before any update
  double initial_val_ndcg = 0.0;
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;  // 0 = initial parameters
  double best_val_ndcg = 0.0;
};

inline nlohmann::json to_json(const TrainLog& log) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_ndcg", e.val_ndcg}});
  }
  return {{"initial_train_loss", log.initial_train_loss},
          {"initial_val_ndcg", log.initial_val_ndcg},
          {"best_epoch", log.best_epoch},
          {"best_val_ndcg", log.best_val_ndcg},
          {"epochs", epochs}};
}

// Mean NDCG@min(k, n) over tables.
inline double mean_ndcg(const TarModel& model, const std::vector<TableInputs>& tables, std::size_t k) {
  if (tables.empty()) return 0.0;
  double s = 0.0;
  for (const auto& in : tables) {
    const auto ranked = rank_by_scores("", in.ids, model.predict_scores(in));
    RankingPair p;
    for (const auto& r : ranked) p.predicted.push_back(r.insight_id);
    for (std::size_t i = 0; i < in.count; ++i) p.gold[in.ids[i]] = in.gold(i, 0);
    s += ndcg_at_k(p, std::min(k, in.count));
  }
  return s / static_cast<double>(tables.size());
}

inline double mean_table_loss(const TarModel& model, const std::vector<TableInputs>& tables) {
  if (tables.empty()) return 0.0;
  double s = 0.0;
  for (const auto& in : tables) s += model.table_loss_value(in);
  return s / static_cast<double>(tables.size());
}

// One Adam step per table in seeded shuffled order; the parameters with the best
// validation NDCG are restored at the end.
inline TrainLog train(TarModel& model, const std::vector<std::vector<LabeledInsight>>& train_split,
                      const std::vector<std::vector<LabeledInsight>>& val_split, const TrainConfig& cfg) {
  std::vector<TableInputs> train_in, val_in;
  for (const auto& t : train_split) {
    if (!t.empty()) train_in.push_back(model.inputs(t));
  }
  for (const auto& t : val_split) {
    if (!t.empty()) val_in.push_back(model.inputs(t));
  }
  if (train_in.empty()) throw std::invalid_argument("train: empty training split");

  TrainLog log;
  log.initial_train_loss = mean_table_loss(model, train_in);
  log.initial_val_ndcg = mean_ndcg(model, val_in, cfg.eval_k);
  log.best_val_ndcg = log.initial_val_ndcg;
  nn::ParameterSet best = model.params();

  nn::AdamState adam;
  adam.lr = cfg.lr;
  adam.beta1 = cfg.beta1;
  adam.beta2 = cfg.beta2;
  adam.eps = cfg.eps;
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_in.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      nn::Tape tape;
      auto loss = model.table_loss(tape, train_in[idx]);
      total += loss.value().data[0];
      const auto grads = tape.backward(loss, &model.params());
      nn::adam_step(model.params(), grads, adam);
    }
    EpochLog e;
    e.epoch = epoch;
    e.train_loss = total / static_cast<double>(order.size());
    e.val_ndcg = mean_ndcg(model, val_in, cfg.eval_k);
    log.epochs.push_back(e);
    if (e.val_ndcg > log.best_val_ndcg) {
      log.best_val_ndcg = e.val_ndcg;
      log.best_epoch = epoch;
      best = model.params();
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  model.set_params(std::move(best));
  return log;
}

}  // namespace tar
