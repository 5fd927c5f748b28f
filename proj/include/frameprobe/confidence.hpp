// Copyright 2026 The Frameprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Confidence estimation over prediction records: decide from target-side
// features alone whether a produced frame is likely correct.
//
// Features of a predicted frame y':
//   length      |y'| in tokens
//   validity    max(0, open brackets - close brackets)
//   confidence  mean per-token probability
//
// The classifier is a linear SVM: class-weighted hinge loss with L2
// regularization, minimized by deterministic full-batch subgradient descent
// on z-scored features. Class weight c_k = total / (2 * count_k) offsets the
// usual several-fold prevalence of correct frames. Scores are reported as
// sigmoid of the margin; the decision threshold lives on the margin and ties
// count as negative, which is the conservative direction when positives are
// the class being certified.
//
// Training is seed-free and single-threaded; a trained model is immutable
// and safe to share across threads for scoring.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/records.hpp"

#include <json.hpp>

namespace frameprobe {

// ============================================================================
// Features
// ============================================================================

inline constexpr std::array<const char*, 3> kFeatureNames = {
    "length", "validity", "confidence"};

struct FeatureMask {
  bool length = true;
  bool validity = true;
  bool confidence = true;

  bool any() const { return length || validity || confidence; }
  std::array<bool, 3> flags() const { return {length, validity, confidence}; }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

struct FeatureVector {
  double length = 0.0;
  double validity = 0.0;
  double confidence = 0.0;
  FeatureMask active_mask;

  std::array<double, 3> raw() const { return {length, validity, confidence}; }
};

// Computes the three features from a record; masked-out features stay zero.
// Throws ProbLengthMismatch when confidence is active but token_probs is
// absent or misaligned with the predicted tokens.
inline FeatureVector extract_features(const PredictionRecord& record,
                                      FeatureMask mask = {},
                                      TokenizeOptions opts = {}) {
  const TokenSeq pred = tokenize(record.pred, opts);
  FeatureVector fv;
  fv.active_mask = mask;
  if (mask.length) fv.length = static_cast<double>(pred.size());
  if (mask.validity) {
    BalanceCounter bc;
    for (const FrameToken& t : pred) bc.feed(t);
    fv.validity = static_cast<double>(
        std::max(0, bc.open_count - bc.close_count));
  }
  if (mask.confidence) {
    if (!record.token_probs || record.token_probs->size() != pred.size())
      throw ProbLengthMismatch(
          "token_probs " +
          (record.token_probs
               ? "has " + std::to_string(record.token_probs->size())
               : std::string("is absent")) +
          " for " + std::to_string(pred.size()) + " predicted tokens");
    double sum = 0.0;
    for (double p : *record.token_probs) sum += p;
    fv.confidence = sum / static_cast<double>(pred.size());
  }
  return fv;
}

// ============================================================================
// Model
// ============================================================================

struct TrainConfig {
  int epochs = 200;
  double step_size = 0.5;   // eta; epoch t uses eta / sqrt(t)
  double lambda = 1e-3;     // L2 coefficient
  std::uint64_t seed = 0;   // recorded for provenance; the optimizer is
                            // deterministic and draws nothing
  FeatureMask mask;
  double threshold = 0.0;   // margin threshold; label positive iff margin > it
  bool tune_threshold = false;  // pick the F1-maximizing threshold on the
                                // training split instead
};

struct LinearModel {
  FeatureMask mask;
  std::array<double, 3> weights{};  // masked-out entries stay zero
  double bias = 0.0;
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
  std::array<bool, 3> constant{};  // active feature with zero variance;
                                   // dropped from the margin
  double class_weight_pos = 1.0;
  double class_weight_neg = 1.0;
  TrainConfig config;
  double threshold = 0.0;
  std::string training_fingerprint;
};

struct Prediction {
  double score = 0.5;  // sigmoid(margin)
  bool positive = false;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  bool precision_defined = true;  // false when nothing was predicted positive
};

// One training example: raw features plus the correctness label.
struct LabeledFeatures {
  FeatureVector features;
  bool correct = false;
};

namespace detail {

inline double znorm(const LinearModel& m, const std::array<double, 3>& raw,
                    std::size_t i) {
  if (m.constant[i]) return 0.0;
  return (raw[i] - m.mean[i]) / m.stddev[i];
}

inline double margin_of(const LinearModel& m, const FeatureVector& fv) {
  const std::array<double, 3> raw = fv.raw();
  const std::array<bool, 3> active = m.mask.flags();
  double margin = m.bias;
  for (std::size_t i = 0; i < 3; ++i)
    if (active[i]) margin += m.weights[i] * znorm(m, raw, i);
  return margin;
}

// FNV-1a over the feature/label bytes; pins the exact training inputs.
inline std::string fingerprint(const std::vector<LabeledFeatures>& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const LabeledFeatures& lf : data) {
    const std::array<double, 3> raw = lf.features.raw();
    mix(raw.data(), sizeof(raw));
    const unsigned char y = lf.correct ? 1 : 0;
    mix(&y, 1);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

struct LossGrad {
  double loss = 0.0;
  std::array<double, 3> gw{};
  double gb = 0.0;
};

}  // namespace detail

// ============================================================================
// Training
// ============================================================================

struct TrainResult {
  LinearModel model;
  std::vector<double> epoch_losses;  // loss after each epoch, including the
                                     // initial point at index 0
};

// Minimizes mean class-weighted hinge loss + lambda * ||w||^2 over z-scored
// features. Full-batch subgradient steps of eta/sqrt(t); a step that would
// raise the loss is halved up to a fixed number of times and rejected
// outright if still worse, so the recorded loss never increases. Identical
// inputs produce bitwise-identical models.
inline TrainResult train_on_features(const std::vector<LabeledFeatures>& data,
                                     const TrainConfig& config) {
  if (data.size() < 10)
    throw Error("training needs at least 10 records, got " +
                std::to_string(data.size()));
  if (!config.mask.any()) throw Error("feature mask is empty");

  long n_pos = 0, n_neg = 0;
  for (const LabeledFeatures& lf : data) (lf.correct ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) throw SingleClassCorpus();

  const double n = static_cast<double>(data.size());
  LinearModel m;
  m.mask = config.mask;
  m.config = config;
  m.class_weight_pos = n / (2.0 * static_cast<double>(n_pos));
  m.class_weight_neg = n / (2.0 * static_cast<double>(n_neg));
  m.training_fingerprint = detail::fingerprint(data);

  const std::array<bool, 3> active = config.mask.flags();

  // z-score statistics on the training split; zero-variance features are
  // flagged constant and contribute nothing to the margin.
  for (std::size_t i = 0; i < 3; ++i) {
    if (!active[i]) {
      m.stddev[i] = 1.0;
      continue;
    }
    double sum = 0.0;
    for (const LabeledFeatures& lf : data) sum += lf.features.raw()[i];
    m.mean[i] = sum / n;
    double ss = 0.0;
    for (const LabeledFeatures& lf : data) {
      const double d = lf.features.raw()[i] - m.mean[i];
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    // A stddev at rounding-noise scale is a constant feature; dividing by
    // it would blow the normalized values up to 1e16.
    if (sd <= 1e-9 * std::max(1.0, std::abs(m.mean[i]))) {
      m.constant[i] = true;
      m.stddev[i] = 1.0;
    } else {
      m.stddev[i] = sd;
    }
  }
  {
    bool all_constant = true;
    for (std::size_t i = 0; i < 3; ++i)
      if (active[i] && !m.constant[i]) all_constant = false;
    if (all_constant) throw DegenerateFeatures();
  }

  // Normalized design matrix and signed labels.
  std::vector<std::array<double, 3>> x(data.size());
  std::vector<double> y(data.size());
  std::vector<double> cw(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const std::array<double, 3> raw = data[r].features.raw();
    for (std::size_t i = 0; i < 3; ++i)
      x[r][i] = active[i] ? detail::znorm(m, raw, i) : 0.0;
    y[r] = data[r].correct ? 1.0 : -1.0;
    cw[r] = data[r].correct ? m.class_weight_pos : m.class_weight_neg;
  }

  auto loss_grad = [&](const std::array<double, 3>& w, double b,
                       bool want_grad) {
    detail::LossGrad lg;
    for (std::size_t r = 0; r < x.size(); ++r) {
      double margin = b;
      for (std::size_t i = 0; i < 3; ++i) margin += w[i] * x[r][i];
      const double slack = 1.0 - y[r] * margin;
      if (slack > 0.0) {
        lg.loss += cw[r] * slack;
        if (want_grad) {
          for (std::size_t i = 0; i < 3; ++i)
            lg.gw[i] -= cw[r] * y[r] * x[r][i];
          lg.gb -= cw[r] * y[r];
        }
      }
    }
    lg.loss /= n;
    for (std::size_t i = 0; i < 3; ++i) {
      lg.gw[i] = lg.gw[i] / n + 2.0 * config.lambda * w[i];
      lg.loss += config.lambda * w[i] * w[i];
    }
    lg.gb /= n;
    return lg;
  };

  std::array<double, 3> w{};
  double b = 0.0;
  TrainResult result;
  double current = loss_grad(w, b, false).loss;
  result.epoch_losses.push_back(current);

  for (int t = 1; t <= config.epochs; ++t) {
    const detail::LossGrad lg = loss_grad(w, b, true);
    double eta = config.step_size / std::sqrt(static_cast<double>(t));
    bool accepted = false;
    for (int half = 0; half < 20; ++half) {
      std::array<double, 3> wc = w;
      for (std::size_t i = 0; i < 3; ++i) wc[i] -= eta * lg.gw[i];
      const double bc = b - eta * lg.gb;
      const double cand = loss_grad(wc, bc, false).loss;
      if (cand <= current) {
        w = wc;
        b = bc;
        current = cand;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    (void)accepted;  // a rejected step keeps the previous iterate
    result.epoch_losses.push_back(current);
  }

  m.weights = w;
  m.bias = b;
  m.threshold = config.threshold;

  if (config.tune_threshold) {
    // Scan margins on the training split for the F1-maximizing cut.
    // Candidates are midpoints between consecutive sorted margins plus
    // sentinels below and above everything.
    std::vector<double> margins(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
      double margin = b;
      for (std::size_t i = 0; i < 3; ++i) margin += w[i] * x[r][i];
      margins[r] = margin;
    }
    std::vector<double> sorted = margins;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    cuts.push_back(sorted.front() - 1.0);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
      cuts.push_back((sorted[i] + sorted[i + 1]) / 2.0);
    cuts.push_back(sorted.back() + 1.0);

    double best_f1 = -1.0, best_cut = config.threshold;
    for (double cut : cuts) {
      long tp = 0, fp = 0, fn = 0;
      for (std::size_t r = 0; r < data.size(); ++r) {
        const bool pos = margins[r] > cut;
        if (pos && data[r].correct) ++tp;
        if (pos && !data[r].correct) ++fp;
        if (!pos && data[r].correct) ++fn;
      }
      const double p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
      const double rc = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
      const double f1 = p + rc > 0 ? 2.0 * p * rc / (p + rc) : 0.0;
      if (f1 > best_f1) {
        best_f1 = f1;
        best_cut = cut;
      }
    }
    m.threshold = best_cut;
  }

  result.model = std::move(m);
  return result;
}

// Convenience over raw records: labels are exact match of pred vs gold.
inline std::vector<LabeledFeatures> featurize(
    const std::vector<PredictionRecord>& records, FeatureMask mask,
    TokenizeOptions opts = {}) {
  std::vector<LabeledFeatures> out;
  out.reserve(records.size());
  for (const PredictionRecord& rec : records) {
    LabeledFeatures lf;
    lf.features = extract_features(rec, mask, opts);
    lf.correct = exact_match(tokenize(rec.pred, opts), tokenize(rec.gold, opts));
    out.push_back(std::move(lf));
  }
  return out;
}

inline LinearModel train(const std::vector<PredictionRecord>& records,
                         const TrainConfig& config,
                         TokenizeOptions opts = {}) {
  return train_on_features(featurize(records, config.mask, opts), config)
      .model;
}

// ============================================================================
// Scoring and evaluation
// ============================================================================

inline Prediction predict(const LinearModel& model, const FeatureVector& fv) {
  if (!(fv.active_mask == model.mask))
    throw MaskMismatch("feature vector mask does not match the model's");
  const double margin = detail::margin_of(model, fv);
  return Prediction{1.0 / (1.0 + std::exp(-margin)), margin > model.threshold};
}

inline PRF evaluate_features(const LinearModel& model,
                             const std::vector<LabeledFeatures>& data) {
  PRF prf;
  for (const LabeledFeatures& lf : data) {
    const bool pos = predict(model, lf.features).positive;
    if (pos && lf.correct) ++prf.tp;
    else if (pos && !lf.correct) ++prf.fp;
    else if (!pos && lf.correct) ++prf.fn;
    else ++prf.tn;
  }
  if (prf.tp + prf.fp > 0) {
    prf.precision = static_cast<double>(prf.tp) / (prf.tp + prf.fp);
  } else {
    prf.precision_defined = false;  // reported as 0, flagged degenerate
  }
  if (prf.tp + prf.fn > 0)
    prf.recall = static_cast<double>(prf.tp) / (prf.tp + prf.fn);
  if (prf.precision + prf.recall > 0.0)
    prf.f1 = 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall);
  return prf;
}

inline PRF evaluate(const LinearModel& model,
                    const std::vector<PredictionRecord>& records,
                    TokenizeOptions opts = {}) {
  return evaluate_features(model, featurize(records, model.mask, opts));
}

// ============================================================================
// Ablation
// ============================================================================

struct AblationRow {
  std::string name;  // "svm", "--length", "--validity", "--confidence"
  PRF prf;
};

// Retrains from scratch per row with one feature masked out of both splits.
// Always emits exactly four rows: the full model plus one per dropped
// feature.
inline std::vector<AblationRow> ablate(
    const std::vector<PredictionRecord>& train_records,
    const std::vector<PredictionRecord>& test_records,
    const TrainConfig& config, TokenizeOptions opts = {}) {
  std::vector<AblationRow> rows;
  const std::array<FeatureMask, 4> masks = {
      FeatureMask{true, true, true},
      FeatureMask{false, true, true},
      FeatureMask{true, false, true},
      FeatureMask{true, true, false},
  };
  const std::array<const char*, 4> names = {"svm", "--length", "--validity",
                                            "--confidence"};
  for (std::size_t i = 0; i < masks.size(); ++i) {
    TrainConfig cfg = config;
    cfg.mask = masks[i];
    const LinearModel model =
        train_on_features(featurize(train_records, cfg.mask, opts), cfg).model;
    rows.push_back(AblationRow{
        names[i], evaluate_features(model, featurize(test_records, cfg.mask,
                                                     opts))});
  }
  return rows;
}

// ============================================================================
// Model (de)serialization
// ============================================================================

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::json to_json(const LinearModel& m) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = "frameprobe-linear-model";
  nlohmann::json features = nlohmann::json::array();
  const std::array<bool, 3> active = m.mask.flags();
  for (std::size_t i = 0; i < 3; ++i)
    if (active[i]) features.push_back(kFeatureNames[i]);
  j["features"] = features;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["normalization"] = {
      {"mean", m.mean}, {"stddev", m.stddev}, {"constant", m.constant}};
  j["class_weights"] = {{"positive", m.class_weight_pos},
                        {"negative", m.class_weight_neg}};
  j["threshold"] = m.threshold;
  j["config"] = {{"epochs", m.config.epochs},
                 {"step_size", m.config.step_size},
                 {"lambda", m.config.lambda},
                 {"seed", m.config.seed},
                 {"tune_threshold", m.config.tune_threshold}};
  j["training_fingerprint"] = m.training_fingerprint;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("kind") || j["kind"] != "frameprobe-linear-model")
    throw Error("not a frameprobe model file");
  if (j.value("schema_version", 0) != kModelSchemaVersion)
    throw Error("unsupported model schema version");
  LinearModel m;
  FeatureMask mask{false, false, false};
  for (const auto& f : j.at("features")) {
    const std::string name = f.get<std::string>();
    if (name == "length") mask.length = true;
    else if (name == "validity") mask.validity = true;
    else if (name == "confidence") mask.confidence = true;
    else throw Error("unknown feature in model file: " + name);
  }
  m.mask = mask;
  m.weights = j.at("weights").get<std::array<double, 3>>();
  m.bias = j.at("bias").get<double>();
  m.mean = j.at("normalization").at("mean").get<std::array<double, 3>>();
  m.stddev = j.at("normalization").at("stddev").get<std::array<double, 3>>();
  m.constant = j.at("normalization").at("constant").get<std::array<bool, 3>>();
  m.class_weight_pos = j.at("class_weights").at("positive").get<double>();
  m.class_weight_neg = j.at("class_weights").at("negative").get<double>();
  m.threshold = j.at("threshold").get<double>();
  const auto& cfg = j.at("config");
  m.config.epochs = cfg.at("epochs").get<int>();
  m.config.step_size = cfg.at("step_size").get<double>();
  m.config.lambda = cfg.at("lambda").get<double>();
  m.config.seed = cfg.at("seed").get<std::uint64_t>();
  m.config.tune_threshold = cfg.value("tune_threshold", false);
  m.config.mask = mask;
  m.config.threshold = m.threshold;
  m.training_fingerprint = j.value("training_fingerprint", "");
  return m;
}

}  // namespace frameprobe
