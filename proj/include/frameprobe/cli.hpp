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

// The frameprobe command line. Exit codes: 0 success, 1 operational error,
// 2 usage error. Every pipeline is a pure function of its input files,
// flags, and seed: rerunning with the same inputs produces byte-identical
// output files. Randomized commands take --seed, defaulting to the
// FRAMEPROBE_SEED environment variable, then 0.

#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "frameprobe/confidence.hpp"
#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/io.hpp"
#include "frameprobe/oracle.hpp"
#include "frameprobe/perturb.hpp"
#include "frameprobe/report.hpp"
#include "frameprobe/taxonomy.hpp"
#include "frameprobe/version.hpp"

#include <CLI11.hpp>

namespace frameprobe {
namespace cli_detail {

inline std::uint64_t default_seed() {
  const char* env = std::getenv("FRAMEPROBE_SEED");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw Error("FRAMEPROBE_SEED is not an unsigned integer: " +
                std::string(env));
  return v;
}

inline void report_line_issues(const char* label,
                               const std::vector<LineError>& issues,
                               std::ostream& err) {
  for (const LineError& e : issues)
    err << label << " line " << e.line << ": " << e.reason << "\n";
}

inline FileFormat format_flag(const std::string& s) {
  const std::optional<FileFormat> f = parse_file_format(s);
  if (!f) throw Error("unknown format: " + s);
  return *f;
}

inline FeatureMask mask_from_csv(const std::string& csv) {
  FeatureMask mask{false, false, false};
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string name =
        csv.substr(start, comma == std::string::npos ? std::string::npos
                                                     : comma - start);
    if (name == "length") mask.length = true;
    else if (name == "validity") mask.validity = true;
    else if (name == "confidence") mask.confidence = true;
    else if (!name.empty())
      throw Error("unknown feature: " + name);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!mask.any()) throw Error("feature list selects nothing");
  return mask;
}

// Dataset rows for commands that consume gold frames; rows whose frame
// fails schema validation are reported and skipped.
struct FrameRows {
  std::vector<CorpusRow> rows;
  std::size_t dropped = 0;
};

inline FrameRows load_frame_rows(const std::string& path, FileFormat format,
                                 TokenizeOptions opts, std::ostream& err) {
  const DatasetLoad data = load_dataset(path, format);
  report_line_issues("error:", data.errors, err);
  FrameRows out;
  for (const DatasetRow& row : data.rows) {
    try {
      TokenSeq seq = tokenize(row.frame, opts);
      const detail::SchemaScan scan = detail::schema_scan(seq);
      if (!scan.valid) throw NotSchemaValid(scan.fail_index, scan.reason);
      out.rows.push_back(
          CorpusRow{row.utterance, std::move(seq), row.language, row.domain});
    } catch (const Error& e) {
      err << "skipped line " << row.line << ": " << e.what() << "\n";
      ++out.dropped;
    }
  }
  if (out.rows.empty()) throw Error("no usable frames in " + path);
  return out;
}

inline void write_report(const Report& rep, const std::string& json_path,
                         const std::string& md_path, std::ostream& out) {
  if (!json_path.empty())
    write_text_file(json_path, to_json(rep).dump(2) + "\n");
  if (!md_path.empty()) write_text_file(md_path, to_markdown(rep));
  out << to_markdown(rep);
}

}  // namespace cli_detail

// Runs the CLI on arguments in natural order, program name excluded.
// Reusable in-process; every call builds a fresh parser.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using cli_detail::format_flag;

  CLI::App app{"analysis toolkit for linearized task-oriented semantic "
               "frames",
               "frameprobe"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // ---- shared option storage ----
  struct {
    std::string in, out, md, model, train, test, format,
                out_format = "jsonl", kind, type = "all",
                features = "length,validity,confidence", bucket = "depth";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool fold_case = false;
    bool tune_threshold = false;
    double correct_fraction = 0.0, prob_correct = 0.9, prob_incorrect = 0.6,
           jitter = 0.05, threshold = 0.0, lr = 0.5, lambda = 1e-3;
    int epochs = 200;
  } o;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "random seed (default: FRAMEPROBE_SEED "
                                      "env var, then 0)")
        ->each([&](const std::string&) { o.seed_given = true; });
  };
  auto add_fold = [&](CLI::App* cmd) {
    cmd->add_flag("--fold-case", o.fold_case,
                  "accept lowercase [in:/[sl: brackets, folding labels to "
                  "upper case");
  };

  TokenizeOptions tok;
  auto tokopts = [&] {
    tok.fold_case = o.fold_case;
    return tok;
  };
  auto seed = [&] {
    return o.seed_given ? o.seed : cli_detail::default_seed();
  };

  // ---- validate ----
  CLI::App* validate = app.add_subcommand(
      "validate", "check frames for bracket balance and schema validity");
  validate->add_option("--in", o.in, "input file")->required();
  validate->add_option("--format", o.format,
                       "input format: lines | tsv | jsonl (default lines)")
      ->check(CLI::IsMember({"lines", "tsv", "jsonl"}));
  validate->add_option("--out", o.out, "per-frame JSONL report path");
  add_fold(validate);
  validate->parse_complete_callback([&] {
    std::vector<std::pair<std::size_t, std::string>> frames;  // line, text
    if (o.format.empty() || o.format == "lines") {
      const std::vector<std::string> lines = detail::read_lines(o.in);
      bool any = false;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (detail::blank(lines[i])) continue;
        any = true;
        frames.emplace_back(i + 1, lines[i]);
      }
      if (!any) throw EmptyDataset(o.in);
    } else {
      const DatasetLoad data = load_dataset(o.in, format_flag(o.format));
      cli_detail::report_line_issues("error:", data.errors, err);
      for (const DatasetRow& row : data.rows)
        frames.emplace_back(row.line, row.frame);
    }

    std::string report_lines;
    long valid = 0, invalid = 0;
    for (const auto& [line, text] : frames) {
      nlohmann::json j;
      j["line"] = line;
      try {
        const ValidityReport v = check_validity(tokenize(text, tokopts()));
        j["open_count"] = v.open_count;
        j["close_count"] = v.close_count;
        j["balanced"] = v.balanced;
        j["prefix_legal"] = v.prefix_legal;
        j["schema_valid"] = v.schema_valid;
        if (v.depth) j["depth"] = *v.depth;
        (v.schema_valid ? valid : invalid)++;
      } catch (const Error& e) {
        j["error"] = e.what();
        ++invalid;
      }
      report_lines += j.dump();
      report_lines += '\n';
    }
    if (!o.out.empty()) write_text_file(o.out, report_lines);
    out << valid << " valid / " << invalid << " invalid\n";
  });

  // ---- analyze ----
  CLI::App* analyze = app.add_subcommand(
      "analyze", "first-error distribution of a prediction corpus");
  analyze->add_option("--in", o.in, "PredictionRecord JSONL")->required();
  analyze->add_option("--bucket-by", o.bucket, "depth | language | domain")
      ->check(CLI::IsMember({"depth", "language", "domain"}));
  analyze->add_option("--out", o.out, "JSON report path");
  analyze->add_option("--md", o.md, "markdown report path");
  add_fold(analyze);
  analyze->parse_complete_callback([&] {
    const PredictionsLoad load = load_predictions(o.in, tokopts());
    cli_detail::report_line_issues("error:", load.errors, err);
    cli_detail::report_line_issues("quarantined:", load.quarantine, err);

    AggregateOptions agg;
    agg.bucket_by = o.bucket == "language" ? BucketBy::LANGUAGE
                    : o.bucket == "domain" ? BucketBy::DOMAIN
                                           : BucketBy::DEPTH;
    agg.tokenize = tokopts();
    bool any_forced = false;
    for (const PredictionRecord& r : load.records)
      if (r.forced_pred) any_forced = true;

    Report rep = report_error_distribution(aggregate(load.records, agg),
                                           agg.bucket_by, any_forced);
    rep.metadata["records"] = std::to_string(load.records.size());
    rep.metadata["quarantined"] = std::to_string(load.quarantine.size());
    rep.metadata["line_errors"] = std::to_string(load.errors.size());
    cli_detail::write_report(rep, o.out, o.md, out);
  });

  // ---- oracle ----
  CLI::App* oracle = app.add_subcommand(
      "oracle", "build span- or structure-oracle source/target pairs");
  oracle->add_option("--in", o.in, "dataset file")->required();
  oracle->add_option("--format", o.format, "input format: tsv | jsonl")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  oracle->add_option("--kind", o.kind, "span | struct")
      ->required()
      ->check(CLI::IsMember({"span", "struct"}));
  oracle->add_option("--out", o.out, "output pair file")->required();
  oracle->add_option("--out-format", o.out_format,
                     "output format: tsv | jsonl (default jsonl)")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  add_fold(oracle);
  oracle->parse_complete_callback([&] {
    const cli_detail::FrameRows data = cli_detail::load_frame_rows(
        o.in, format_flag(o.format.empty() ? "tsv" : o.format), tokopts(), err);
    const bool span = o.kind == "span";
    std::vector<OraclePair> pairs;
    pairs.reserve(data.rows.size());
    for (const CorpusRow& row : data.rows)
      pairs.push_back(span ? build_span_oracle(row.utterance, row.frame)
                           : build_struct_oracle(row.utterance, row.frame));
    write_text_file(o.out, o.out_format == "tsv" ? to_tsv(pairs)
                                                 : to_jsonl(pairs));

    // Sidecar metadata: records the separator and marker conventions the
    // pair files rely on.
    nlohmann::json meta;
    meta["kind"] = o.kind;
    meta["separator"] = kOracleSeparator;
    meta["marker_format"] = "[spanK], K = 1..N in frame order";
    meta["pairs"] = pairs.size();
    meta["rows_dropped"] = data.dropped;
    meta["tool_version"] = kVersion;
    write_text_file(o.out + ".meta.json", meta.dump(2) + "\n");
  });

  // ---- perturb ----
  CLI::App* perturb_cmd = app.add_subcommand(
      "perturb", "inject single labeled errors into gold frames");
  perturb_cmd->add_option("--in", o.in, "dataset file")->required();
  perturb_cmd->add_option("--format", o.format, "input format: tsv | jsonl")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  perturb_cmd->add_option("--out", o.out, "PredictionRecord JSONL path")
      ->required();
  perturb_cmd
      ->add_option("--type", o.type,
                   "intent | slot | ood | mode | leaf | all (rotate)")
      ->check(CLI::IsMember({"intent", "slot", "ood", "mode", "leaf", "all"}));
  add_seed(perturb_cmd);
  perturb_cmd->add_option("--correct-fraction", o.correct_fraction,
                          "fraction of records left unperturbed")
      ->check(CLI::Range(0.0, 1.0));
  perturb_cmd
      ->add_option_function<std::string>(
          "--prob-profile",
          [&](const std::string& csv) {
            double c, i, j;
            if (std::sscanf(csv.c_str(), "%lf,%lf,%lf", &c, &i, &j) != 3)
              throw CLI::ValidationError(
                  "--prob-profile", "expected correct,incorrect,jitter");
            o.prob_correct = c;
            o.prob_incorrect = i;
            o.jitter = j;
          },
          "probability profile as correct,incorrect,jitter "
          "(e.g. 0.9,0.6,0.05)");
  perturb_cmd->add_option("--prob-correct", o.prob_correct,
                          "mean token probability for correct records");
  perturb_cmd->add_option("--prob-incorrect", o.prob_incorrect,
                          "mean token probability for incorrect records");
  perturb_cmd->add_option("--jitter", o.jitter, "uniform probability jitter");
  add_fold(perturb_cmd);
  perturb_cmd->parse_complete_callback([&] {
    const cli_detail::FrameRows data = cli_detail::load_frame_rows(
        o.in, format_flag(o.format.empty() ? "tsv" : o.format), tokopts(), err);
    CorpusOptions copts;
    if (o.type != "all") copts.error_type = *parse_error_type(o.type);
    copts.seed = seed();
    copts.prob_profile = {o.prob_correct, o.prob_incorrect, o.jitter};
    copts.correct_fraction = o.correct_fraction;
    const CorpusResult corpus = make_corpus(data.rows, copts);
    write_text_file(o.out, to_jsonl(corpus.records));
    out << corpus.records.size() << " records written, " << corpus.skipped
        << " skipped\n";
  });

  // ---- ce-train ----
  CLI::App* ce_train = app.add_subcommand(
      "ce-train", "train the confidence estimator on a prediction corpus");
  ce_train->add_option("--in", o.in, "PredictionRecord JSONL")->required();
  ce_train->add_option("--out", o.out, "model JSON path")->required();
  ce_train->add_option("--features", o.features,
                       "comma list of length,validity,confidence");
  ce_train->add_option("--epochs", o.epochs, "training epochs")
      ->check(CLI::PositiveNumber);
  ce_train->add_option("--lr", o.lr, "initial step size");
  ce_train->add_option("--lambda", o.lambda, "L2 regularization");
  ce_train->add_option("--threshold", o.threshold, "margin threshold");
  ce_train->add_flag("--tune-threshold", o.tune_threshold,
                     "pick the F1-best threshold on the training split");
  add_seed(ce_train);
  add_fold(ce_train);
  ce_train->parse_complete_callback([&] {
    const PredictionsLoad load = load_predictions(o.in, tokopts());
    cli_detail::report_line_issues("error:", load.errors, err);
    cli_detail::report_line_issues("quarantined:", load.quarantine, err);
    TrainConfig cfg;
    cfg.mask = cli_detail::mask_from_csv(o.features);
    cfg.epochs = o.epochs;
    cfg.step_size = o.lr;
    cfg.lambda = o.lambda;
    cfg.threshold = o.threshold;
    cfg.tune_threshold = o.tune_threshold;
    cfg.seed = seed();
    const LinearModel model = train(load.records, cfg, tokopts());
    write_text_file(o.out, to_json(model).dump(2) + "\n");
    out << "model written to " << o.out << " (fingerprint "
        << model.training_fingerprint << ")\n";
  });

  // ---- ce-eval ----
  CLI::App* ce_eval = app.add_subcommand(
      "ce-eval", "evaluate a trained confidence estimator");
  ce_eval->add_option("--model", o.model, "model JSON")->required();
  ce_eval->add_option("--in", o.in, "PredictionRecord JSONL")->required();
  ce_eval->add_option("--out", o.out, "JSON report path");
  ce_eval->add_option("--md", o.md, "markdown report path");
  add_fold(ce_eval);
  ce_eval->parse_complete_callback([&] {
    std::ifstream mf(o.model, std::ios::binary);
    if (!mf) throw UnreadableFile(o.model);
    nlohmann::json mj;
    mf >> mj;
    const LinearModel model = model_from_json(mj);

    const PredictionsLoad load = load_predictions(o.in, tokopts());
    cli_detail::report_line_issues("error:", load.errors, err);
    cli_detail::report_line_issues("quarantined:", load.quarantine, err);
    const PRF prf = evaluate(model, load.records, tokopts());

    Report rep = report_ce_results(prf, "svm");
    rep.metadata["model_fingerprint"] = model.training_fingerprint;
    rep.metadata["records"] = std::to_string(load.records.size());
    rep.metadata["quarantined"] = std::to_string(load.quarantine.size());
    if (!prf.precision_defined)
      rep.metadata["precision_degenerate"] =
          "no positive predictions; precision reported as 0";
    cli_detail::write_report(rep, o.out, o.md, out);
  });

  // ---- ce-ablate ----
  CLI::App* ce_ablate = app.add_subcommand(
      "ce-ablate", "per-feature ablation of the confidence estimator");
  ce_ablate->add_option("--train", o.train, "training PredictionRecord JSONL")
      ->required();
  ce_ablate->add_option("--test", o.test, "test PredictionRecord JSONL")
      ->required();
  ce_ablate->add_option("--epochs", o.epochs, "training epochs")
      ->check(CLI::PositiveNumber);
  ce_ablate->add_option("--lr", o.lr, "initial step size");
  ce_ablate->add_option("--lambda", o.lambda, "L2 regularization");
  ce_ablate->add_option("--threshold", o.threshold, "margin threshold");
  ce_ablate->add_option("--out", o.out, "JSON report path");
  ce_ablate->add_option("--md", o.md, "markdown report path");
  add_seed(ce_ablate);
  add_fold(ce_ablate);
  ce_ablate->parse_complete_callback([&] {
    const PredictionsLoad train_load = load_predictions(o.train, tokopts());
    const PredictionsLoad test_load = load_predictions(o.test, tokopts());
    cli_detail::report_line_issues("error:", train_load.errors, err);
    cli_detail::report_line_issues("quarantined:", train_load.quarantine, err);
    cli_detail::report_line_issues("error:", test_load.errors, err);
    cli_detail::report_line_issues("quarantined:", test_load.quarantine, err);

    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.step_size = o.lr;
    cfg.lambda = o.lambda;
    cfg.threshold = o.threshold;
    cfg.seed = seed();
    Report rep = report_ce_results(
        ablate(train_load.records, test_load.records, cfg, tokopts()));
    rep.metadata["train_records"] = std::to_string(train_load.records.size());
    rep.metadata["test_records"] = std::to_string(test_load.records.size());
    cli_detail::write_report(rep, o.out, o.md, out);
  });

  // ---- report ----
  CLI::App* report_cmd = app.add_subcommand(
      "report", "exact match and tree validity by gold depth");
  report_cmd->add_option("--in", o.in, "PredictionRecord JSONL")->required();
  report_cmd->add_option("--out", o.out, "JSON report path");
  report_cmd->add_option("--md", o.md, "markdown report path");
  add_fold(report_cmd);
  report_cmd->parse_complete_callback([&] {
    const PredictionsLoad load = load_predictions(o.in, tokopts());
    cli_detail::report_line_issues("error:", load.errors, err);
    cli_detail::report_line_issues("quarantined:", load.quarantine, err);
    Report rep = report_em_tv_by_depth(load.records, tokopts());
    rep.metadata["quarantined"] = std::to_string(load.quarantine.size());
    rep.metadata["line_errors"] = std::to_string(load.errors.size());
    cli_detail::write_report(rep, o.out, o.md, out);
  });

  // ---- dispatch ----
  // Help goes to the deepest selected subcommand so `frameprobe oracle
  // --help` documents oracle, not the whole app.
  auto active_app = [&]() -> const CLI::App* {
    const CLI::App* a = &app;
    for (auto subs = a->get_subcommands(); !subs.empty();
         subs = a->get_subcommands())
      a = subs.front();
    return a;
  };
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << active_app()->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << active_app()->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace frameprobe
