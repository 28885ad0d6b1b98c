#include "ctgn/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctgn/corpus.hpp"
#include "ctgn/error.hpp"
#include "ctgn/eval.hpp"
#include "ctgn/model_io.hpp"
#include "ctgn/recognizer.hpp"
#include "ctgn/synth.hpp"
#include "ctgn/trainer.hpp"

namespace ctgn {
namespace {

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ArgumentError("expected true or false, got '" + s + "'");
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ArgumentError(std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

// Engine flags given on the command line; empty strings mean "not given".
struct EngineFlags {
  std::string max_frame_distance;
  std::string top_k;
  std::string scoring_mode;
  std::string ranking_mode;
  std::string order_priority;
  std::string scope_mode;
  std::string min_matched_features;
  std::string min_score;
  std::string cf_total_scope;
  std::string cf_accumulation;
  std::vector<std::string> driver_domains;
  bool no_drivers = false;

  void attach(CLI::App* cmd, bool training) {
    cmd->add_option("--max-frame-distance", max_frame_distance, "Frame hop distance (default 2)");
    cmd->add_option("--top-k", top_k, "Categories kept per feature per domain, or 'unbounded'");
    cmd->add_option("--scoring-mode", scoring_mode, "asymmetric | symmetric");
    cmd->add_option("--ranking-mode", ranking_mode, "boolean_first | score_only");
    cmd->add_option("--order-priority", order_priority, "true | false");
    cmd->add_option("--scope-mode", scope_mode, "union | intersection | off");
    cmd->add_option("--min-matched-features", min_matched_features, "Candidate threshold");
    cmd->add_option("--min-score", min_score, "Candidate threshold");
    cmd->add_option("--cf-total-scope", cf_total_scope, "per_domain | global");
    if (training) {
      cmd->add_option("--cf-accumulation", cf_accumulation, "relevance_product | count");
      cmd->add_option("--driver-domain", driver_domains, "Driver domain name (repeatable)")
          ->allow_extra_args(false);
      cmd->add_flag("--no-drivers", no_drivers, "Declare no driver domains");
    }
  }

  EngineConfig apply(EngineConfig c) const {
    if (!max_frame_distance.empty())
      c.max_frame_distance = parse_number<int>(max_frame_distance, "max-frame-distance");
    if (!top_k.empty()) c.top_k = parse_top_k(top_k);
    if (!scoring_mode.empty()) c.scoring_mode = parse_scoring_mode(scoring_mode);
    if (!ranking_mode.empty()) c.ranking_mode = parse_ranking_mode(ranking_mode);
    if (!order_priority.empty()) c.order_priority = parse_bool(order_priority);
    if (!scope_mode.empty()) c.scope_mode = parse_scope_mode(scope_mode);
    if (!min_matched_features.empty())
      c.min_matched_features = parse_number<std::uint32_t>(min_matched_features, "min-matched-features");
    if (!min_score.empty()) c.min_score = parse_number<double>(min_score, "min-score");
    if (!cf_total_scope.empty()) c.cf_total_scope = parse_cf_total_scope(cf_total_scope);
    if (!cf_accumulation.empty()) c.cf_accumulation = parse_cf_accumulation(cf_accumulation);
    if (no_drivers) c.driver_domains.clear();
    if (!driver_domains.empty()) c.driver_domains = driver_domains;
    c.validate();
    return c;
  }
};

std::string model_path_or_env(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv(kModelPathEnv); env && *env) return env;
  throw ArgumentError(std::string("no model path: pass --model or set ") + kModelPathEnv);
}

std::string first_column(const std::string& line) {
  const auto tab = line.find('\t');
  return tab == std::string::npos ? line : line.substr(0, tab);
}

std::vector<std::string> read_texts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> texts;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    texts.push_back(first_column(line));
  }
  return texts;
}

void print_model_summary(const Model& m, std::ostream& out) {
  out << "tokens\t" << m.token_count() << '\n'
      << "features\t" << m.feature_count() << '\n'
      << "domains\t" << m.domain_count() << '\n'
      << "categories\t" << m.category_count() << '\n'
      << "cells\t" << m.cell_count() << '\n'
      << "cooccurrence_cells\t" << m.cooccurrence_cell_count() << '\n';
}

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// train ---------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string model_out;
  std::string confirmations;
  EngineFlags engine;
};

int cmd_train(const TrainArgs& a, Streams io) {
  const auto corpus = read_corpus(a.corpus);
  if (corpus.empty()) {
    io.err << "error: corpus " << a.corpus << " holds no records\n";
    return kExitFormat;
  }
  std::vector<Confirmation> confirmations;
  if (!a.confirmations.empty()) confirmations = read_confirmations(a.confirmations);

  TrainingDiagnostics diag;
  const Model model = train(corpus, a.engine.apply(EngineConfig{}), confirmations, &diag);
  if (diag.skipped_records)
    io.err << "warning: " << diag.skipped_records << " record(s) without tokens were skipped\n";
  save_model(model, model_path_or_env(a.model_out));

  io.out << "records\t" << corpus.size() << '\n' << "skipped\t" << diag.skipped_records << '\n';
  print_model_summary(model, io.out);
  return kExitOk;
}

// recognize -----------------------------------------------------------------

struct RecognizeArgs {
  std::string model;
  std::string input = "-";
  std::vector<std::string> domains;
  unsigned workers = 1;
  EngineFlags engine;
};

void write_rows(std::size_t first_line, std::span<const RecognitionResult> results,
                const Model& model, std::ostream& out) {
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (const auto& d : results[i].domains) {
      out << first_line + i << '\t' << model.domain(d.domain).name << '\t';
      if (const auto* w = d.winner())
        out << model.category(w->category).label << '\t' << shortest(w->score) << '\t'
            << w->matched_feature_count;
      else
        out << "\t0\t0";
      out << '\n';
    }
  }
}

int cmd_recognize(const RecognizeArgs& a, Streams io) {
  const Model model = load_model(model_path_or_env(a.model));
  const EngineConfig config = a.engine.apply(model.config());
  std::optional<std::set<DomainId>> domains;
  if (!a.domains.empty()) domains = resolve_domains(model, a.domains);

  std::ifstream file;
  std::istream* in = &io.in;
  if (a.input != "-") {
    file.open(a.input);
    if (!file) throw IoError("cannot open " + a.input);
    in = &file;
  }

  io.out << "# line\tdomain\twinner\tscore\tmatched\n";
  constexpr std::size_t kBatch = 4096;
  std::vector<std::string> batch;
  std::size_t first_line = 1;
  auto flush = [&] {
    const auto results = batch_recognize(batch, model, config, a.workers, domains);
    write_rows(first_line, results, model, io.out);
    first_line += batch.size();
    batch.clear();
  };
  for (std::string line; std::getline(*in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    batch.push_back(first_column(line));
    if (batch.size() == kBatch) flush();
  }
  if (!batch.empty()) flush();
  return kExitOk;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string test;
  std::string train_corpus;
  unsigned workers = 1;
  bool rows = false;
  bool no_timing = false;
  EngineFlags engine;
};

int cmd_evaluate(const EvaluateArgs& a, Streams io) {
  const Model model = load_model(model_path_or_env(a.model));
  const EngineConfig config = a.engine.apply(model.config());
  const auto test = read_corpus(a.test);
  std::set<std::string> training_texts;
  if (!a.train_corpus.empty())
    for (auto& r : read_corpus(a.train_corpus)) training_texts.insert(std::move(r.text));

  const EvalReport report = evaluate(model, test, config, training_texts, a.workers);
  write_report_table(report, io.out, !a.no_timing);
  io.out << '\n';
  write_report_lines(report, io.out, !a.no_timing, a.rows);
  return kExitOk;
}

// bench ---------------------------------------------------------------------

struct BenchArgs {
  std::string model;
  std::string input;
  unsigned workers = 1;
  unsigned repetitions = 3;
  bool sweep = false;
  std::vector<std::string> sweep_top_k = {"1", "10", "100", "unbounded"};
  EngineFlags engine;
};

int cmd_bench(const BenchArgs& a, Streams io) {
  if (a.repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  const Model model = load_model(model_path_or_env(a.model));
  const EngineConfig base = a.engine.apply(model.config());
  const auto texts = read_texts(a.input);

  std::vector<EngineConfig> configs;
  if (a.sweep) {
    for (const auto& k : a.sweep_top_k)
      for (ScoringMode s : {ScoringMode::asymmetric, ScoringMode::symmetric})
        for (bool order : {true, false}) {
          EngineConfig c = base;
          c.top_k = parse_top_k(k);
          c.scoring_mode = s;
          c.order_priority = order;
          configs.push_back(c);
        }
  } else {
    configs.push_back(base);
  }

  io.out << "# items\t" << texts.size() << "\tworkers\t" << a.workers << '\n';
  io.out << "# bench\ttop_k\tscoring_mode\torder_priority\trepetition\titems_per_sec\n";
  for (const auto& c : configs) {
    const BenchResult r = bench(model, texts, c, a.workers, a.repetitions);
    const std::string key = to_string(c.top_k) + "\t" + std::string(to_string(c.scoring_mode)) +
                            "\t" + (c.order_priority ? "true" : "false");
    for (std::size_t i = 0; i < r.items_per_second.size(); ++i)
      io.out << "bench\t" << key << '\t' << i + 1 << '\t' << r.items_per_second[i] << '\n';
    io.out << "bench\t" << key << "\tmedian\t" << r.median << '\n';
  }
  return kExitOk;
}

// compress / specialize -----------------------------------------------------

int cmd_compress(const std::string& in, const std::string& k, const std::string& out_path,
                 Streams io) {
  const TopK top_k = parse_top_k(k);
  const Model model = load_model(model_path_or_env(in));
  const Model out = compress(model, top_k);
  save_model(out, out_path);
  io.out << "cells_before\t" << model.cell_count() << '\n'
         << "cells_after\t" << out.cell_count() << '\n';
  return kExitOk;
}

int cmd_specialize(const std::string& in, const std::string& domain, const std::string& out_path,
                   Streams io) {
  const Model model = load_model(model_path_or_env(in));
  const Model out = specialize(model, domain);
  save_model(out, out_path);
  io.out << "cells_before\t" << model.cell_count() << '\n'
         << "cells_after\t" << out.cell_count() << '\n'
         << "features_before\t" << model.feature_count() << '\n'
         << "features_after\t" << out.feature_count() << '\n';
  return kExitOk;
}

// synth / dump / verify -----------------------------------------------------

int cmd_synth(const SynthParams& p, const std::string& out_path, Streams io) {
  const auto records = synthesize(p);
  if (out_path == "-") {
    write_corpus(io.out, records);
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  write_corpus(out, records);
  if (!out) throw IoError("failed writing " + out_path);
  return kExitOk;
}

int cmd_dump(const std::string& in, Streams io) {
  dump_model(load_model(model_path_or_env(in)), io.out);
  return kExitOk;
}

int cmd_verify(const std::string& in, Streams io) {
  const Model model = load_model(model_path_or_env(in));
  const auto findings = verify_totals(model);
  io.out << "# finding\tkind\tfeature\tdomain\tcategory\tstored\trecomputed\n";
  for (const auto& f : findings) {
    const bool fd = f.kind == TotalsFinding::Kind::feature_domain_total;
    io.out << "finding\t" << (fd ? "feature_domain_total" : "category_total") << '\t'
           << (fd ? model.feature_text(f.feature) : "") << '\t'
           << (fd ? model.domain(f.domain).name : "") << '\t'
           << (fd ? "" : model.category(f.category).label) << '\t' << shortest(f.stored) << '\t'
           << shortest(f.recomputed) << '\n';
  }
  io.out << "findings\t" << findings.size() << '\n';
  return findings.empty() ? kExitOk : kExitModel;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  Streams io{in, out, err};
  CLI::App app{"ctgn: learn and apply text categorization and attribution rules"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a labeled corpus");
  train_cmd->add_option("corpus", train_args.corpus, "Corpus file")->required();
  train_cmd->add_option("-o,--model", train_args.model_out, "Model output path");
  train_cmd->add_option("--confirmations", train_args.confirmations, "Confirmations sidecar");
  train_args.engine.attach(train_cmd, true);

  RecognizeArgs rec_args;
  auto* rec_cmd = app.add_subcommand("recognize", "Recognize text lines");
  rec_cmd->add_option("-m,--model", rec_args.model, "Model path");
  rec_cmd->add_option("input", rec_args.input, "Input file, or '-' for standard input");
  rec_cmd->add_option("-d,--domain", rec_args.domains, "Restrict to a domain (repeatable)")
      ->allow_extra_args(false);
  rec_cmd->add_option("-w,--workers", rec_args.workers, "Worker threads");
  rec_args.engine.attach(rec_cmd, false);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on a labeled test corpus");
  eval_cmd->add_option("-m,--model", eval_args.model, "Model path");
  eval_cmd->add_option("test", eval_args.test, "Test corpus")->required();
  eval_cmd->add_option("--train-corpus", eval_args.train_corpus,
                       "Training corpus, for the known/unfamiliar split");
  eval_cmd->add_option("-w,--workers", eval_args.workers, "Worker threads");
  eval_cmd->add_flag("--rows", eval_args.rows, "Emit one row per (record, domain)");
  eval_cmd->add_flag("--no-timing", eval_args.no_timing, "Leave out the throughput line");
  eval_args.engine.attach(eval_cmd, false);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Measure recognition throughput");
  bench_cmd->add_option("-m,--model", bench_args.model, "Model path");
  bench_cmd->add_option("input", bench_args.input, "Text lines or corpus file")->required();
  bench_cmd->add_option("-w,--workers", bench_args.workers, "Worker threads");
  bench_cmd->add_option("-r,--repetitions", bench_args.repetitions, "Timed repetitions");
  bench_cmd->add_flag("--sweep", bench_args.sweep,
                      "Run every (top-k, scoring mode, order priority) combination");
  bench_cmd->add_option("--sweep-top-k", bench_args.sweep_top_k, "top-k values for --sweep")
      ->delimiter(',');
  bench_args.engine.attach(bench_cmd, false);

  std::string compress_in, compress_k, compress_out;
  auto* compress_cmd = app.add_subcommand("compress", "Keep the best K categories per feature");
  compress_cmd->add_option("-m,--model", compress_in, "Input model");
  compress_cmd->add_option("-k,--top-k", compress_k, "K >= 1 or 'unbounded'")->required();
  compress_cmd->add_option("-o,--output", compress_out, "Output model")->required();

  std::string special_in, special_domain, special_out;
  auto* special_cmd = app.add_subcommand("specialize", "Keep the rules of one domain");
  special_cmd->add_option("-m,--model", special_in, "Input model");
  special_cmd->add_option("-d,--domain", special_domain, "Domain to keep")->required();
  special_cmd->add_option("-o,--output", special_out, "Output model")->required();

  SynthParams synth_params;
  std::string synth_out = "-";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("-o,--output", synth_out, "Output path, or '-' for standard output");
  synth_cmd->add_option("--domains", synth_params.domains, "Number of domains");
  synth_cmd->add_option("--categories", synth_params.categories, "Categories per domain");
  synth_cmd->add_option("--vocab", synth_params.vocab, "Tokens per category");
  synth_cmd->add_option("--overlap", synth_params.overlap, "Shared vocabulary fraction in [0,1]");
  synth_cmd->add_option("--texts-per-category", synth_params.texts_per_category,
                        "Texts per category of the first domain");
  synth_cmd->add_option("--tokens-per-block", synth_params.tokens_per_block,
                        "Tokens drawn per domain in each text");
  synth_cmd->add_option("--seed", synth_params.seed, "Sampling seed");

  std::string dump_in;
  auto* dump_cmd = app.add_subcommand("dump", "Print a model as text");
  dump_cmd->add_option("-m,--model", dump_in, "Model path");

  std::string verify_in;
  auto* verify_cmd = app.add_subcommand("verify", "Check stored evidence totals");
  verify_cmd->add_option("-m,--model", verify_in, "Model path");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, io);
    if (*rec_cmd) return cmd_recognize(rec_args, io);
    if (*eval_cmd) return cmd_evaluate(eval_args, io);
    if (*bench_cmd) return cmd_bench(bench_args, io);
    if (*compress_cmd) return cmd_compress(compress_in, compress_k, compress_out, io);
    if (*special_cmd) return cmd_specialize(special_in, special_domain, special_out, io);
    if (*synth_cmd) return cmd_synth(synth_params, synth_out, io);
    if (*dump_cmd) return cmd_dump(dump_in, io);
    if (*verify_cmd) return cmd_verify(verify_in, io);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const ModelFileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }
  return kExitUsage;
}

}  // namespace ctgn
