#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctgn/config.hpp"
#include "ctgn/model.hpp"
#include "ctgn/trainer.hpp"

namespace ctgn {

/// Outcome counts for one domain. Abstentions count against accuracy.
struct DomainStats {
  std::size_t labeled = 0;
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t abstained = 0;

  double accuracy() const { return labeled ? static_cast<double>(correct) / labeled : 0.0; }
  /// Share of labeled records that received any winner.
  double coverage() const {
    return labeled ? static_cast<double>(correct + wrong) / labeled : 0.0;
  }
  void add(const DomainStats& other);
};

struct SubsetStats {
  std::size_t records = 0;
  std::map<std::string, DomainStats> domains;
  DomainStats overall;  // micro-average over domains
};

/// One evaluated (record, domain) pair.
struct ConfusionRow {
  std::size_t record = 0;  // 1-based position in the test set
  std::string domain;
  std::string expected;
  std::string predicted;  // empty on abstention
  bool known = false;
};

struct EvalReport {
  EngineConfig config;
  SubsetStats all;
  SubsetStats known;       // text seen verbatim in training
  SubsetStats unfamiliar;  // text never seen in training
  std::vector<ConfusionRow> rows;
  std::size_t model_cells = 0;
  double items_per_second = 0.0;
};

/// Recognizes every test record and scores the winners against its labels.
/// `training_texts` drives the known/unfamiliar split; when empty every
/// record is unfamiliar.
EvalReport evaluate(const Model& model, std::span<const CorpusRecord> test,
                    const EngineConfig& config, const std::set<std::string>& training_texts = {},
                    unsigned worker_count = 1);

/// Aligned human-readable table.
void write_report_table(const EvalReport& report, std::ostream& os, bool include_timing = true);

/// Tab-separated lines with a '#' header naming the columns. Timing is the
/// only non-deterministic field and can be left out.
void write_report_lines(const EvalReport& report, std::ostream& os, bool include_timing = true,
                        bool include_rows = false);

struct BenchResult {
  std::vector<double> items_per_second;  // one per repetition
  double median = 0.0;
};

/// Times batch recognition of `texts`, `repetitions` times.
BenchResult bench(const Model& model, std::span<const std::string> texts,
                  const EngineConfig& config, unsigned worker_count, unsigned repetitions);

}  // namespace ctgn
