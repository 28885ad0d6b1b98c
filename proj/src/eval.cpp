#include "ctgn/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ctgn/error.hpp"
#include "ctgn/recognizer.hpp"

namespace ctgn {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_subset_table(const char* title, const SubsetStats& s, std::ostream& os) {
  os << title << " (" << s.records << " records)\n";
  os << "  " << std::left << std::setw(20) << "domain" << std::right << std::setw(9) << "labeled"
     << std::setw(9) << "correct" << std::setw(9) << "wrong" << std::setw(11) << "abstained"
     << std::setw(10) << "accuracy" << '\n';
  auto row = [&](const std::string& name, const DomainStats& d) {
    os << "  " << std::left << std::setw(20) << name << std::right << std::setw(9) << d.labeled
       << std::setw(9) << d.correct << std::setw(9) << d.wrong << std::setw(11) << d.abstained
       << std::setw(10) << fixed(d.accuracy(), 4) << '\n';
  };
  for (const auto& [name, d] : s.domains) row(name, d);
  row("(micro)", s.overall);
}

void write_subset_lines(const char* subset, const SubsetStats& s, std::ostream& os) {
  auto row = [&](const std::string& name, const DomainStats& d) {
    os << "accuracy\t" << subset << '\t' << name << '\t' << d.labeled << '\t' << d.correct << '\t'
       << d.wrong << '\t' << d.abstained << '\t' << fixed(d.accuracy(), 6) << '\n';
  };
  for (const auto& [name, d] : s.domains) row(name, d);
  row("*", s.overall);
}

}  // namespace

void DomainStats::add(const DomainStats& o) {
  labeled += o.labeled;
  correct += o.correct;
  wrong += o.wrong;
  abstained += o.abstained;
}

EvalReport evaluate(const Model& model, std::span<const CorpusRecord> test,
                    const EngineConfig& config, const std::set<std::string>& training_texts,
                    unsigned worker_count) {
  EvalReport report;
  report.config = config;
  report.model_cells = model.cell_count();

  std::vector<std::string> texts;
  texts.reserve(test.size());
  for (const auto& r : test) texts.push_back(r.text);

  const auto start = std::chrono::steady_clock::now();
  const auto results = batch_recognize(texts, model, config, worker_count);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  report.items_per_second = elapsed.count() > 0.0 ? texts.size() / elapsed.count() : 0.0;

  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool known = training_texts.contains(test[i].text);
    SubsetStats& subset = known ? report.known : report.unfamiliar;
    ++subset.records;
    ++report.all.records;
    for (const auto& [domain, expected] : test[i].labels) {
      const auto it = results[i].object.find(domain);
      const std::string predicted = it == results[i].object.end() ? std::string() : it->second;

      DomainStats outcome;
      outcome.labeled = 1;
      if (predicted.empty())
        outcome.abstained = 1;
      else if (predicted == expected)
        outcome.correct = 1;
      else
        outcome.wrong = 1;

      for (SubsetStats* s : {&subset, &report.all}) {
        s->domains[domain].add(outcome);
        s->overall.add(outcome);
      }
      report.rows.push_back({i + 1, domain, expected, predicted, known});
    }
  }
  return report;
}

void write_report_table(const EvalReport& report, std::ostream& os, bool include_timing) {
  write_subset_table("all", report.all, os);
  write_subset_table("known", report.known, os);
  write_subset_table("unfamiliar", report.unfamiliar, os);
  os << "model cells: " << report.model_cells << '\n';
  if (include_timing) os << "throughput: " << fixed(report.items_per_second, 1) << " items/sec\n";
}

void write_report_lines(const EvalReport& report, std::ostream& os, bool include_timing,
                        bool include_rows) {
  os << "# config\n";
  std::istringstream config(describe(report.config));
  for (std::string line; std::getline(config, line);) os << "config\t" << line << '\n';
  os << "# accuracy\tsubset\tdomain\tlabeled\tcorrect\twrong\tabstained\taccuracy\n";
  write_subset_lines("all", report.all, os);
  write_subset_lines("known", report.known, os);
  write_subset_lines("unfamiliar", report.unfamiliar, os);
  os << "model_cells\t" << report.model_cells << '\n';
  if (include_timing) os << "throughput\t" << fixed(report.items_per_second, 3) << '\n';
  if (include_rows) {
    os << "# row\trecord\tdomain\texpected\tpredicted\tsubset\n";
    for (const auto& r : report.rows)
      os << "row\t" << r.record << '\t' << r.domain << '\t' << r.expected << '\t' << r.predicted
         << '\t' << (r.known ? "known" : "unfamiliar") << '\n';
  }
}

BenchResult bench(const Model& model, std::span<const std::string> texts,
                  const EngineConfig& config, unsigned worker_count, unsigned repetitions) {
  if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  BenchResult result;
  for (unsigned rep = 0; rep < repetitions; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    const auto out = batch_recognize(texts, model, config, worker_count);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.items_per_second.push_back(elapsed.count() > 0.0 ? out.size() / elapsed.count() : 0.0);
  }
  std::vector<double> sorted = result.items_per_second;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  result.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return result;
}

}  // namespace ctgn
