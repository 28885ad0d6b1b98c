#include <doctest.h>

#include <random>
#include <sstream>

#include "ctgn/corpus.hpp"
#include "ctgn/error.hpp"
#include "ctgn/eval.hpp"
#include "ctgn/recognizer.hpp"
#include "ctgn/synth.hpp"
#include "ctgn/trainer.hpp"
#include "helpers.hpp"

using namespace ctgn;

namespace {

std::vector<CorpusRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("corpus parsing") {
  const auto records = parse(
      "# header\n"
      "\n"
      "Office scissors\tunspsc=44121618\tcolor=black\r\n"
      "steel blade\t0.5\tunspsc=27111500\n"
      "unlabeled text\n");
  REQUIRE(records.size() == 3);
  CHECK(records[0].text == "Office scissors");
  CHECK(records[0].weight == 1.0);
  CHECK(records[0].labels == std::map<std::string, std::string>{{"unspsc", "44121618"}, {"color", "black"}});
  CHECK(records[1].weight == 0.5);
  CHECK(records[2].labels.empty());
}

TEST_CASE("corpus parse errors carry the line number") {
  CHECK(parse_error_line("ok\tx=1\nbad\tnolabel=\n") == 2);
  CHECK(parse_error_line("a\tx=1\n\nb\t0\n") == 3);
  CHECK(parse_error_line("a\t1.5\n") == 1);
  CHECK(parse_error_line("a\tabc\n") == 1);
  CHECK(parse_error_line("a\tx=1\tx=2\n") == 1);
  CHECK(parse_error_line("a\t=v\n") == 1);
  CHECK_THROWS_AS(read_corpus("/nonexistent/corpus.tsv"), IoError);
}

TEST_CASE("corpus write and parse round-trip") {
  std::mt19937_64 rng(83);
  const auto corpus = testing_support::random_corpus(rng, 40, 10, 3, 4, true);
  std::ostringstream out;
  write_corpus(out, corpus);
  const auto back = parse(out.str());
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back[i].text == corpus[i].text);
    CHECK(back[i].weight == corpus[i].weight);
    CHECK(back[i].labels == corpus[i].labels);
  }
}

TEST_CASE("confirmation parsing") {
  std::istringstream in("# c\nunspsc\tA\tkeyword\tsteel\nunspsc\tB\tframe\toffice\tscissors\n");
  const auto c = parse_confirmations(in);
  REQUIRE(c.size() == 2);
  CHECK(c[0].kind == FeatureKind::keyword);
  CHECK(c[0].tokens == std::vector<std::string>{"steel"});
  CHECK(c[1].kind == FeatureKind::frame);
  CHECK(c[1].tokens == std::vector<std::string>{"office", "scissors"});

  std::istringstream bad_kind("unspsc\tA\tphrase\tsteel\n");
  CHECK_THROWS_AS(parse_confirmations(bad_kind), ParseError);
  std::istringstream bad_arity("unspsc\tA\tframe\tsteel\n");
  CHECK_THROWS_AS(parse_confirmations(bad_arity), ParseError);
}

TEST_CASE("synthetic corpus shape and determinism") {
  SynthParams p;
  p.domains = 2;
  p.categories = 4;
  p.texts_per_category = 3;
  const auto a = synthesize(p);
  const auto b = synthesize(p);
  REQUIRE(a.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].labels == b[i].labels);
    CHECK(a[i].labels.size() == 2);
    CHECK(tokenize(a[i].text).size() == 8);
  }
  p.seed = 2;
  const auto c = synthesize(p);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].text != c[i].text;
  CHECK(differs);

  SynthParams bad;
  bad.overlap = 1.5;
  CHECK_THROWS_AS(synthesize(bad), ArgumentError);
  bad = {};
  bad.domains = 0;
  CHECK_THROWS_AS(synthesize(bad), ArgumentError);
}

TEST_CASE("separable synthetic data is recognized perfectly") {
  SynthParams p;
  p.domains = 3;
  p.categories = 8;
  p.texts_per_category = 20;
  const auto corpus = synthesize(p);
  const Model m = train(corpus, EngineConfig{});
  const auto report = evaluate(m, corpus, EngineConfig{});
  CHECK(report.all.overall.labeled == 3 * 8 * 20);
  CHECK(report.all.overall.accuracy() == 1.0);

}

TEST_CASE("fully shared vocabulary stays near chance") {
  SynthParams p;
  p.domains = 1;
  p.categories = 10;
  p.overlap = 1.0;
  p.texts_per_category = 50;
  const Model m = train(synthesize(p), EngineConfig{});
  p.seed = 7;
  p.texts_per_category = 30;
  const auto report = evaluate(m, synthesize(p), EngineConfig{});
  // Shared windows still overlap partially, so allow well below certainty.
  CHECK(report.all.overall.accuracy() < 0.6);
}

TEST_CASE("evaluation counts agree with the confusion rows") {
  std::mt19937_64 rng(89);
  const auto train_set = testing_support::random_corpus(rng, 60, 12, 3, 4);
  const Model m = train(train_set, EngineConfig{});
  auto test_set = testing_support::random_corpus(rng, 40, 14, 3, 4);
  test_set.push_back(train_set[0]);
  test_set.push_back({"w1", 1.0, {{"unseen_domain", "v0"}}});
  std::set<std::string> seen;
  for (const auto& r : train_set) seen.insert(r.text);

  const auto report = evaluate(m, test_set, EngineConfig{}, seen);
  std::size_t labeled = 0;
  for (const auto& r : test_set) labeled += r.labels.size();
  CHECK(report.rows.size() == labeled);
  CHECK(report.all.overall.labeled == labeled);
  CHECK(report.all.records == test_set.size());
  CHECK(report.known.records + report.unfamiliar.records == test_set.size());
  CHECK(report.known.records >= 1);

  std::size_t correct = 0, abstained = 0;
  for (const auto& row : report.rows) {
    if (row.predicted.empty()) ++abstained;
    else if (row.predicted == row.expected) ++correct;
    CHECK(row.known == seen.contains(test_set[row.record - 1].text));
  }
  CHECK(report.all.overall.correct == correct);
  CHECK(report.all.overall.abstained == abstained);
  CHECK(report.all.overall.correct + report.all.overall.wrong + report.all.overall.abstained ==
        report.all.overall.labeled);
  CHECK(report.all.domains.at("unseen_domain").abstained == 1);

  const auto parallel = evaluate(m, test_set, EngineConfig{}, seen, 4);
  CHECK(parallel.all.overall.correct == correct);
}

TEST_CASE("report lines are deterministic without timing") {
  const std::vector<CorpusRecord> corpus{{"a b", 1.0, {{"x", "p"}}}, {"c", 1.0, {{"x", "q"}}}};
  const Model m = train(corpus, EngineConfig{});
  const auto report = evaluate(m, corpus, EngineConfig{});
  std::ostringstream one, two;
  write_report_lines(report, one, false, true);
  write_report_lines(evaluate(m, corpus, EngineConfig{}), two, false, true);
  CHECK(one.str() == two.str());
  CHECK(one.str().find("accuracy\tall\t*\t2\t2\t0\t0\t1.000000\n") != std::string::npos);
  CHECK(one.str().find("row\t1\tx\tp\tp\tunfamiliar\n") != std::string::npos);
  CHECK(one.str().find("throughput") == std::string::npos);
}

TEST_CASE("bench reports one rate per repetition") {
  const std::vector<CorpusRecord> corpus{{"a b", 1.0, {{"x", "p"}}}};
  const Model m = train(corpus, EngineConfig{});
  const std::vector<std::string> texts(100, "a b");
  const auto r = bench(m, texts, EngineConfig{}, 1, 3);
  REQUIRE(r.items_per_second.size() == 3);
  CHECK(r.median > 0.0);
}
