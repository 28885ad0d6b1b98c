#pragma once

#include <random>
#include <string>
#include <vector>

#include "ctgn/model.hpp"
#include "ctgn/trainer.hpp"
#include "oracle.hpp"

namespace testing_support {

inline std::string oracle_feature_key(const ctgn::Model& m, ctgn::FeatureId f) {
  const auto& feat = m.feature(f);
  if (feat.kind == ctgn::FeatureKind::keyword) return oracle::keyword_key(m.token(feat.tokens[0]));
  return oracle::frame_key(m.token(feat.tokens[0]), m.token(feat.tokens[1]));
}

inline std::string oracle_category_key(const ctgn::Model& m, ctgn::CategoryId c) {
  return oracle::category_key(m.domain(m.category(c).domain).name, m.category(c).label);
}

inline std::vector<oracle::Record> to_oracle(const std::vector<ctgn::CorpusRecord>& corpus) {
  std::vector<oracle::Record> out;
  for (const auto& r : corpus) out.push_back({r.text, r.weight, r.labels});
  return out;
}

/// Small random corpus: `texts` records over a vocabulary of `vocab` words,
/// up to `domains` domains with up to `categories` labels each.
inline std::vector<ctgn::CorpusRecord> random_corpus(std::mt19937_64& rng, std::size_t texts,
                                                     std::size_t vocab, std::size_t domains,
                                                     std::size_t categories,
                                                     bool random_weights = false) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<ctgn::CorpusRecord> corpus;
  for (std::size_t t = 0; t < texts; ++t) {
    ctgn::CorpusRecord r;
    const std::size_t len = 1 + pick(6);
    for (std::size_t i = 0; i < len; ++i) {
      if (i) r.text += ' ';
      r.text += "w" + std::to_string(pick(vocab));
    }
    for (std::size_t d = 0; d < domains; ++d)
      if (pick(4) != 0) r.labels["dom" + std::to_string(d)] = "v" + std::to_string(pick(categories));
    if (random_weights) r.weight = 0.25 + 0.75 * static_cast<double>(pick(1000) + 1) / 1000.0;
    corpus.push_back(std::move(r));
  }
  return corpus;
}

}  // namespace testing_support
