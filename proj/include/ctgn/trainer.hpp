#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctgn/config.hpp"
#include "ctgn/model.hpp"

namespace ctgn {

/// One labeled example. `weight` is the text evidence in (0, 1].
struct CorpusRecord {
  std::string text;
  double weight = 1.0;
  std::map<std::string, std::string> labels;  // domain name -> category label
};

/// A manually confirmed category-feature relation (cf pinned to 1).
struct Confirmation {
  std::string domain;
  std::string label;
  FeatureKind kind = FeatureKind::keyword;
  std::vector<std::string> tokens;
};

struct CategoryRelevance {
  CategoryId category = 0;
  double evidence = 1.0;  // TC_tc
  double text_base = 0.0;  // C_t within the category's domain
  double relevance = 0.0;  // TCTC_tc
};

struct FeatureRelevance {
  FeatureId feature = 0;
  double evidence = 0.0;  // TF_tf
  double relevance = 0.0;  // TFTF_tf
};

/// Per-record relevances computed during training.
struct TextRelevances {
  double feature_base = 0.0;  // F_t
  std::vector<FeatureRelevance> features;
  std::vector<CategoryRelevance> categories;
};

struct TrainingDiagnostics {
  std::vector<TextRelevances> texts;  // one per input record, in input order
  std::vector<double> feature_text_base;   // T_f, by feature id
  std::vector<double> category_text_base;  // T_c, by category id
  std::size_t text_count = 0;      // T
  std::size_t feature_count = 0;   // F
  std::size_t category_count = 0;  // C
  std::size_t skipped_records = 0;  // records without tokens
};

/// Learns a model from a labeled corpus and returns it frozen.
///
/// Vocabularies are built first and then renumbered in sorted order
/// (tokens by surface, features by kind and tokens, domains by name,
/// categories by domain and label), so ids and every stored value depend
/// only on the multiset of records, never on their order.
Model train(std::span<const CorpusRecord> corpus, const EngineConfig& config,
            std::span<const Confirmation> confirmations = {},
            TrainingDiagnostics* diagnostics = nullptr);

/// Counts, for every driver-domain label of the record, one co-occurrence
/// with each non-driver domain the record is labeled under.
void accumulate_cooccurrence(const CorpusRecord& record, Model& model);

/// Frozen copy keeping at most k categories per feature per domain.
Model compress(const Model& model, TopK k);

/// Frozen copy holding only the rules of one domain. Relative id order of
/// the surviving entities is preserved. Throws UnknownIdError for an
/// unknown domain.
Model specialize(const Model& model, std::string_view domain_name);

}  // namespace ctgn
