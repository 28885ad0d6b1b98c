#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctgn/config.hpp"
#include "ctgn/model.hpp"
#include "ctgn/text.hpp"

namespace ctgn {

struct CategoryCandidate {
  CategoryId category = 0;
  std::uint32_t matched_feature_count = 0;
  double score = 0.0;  // inferred TC_tc

  friend bool operator==(const CategoryCandidate&, const CategoryCandidate&) = default;
};

struct DomainResult {
  DomainId domain = 0;
  std::vector<CategoryCandidate> candidates;
  std::uint32_t features_used = 0;  // after the frame/keyword split

  const CategoryCandidate* winner() const {
    return candidates.empty() ? nullptr : &candidates.front();
  }

  friend bool operator==(const DomainResult&, const DomainResult&) = default;
};

struct RecognitionResult {
  /// Scored domains, drivers first, then attributes, each group by id.
  std::vector<DomainResult> domains;
  /// Domain name -> winning label, for domains with a winner.
  std::map<std::string, std::string> object;
  std::uint32_t features_detected = 0;
  std::vector<DomainId> skipped_domains;  // left out by scoping

  const DomainResult* find(DomainId domain) const;

  friend bool operator==(const RecognitionResult&, const RecognitionResult&) = default;
};

/// Ranks the categories of one domain for a detected feature bag.
///
/// With order priority on, only frame features are used when at least one
/// detected frame carries a cell in the domain; otherwise only keywords.
/// Each used feature adds evidence * relevance to every category it links
/// to (the first top_k by cf when top_k is bounded).
std::vector<CategoryCandidate> score_domain(const FeatureBag& bag, DomainId domain,
                                            const Model& model, const EngineConfig& config,
                                            std::uint32_t* features_used = nullptr);

/// Attribute domains associated with the recognized driver values, combined
/// by union or intersection. An empty input yields an empty set.
std::set<DomainId> scope_attributes(std::span<const CategoryId> driver_values, const Model& model,
                                    ScopeMode mode);

/// Recognizes one text. When `domains` is given exactly those domains are
/// scored and scoping is bypassed.
RecognitionResult recognize(std::string_view text, const Model& model, const EngineConfig& config,
                            const std::optional<std::set<DomainId>>& domains = std::nullopt);

/// Recognizes every text, fanning out across `worker_count` threads.
/// Output order follows input order and does not depend on worker_count.
std::vector<RecognitionResult> batch_recognize(
    std::span<const std::string> texts, const Model& model, const EngineConfig& config,
    unsigned worker_count, const std::optional<std::set<DomainId>>& domains = std::nullopt);

/// Resolves domain names; throws UnknownIdError for a name not in the model.
std::set<DomainId> resolve_domains(const Model& model, std::span<const std::string> names);

}  // namespace ctgn
