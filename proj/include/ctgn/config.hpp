#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctgn {

/// Maximum number of categories kept per feature per domain.
/// A default-constructed value is unbounded.
class TopK {
 public:
  constexpr TopK() = default;
  explicit TopK(std::uint32_t k);

  static constexpr TopK unbounded() { return TopK{}; }

  constexpr bool is_unbounded() const { return k_ == kUnbounded; }
  constexpr std::uint32_t value() const { return k_; }

  /// Number of entries to visit from a list of length n.
  constexpr std::size_t limit(std::size_t n) const {
    return n < k_ ? n : static_cast<std::size_t>(k_);
  }

  friend constexpr bool operator==(TopK, TopK) = default;

 private:
  static constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t k_ = kUnbounded;
};

/// Relevance used when ranking categories for a feature.
enum class ScoringMode : std::uint8_t {
  asymmetric,  // cf / C_f
  symmetric,   // cf^2 / (C_f * F_c)
};

enum class RankingMode : std::uint8_t {
  boolean_first,  // matched feature count, then score
  score_only,
};

enum class ScopeMode : std::uint8_t { union_, intersection, off };

/// Denominator used for C_f.
enum class CfTotalScope : std::uint8_t {
  per_domain,  // sum over categories of one domain
  global,      // sum over categories of every domain
};

/// How a (text, feature, category) triple contributes to cf during training.
enum class CfAccumulation : std::uint8_t {
  relevance_product,  // weight * TFTF * TCTC
  count,              // weight
};

struct EngineConfig {
  int max_frame_distance = 2;
  TopK top_k;
  ScoringMode scoring_mode = ScoringMode::asymmetric;
  RankingMode ranking_mode = RankingMode::boolean_first;
  bool order_priority = true;
  ScopeMode scope_mode = ScopeMode::union_;
  std::uint32_t min_matched_features = 1;
  double min_score = 0.0;
  CfTotalScope cf_total_scope = CfTotalScope::per_domain;
  CfAccumulation cf_accumulation = CfAccumulation::relevance_product;
  std::vector<std::string> driver_domains = {"unspsc", "type", "purpose"};

  /// Throws ArgumentError when a field is out of range.
  void validate() const;

  bool is_driver(std::string_view domain_name) const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

std::string_view to_string(ScoringMode m);
std::string_view to_string(RankingMode m);
std::string_view to_string(ScopeMode m);
std::string_view to_string(CfTotalScope m);
std::string_view to_string(CfAccumulation m);
std::string to_string(TopK k);

// Parsers accept the names produced by to_string and throw ArgumentError otherwise.
ScoringMode parse_scoring_mode(std::string_view s);
RankingMode parse_ranking_mode(std::string_view s);
ScopeMode parse_scope_mode(std::string_view s);
CfTotalScope parse_cf_total_scope(std::string_view s);
CfAccumulation parse_cf_accumulation(std::string_view s);
/// "unbounded", "inf" or a positive integer.
TopK parse_top_k(std::string_view s);

/// One "key=value" line per field, in declaration order.
std::string describe(const EngineConfig& config);

}  // namespace ctgn
