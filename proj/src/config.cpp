#include "ctgn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ctgn/error.hpp"

namespace ctgn {

TopK::TopK(std::uint32_t k) : k_(k) {
  if (k < 1) throw ArgumentError("top-k must be >= 1");
}

void EngineConfig::validate() const {
  if (max_frame_distance < 1) throw ArgumentError("max-frame-distance must be >= 1");
  if (!(min_score >= 0.0) || !std::isfinite(min_score))
    throw ArgumentError("min-score must be a finite value >= 0");
  for (const auto& d : driver_domains)
    if (d.empty()) throw ArgumentError("driver domain name must be non-empty");
}

bool EngineConfig::is_driver(std::string_view domain_name) const {
  return std::find(driver_domains.begin(), driver_domains.end(), domain_name) !=
         driver_domains.end();
}

std::string_view to_string(ScoringMode m) {
  return m == ScoringMode::asymmetric ? "asymmetric" : "symmetric";
}

std::string_view to_string(RankingMode m) {
  return m == RankingMode::boolean_first ? "boolean_first" : "score_only";
}

std::string_view to_string(ScopeMode m) {
  switch (m) {
    case ScopeMode::union_:
      return "union";
    case ScopeMode::intersection:
      return "intersection";
    case ScopeMode::off:
      return "off";
  }
  return "off";
}

std::string_view to_string(CfTotalScope m) {
  return m == CfTotalScope::per_domain ? "per_domain" : "global";
}

std::string_view to_string(CfAccumulation m) {
  return m == CfAccumulation::relevance_product ? "relevance_product" : "count";
}

std::string to_string(TopK k) {
  return k.is_unbounded() ? std::string("unbounded") : std::to_string(k.value());
}

ScoringMode parse_scoring_mode(std::string_view s) {
  if (s == "asymmetric") return ScoringMode::asymmetric;
  if (s == "symmetric") return ScoringMode::symmetric;
  throw ArgumentError("unknown scoring mode: " + std::string(s));
}

RankingMode parse_ranking_mode(std::string_view s) {
  if (s == "boolean_first") return RankingMode::boolean_first;
  if (s == "score_only") return RankingMode::score_only;
  throw ArgumentError("unknown ranking mode: " + std::string(s));
}

ScopeMode parse_scope_mode(std::string_view s) {
  if (s == "union") return ScopeMode::union_;
  if (s == "intersection") return ScopeMode::intersection;
  if (s == "off") return ScopeMode::off;
  throw ArgumentError("unknown scope mode: " + std::string(s));
}

CfTotalScope parse_cf_total_scope(std::string_view s) {
  if (s == "per_domain") return CfTotalScope::per_domain;
  if (s == "global") return CfTotalScope::global;
  throw ArgumentError("unknown cf total scope: " + std::string(s));
}

CfAccumulation parse_cf_accumulation(std::string_view s) {
  if (s == "relevance_product") return CfAccumulation::relevance_product;
  if (s == "count") return CfAccumulation::count;
  throw ArgumentError("unknown cf accumulation: " + std::string(s));
}

TopK parse_top_k(std::string_view s) {
  if (s == "unbounded" || s == "inf") return TopK::unbounded();
  std::uint32_t k = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ArgumentError("invalid top-k: " + std::string(s));
  return TopK(k);
}

std::string describe(const EngineConfig& c) {
  std::ostringstream os;
  os << "max_frame_distance=" << c.max_frame_distance << '\n'
     << "top_k=" << to_string(c.top_k) << '\n'
     << "scoring_mode=" << to_string(c.scoring_mode) << '\n'
     << "ranking_mode=" << to_string(c.ranking_mode) << '\n'
     << "order_priority=" << (c.order_priority ? "true" : "false") << '\n'
     << "scope_mode=" << to_string(c.scope_mode) << '\n'
     << "min_matched_features=" << c.min_matched_features << '\n'
     << "min_score=" << c.min_score << '\n'
     << "cf_total_scope=" << to_string(c.cf_total_scope) << '\n'
     << "cf_accumulation=" << to_string(c.cf_accumulation) << '\n'
     << "driver_domains=";
  for (std::size_t i = 0; i < c.driver_domains.size(); ++i)
    os << (i ? "," : "") << c.driver_domains[i];
  os << '\n';
  return os.str();
}

}  // namespace ctgn
