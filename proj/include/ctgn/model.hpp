#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctgn/config.hpp"

namespace ctgn {

using TokenId = std::uint32_t;
using FeatureId = std::uint32_t;
using CategoryId = std::uint32_t;
using DomainId = std::uint32_t;

enum class FeatureKind : std::uint8_t { keyword = 0, frame = 1 };

std::string_view to_string(FeatureKind kind);

struct Feature {
  FeatureKind kind = FeatureKind::keyword;
  /// Second slot is unused for keywords.
  std::array<TokenId, 2> tokens{};
  double quality = 1.0;

  std::size_t arity() const { return kind == FeatureKind::keyword ? 1 : 2; }
  std::span<const TokenId> token_ids() const { return {tokens.data(), arity()}; }
};

struct Domain {
  std::string name;
  bool is_driver = false;
};

struct Category {
  DomainId domain = 0;
  std::string label;
  double quality = 1.0;
};

/// One stored category-feature cell, seen from the feature side.
struct CategoryLink {
  CategoryId category = 0;
  double cf = 0.0;
  bool confirmed = false;
};

/// All cells of one feature that fall in one domain, with their sum C_f.
/// Frozen models keep `links` ordered by cf descending, category ascending;
/// mutable models keep them ordered by category.
struct DomainLinks {
  DomainId domain = 0;
  double total = 0.0;
  std::vector<CategoryLink> links;
};

struct CooccurrenceCell {
  DomainId domain = 0;
  std::uint32_t count = 0;
};

/// Entry of feature_categories(): cf and CFCF_f = cf / C_f.
struct FeatureCategory {
  CategoryId category = 0;
  double cf = 0.0;
  double relevance = 0.0;
};

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;
}  // namespace detail

/// The knowledge store: vocabularies, the category-feature evidence matrix
/// with its totals, and category-domain co-occurrence counts.
///
/// A model is mutable until freeze(); afterwards every mutating call throws
/// ModelFrozenError. Ids are dense and assigned in interning order.
class Model {
 public:
  Model() = default;
  explicit Model(EngineConfig config) : config_(std::move(config)) {}

  // Vocabularies.

  TokenId intern_token(std::string_view surface);
  std::optional<TokenId> find_token(std::string_view surface) const;
  const std::string& token(TokenId id) const;
  std::size_t token_count() const { return tokens_.size(); }

  /// token_ids must hold 1 id for a keyword and 2 for a frame.
  FeatureId intern_feature(FeatureKind kind, std::span<const TokenId> token_ids);
  std::optional<FeatureId> find_keyword(TokenId token) const;
  std::optional<FeatureId> find_frame(TokenId first, TokenId second) const;
  const Feature& feature(FeatureId id) const;
  std::size_t feature_count() const { return features_.size(); }
  /// "office" for a keyword, "office-steel" for a frame.
  std::string feature_text(FeatureId id) const;

  DomainId intern_domain(std::string_view name, bool is_driver);
  std::optional<DomainId> find_domain(std::string_view name) const;
  const Domain& domain(DomainId id) const;
  std::size_t domain_count() const { return domains_.size(); }

  CategoryId intern_category(DomainId domain, std::string_view label);
  std::optional<CategoryId> find_category(DomainId domain, std::string_view label) const;
  const Category& category(CategoryId id) const;
  std::size_t category_count() const { return categories_.size(); }
  std::vector<CategoryId> categories_of(DomainId domain) const;

  // Category-feature evidence.

  /// Adds delta (> 0) to cf(category, feature) and keeps totals in step.
  /// Confirmed cells are pinned at 1 and ignore further evidence.
  CategoryLink add_cf(CategoryId category, FeatureId feature, double delta);
  /// Marks the cell as manually confirmed, forcing cf to 1.
  void confirm(CategoryId category, FeatureId feature);
  double cf(CategoryId category, FeatureId feature) const;

  std::span<const DomainLinks> links(FeatureId feature) const;
  /// Null when the feature has no cell in the domain.
  const DomainLinks* domain_links(FeatureId feature, DomainId domain) const;

  /// C_f restricted to one domain.
  double feature_total(FeatureId feature, DomainId domain) const;
  /// C_f summed over every domain.
  double feature_total_global(FeatureId feature) const;
  /// C_f under the given scope.
  double feature_total(FeatureId feature, DomainId domain, CfTotalScope scope) const;
  /// F_c.
  double category_total(CategoryId category) const;
  /// Features holding a cell for the category, ascending once frozen.
  std::span<const FeatureId> category_features(CategoryId category) const;

  /// Cells of the feature in the domain with CFCF_f, sorted by relevance
  /// descending then category ascending.
  std::vector<FeatureCategory> feature_categories(
      FeatureId feature, DomainId domain, CfTotalScope scope = CfTotalScope::per_domain) const;
  /// CFCF_c = cf / F_c. Diagnostic only.
  double category_feature_relevance(CategoryId category, FeatureId feature) const;
  /// CFCF_cf = cf^2 / (C_f * F_c).
  double mutual_relevance(CategoryId category, FeatureId feature,
                          CfTotalScope scope = CfTotalScope::per_domain) const;

  std::size_t cell_count() const { return cell_count_; }

  // Category-domain co-occurrence.

  void add_cooccurrence(CategoryId driver_category, DomainId domain, std::uint32_t count = 1);
  std::span<const CooccurrenceCell> cooccurrence(CategoryId category) const;
  std::uint32_t cooccurrence_count(CategoryId category, DomainId domain) const;
  std::size_t cooccurrence_cell_count() const;

  // Lifecycle.

  /// Recomputes every total from the stored cells in id order, orders links
  /// for recognition and makes the model immutable.
  void freeze();
  bool is_frozen() const { return frozen_; }
  /// Mutable deep copy. The source keeps its frozen state.
  Model thawed() const;

  const EngineConfig& config() const { return config_; }
  void set_config(EngineConfig config);

  /// Keeps, per feature and domain, the k cells with the highest cf
  /// (ties to the lower category id), then recomputes totals.
  void retain_top(TopK k);

  /// Replaces a stored F_c without touching cells. Used to exercise
  /// verify_totals against a known inconsistency.
  void overwrite_category_total(CategoryId category, double value);

  /// Recomputes C_f for every (feature, domain) and F_c for every category
  /// from the stored cells, in id order.
  void recompute_totals();

 private:
  friend class ModelReader;

  void require_mutable() const;
  void check_category(CategoryId id) const;
  void check_feature(FeatureId id) const;
  void sort_links_for_recognition();
  void sort_links_by_category();

  EngineConfig config_;
  bool frozen_ = false;

  std::vector<std::string> tokens_;
  detail::StringMap<TokenId> token_index_;

  std::vector<Feature> features_;
  std::unordered_map<std::uint64_t, FeatureId> feature_index_;

  std::vector<Domain> domains_;
  detail::StringMap<DomainId> domain_index_;

  std::vector<Category> categories_;
  std::vector<detail::StringMap<CategoryId>> category_index_;  // per domain

  std::vector<std::vector<DomainLinks>> feature_links_;  // per feature, domain ascending
  std::vector<double> category_totals_;
  std::vector<std::vector<FeatureId>> category_features_;
  std::size_t cell_count_ = 0;

  std::vector<std::vector<CooccurrenceCell>> cooccurrence_;  // per category, domain ascending
};

struct TotalsFinding {
  enum class Kind { feature_domain_total, category_total };
  Kind kind = Kind::category_total;
  FeatureId feature = 0;  // feature_domain_total only
  DomainId domain = 0;    // feature_domain_total only
  CategoryId category = 0;  // category_total only
  double stored = 0.0;
  double recomputed = 0.0;
};

/// Recomputes C_f and F_c from cells and lists every total that differs
/// from the stored one by more than `tolerance` (absolute).
std::vector<TotalsFinding> verify_totals(const Model& model, double tolerance = 0.0);

}  // namespace ctgn
