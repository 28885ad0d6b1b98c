#include "ctgn/model.hpp"

#include <algorithm>
#include <cmath>

#include "ctgn/error.hpp"

namespace ctgn {
namespace {

constexpr std::uint32_t kNoToken = 0xFFFFFFFFu;

std::uint64_t feature_key(FeatureKind kind, TokenId first, TokenId second) {
  const std::uint32_t tail = kind == FeatureKind::keyword ? kNoToken : second;
  return (static_cast<std::uint64_t>(first) << 32) | tail;
}

bool by_cf_desc(const CategoryLink& a, const CategoryLink& b) {
  if (a.cf != b.cf) return a.cf > b.cf;
  return a.category < b.category;
}

bool by_category(const CategoryLink& a, const CategoryLink& b) {
  return a.category < b.category;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::keyword ? "keyword" : "frame";
}

void Model::require_mutable() const {
  if (frozen_) throw ModelFrozenError();
}

void Model::check_category(CategoryId id) const {
  if (id >= categories_.size())
    throw UnknownIdError("unknown category id " + std::to_string(id));
}

void Model::check_feature(FeatureId id) const {
  if (id >= features_.size())
    throw UnknownIdError("unknown feature id " + std::to_string(id));
}

TokenId Model::intern_token(std::string_view surface) {
  require_mutable();
  if (auto it = token_index_.find(surface); it != token_index_.end()) return it->second;
  if (surface.empty()) throw ArgumentError("token surface must be non-empty");
  if (tokens_.size() >= kNoToken) throw ArgumentError("token vocabulary full");
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(surface);
  token_index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Model::find_token(std::string_view surface) const {
  if (auto it = token_index_.find(surface); it != token_index_.end()) return it->second;
  return std::nullopt;
}

const std::string& Model::token(TokenId id) const {
  if (id >= tokens_.size()) throw UnknownIdError("unknown token id " + std::to_string(id));
  return tokens_[id];
}

FeatureId Model::intern_feature(FeatureKind kind, std::span<const TokenId> token_ids) {
  require_mutable();
  const std::size_t arity = kind == FeatureKind::keyword ? 1 : 2;
  if (token_ids.size() != arity)
    throw ArgumentError(std::string(to_string(kind)) + " feature needs " +
                        std::to_string(arity) + " token(s)");
  for (TokenId t : token_ids)
    if (t >= tokens_.size()) throw UnknownIdError("unknown token id " + std::to_string(t));

  const TokenId second = arity == 2 ? token_ids[1] : kNoToken;
  const auto key = feature_key(kind, token_ids[0], second);
  if (auto it = feature_index_.find(key); it != feature_index_.end()) return it->second;

  const auto id = static_cast<FeatureId>(features_.size());
  Feature f;
  f.kind = kind;
  f.tokens = {token_ids[0], arity == 2 ? token_ids[1] : 0};
  features_.push_back(f);
  feature_links_.emplace_back();
  feature_index_.emplace(key, id);
  return id;
}

std::optional<FeatureId> Model::find_keyword(TokenId token) const {
  if (auto it = feature_index_.find(feature_key(FeatureKind::keyword, token, 0));
      it != feature_index_.end())
    return it->second;
  return std::nullopt;
}

std::optional<FeatureId> Model::find_frame(TokenId first, TokenId second) const {
  if (auto it = feature_index_.find(feature_key(FeatureKind::frame, first, second));
      it != feature_index_.end())
    return it->second;
  return std::nullopt;
}

const Feature& Model::feature(FeatureId id) const {
  check_feature(id);
  return features_[id];
}

std::string Model::feature_text(FeatureId id) const {
  const Feature& f = feature(id);
  if (f.kind == FeatureKind::keyword) return tokens_[f.tokens[0]];
  return tokens_[f.tokens[0]] + "-" + tokens_[f.tokens[1]];
}

DomainId Model::intern_domain(std::string_view name, bool is_driver) {
  require_mutable();
  if (auto it = domain_index_.find(name); it != domain_index_.end()) return it->second;
  if (name.empty()) throw ArgumentError("domain name must be non-empty");
  const auto id = static_cast<DomainId>(domains_.size());
  domains_.push_back(Domain{std::string(name), is_driver});
  domain_index_.emplace(domains_.back().name, id);
  category_index_.emplace_back();
  return id;
}

std::optional<DomainId> Model::find_domain(std::string_view name) const {
  if (auto it = domain_index_.find(name); it != domain_index_.end()) return it->second;
  return std::nullopt;
}

const Domain& Model::domain(DomainId id) const {
  if (id >= domains_.size()) throw UnknownIdError("unknown domain id " + std::to_string(id));
  return domains_[id];
}

CategoryId Model::intern_category(DomainId domain_id, std::string_view label) {
  require_mutable();
  domain(domain_id);
  auto& index = category_index_[domain_id];
  if (auto it = index.find(label); it != index.end()) return it->second;
  if (label.empty()) throw ArgumentError("category label must be non-empty");
  const auto id = static_cast<CategoryId>(categories_.size());
  categories_.push_back(Category{domain_id, std::string(label), 1.0});
  category_totals_.push_back(0.0);
  category_features_.emplace_back();
  cooccurrence_.emplace_back();
  index.emplace(categories_.back().label, id);
  return id;
}

std::optional<CategoryId> Model::find_category(DomainId domain_id, std::string_view label) const {
  if (domain_id >= category_index_.size()) return std::nullopt;
  const auto& index = category_index_[domain_id];
  if (auto it = index.find(label); it != index.end()) return it->second;
  return std::nullopt;
}

const Category& Model::category(CategoryId id) const {
  check_category(id);
  return categories_[id];
}

std::vector<CategoryId> Model::categories_of(DomainId domain_id) const {
  std::vector<CategoryId> out;
  for (CategoryId c = 0; c < categories_.size(); ++c)
    if (categories_[c].domain == domain_id) out.push_back(c);
  return out;
}

CategoryLink Model::add_cf(CategoryId category_id, FeatureId feature_id, double delta) {
  require_mutable();
  check_category(category_id);
  check_feature(feature_id);
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ArgumentError("cf delta must be a finite value > 0");

  const DomainId d = categories_[category_id].domain;
  auto& rows = feature_links_[feature_id];
  auto row = std::lower_bound(rows.begin(), rows.end(), d,
                              [](const DomainLinks& r, DomainId v) { return r.domain < v; });
  if (row == rows.end() || row->domain != d) row = rows.insert(row, DomainLinks{d, 0.0, {}});

  auto& links = row->links;
  CategoryLink probe{category_id, 0.0, false};
  auto link = std::lower_bound(links.begin(), links.end(), probe, by_category);
  if (link == links.end() || link->category != category_id) {
    link = links.insert(link, probe);
    category_features_[category_id].push_back(feature_id);
    ++cell_count_;
  }
  if (link->confirmed) return *link;

  link->cf += delta;
  row->total += delta;
  category_totals_[category_id] += delta;
  return *link;
}

void Model::confirm(CategoryId category_id, FeatureId feature_id) {
  require_mutable();
  const double before = cf(category_id, feature_id);
  if (before == 0.0) add_cf(category_id, feature_id, 1.0);

  auto& rows = feature_links_[feature_id];
  const DomainId d = categories_[category_id].domain;
  for (auto& row : rows) {
    if (row.domain != d) continue;
    for (auto& link : row.links) {
      if (link.category != category_id) continue;
      row.total += 1.0 - link.cf;
      category_totals_[category_id] += 1.0 - link.cf;
      link.cf = 1.0;
      link.confirmed = true;
    }
  }
}

double Model::cf(CategoryId category_id, FeatureId feature_id) const {
  check_category(category_id);
  const DomainLinks* row = domain_links(feature_id, categories_[category_id].domain);
  if (!row) return 0.0;
  for (const auto& link : row->links)
    if (link.category == category_id) return link.cf;
  return 0.0;
}

std::span<const DomainLinks> Model::links(FeatureId feature_id) const {
  check_feature(feature_id);
  return feature_links_[feature_id];
}

const DomainLinks* Model::domain_links(FeatureId feature_id, DomainId domain_id) const {
  check_feature(feature_id);
  for (const auto& row : feature_links_[feature_id])
    if (row.domain == domain_id) return &row;
  return nullptr;
}

double Model::feature_total(FeatureId feature_id, DomainId domain_id) const {
  const DomainLinks* row = domain_links(feature_id, domain_id);
  return row ? row->total : 0.0;
}

double Model::feature_total_global(FeatureId feature_id) const {
  double sum = 0.0;
  for (const auto& row : links(feature_id)) sum += row.total;
  return sum;
}

double Model::feature_total(FeatureId feature_id, DomainId domain_id, CfTotalScope scope) const {
  return scope == CfTotalScope::per_domain ? feature_total(feature_id, domain_id)
                                           : feature_total_global(feature_id);
}

double Model::category_total(CategoryId category_id) const {
  check_category(category_id);
  return category_totals_[category_id];
}

std::span<const FeatureId> Model::category_features(CategoryId category_id) const {
  check_category(category_id);
  return category_features_[category_id];
}

std::vector<FeatureCategory> Model::feature_categories(FeatureId feature_id, DomainId domain_id,
                                                       CfTotalScope scope) const {
  domain(domain_id);
  std::vector<FeatureCategory> out;
  const DomainLinks* row = domain_links(feature_id, domain_id);
  if (!row) return out;
  const double total = feature_total(feature_id, domain_id, scope);
  if (!(total > 0.0)) return out;
  out.reserve(row->links.size());
  for (const auto& link : row->links)
    out.push_back(FeatureCategory{link.category, link.cf, link.cf / total});
  std::sort(out.begin(), out.end(), [](const FeatureCategory& a, const FeatureCategory& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    return a.category < b.category;
  });
  return out;
}

double Model::category_feature_relevance(CategoryId category_id, FeatureId feature_id) const {
  const double total = category_total(category_id);
  return total > 0.0 ? cf(category_id, feature_id) / total : 0.0;
}

double Model::mutual_relevance(CategoryId category_id, FeatureId feature_id,
                               CfTotalScope scope) const {
  const double value = cf(category_id, feature_id);
  if (value == 0.0) return 0.0;
  const double denom =
      feature_total(feature_id, categories_[category_id].domain, scope) * category_totals_[category_id];
  return denom > 0.0 ? value * value / denom : 0.0;
}

void Model::add_cooccurrence(CategoryId driver_category, DomainId domain_id, std::uint32_t count) {
  require_mutable();
  check_category(driver_category);
  domain(domain_id);
  if (count == 0) return;
  auto& cells = cooccurrence_[driver_category];
  auto it = std::lower_bound(cells.begin(), cells.end(), domain_id,
                             [](const CooccurrenceCell& c, DomainId v) { return c.domain < v; });
  if (it == cells.end() || it->domain != domain_id) it = cells.insert(it, {domain_id, 0});
  it->count += count;
}

std::span<const CooccurrenceCell> Model::cooccurrence(CategoryId category_id) const {
  check_category(category_id);
  return cooccurrence_[category_id];
}

std::uint32_t Model::cooccurrence_count(CategoryId category_id, DomainId domain_id) const {
  for (const auto& cell : cooccurrence(category_id))
    if (cell.domain == domain_id) return cell.count;
  return 0;
}

std::size_t Model::cooccurrence_cell_count() const {
  std::size_t n = 0;
  for (const auto& cells : cooccurrence_) n += cells.size();
  return n;
}

void Model::recompute_totals() {
  std::fill(category_totals_.begin(), category_totals_.end(), 0.0);
  for (auto& rows : feature_links_) {
    for (auto& row : rows) {
      // Category order keeps the sum independent of the current link order.
      std::vector<const CategoryLink*> ordered;
      ordered.reserve(row.links.size());
      for (const auto& link : row.links) ordered.push_back(&link);
      std::sort(ordered.begin(), ordered.end(),
                [](const CategoryLink* a, const CategoryLink* b) { return a->category < b->category; });
      double total = 0.0;
      for (const CategoryLink* link : ordered) {
        total += link->cf;
        category_totals_[link->category] += link->cf;
      }
      row.total = total;
    }
  }
}

void Model::sort_links_for_recognition() {
  for (auto& rows : feature_links_)
    for (auto& row : rows) std::sort(row.links.begin(), row.links.end(), by_cf_desc);
}

void Model::sort_links_by_category() {
  for (auto& rows : feature_links_)
    for (auto& row : rows) std::sort(row.links.begin(), row.links.end(), by_category);
}

void Model::freeze() {
  if (frozen_) return;
  recompute_totals();
  sort_links_for_recognition();
  for (auto& ids : category_features_) std::sort(ids.begin(), ids.end());
  frozen_ = true;
}

Model Model::thawed() const {
  Model copy = *this;
  copy.frozen_ = false;
  copy.sort_links_by_category();
  return copy;
}

void Model::set_config(EngineConfig config) {
  require_mutable();
  config.validate();
  config_ = std::move(config);
}

void Model::retain_top(TopK k) {
  require_mutable();
  if (k.is_unbounded()) return;
  for (FeatureId f = 0; f < feature_links_.size(); ++f) {
    for (auto& row : feature_links_[f]) {
      if (row.links.size() <= k.value()) continue;
      std::sort(row.links.begin(), row.links.end(), by_cf_desc);
      for (std::size_t i = k.value(); i < row.links.size(); ++i) {
        auto& owners = category_features_[row.links[i].category];
        owners.erase(std::remove(owners.begin(), owners.end(), f), owners.end());
      }
      cell_count_ -= row.links.size() - k.value();
      row.links.resize(k.value());
      std::sort(row.links.begin(), row.links.end(), by_category);
    }
  }
  recompute_totals();
}

void Model::overwrite_category_total(CategoryId category_id, double value) {
  require_mutable();
  check_category(category_id);
  category_totals_[category_id] = value;
}

std::vector<TotalsFinding> verify_totals(const Model& model, double tolerance) {
  std::vector<TotalsFinding> findings;
  std::vector<double> category_sums(model.category_count(), 0.0);

  for (FeatureId f = 0; f < model.feature_count(); ++f) {
    for (const auto& row : model.links(f)) {
      std::vector<const CategoryLink*> ordered;
      for (const auto& link : row.links) ordered.push_back(&link);
      std::sort(ordered.begin(), ordered.end(),
                [](const CategoryLink* a, const CategoryLink* b) { return a->category < b->category; });
      double total = 0.0;
      for (const CategoryLink* link : ordered) {
        total += link->cf;
        category_sums[link->category] += link->cf;
      }
      if (std::abs(total - row.total) > tolerance || !(row.total >= 0.0)) {
        TotalsFinding finding;
        finding.kind = TotalsFinding::Kind::feature_domain_total;
        finding.feature = f;
        finding.domain = row.domain;
        finding.stored = row.total;
        finding.recomputed = total;
        findings.push_back(finding);
      }
    }
  }
  for (CategoryId c = 0; c < model.category_count(); ++c) {
    const double stored = model.category_total(c);
    if (std::abs(stored - category_sums[c]) > tolerance || !(stored >= 0.0)) {
      TotalsFinding finding;
      finding.kind = TotalsFinding::Kind::category_total;
      finding.category = c;
      finding.stored = stored;
      finding.recomputed = category_sums[c];
      findings.push_back(finding);
    }
  }
  return findings;
}

}  // namespace ctgn
