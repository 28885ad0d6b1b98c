#include "ctgn/recognizer.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

#include "ctgn/error.hpp"

namespace ctgn {
namespace {

bool ranks_before(const CategoryCandidate& a, const CategoryCandidate& b, RankingMode mode) {
  if (mode == RankingMode::boolean_first && a.matched_feature_count != b.matched_feature_count)
    return a.matched_feature_count > b.matched_feature_count;
  if (a.score != b.score) return a.score > b.score;
  return a.category < b.category;
}

DomainResult score_one(const FeatureBag& bag, DomainId d, const Model& model,
                       const EngineConfig& config) {
  DomainResult r;
  r.domain = d;
  r.candidates = score_domain(bag, d, model, config, &r.features_used);
  return r;
}

}  // namespace

const DomainResult* RecognitionResult::find(DomainId domain) const {
  for (const auto& d : domains)
    if (d.domain == domain) return &d;
  return nullptr;
}

std::vector<CategoryCandidate> score_domain(const FeatureBag& bag, DomainId domain,
                                            const Model& model, const EngineConfig& config,
                                            std::uint32_t* features_used) {
  if (!model.is_frozen()) throw ArgumentError("recognition requires a frozen model");
  model.domain(domain);

  // Frame features take priority when any of them speaks for this domain.
  bool use_frames = false;
  if (config.order_priority) {
    for (const auto& e : bag.entries) {
      if (model.feature(e.feature).kind == FeatureKind::frame && model.domain_links(e.feature, domain)) {
        use_frames = true;
        break;
      }
    }
  }

  std::vector<CategoryCandidate> candidates;
  std::unordered_map<CategoryId, std::size_t> slot;
  std::uint32_t used = 0;

  for (const auto& e : bag.entries) {
    if (config.order_priority &&
        (model.feature(e.feature).kind == FeatureKind::frame) != use_frames)
      continue;
    const DomainLinks* row = model.domain_links(e.feature, domain);
    if (!row) continue;
    ++used;

    const double feature_total = model.feature_total(e.feature, domain, config.cf_total_scope);
    if (!(feature_total > 0.0)) continue;
    const std::size_t n = config.top_k.limit(row->links.size());
    for (std::size_t i = 0; i < n; ++i) {
      const CategoryLink& link = row->links[i];
      double relevance = link.cf / feature_total;
      if (config.scoring_mode == ScoringMode::symmetric) {
        const double category_total = model.category_total(link.category);
        relevance = category_total > 0.0 ? link.cf * link.cf / (feature_total * category_total) : 0.0;
      }
      auto [it, inserted] = slot.try_emplace(link.category, candidates.size());
      if (inserted) candidates.push_back({link.category, 0, 0.0});
      auto& cand = candidates[it->second];
      ++cand.matched_feature_count;
      cand.score += e.evidence * relevance;
    }
  }
  if (features_used) *features_used = used;

  std::erase_if(candidates, [&](const CategoryCandidate& c) {
    return c.matched_feature_count < std::max<std::uint32_t>(1, config.min_matched_features) ||
           c.score < config.min_score;
  });
  std::sort(candidates.begin(), candidates.end(),
            [&](const CategoryCandidate& a, const CategoryCandidate& b) {
              return ranks_before(a, b, config.ranking_mode);
            });
  return candidates;
}

std::set<DomainId> scope_attributes(std::span<const CategoryId> driver_values, const Model& model,
                                    ScopeMode mode) {
  std::set<DomainId> scope;
  bool first = true;
  for (CategoryId c : driver_values) {
    std::set<DomainId> assoc;
    for (const auto& cell : model.cooccurrence(c))
      if (cell.count > 0) assoc.insert(cell.domain);
    if (mode == ScopeMode::intersection && !first) {
      std::set<DomainId> both;
      std::set_intersection(scope.begin(), scope.end(), assoc.begin(), assoc.end(),
                            std::inserter(both, both.end()));
      scope = std::move(both);
    } else {
      scope.insert(assoc.begin(), assoc.end());
    }
    first = false;
  }
  return scope;
}

RecognitionResult recognize(std::string_view text, const Model& model, const EngineConfig& config,
                            const std::optional<std::set<DomainId>>& domains) {
  const FeatureBag bag = detect_bag(text, model, config.max_frame_distance);
  RecognitionResult result;
  result.features_detected = static_cast<std::uint32_t>(bag.size());

  std::vector<DomainId> drivers;
  std::vector<DomainId> attributes;
  for (DomainId d = 0; d < model.domain_count(); ++d) {
    if (domains && !domains->contains(d)) continue;
    (model.domain(d).is_driver ? drivers : attributes).push_back(d);
  }

  std::vector<CategoryId> driver_winners;
  for (DomainId d : drivers) {
    result.domains.push_back(score_one(bag, d, model, config));
    if (const auto* w = result.domains.back().winner()) driver_winners.push_back(w->category);
  }

  const bool scoping = !domains && config.scope_mode != ScopeMode::off && !driver_winners.empty();
  std::set<DomainId> scope;
  if (scoping) scope = scope_attributes(driver_winners, model, config.scope_mode);

  for (DomainId d : attributes) {
    if (scoping && !scope.contains(d)) {
      result.skipped_domains.push_back(d);
      continue;
    }
    result.domains.push_back(score_one(bag, d, model, config));
  }

  for (const auto& r : result.domains)
    if (const auto* w = r.winner())
      result.object.emplace(model.domain(r.domain).name, model.category(w->category).label);
  return result;
}

std::vector<RecognitionResult> batch_recognize(std::span<const std::string> texts,
                                               const Model& model, const EngineConfig& config,
                                               unsigned worker_count,
                                               const std::optional<std::set<DomainId>>& domains) {
  std::vector<RecognitionResult> results(texts.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(worker_count, static_cast<unsigned>(texts.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < texts.size(); ++i)
      results[i] = recognize(texts[i], model, config, domains);
    return results;
  }

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= texts.size() || failed.load()) return;
        const std::size_t end = std::min(texts.size(), begin + kChunk);
        for (std::size_t i = begin; i < end; ++i)
          results[i] = recognize(texts[i], model, config, domains);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::set<DomainId> resolve_domains(const Model& model, std::span<const std::string> names) {
  std::set<DomainId> out;
  for (const auto& name : names) {
    const auto d = model.find_domain(name);
    if (!d) throw UnknownIdError("unknown domain " + name);
    out.insert(*d);
  }
  return out;
}

}  // namespace ctgn
