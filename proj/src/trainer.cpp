#include "ctgn/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "ctgn/error.hpp"
#include "ctgn/text.hpp"

namespace ctgn {
namespace {

void validate_record(const CorpusRecord& r, std::size_t index) {
  if (!(r.weight > 0.0 && r.weight <= 1.0))
    throw ArgumentError("record " + std::to_string(index) + ": weight must lie in (0, 1]");
  for (const auto& [domain, label] : r.labels)
    if (domain.empty() || label.empty())
      throw ArgumentError("record " + std::to_string(index) + ": empty domain or label");
}

// Rebuilds the vocabularies of `scratch` into `out` in sorted order.
void intern_sorted(const Model& scratch, Model& out) {
  std::vector<TokenId> token_order(scratch.token_count());
  std::iota(token_order.begin(), token_order.end(), 0);
  std::sort(token_order.begin(), token_order.end(),
            [&](TokenId a, TokenId b) { return scratch.token(a) < scratch.token(b); });
  std::vector<TokenId> token_map(scratch.token_count());
  for (TokenId old : token_order) token_map[old] = out.intern_token(scratch.token(old));

  struct Key {
    FeatureKind kind;
    TokenId first;
    TokenId second;
  };
  std::vector<Key> keys;
  keys.reserve(scratch.feature_count());
  for (FeatureId f = 0; f < scratch.feature_count(); ++f) {
    const Feature& feat = scratch.feature(f);
    keys.push_back({feat.kind, token_map[feat.tokens[0]],
                    feat.kind == FeatureKind::frame ? token_map[feat.tokens[1]] : 0});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(a.kind, a.first, a.second) < std::tie(b.kind, b.first, b.second);
  });
  for (const Key& k : keys) {
    const TokenId ids[] = {k.first, k.second};
    out.intern_feature(k.kind, std::span<const TokenId>(ids, k.kind == FeatureKind::frame ? 2 : 1));
  }

  std::vector<DomainId> domain_order(scratch.domain_count());
  std::iota(domain_order.begin(), domain_order.end(), 0);
  std::sort(domain_order.begin(), domain_order.end(), [&](DomainId a, DomainId b) {
    return scratch.domain(a).name < scratch.domain(b).name;
  });
  for (DomainId d : domain_order) {
    const Domain& dom = scratch.domain(d);
    const DomainId nd = out.intern_domain(dom.name, dom.is_driver);
    std::vector<std::string> labels;
    for (CategoryId c : scratch.categories_of(d)) labels.push_back(scratch.category(c).label);
    std::sort(labels.begin(), labels.end());
    for (const auto& label : labels) out.intern_category(nd, label);
  }
}

// Sums each run of equal keys after sorting values, so the result does not
// depend on the order contributions arrived in.
template <typename Key>
struct Contribution {
  Key key;
  double value;
};

template <typename Key, typename Fn>
void sum_sorted(std::vector<Contribution<Key>>& items, Fn&& sink) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.value < b.value;
  });
  std::size_t i = 0;
  while (i < items.size()) {
    double sum = 0.0;
    std::size_t j = i;
    for (; j < items.size() && items[j].key == items[i].key; ++j) sum += items[j].value;
    sink(items[i].key, sum);
    i = j;
  }
}

FeatureId resolve_confirmation_feature(Model& model, const Confirmation& c) {
  const std::size_t arity = c.kind == FeatureKind::keyword ? 1 : 2;
  if (c.tokens.size() != arity)
    throw ArgumentError("confirmation for " + c.domain + "/" + c.label + " needs " +
                        std::to_string(arity) + " token(s)");
  std::vector<TokenId> ids;
  for (const auto& t : c.tokens) ids.push_back(model.intern_token(t));
  return model.intern_feature(c.kind, ids);
}

}  // namespace

void accumulate_cooccurrence(const CorpusRecord& record, Model& model) {
  std::vector<std::pair<DomainId, bool>> domains;
  std::vector<CategoryId> drivers;
  for (const auto& [name, label] : record.labels) {
    const DomainId d = model.intern_domain(name, model.config().is_driver(name));
    const bool driver = model.domain(d).is_driver;
    domains.emplace_back(d, driver);
    if (driver) drivers.push_back(model.intern_category(d, label));
  }
  for (CategoryId c : drivers)
    for (const auto& [d, driver] : domains)
      if (!driver) model.add_cooccurrence(c, d);
}

Model train(std::span<const CorpusRecord> corpus, const EngineConfig& config,
            std::span<const Confirmation> confirmations, TrainingDiagnostics* diagnostics) {
  config.validate();
  if (corpus.empty()) throw ArgumentError("empty corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i) validate_record(corpus[i], i);

  const int distance = config.max_frame_distance;

  // Vocabulary pass.
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(corpus.size());
  Model scratch(config);
  for (const auto& record : corpus) {
    token_lists.push_back(tokenize(record.text));
    if (token_lists.back().empty()) continue;
    extract_bag(record.text, VocabMode::instantiate, scratch, distance, record.weight);
    for (const auto& [name, label] : record.labels) {
      const DomainId d = scratch.intern_domain(name, config.is_driver(name));
      scratch.intern_category(d, label);
    }
  }

  Model model(config);
  intern_sorted(scratch, model);

  // Evidence pass: bags against the final vocabulary, T_f, T_c, co-occurrence.
  struct Labeled {
    std::vector<CategoryId> categories;
  };
  std::vector<FeatureBag> bags(corpus.size());
  std::vector<Labeled> labeled(corpus.size());
  std::vector<Contribution<FeatureId>> tf_items;
  std::vector<double> category_texts(model.category_count(), 0.0);
  std::size_t skipped = 0;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (token_lists[i].empty()) {
      ++skipped;
      continue;
    }
    const auto& record = corpus[i];
    bags[i] = detect_bag(token_lists[i], model, distance, record.weight);
    for (const auto& e : bags[i].entries) tf_items.push_back({e.feature, e.evidence});
    for (const auto& [name, label] : record.labels) {
      const DomainId d = *model.find_domain(name);
      const CategoryId c = *model.find_category(d, label);
      labeled[i].categories.push_back(c);
      category_texts[c] += 1.0;
    }
    accumulate_cooccurrence(record, model);
  }

  std::vector<double> feature_texts(model.feature_count(), 0.0);
  sum_sorted(tf_items, [&](FeatureId f, double sum) { feature_texts[f] = sum; });

  // Category-feature evidence.
  std::vector<Contribution<std::pair<FeatureId, CategoryId>>> cf_items;
  if (diagnostics) diagnostics->texts.assign(corpus.size(), {});

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const FeatureBag& bag = bags[i];
    if (bag.empty()) continue;
    const double feature_base = bag.total_evidence();
    const double weight = corpus[i].weight;

    TextRelevances* rel = diagnostics ? &diagnostics->texts[i] : nullptr;
    if (rel) rel->feature_base = feature_base;

    // One label per domain, so C_t = 1 and TCTC = 1 / T_c.
    std::vector<double> tctc;
    for (CategoryId c : labeled[i].categories) {
      const double text_base = 1.0;
      const double value = 1.0 / (category_texts[c] * text_base);
      tctc.push_back(value);
      if (rel) rel->categories.push_back({c, 1.0, text_base, value});
    }

    for (const auto& e : bag.entries) {
      const double tftf = e.evidence * e.evidence / (feature_texts[e.feature] * feature_base);
      if (rel) rel->features.push_back({e.feature, e.evidence, tftf});
      for (std::size_t k = 0; k < labeled[i].categories.size(); ++k) {
        const double delta = config.cf_accumulation == CfAccumulation::relevance_product
                                 ? weight * tftf * tctc[k]
                                 : weight;
        if (delta > 0.0) cf_items.push_back({{e.feature, labeled[i].categories[k]}, delta});
      }
    }
  }
  sum_sorted(cf_items, [&](const std::pair<FeatureId, CategoryId>& key, double sum) {
    model.add_cf(key.second, key.first, sum);
  });

  for (const auto& c : confirmations) {
    const auto d = model.find_domain(c.domain);
    if (!d) throw UnknownIdError("confirmation names unknown domain " + c.domain);
    const auto cat = model.find_category(*d, c.label);
    if (!cat) throw UnknownIdError("confirmation names unknown category " + c.domain + "/" + c.label);
    model.confirm(*cat, resolve_confirmation_feature(model, c));
  }

  if (diagnostics) {
    diagnostics->feature_text_base = feature_texts;
    diagnostics->category_text_base = category_texts;
    diagnostics->text_count = corpus.size() - skipped;
    diagnostics->feature_count = model.feature_count();
    diagnostics->category_count = model.category_count();
    diagnostics->skipped_records = skipped;
  }

  model.retain_top(config.top_k);
  model.freeze();
  return model;
}

Model compress(const Model& model, TopK k) {
  Model out = model.thawed();
  out.retain_top(k);
  out.freeze();
  return out;
}

Model specialize(const Model& model, std::string_view domain_name) {
  const auto domain = model.find_domain(domain_name);
  if (!domain) throw UnknownIdError("unknown domain " + std::string(domain_name));

  Model out(model.config());
  const std::vector<CategoryId> categories = model.categories_of(*domain);

  std::vector<FeatureId> features;
  std::vector<bool> token_used(model.token_count(), false);
  for (FeatureId f = 0; f < model.feature_count(); ++f) {
    if (!model.domain_links(f, *domain)) continue;
    features.push_back(f);
    for (TokenId t : model.feature(f).token_ids()) token_used[t] = true;
  }

  std::vector<TokenId> token_map(model.token_count());
  for (TokenId t = 0; t < model.token_count(); ++t)
    if (token_used[t]) token_map[t] = out.intern_token(model.token(t));

  std::vector<FeatureId> feature_map(model.feature_count());
  for (FeatureId f : features) {
    const Feature& feat = model.feature(f);
    std::vector<TokenId> ids;
    for (TokenId t : feat.token_ids()) ids.push_back(token_map[t]);
    feature_map[f] = out.intern_feature(feat.kind, ids);
  }

  const Domain& dom = model.domain(*domain);
  const DomainId nd = out.intern_domain(dom.name, dom.is_driver);
  std::vector<CategoryId> category_map(model.category_count());
  for (CategoryId c : categories) category_map[c] = out.intern_category(nd, model.category(c).label);

  for (FeatureId f : features) {
    std::vector<CategoryLink> links = model.domain_links(f, *domain)->links;
    std::sort(links.begin(), links.end(),
              [](const CategoryLink& a, const CategoryLink& b) { return a.category < b.category; });
    for (const auto& link : links) {
      if (link.confirmed)
        out.confirm(category_map[link.category], feature_map[f]);
      else
        out.add_cf(category_map[link.category], feature_map[f], link.cf);
    }
  }
  out.freeze();
  return out;
}

}  // namespace ctgn
