#include <doctest.h>

#include <map>
#include <random>

#include "ctgn/error.hpp"
#include "ctgn/model.hpp"

using namespace ctgn;

namespace {

// Model with one domain, categories c0..c{n-1} and keyword features k0..k{m-1}.
struct Fixture {
  Model model;
  DomainId domain = 0;
  std::vector<CategoryId> cats;
  std::vector<FeatureId> feats;

  explicit Fixture(std::size_t n_categories = 3, std::size_t n_features = 3) {
    domain = model.intern_domain("unspsc", true);
    for (std::size_t i = 0; i < n_categories; ++i)
      cats.push_back(model.intern_category(domain, "c" + std::to_string(i)));
    for (std::size_t i = 0; i < n_features; ++i) {
      const TokenId t[] = {model.intern_token("k" + std::to_string(i))};
      feats.push_back(model.intern_feature(FeatureKind::keyword, t));
    }
  }
};

}  // namespace

TEST_CASE("interning is idempotent and dense") {
  Model m;
  const TokenId a = m.intern_token("office");
  CHECK(m.intern_token("office") == a);
  for (int i = 0; i < 10; ++i) m.intern_token("t" + std::to_string(i));
  CHECK(m.token_count() == 11);
  for (TokenId t = 0; t < m.token_count(); ++t) CHECK(*m.find_token(m.token(t)) == t);

  const DomainId d1 = m.intern_domain("unspsc", true);
  const DomainId d2 = m.intern_domain("color", false);
  CHECK(m.intern_domain("unspsc", false) == d1);
  CHECK(m.domain(d1).is_driver);

  const CategoryId c1 = m.intern_category(d1, "44121618");
  const CategoryId c2 = m.intern_category(d2, "44121618");
  CHECK(c1 != c2);
  CHECK(m.intern_category(d1, "44121618") == c1);

  const TokenId ids[] = {a, 1};
  const FeatureId f = m.intern_feature(FeatureKind::frame, ids);
  CHECK(m.intern_feature(FeatureKind::frame, ids) == f);
  const TokenId reversed[] = {1, a};
  CHECK(m.intern_feature(FeatureKind::frame, reversed) != f);
  const TokenId one[] = {a};
  CHECK(m.intern_feature(FeatureKind::keyword, one) != f);
}

TEST_CASE("interning rejects malformed input") {
  Model m;
  CHECK_THROWS_AS(m.intern_token(""), ArgumentError);
  const TokenId t = m.intern_token("a");
  const TokenId two[] = {t, t};
  CHECK_THROWS_AS(m.intern_feature(FeatureKind::keyword, two), ArgumentError);
  const TokenId bad[] = {42};
  CHECK_THROWS_AS(m.intern_feature(FeatureKind::keyword, bad), UnknownIdError);
  CHECK_THROWS_AS(m.intern_category(7, "x"), UnknownIdError);
}

TEST_CASE("add_cf accumulates and keeps totals") {
  Fixture fx;
  auto& m = fx.model;
  m.add_cf(fx.cats[0], fx.feats[0], 0.5);
  const CategoryLink link = m.add_cf(fx.cats[0], fx.feats[0], 0.25);
  CHECK(link.cf == 0.75);
  CHECK(m.cf(fx.cats[0], fx.feats[0]) == 0.75);
  CHECK(m.feature_total(fx.feats[0], fx.domain) == 0.75);
  CHECK(m.category_total(fx.cats[0]) == 0.75);
  CHECK(m.cell_count() == 1);

  CHECK_THROWS_AS(m.add_cf(fx.cats[0], fx.feats[0], 0.0), ArgumentError);
  CHECK_THROWS_AS(m.add_cf(fx.cats[0], fx.feats[0], -1.0), ArgumentError);
  CHECK_THROWS_AS(m.add_cf(99, fx.feats[0], 1.0), UnknownIdError);
  CHECK_THROWS_AS(m.add_cf(fx.cats[0], 99, 1.0), UnknownIdError);
}

TEST_CASE("frozen model rejects every mutation") {
  Fixture fx;
  fx.model.add_cf(fx.cats[0], fx.feats[0], 1.0);
  fx.model.freeze();
  auto& m = fx.model;
  CHECK_THROWS_AS(m.add_cf(fx.cats[0], fx.feats[0], 1.0), ModelFrozenError);
  CHECK_THROWS_AS(m.intern_token("new"), ModelFrozenError);
  CHECK_THROWS_AS(m.intern_domain("new", false), ModelFrozenError);
  CHECK_THROWS_AS(m.intern_category(fx.domain, "new"), ModelFrozenError);
  CHECK_THROWS_AS(m.add_cooccurrence(fx.cats[0], fx.domain), ModelFrozenError);
  CHECK_THROWS_AS(m.confirm(fx.cats[0], fx.feats[0]), ModelFrozenError);
  CHECK_THROWS_AS(m.retain_top(TopK(1)), ModelFrozenError);
  // Thawing makes a separate mutable instance.
  Model copy = m.thawed();
  copy.add_cf(fx.cats[1], fx.feats[0], 1.0);
  CHECK(m.cf(fx.cats[1], fx.feats[0]) == 0.0);
  CHECK(m.is_frozen());
}

TEST_CASE("totals after random add_cf sequences match recomputation") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 50; ++round) {
    Model m;
    const DomainId d0 = m.intern_domain("a", false);
    const DomainId d1 = m.intern_domain("b", false);
    std::vector<CategoryId> cats;
    for (int i = 0; i < 6; ++i) cats.push_back(m.intern_category(i % 2 ? d1 : d0, "c" + std::to_string(i)));
    std::vector<FeatureId> feats;
    for (int i = 0; i < 5; ++i) {
      const TokenId t[] = {m.intern_token("t" + std::to_string(i))};
      feats.push_back(m.intern_feature(FeatureKind::keyword, t));
    }

    std::map<std::pair<CategoryId, FeatureId>, double> expected;
    for (int op = 0; op < 60; ++op) {
      const CategoryId c = cats[rng() % cats.size()];
      const FeatureId f = feats[rng() % feats.size()];
      const double delta = static_cast<double>(1 + rng() % 1000) / 997.0;
      m.add_cf(c, f, delta);
      expected[{c, f}] += delta;
    }

    for (FeatureId f : feats) {
      for (DomainId d : {d0, d1}) {
        double total = 0.0;
        for (const auto& [key, v] : expected)
          if (key.second == f && m.category(key.first).domain == d) total += v;
        CHECK(m.feature_total(f, d) == doctest::Approx(total).epsilon(1e-12));
      }
    }
    for (CategoryId c : cats) {
      double total = 0.0;
      for (const auto& [key, v] : expected)
        if (key.first == c) total += v;
      CHECK(m.category_total(c) == doctest::Approx(total).epsilon(1e-12));
    }
    CHECK(verify_totals(m, 1e-12).empty());
    m.freeze();
    CHECK(verify_totals(m).empty());
  }
}

TEST_CASE("feature_categories normalizes within the domain") {
  Fixture fx;
  auto& m = fx.model;

  SUBCASE("single category") {
    m.add_cf(fx.cats[0], fx.feats[0], 3.0);
    m.freeze();
    const auto list = m.feature_categories(fx.feats[0], fx.domain);
    REQUIRE(list.size() == 1);
    CHECK(list[0].category == fx.cats[0]);
    CHECK(list[0].cf == 3.0);
    CHECK(list[0].relevance == 1.0);
  }
  SUBCASE("two categories") {
    m.add_cf(fx.cats[1], fx.feats[0], 1.0);
    m.add_cf(fx.cats[0], fx.feats[0], 3.0);
    m.freeze();
    const auto list = m.feature_categories(fx.feats[0], fx.domain);
    REQUIRE(list.size() == 2);
    CHECK(list[0].category == fx.cats[0]);
    CHECK(list[0].relevance == 0.75);
    CHECK(list[1].category == fx.cats[1]);
    CHECK(list[1].relevance == 0.25);
    CHECK(list[0].relevance + list[1].relevance == 1.0);
  }
  SUBCASE("ties break by category id") {
    m.add_cf(fx.cats[2], fx.feats[0], 2.0);
    m.add_cf(fx.cats[1], fx.feats[0], 2.0);
    m.freeze();
    const auto list = m.feature_categories(fx.feats[0], fx.domain);
    REQUIRE(list.size() == 2);
    CHECK(list[0].category == fx.cats[1]);
    CHECK(list[1].category == fx.cats[2]);
  }
  SUBCASE("no cells") {
    m.freeze();
    CHECK(m.feature_categories(fx.feats[1], fx.domain).empty());
    CHECK_THROWS_AS(m.feature_categories(fx.feats[1], 9), UnknownIdError);
  }
}

TEST_CASE("relevance normalization sums to one per feature and domain") {
  std::mt19937_64 rng(5);
  Fixture fx(7, 20);
  for (int op = 0; op < 200; ++op)
    fx.model.add_cf(fx.cats[rng() % 7], fx.feats[rng() % 20], double(1 + rng() % 50) / 7.0);
  fx.model.freeze();
  for (FeatureId f : fx.feats) {
    const auto list = fx.model.feature_categories(f, fx.domain);
    if (list.empty()) continue;
    double sum = 0.0;
    for (const auto& e : list) {
      sum += e.relevance;
      CHECK(e.relevance >= 0.0);
      CHECK(e.relevance <= 1.0);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("symmetric and category-side relevances") {
  Fixture fx;
  auto& m = fx.model;
  m.add_cf(fx.cats[0], fx.feats[0], 3.0);
  m.add_cf(fx.cats[1], fx.feats[0], 1.0);
  m.add_cf(fx.cats[0], fx.feats[1], 1.0);
  m.freeze();
  // C_f(k0) = 4, F_c(c0) = 4.
  CHECK(m.mutual_relevance(fx.cats[0], fx.feats[0]) == doctest::Approx(9.0 / 16.0));
  CHECK(m.category_feature_relevance(fx.cats[0], fx.feats[0]) == doctest::Approx(0.75));
  CHECK(m.category_feature_relevance(fx.cats[0], fx.feats[1]) == doctest::Approx(0.25));
  CHECK(m.mutual_relevance(fx.cats[2], fx.feats[0]) == 0.0);
}

TEST_CASE("global C_f scope sums across domains") {
  Model m;
  const DomainId a = m.intern_domain("a", false);
  const DomainId b = m.intern_domain("b", false);
  const CategoryId ca = m.intern_category(a, "x");
  const CategoryId cb = m.intern_category(b, "y");
  const TokenId t[] = {m.intern_token("w")};
  const FeatureId f = m.intern_feature(FeatureKind::keyword, t);
  m.add_cf(ca, f, 1.0);
  m.add_cf(cb, f, 3.0);
  m.freeze();
  CHECK(m.feature_total(f, a) == 1.0);
  CHECK(m.feature_total_global(f) == 4.0);
  CHECK(m.feature_categories(f, a)[0].relevance == 1.0);
  CHECK(m.feature_categories(f, a, CfTotalScope::global)[0].relevance == 0.25);
}

TEST_CASE("verify_totals reports injected corruption") {
  SUBCASE("consistent model") {
    Fixture fx;
    fx.model.add_cf(fx.cats[0], fx.feats[0], 2.0);
    fx.model.add_cf(fx.cats[1], fx.feats[1], 1.0);
    fx.model.freeze();
    CHECK(verify_totals(fx.model).empty());
  }
  SUBCASE("one corrupted category total") {
    Fixture fx;
    fx.model.add_cf(fx.cats[0], fx.feats[0], 2.0);
    fx.model.add_cf(fx.cats[1], fx.feats[1], 1.0);
    fx.model.overwrite_category_total(fx.cats[1], 5.0);
    const auto findings = verify_totals(fx.model);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == TotalsFinding::Kind::category_total);
    CHECK(findings[0].category == fx.cats[1]);
    CHECK(findings[0].stored == 5.0);
    CHECK(findings[0].recomputed == 1.0);
  }
  SUBCASE("empty model") { CHECK(verify_totals(Model{}).empty()); }
}

TEST_CASE("confirmed cells are pinned to one") {
  Fixture fx;
  auto& m = fx.model;
  m.add_cf(fx.cats[0], fx.feats[0], 0.2);
  m.confirm(fx.cats[0], fx.feats[0]);
  CHECK(m.cf(fx.cats[0], fx.feats[0]) == 1.0);
  m.add_cf(fx.cats[0], fx.feats[0], 0.4);
  CHECK(m.cf(fx.cats[0], fx.feats[0]) == 1.0);
  m.confirm(fx.cats[1], fx.feats[1]);
  CHECK(m.cf(fx.cats[1], fx.feats[1]) == 1.0);
  m.freeze();
  CHECK(verify_totals(m).empty());
  CHECK(m.feature_total(fx.feats[0], fx.domain) == 1.0);
}

TEST_CASE("retain_top keeps the strongest cells") {
  Fixture fx(3, 1);
  auto& m = fx.model;
  m.add_cf(fx.cats[0], fx.feats[0], 3.0);
  m.add_cf(fx.cats[1], fx.feats[0], 2.0);
  m.add_cf(fx.cats[2], fx.feats[0], 1.0);
  m.retain_top(TopK(2));
  CHECK(m.cell_count() == 2);
  CHECK(m.cf(fx.cats[2], fx.feats[0]) == 0.0);
  CHECK(m.feature_total(fx.feats[0], fx.domain) == 5.0);
  CHECK(m.category_total(fx.cats[2]) == 0.0);
  CHECK(m.category_features(fx.cats[2]).empty());
  CHECK_THROWS_AS(TopK(0), ArgumentError);
}

TEST_CASE("co-occurrence counts accumulate per driver category and domain") {
  Model m;
  const DomainId type = m.intern_domain("type", true);
  const DomainId a5 = m.intern_domain("a5", false);
  const CategoryId x1 = m.intern_category(type, "x1");
  m.add_cooccurrence(x1, a5);
  m.add_cooccurrence(x1, a5, 2);
  CHECK(m.cooccurrence_count(x1, a5) == 3);
  CHECK(m.cooccurrence_count(x1, type) == 0);
  CHECK(m.cooccurrence_cell_count() == 1);
}
