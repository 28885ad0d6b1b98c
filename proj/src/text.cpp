#include "ctgn/text.hpp"

#include <algorithm>
#include <clocale>
#include <cmath>
#include <cwctype>
#include <locale.h>
#include <map>
#include <optional>

#include "ctgn/error.hpp"

namespace ctgn {
namespace {

// Character classes come from the C.UTF-8 locale so results do not depend
// on the process locale. Without it, non-ASCII code points count as letters
// and keep their case.
class UnicodeClassifier {
 public:
  UnicodeClassifier() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      locale_ = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr));
      if (locale_) break;
    }
  }
  ~UnicodeClassifier() {
    if (locale_) freelocale(locale_);
  }
  UnicodeClassifier(const UnicodeClassifier&) = delete;
  UnicodeClassifier& operator=(const UnicodeClassifier&) = delete;

  bool is_alnum(char32_t cp) const {
    if (!locale_) return true;
    return iswalnum_l(static_cast<wint_t>(cp), locale_) != 0;
  }
  char32_t to_lower(char32_t cp) const {
    if (!locale_) return cp;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), locale_));
  }

 private:
  locale_t locale_ = nullptr;
};

const UnicodeClassifier& classifier() {
  static const UnicodeClassifier instance;
  return instance;
}

// Decodes one code point starting at text[i]; returns the byte length, or 0
// for an invalid sequence.
std::size_t decode_utf8(std::string_view text, std::size_t i, char32_t& cp) {
  const auto lead = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  char32_t min = 0;
  if (lead < 0x80) {
    cp = lead;
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2, cp = lead & 0x1F, min = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3, cp = lead & 0x0F, min = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4, cp = lead & 0x07, min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

void check_distance(int max_distance) {
  if (max_distance < 1) throw ArgumentError("max-frame-distance must be >= 1");
}

void check_weight(double w) {
  if (!(w > 0.0 && w <= 1.0)) throw ArgumentError("text weight must lie in (0, 1]");
}

struct Emission {
  FeatureId feature;
  double weight;
};

// Sorts emissions by feature id (stable, so repeated weights are summed in
// emission order) and folds them into a bag.
FeatureBag fold(std::vector<Emission>& emitted, double text_weight) {
  std::stable_sort(emitted.begin(), emitted.end(),
                   [](const Emission& a, const Emission& b) { return a.feature < b.feature; });
  FeatureBag bag;
  bag.text_weight = text_weight;
  for (const auto& e : emitted) {
    if (!bag.entries.empty() && bag.entries.back().feature == e.feature)
      bag.entries.back().evidence += e.weight;
    else
      bag.entries.push_back({e.feature, e.weight});
  }
  return bag;
}

// Emits keywords in token order, then frames by hop distance and position.
// `token_ids` holds nullopt for tokens the model does not know.
template <typename KeywordFn, typename FrameFn>
std::vector<Emission> emit(std::span<const std::optional<TokenId>> token_ids, int max_distance,
                           KeywordFn&& keyword, FrameFn&& frame) {
  std::vector<Emission> out;
  const std::size_t n = token_ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!token_ids[i]) continue;
    if (auto f = keyword(*token_ids[i])) out.push_back({*f, 1.0});
  }
  for (int hop = 1; hop <= max_distance; ++hop) {
    const double weight = 1.0 / hop;
    for (std::size_t i = 0; i + hop < n; ++i) {
      const auto& a = token_ids[i];
      const auto& b = token_ids[i + hop];
      if (!a || !b) continue;
      if (auto f = frame(*a, *b)) out.push_back({*f, weight});
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto& cls = classifier();

  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if (byte < 0x80) {
      if ((byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9')) {
        current.push_back(static_cast<char>(byte));
      } else if (byte >= 'A' && byte <= 'Z') {
        current.push_back(static_cast<char>(byte - 'A' + 'a'));
      } else {
        flush();
      }
      ++i;
      continue;
    }
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, i, cp);
    if (len == 0) {
      flush();
      ++i;
      continue;
    }
    if (cls.is_alnum(cp))
      append_utf8(current, cls.to_lower(cp));
    else
      flush();
    i += len;
  }
  flush();
  return tokens;
}

std::vector<FramePair> build_frames(std::span<const std::string> tokens, int max_distance) {
  check_distance(max_distance);
  std::vector<FramePair> out;
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> seen;
  const std::size_t n = tokens.size();
  for (int hop = 1; hop <= max_distance; ++hop) {
    const double weight = 1.0 / hop;
    for (std::size_t i = 0; i + hop < n; ++i) {
      const std::string& a = tokens[i];
      const std::string& b = tokens[i + hop];
      auto [it, inserted] = seen.try_emplace({a, b}, out.size());
      if (inserted)
        out.push_back({a, b, weight});
      else
        out[it->second].weight += weight;
    }
  }
  return out;
}

double FeatureBag::evidence(FeatureId feature) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), feature,
                             [](const BagEntry& e, FeatureId f) { return e.feature < f; });
  return it != entries.end() && it->feature == feature ? it->evidence : 0.0;
}

double FeatureBag::total_evidence() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.evidence;
  return sum;
}

FeatureBag extract_bag(std::string_view text, VocabMode mode, Model& model, int max_distance,
                       double text_weight) {
  if (mode == VocabMode::detect) return detect_bag(text, model, max_distance, text_weight);
  check_distance(max_distance);
  check_weight(text_weight);
  if (model.is_frozen()) throw ModelFrozenError();

  const auto tokens = tokenize(text);
  std::vector<std::optional<TokenId>> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.emplace_back(model.intern_token(t));

  auto emitted = emit(
      ids, max_distance,
      [&](TokenId t) -> std::optional<FeatureId> {
        const TokenId one[] = {t};
        return model.intern_feature(FeatureKind::keyword, one);
      },
      [&](TokenId a, TokenId b) -> std::optional<FeatureId> {
        const TokenId two[] = {a, b};
        return model.intern_feature(FeatureKind::frame, two);
      });
  return fold(emitted, text_weight);
}

FeatureBag detect_bag(std::string_view text, const Model& model, int max_distance,
                      double text_weight) {
  const auto tokens = tokenize(text);
  return detect_bag(tokens, model, max_distance, text_weight);
}

FeatureBag detect_bag(std::span<const std::string> tokens, const Model& model, int max_distance,
                      double text_weight) {
  check_distance(max_distance);
  check_weight(text_weight);
  std::vector<std::optional<TokenId>> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(model.find_token(t));

  auto emitted = emit(
      ids, max_distance, [&](TokenId t) { return model.find_keyword(t); },
      [&](TokenId a, TokenId b) { return model.find_frame(a, b); });
  return fold(emitted, text_weight);
}

}  // namespace ctgn
