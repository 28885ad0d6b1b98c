#include "ctgn/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ctgn/error.hpp"

namespace ctgn {

void SynthParams::validate() const {
  if (domains < 1 || categories < 1 || vocab < 1 || texts_per_category < 1 || tokens_per_block < 1)
    throw ArgumentError("synth counts must all be >= 1");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw ArgumentError("overlap must lie in [0, 1]");
}

std::vector<CorpusRecord> synthesize(const SynthParams& p) {
  p.validate();
  const auto shared = static_cast<std::uint32_t>(std::lround(p.overlap * p.vocab));
  const std::uint32_t own = p.vocab - shared;

  // vocabulary[d][c] lists the tokens of category c in domain d.
  std::vector<std::vector<std::vector<std::string>>> vocabulary(p.domains);
  for (std::uint32_t d = 0; d < p.domains; ++d) {
    const std::string dom = "d" + std::to_string(d);
    vocabulary[d].resize(p.categories);
    for (std::uint32_t c = 0; c < p.categories; ++c) {
      auto& words = vocabulary[d][c];
      for (std::uint32_t k = 0; k < own; ++k)
        words.push_back(dom + "c" + std::to_string(c) + "p" + std::to_string(k));
      for (std::uint32_t k = 0; k < shared; ++k)
        words.push_back(dom + "s" + std::to_string((c + k) % p.vocab));
    }
  }

  std::mt19937_64 rng(p.seed);
  auto pick = [&](std::uint64_t n) { return static_cast<std::uint32_t>(rng() % n); };

  std::vector<CorpusRecord> out;
  out.reserve(static_cast<std::size_t>(p.categories) * p.texts_per_category);
  for (std::uint32_t c0 = 0; c0 < p.categories; ++c0) {
    for (std::uint32_t i = 0; i < p.texts_per_category; ++i) {
      CorpusRecord r;
      for (std::uint32_t d = 0; d < p.domains; ++d) {
        const std::uint32_t c = d == 0 ? c0 : pick(p.categories);
        r.labels.emplace("d" + std::to_string(d), "c" + std::to_string(c));
        const auto& words = vocabulary[d][c];
        for (std::uint32_t t = 0; t < p.tokens_per_block; ++t) {
          if (!r.text.empty()) r.text.push_back(' ');
          r.text += words[pick(words.size())];
        }
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace ctgn
