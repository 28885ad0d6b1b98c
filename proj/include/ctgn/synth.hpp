#pragma once

#include <cstdint>
#include <vector>

#include "ctgn/trainer.hpp"

namespace ctgn {

/// Parameters of the synthetic corpus generator.
///
/// Domain d is named "d<d>" and its categories "c<k>". Each category owns
/// `vocab` tokens: round((1 - overlap) * vocab) private tokens plus a window
/// of the domain's shared pool of `vocab` tokens. The vocabulary layout is a
/// pure function of the shape parameters; `seed` only drives sampling, so two
/// seeds give a training set and a held-out set over the same vocabulary.
///
/// Each text is one block of `tokens_per_block` tokens per domain, drawn
/// from the vocabulary of that domain's category. Domain 0 cycles through
/// its categories `texts_per_category` times each; other domains are drawn
/// uniformly.
struct SynthParams {
  std::uint32_t domains = 3;
  std::uint32_t categories = 10;
  std::uint32_t vocab = 20;
  double overlap = 0.0;
  std::uint32_t texts_per_category = 100;
  std::uint32_t tokens_per_block = 4;
  std::uint64_t seed = 1;

  /// Throws ArgumentError when a parameter is out of range.
  void validate() const;
};

std::vector<CorpusRecord> synthesize(const SynthParams& params);

}  // namespace ctgn
