#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctgn/model.hpp"

namespace ctgn {

/// Lowercases the UTF-8 input and splits it on every maximal run of
/// characters that are not Unicode letters or digits. Bytes that do not
/// decode as UTF-8 act as separators.
std::vector<std::string> tokenize(std::string_view text);

struct FramePair {
  std::string first;
  std::string second;
  double weight = 0.0;

  friend bool operator==(const FramePair&, const FramePair&) = default;
};

/// Ordered token pairs at hop distance 1..max_distance, each occurrence
/// weighted 1/hop. A pair seen more than once carries the summed weight.
/// Output lists pairs in order of first emission, scanning hop 1 first.
std::vector<FramePair> build_frames(std::span<const std::string> tokens, int max_distance);

struct BagEntry {
  FeatureId feature = 0;
  double evidence = 0.0;
};

/// Features detected in one text with their evidence (TF_tf), ordered by
/// feature id.
struct FeatureBag {
  std::vector<BagEntry> entries;
  double text_weight = 1.0;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  /// 0 when the feature is absent.
  double evidence(FeatureId feature) const;
  /// F_t: sum of all evidence values.
  double total_evidence() const;
};

enum class VocabMode {
  instantiate,  // unseen tokens and features are added to the model
  detect,       // unseen tokens and features are skipped
};

/// Tokenizes `text` and collects keyword and frame features.
/// Instantiate mode on a frozen model throws ModelFrozenError.
FeatureBag extract_bag(std::string_view text, VocabMode mode, Model& model, int max_distance,
                       double text_weight = 1.0);

/// Detect-mode extraction over a read-only model.
FeatureBag detect_bag(std::string_view text, const Model& model, int max_distance,
                      double text_weight = 1.0);

/// Detect-mode extraction from tokens that are already split.
FeatureBag detect_bag(std::span<const std::string> tokens, const Model& model, int max_distance,
                      double text_weight = 1.0);

}  // namespace ctgn
