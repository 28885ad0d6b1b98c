#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ctgn/model.hpp"

namespace ctgn {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Model file layout. All integers little-endian, reals as IEEE-754 binary64
// bit patterns, strings as u32 byte length followed by UTF-8 bytes.
//
//   magic            4 bytes  "CTGN"
//   version          u32
//   config           i32 max_frame_distance, u32 top_k (0xFFFFFFFF = unbounded),
//                    u8 scoring, u8 ranking, u8 order_priority, u8 scope,
//                    u32 min_matched_features, f64 min_score,
//                    u8 cf_total_scope, u8 cf_accumulation,
//                    u32 n, n x string driver domain
//   tokens           u32 n, n x string
//   features         u32 n, n x (u8 kind, u32 token, [u32 token if frame], f64 quality)
//   domains          u32 n, n x (string name, u8 is_driver)
//   categories       u32 n, n x (u32 domain, string label, f64 quality)
//   cf cells         feature-major, for every feature in id order:
//                      u32 rows, rows x (u32 domain, f64 C_f, u32 links,
//                                        links x (u32 category, f64 cf, u8 confirmed))
//                    then u32 n, n x f64 F_c
//   co-occurrence    u32 n, n x (u32 category, u32 domain, u32 count)
//   crc32            u32 over every preceding byte

/// Serializes a frozen model. Throws ArgumentError for a mutable model.
std::vector<std::uint8_t> serialize_model(const Model& model);

/// Parses a serialized model. Throws FormatError, VersionError,
/// TruncatedError or ChecksumError; never returns a partial model.
Model deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Human-readable listing of every table, for debugging.
void dump_model(const Model& model, std::ostream& os);

}  // namespace ctgn
