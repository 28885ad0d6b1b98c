#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ctgn/trainer.hpp"

namespace ctgn {

// Corpus file: UTF-8, one record per line, tab-separated.
//   column 1     text
//   column 2     optional weight in (0, 1] (a column without '=')
//   remaining    domain=label pairs
// Blank lines and lines starting with '#' are skipped.

/// Throws ParseError carrying the 1-based line number.
std::vector<CorpusRecord> parse_corpus(std::istream& in);
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const CorpusRecord> records);

// Confirmations sidecar: domain, label, feature kind ("keyword" or
// "frame"), then one or two tokens, tab-separated.

std::vector<Confirmation> parse_confirmations(std::istream& in);
std::vector<Confirmation> read_confirmations(const std::filesystem::path& path);

}  // namespace ctgn
