#include "ctgn/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ctgn/error.hpp"

namespace ctgn {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool skip_line(std::string_view line) { return line.empty() || line.front() == '#'; }

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_weight(std::string_view s, std::size_t line_no) {
  double w = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line_no, "malformed weight column '" + std::string(s) + "'");
  if (!(w > 0.0 && w <= 1.0)) throw ParseError(line_no, "weight must lie in (0, 1]");
  return w;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<CorpusRecord> parse_corpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skip_line(line)) continue;
    const auto cols = split_tabs(line);
    CorpusRecord r;
    r.text = std::string(cols[0]);
    std::size_t i = 1;
    if (cols.size() > 1 && cols[1].find('=') == std::string_view::npos) {
      r.weight = parse_weight(cols[1], line_no);
      i = 2;
    }
    for (; i < cols.size(); ++i) {
      const auto col = cols[i];
      const std::size_t eq = col.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == col.size())
        throw ParseError(line_no, "malformed label column '" + std::string(col) +
                                      "' (expected domain=label)");
      auto [it, inserted] =
          r.labels.emplace(std::string(col.substr(0, eq)), std::string(col.substr(eq + 1)));
      if (!inserted) throw ParseError(line_no, "domain '" + it->first + "' labeled twice");
    }
    records.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("failed reading corpus");
  return records;
}

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const CorpusRecord> records) {
  for (const auto& r : records) {
    out << r.text;
    if (r.weight != 1.0) {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.weight);
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    for (const auto& [domain, label] : r.labels) out << '\t' << domain << '=' << label;
    out << '\n';
  }
}

std::vector<Confirmation> parse_confirmations(std::istream& in) {
  std::vector<Confirmation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skip_line(line)) continue;
    const auto cols = split_tabs(line);
    if (cols.size() < 4) throw ParseError(line_no, "expected domain, label, kind and token(s)");
    Confirmation c;
    c.domain = std::string(cols[0]);
    c.label = std::string(cols[1]);
    if (cols[2] == "keyword")
      c.kind = FeatureKind::keyword;
    else if (cols[2] == "frame")
      c.kind = FeatureKind::frame;
    else
      throw ParseError(line_no, "unknown feature kind '" + std::string(cols[2]) + "'");
    for (std::size_t i = 3; i < cols.size(); ++i) c.tokens.emplace_back(cols[i]);
    if (c.tokens.size() != (c.kind == FeatureKind::keyword ? 1u : 2u))
      throw ParseError(line_no, "wrong number of tokens for feature kind");
    if (c.domain.empty() || c.label.empty()) throw ParseError(line_no, "empty domain or label");
    for (const auto& t : c.tokens)
      if (t.empty()) throw ParseError(line_no, "empty token");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Confirmation> read_confirmations(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_confirmations(in);
}

}  // namespace ctgn
