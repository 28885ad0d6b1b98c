#include "ctgn/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "ctgn/error.hpp"

namespace ctgn {
namespace {

constexpr char kMagic[4] = {'C', 'T', 'G', 'N'};
constexpr std::uint32_t kUnboundedTopK = 0xFFFFFFFFu;

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in pieces.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(n));
    offset += n;
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void count(std::size_t n) {
    if (n > 0xFFFFFFFFu) throw ArgumentError("table too large for model format");
    u32(static_cast<std::uint32_t>(n));
  }
  void str(const std::string& s) {
    count(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  /// Reads a table length, checking that `min_entry_size` bytes per entry remain.
  std::uint32_t count(std::size_t min_entry_size) {
    const std::uint32_t n = u32();
    need(static_cast<std::size_t>(n) * min_entry_size);
    return n;
  }

  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw TruncatedError("model file is truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const EngineConfig& c) {
  w.i32(c.max_frame_distance);
  w.u32(c.top_k.is_unbounded() ? kUnboundedTopK : c.top_k.value());
  w.u8(static_cast<std::uint8_t>(c.scoring_mode));
  w.u8(static_cast<std::uint8_t>(c.ranking_mode));
  w.u8(c.order_priority ? 1 : 0);
  w.u8(static_cast<std::uint8_t>(c.scope_mode));
  w.u32(c.min_matched_features);
  w.f64(c.min_score);
  w.u8(static_cast<std::uint8_t>(c.cf_total_scope));
  w.u8(static_cast<std::uint8_t>(c.cf_accumulation));
  w.count(c.driver_domains.size());
  for (const auto& d : c.driver_domains) w.str(d);
}

template <typename Enum>
Enum read_enum(Reader& r, std::uint8_t max_value, const char* what) {
  const std::uint8_t v = r.u8();
  if (v > max_value) throw FormatError(std::string("invalid ") + what + " in model file");
  return static_cast<Enum>(v);
}

EngineConfig read_config(Reader& r) {
  EngineConfig c;
  c.max_frame_distance = r.i32();
  const std::uint32_t k = r.u32();
  if (k == 0) throw FormatError("invalid top-k in model file");
  c.top_k = k == kUnboundedTopK ? TopK::unbounded() : TopK(k);
  c.scoring_mode = read_enum<ScoringMode>(r, 1, "scoring mode");
  c.ranking_mode = read_enum<RankingMode>(r, 1, "ranking mode");
  c.order_priority = read_enum<std::uint8_t>(r, 1, "order priority flag") != 0;
  c.scope_mode = read_enum<ScopeMode>(r, 2, "scope mode");
  c.min_matched_features = r.u32();
  c.min_score = r.f64();
  c.cf_total_scope = read_enum<CfTotalScope>(r, 1, "cf total scope");
  c.cf_accumulation = read_enum<CfAccumulation>(r, 1, "cf accumulation");
  const std::uint32_t n = r.count(4);
  c.driver_domains.clear();
  for (std::uint32_t i = 0; i < n; ++i) c.driver_domains.push_back(r.str());
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("invalid config in model file: ") + e.what());
  }
  return c;
}

bool valid_real(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

// Fills a Model's private tables from a byte stream.
class ModelReader {
 public:
  static Model read(Reader& r) {
    Model m;
    m.config_ = read_config(r);

    const std::uint32_t tokens = r.count(4);
    m.tokens_.reserve(tokens);
    for (std::uint32_t i = 0; i < tokens; ++i) {
      std::string s = r.str();
      if (s.empty()) throw FormatError("empty token in model file");
      if (!m.token_index_.emplace(s, i).second) throw FormatError("duplicate token " + s);
      m.tokens_.push_back(std::move(s));
    }

    const std::uint32_t features = r.count(13);
    m.features_.reserve(features);
    for (std::uint32_t i = 0; i < features; ++i) {
      Feature f;
      f.kind = read_enum<FeatureKind>(r, 1, "feature kind");
      f.tokens[0] = r.u32();
      std::uint32_t second = 0xFFFFFFFFu;
      if (f.kind == FeatureKind::frame) second = f.tokens[1] = r.u32();
      f.quality = r.f64();
      for (TokenId t : f.token_ids())
        if (t >= tokens) throw FormatError("feature references unknown token");
      const auto key = (static_cast<std::uint64_t>(f.tokens[0]) << 32) | second;
      if (!m.feature_index_.emplace(key, i).second) throw FormatError("duplicate feature");
      m.features_.push_back(f);
    }

    const std::uint32_t domains = r.count(5);
    for (std::uint32_t i = 0; i < domains; ++i) {
      Domain d;
      d.name = r.str();
      d.is_driver = read_enum<std::uint8_t>(r, 1, "driver flag") != 0;
      if (d.name.empty() || !m.domain_index_.emplace(d.name, i).second)
        throw FormatError("invalid or duplicate domain name");
      m.domains_.push_back(std::move(d));
      m.category_index_.emplace_back();
    }

    const std::uint32_t categories = r.count(16);
    for (std::uint32_t i = 0; i < categories; ++i) {
      Category c;
      c.domain = r.u32();
      c.label = r.str();
      c.quality = r.f64();
      if (c.domain >= domains) throw FormatError("category references unknown domain");
      if (c.label.empty() || !m.category_index_[c.domain].emplace(c.label, i).second)
        throw FormatError("invalid or duplicate category label");
      m.categories_.push_back(std::move(c));
    }

    m.category_features_.assign(categories, {});
    m.feature_links_.assign(features, {});
    for (FeatureId f = 0; f < features; ++f) {
      const std::uint32_t rows = r.count(16);
      auto& out = m.feature_links_[f];
      out.reserve(rows);
      for (std::uint32_t i = 0; i < rows; ++i) {
        DomainLinks row;
        row.domain = r.u32();
        row.total = r.f64();
        if (row.domain >= domains || !valid_real(row.total)) throw FormatError("invalid cf row");
        if (!out.empty() && out.back().domain >= row.domain) throw FormatError("cf rows out of order");
        const std::uint32_t links = r.count(13);
        row.links.reserve(links);
        for (std::uint32_t k = 0; k < links; ++k) {
          CategoryLink link;
          link.category = r.u32();
          link.cf = r.f64();
          link.confirmed = read_enum<std::uint8_t>(r, 1, "confirmed flag") != 0;
          if (link.category >= categories || m.categories_[link.category].domain != row.domain ||
              !valid_real(link.cf) || link.cf == 0.0)
            throw FormatError("invalid cf cell");
          m.category_features_[link.category].push_back(f);
          row.links.push_back(link);
        }
        m.cell_count_ += links;
        out.push_back(std::move(row));
      }
    }

    const std::uint32_t totals = r.count(8);
    if (totals != categories) throw FormatError("category total table size mismatch");
    m.category_totals_.reserve(totals);
    for (std::uint32_t i = 0; i < totals; ++i) {
      const double v = r.f64();
      if (!valid_real(v)) throw FormatError("invalid category total");
      m.category_totals_.push_back(v);
    }

    m.cooccurrence_.assign(categories, {});
    const std::uint32_t cells = r.count(12);
    for (std::uint32_t i = 0; i < cells; ++i) {
      const std::uint32_t c = r.u32();
      const std::uint32_t d = r.u32();
      const std::uint32_t n = r.u32();
      if (c >= categories || d >= domains || n == 0) throw FormatError("invalid co-occurrence cell");
      auto& list = m.cooccurrence_[c];
      if (!list.empty() && list.back().domain >= d) throw FormatError("co-occurrence out of order");
      list.push_back({d, n});
    }

    m.frozen_ = true;
    return m;
  }
};

std::vector<std::uint8_t> serialize_model(const Model& m) {
  if (!m.is_frozen()) throw ArgumentError("only frozen models can be saved");
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  write_config(w, m.config());

  w.count(m.token_count());
  for (TokenId t = 0; t < m.token_count(); ++t) w.str(m.token(t));

  w.count(m.feature_count());
  for (FeatureId f = 0; f < m.feature_count(); ++f) {
    const Feature& feat = m.feature(f);
    w.u8(static_cast<std::uint8_t>(feat.kind));
    for (TokenId t : feat.token_ids()) w.u32(t);
    w.f64(feat.quality);
  }

  w.count(m.domain_count());
  for (DomainId d = 0; d < m.domain_count(); ++d) {
    w.str(m.domain(d).name);
    w.u8(m.domain(d).is_driver ? 1 : 0);
  }

  w.count(m.category_count());
  for (CategoryId c = 0; c < m.category_count(); ++c) {
    const Category& cat = m.category(c);
    w.u32(cat.domain);
    w.str(cat.label);
    w.f64(cat.quality);
  }

  for (FeatureId f = 0; f < m.feature_count(); ++f) {
    const auto rows = m.links(f);
    w.count(rows.size());
    for (const auto& row : rows) {
      w.u32(row.domain);
      w.f64(row.total);
      w.count(row.links.size());
      for (const auto& link : row.links) {
        w.u32(link.category);
        w.f64(link.cf);
        w.u8(link.confirmed ? 1 : 0);
      }
    }
  }
  w.count(m.category_count());
  for (CategoryId c = 0; c < m.category_count(); ++c) w.f64(m.category_total(c));

  w.count(m.cooccurrence_cell_count());
  for (CategoryId c = 0; c < m.category_count(); ++c) {
    for (const auto& cell : m.cooccurrence(c)) {
      w.u32(c);
      w.u32(cell.domain);
      w.u32(cell.count);
    }
  }

  const std::uint32_t crc = crc_of(w.bytes());
  w.u32(crc);
  return std::move(w.bytes());
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw FormatError("not a model file (bad magic)");
  Reader r(bytes.subspan(sizeof kMagic));
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw VersionError("unsupported model format version " + std::to_string(version) +
                       " (expected " + std::to_string(kModelFormatVersion) + ")");

  Model m = ModelReader::read(r);

  const std::size_t body = sizeof kMagic + r.position();
  const std::uint32_t stored = r.u32();
  if (sizeof kMagic + r.position() != bytes.size())
    throw FormatError("trailing bytes after model checksum");
  if (crc_of(bytes.first(body)) != stored) throw ChecksumError("model file checksum mismatch");
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return deserialize_model(bytes);
}

void dump_model(const Model& m, std::ostream& os) {
  os << "# config\n" << describe(m.config());
  os << "# tokens " << m.token_count() << '\n';
  for (TokenId t = 0; t < m.token_count(); ++t) os << "token\t" << t << '\t' << m.token(t) << '\n';
  os << "# features " << m.feature_count() << '\n';
  for (FeatureId f = 0; f < m.feature_count(); ++f)
    os << "feature\t" << f << '\t' << to_string(m.feature(f).kind) << '\t' << m.feature_text(f) << '\n';
  os << "# domains " << m.domain_count() << '\n';
  for (DomainId d = 0; d < m.domain_count(); ++d)
    os << "domain\t" << d << '\t' << m.domain(d).name << '\t'
       << (m.domain(d).is_driver ? "driver" : "attribute") << '\n';
  os << "# categories " << m.category_count() << '\n';
  os << std::setprecision(17);
  for (CategoryId c = 0; c < m.category_count(); ++c)
    os << "category\t" << c << '\t' << m.domain(m.category(c).domain).name << '\t'
       << m.category(c).label << "\tF_c=" << m.category_total(c) << '\n';
  os << "# cells " << m.cell_count() << '\n';
  for (FeatureId f = 0; f < m.feature_count(); ++f) {
    for (const auto& row : m.links(f)) {
      for (const auto& link : row.links) {
        os << "cell\t" << m.feature_text(f) << '\t' << m.domain(row.domain).name << '\t'
           << m.category(link.category).label << "\tcf=" << link.cf << "\tC_f=" << row.total
           << (link.confirmed ? "\tconfirmed" : "") << '\n';
      }
    }
  }
  os << "# cooccurrence " << m.cooccurrence_cell_count() << '\n';
  for (CategoryId c = 0; c < m.category_count(); ++c)
    for (const auto& cell : m.cooccurrence(c))
      os << "cooccurrence\t" << m.category(c).label << '\t' << m.domain(cell.domain).name << '\t'
         << cell.count << '\n';
}

}  // namespace ctgn
