#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "ctgn/error.hpp"
#include "ctgn/model_io.hpp"
#include "ctgn/recognizer.hpp"
#include "ctgn/trainer.hpp"
#include "helpers.hpp"

using namespace ctgn;

namespace {

Model sample_model() {
  std::mt19937_64 rng(41);
  auto corpus = testing_support::random_corpus(rng, 50, 12, 3, 5, true);
  for (auto& r : corpus)
    if (r.labels.count("dom0")) r.labels["type"] = r.labels["dom0"];
  EngineConfig config;
  config.max_frame_distance = 3;
  config.scoring_mode = ScoringMode::symmetric;
  config.min_score = 0.125;
  const std::vector<Confirmation> confirmations{{"dom1", "v0", FeatureKind::keyword, {"w1"}}};
  return train(corpus, config, confirmations);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ctgn_io_" + name);
}

}  // namespace

TEST_CASE("serialization round-trips bit for bit") {
  const Model model = sample_model();
  const auto bytes = serialize_model(model);
  const Model loaded = deserialize_model(bytes);
  CHECK(serialize_model(loaded) == bytes);
  CHECK(loaded.is_frozen());
  CHECK(loaded.config() == model.config());
  CHECK(loaded.token_count() == model.token_count());
  CHECK(loaded.feature_count() == model.feature_count());
  CHECK(loaded.category_count() == model.category_count());
  CHECK(loaded.cell_count() == model.cell_count());
  CHECK(loaded.cooccurrence_cell_count() == model.cooccurrence_cell_count());
  CHECK(verify_totals(loaded).empty());

  std::mt19937_64 rng(43);
  for (int i = 0; i < 200; ++i) {
    const std::string text = testing_support::random_corpus(rng, 1, 14, 1, 1)[0].text;
    CHECK(recognize(text, model, model.config()) == recognize(text, loaded, loaded.config()));
  }
}

TEST_CASE("save and load through the filesystem") {
  const Model model = sample_model();
  const auto path = temp_path("roundtrip.ctgn");
  save_model(model, path);
  CHECK(serialize_model(load_model(path)) == serialize_model(model));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), IoError);
  CHECK_THROWS_AS(save_model(model, temp_path("no/such/dir/model.ctgn")), IoError);
}

TEST_CASE("empty frozen model round-trips") {
  Model empty;
  empty.freeze();
  const auto bytes = serialize_model(empty);
  const Model loaded = deserialize_model(bytes);
  CHECK(loaded.token_count() == 0);
  CHECK(serialize_model(loaded) == bytes);
}

TEST_CASE("only frozen models serialize") {
  Model m;
  m.intern_token("a");
  CHECK_THROWS_AS(serialize_model(m), ArgumentError);
}

TEST_CASE("malformed model files are rejected with specific errors") {
  const auto bytes = serialize_model(sample_model());

  SUBCASE("bad magic") {
    auto b = bytes;
    b[0] = 'X';
    CHECK_THROWS_AS(deserialize_model(b), FormatError);
    CHECK_THROWS_AS(deserialize_model(std::vector<std::uint8_t>{}), FormatError);
  }
  SUBCASE("unsupported version") {
    auto b = bytes;
    b[4] = 99;
    CHECK_THROWS_AS(deserialize_model(b), VersionError);
  }
  SUBCASE("truncated") {
    const std::vector<std::uint8_t> b(bytes.begin(), bytes.begin() + bytes.size() / 2);
    CHECK_THROWS_AS(deserialize_model(b), TruncatedError);
  }
  SUBCASE("trailing bytes") {
    auto b = bytes;
    b.push_back(0);
    CHECK_THROWS_AS(deserialize_model(b), FormatError);
  }
  SUBCASE("checksum mismatch in a token string") {
    auto b = bytes;
    const char needle[] = "w11";
    auto it = std::search(b.begin(), b.end(), needle, needle + 3);
    REQUIRE(it != b.end());
    it[2] = '9';  // "w19" is not in the vocabulary
    CHECK_THROWS_AS(deserialize_model(b), ChecksumError);
  }
  SUBCASE("checksum mismatch in the stored crc") {
    auto b = bytes;
    b.back() ^= 0x01;
    CHECK_THROWS_AS(deserialize_model(b), ChecksumError);
  }
}

TEST_CASE("every truncation and every single-byte corruption is detected") {
  const auto bytes = serialize_model(sample_model());
  for (std::size_t n = 0; n < bytes.size(); n += 7) {
    const std::vector<std::uint8_t> b(bytes.begin(), bytes.begin() + n);
    CHECK_THROWS_AS(deserialize_model(b), ModelFileError);
  }
  std::mt19937_64 rng(47);
  for (int i = 0; i < 500; ++i) {
    auto b = bytes;
    b[rng() % b.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    CHECK_THROWS_AS(deserialize_model(b), ModelFileError);
  }
}

TEST_CASE("dump lists every table") {
  const std::vector<CorpusRecord> corpus{{"office scissors", 1.0, {{"type", "A"}, {"color", "red"}}}};
  std::ostringstream os;
  dump_model(train(corpus, EngineConfig{}), os);
  const std::string s = os.str();
  CHECK(s.find("office") != std::string::npos);
  CHECK(s.find("office-scissors") != std::string::npos);
  CHECK(s.find("color") != std::string::npos);
  CHECK(s.find("red") != std::string::npos);
}
