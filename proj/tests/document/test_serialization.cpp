#include <random>

#include "colier/document/serialization.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace colier;
using namespace colier::doc;

namespace {

SessionDocument rich_document() {
  auto d = colier::testing::doc_with_layers({"L0"});
  d = apply_change(d, colier::testing::example_change("L0")).value().doc;
  for (const auto& spec : all_effects()) {
    d = apply_change(d, colier::testing::change("a", op::AddVca{"L0", spec.effect, std::nullopt, {}})).value().doc;
  }
  d.layers[0].pipeline[2].enabled = false;
  d.layers[0].exclusiveLock = ExclusiveLockInfo{"a", 1617804631471};
  d.layers[0].transform = {12.5, -3, 45, 1.5, 0.25};
  d.layers[0].opacity = 0.75;
  d.layers[0].asset = "L0.png";
  return d;
}

}  // namespace

TEST_CASE("empty document is a serialization fixed point") {
  auto d = make_document("empty", 800, 600, 1617804631471);
  const std::string first = save_document(d);
  auto loaded = load_document(first);
  CHECK(loaded.doc == d);
  CHECK(loaded.seq == 0);
  CHECK(save_document(loaded.doc) == first);
}

TEST_CASE("example stroke round-trips with exact coordinates") {
  auto d = rich_document();
  const std::string bytes = save_document(d, 42);
  auto loaded = load_document(bytes);
  CHECK(loaded.seq == 42);
  REQUIRE(loaded.doc == d);
  const auto& path = loaded.doc.layers[0].strokes[0].path;
  REQUIRE(path.size() == 6);
  CHECK(path.front().coords[0] == 446.99);
  CHECK(path.back().coords[0] == 453.01);
  CHECK(bytes.find("446.99") != std::string::npos);
  CHECK(bytes.find("453.01") != std::string::npos);
  CHECK(loaded.doc.layers[0].pipeline.size() == 5);
}

TEST_CASE("missing layers field names the field") {
  const std::string text =
      R"({"meta":{"name":"x","createdAt":0,"version":1,"width":8,"height":8},"idCounter":0})";
  try {
    load_document(text);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.where() == "/layers");
    CHECK(std::string(e.what()).find("layers") != std::string::npos);
  }
}

TEST_CASE("format errors carry paths") {
  auto j = document_to_json(rich_document());
  j["layers"][0]["opacity"] = 3;
  CHECK_THROWS_WITH_AS(document_from_json(j), "/layers/0/opacity: must be in [0, 1]", FormatError);

  j = document_to_json(rich_document());
  j["layers"][0]["strokes"][0]["path"][0][0] = "L";
  CHECK_THROWS_AS(document_from_json(j), FormatError);

  j = document_to_json(rich_document());
  j["layers"].push_back(j["layers"][0]);
  CHECK_THROWS_WITH_AS(document_from_json(j), "/layers/1/id: duplicate layer id", FormatError);

  CHECK_THROWS_AS(load_document("{not json"), FormatError);
  CHECK_THROWS_AS(load_document("[]"), FormatError);
}

TEST_CASE("newer format versions are refused") {
  auto j = document_to_json(make_document("x", 4, 4));
  j["meta"]["version"] = kFormatVersion + 1;
  CHECK_THROWS_AS(document_from_json(j), UnsupportedVersion);
}

TEST_CASE("round-trip holds for randomized documents") {
  std::mt19937_64 rng(5);
  auto d = colier::testing::doc_with_layers({"L0", "L1", "L2"});
  for (int i = 0; i < 600; ++i) {
    auto c = colier::testing::random_change(d, rng);
    (void)apply_change_in_place(d, c);
    if (i % 50 == 0) {
      auto bytes = save_document(d);
      auto back = load_document(bytes).doc;
      REQUIRE(back == d);
      REQUIRE(save_document(back) == bytes);
    }
  }
}
