#include <random>

#include "colier/protocol/codec.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace colier;
using namespace colier::proto;
using Kind = DecodeError::Kind;

namespace {

DecodeError decode_error(std::string_view frame) {
  auto r = decode_message(frame);
  REQUIRE_FALSE(r.ok());
  return r.error();
}

std::string frame(const char* module, const char* action, const Json& payload) {
  Json j;
  j["module"] = module;
  j["message"][action] = payload;
  return j.dump();
}

Json new_path_payload() {
  Json j = Json::parse(colier::testing::kExampleFrame);
  return j["message"]["newPath"];
}

// One valid message per registry action, with random contents.
Message random_message(std::mt19937_64& rng, std::size_t which) {
  using namespace colier::doc;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto id = [&](char p) { return make_id(p, pick(1000)); };
  auto word = [&] {
    std::string s;
    for (std::size_t i = pick(12); i > 0; --i) s += static_cast<char>("ab \"\\/\n{}xyz"[pick(12)]);
    return s;
  };
  const Millis ts = static_cast<Millis>(pick(1u << 30)) * 1000;
  const Color color{static_cast<std::uint8_t>(pick(256)), static_cast<std::uint8_t>(pick(256)),
                    static_cast<std::uint8_t>(pick(256))};
  const std::string client = "c" + std::to_string(pick(50));

  auto mutation = [&](Mutation m) {
    ChangeMessage c = colier::testing::change(client, std::move(m), ts);
    if (pick(2)) c.serverTime = ts + 5;
    Message msg{std::nullopt, std::move(c)};
    if (pick(2)) msg.seq = 1 + pick(100000);
    return msg;
  };
  auto random_doc = [&] {
    auto d = colier::testing::doc_with_layers({"L0", "L1"});
    for (int i = 0; i < 20; ++i) (void)apply_change_in_place(d, colier::testing::random_change(d, rng));
    return d;
  };

  const RegistryEntry& e = registry()[which];
  const std::string a(e.action), mod(e.module);
  if (mod == "drawing") {
    if (a == "newPath") {
      op::NewPath n{id('L'), color, real(0.1, 50), {PathCommand::move_to(real(-1e4, 1e4), real(-1e4, 1e4))}};
      for (std::size_t i = pick(6); i > 0; --i) {
        if (pick(2)) n.path.push_back(PathCommand::line_to(real(0, 800), real(0, 600)));
        else n.path.push_back(PathCommand::quad_to(real(0, 800), real(0, 600), real(0, 800), real(0, 600)));
      }
      return mutation(n);
    }
    if (a == "undoPath") return mutation(op::UndoPath{id('L')});
    return mutation(op::RedoPath{id('L')});
  }
  if (mod == "layer") {
    if (a == "add") {
      op::AddLayer l;
      if (pick(2)) l.name = word();
      if (pick(2)) l.asset = "img.png";
      return mutation(l);
    }
    if (a == "delete") return mutation(op::DeleteLayer{id('L')});
    if (a == "reorder") return mutation(op::ReorderLayer{id('L'), static_cast<std::int64_t>(pick(9))});
    if (a == "updateProperty") {
      op::UpdateLayer u{id('L')};
      if (pick(2)) u.visible = pick(2) == 0;
      if (pick(2)) u.opacity = real(0, 1);
      if (pick(2)) u.name = word();
      if (pick(2)) u.tx = real(-500, 500);
      if (pick(2)) u.ty = real(-500, 500);
      if (pick(2)) u.rotation = real(-360, 360);
      if (pick(2)) u.scaleX = real(0.01, 4);
      if (pick(2)) u.scaleY = real(0.01, 4);
      return mutation(u);
    }
    if (a == "lock") return mutation(op::Lock{id('L')});
    if (a == "unlock") return mutation(op::Unlock{id('L')});
    if (a == "exclusiveLock") return mutation(op::ExclusiveLock{id('L')});
    if (a == "exclusiveUnlock") return mutation(op::ExclusiveUnlock{id('L')});
    return Message{std::nullopt, ExclusiveUnlockNotice{id('L'), client, "other", ts}};
  }
  if (mod == "pipeline") {
    const auto& spec = all_effects()[pick(all_effects().size())];
    std::map<std::string, double, std::less<>> params;
    for (const auto& p : spec.params) {
      if (pick(2)) params[std::string(p.name)] = p.integral ? std::round(real(p.min, p.max)) : real(p.min, p.max);
    }
    if (a == "addVca") {
      op::AddVca v{id('L'), spec.effect, std::nullopt, params};
      if (pick(2)) v.enabled = pick(2) == 0;
      return mutation(v);
    }
    if (a == "removeVca") return mutation(op::RemoveVca{id('L'), id('V')});
    if (a == "reorderVca") return mutation(op::ReorderVca{id('L'), id('V'), static_cast<std::int64_t>(pick(5))});
    if (a == "updateParam") return mutation(op::UpdateVcaParams{id('L'), id('V'), params});
    return mutation(op::SetVcaEnabled{id('L'), id('V'), pick(2) == 0});
  }
  if (mod == "presence") {
    if (a == "cursor") return Message{std::nullopt, Cursor{client, ts, real(-100, 900), real(-100, 700)}};
    std::optional<std::string> layer;
    if (pick(2)) layer = id('L');
    if (a == "selectLayer") return Message{std::nullopt, SelectLayer{client, ts, layer}};
    if (a == "selectVca") return Message{std::nullopt, SelectVca{client, ts, layer, pick(2) ? std::optional(id('V')) : std::nullopt}};
    return Message{std::nullopt, SelectTool{client, ts, pick(2) ? "brush" : "move"}};
  }
  if (mod == "chat") {
    if (a == "post") return Message{std::nullopt, ChatPost{client, ts, word()}};
    return Message{std::nullopt, ChatPosted{client, ts, ts + 3, word()}};
  }
  if (mod == "history") {
    if (a == "list") {
      HistoryList h{1 + pick(50), std::nullopt};
      if (pick(2)) h.to = h.from + pick(50);
      return Message{std::nullopt, h};
    }
    HistoryEntries h;
    for (Seq s = 1 + pick(10), n = pick(4); n > 0; --n, ++s) {
      auto c = colier::testing::example_change(id('L'));
      c.serverTime = ts;
      h.entries.push_back(SequencedEvent{s, c});
    }
    return Message{std::nullopt, h};
  }
  // session
  PeerInfo peer{client, color, word(), pick(2) == 0};
  if (a == "list") return Message{std::nullopt, ListSessions{}};
  if (a == "join") {
    Join j{"s" + std::to_string(pick(9)), std::nullopt, std::nullopt};
    if (pick(2)) j.clientId = client;
    if (pick(2)) j.username = word();
    return Message{std::nullopt, j};
  }
  if (a == "joined") return Message{std::nullopt, Joined{"default", {peer, peer}}};
  if (a == "overview") {
    return Message{std::nullopt, Overview{{{"default", word(), static_cast<std::int64_t>(pick(5))}}}};
  }
  if (a == "snapshot") {
    if (pick(3) == 0) return Message{std::nullopt, Snapshot{}};
    return Message{std::nullopt, Snapshot{pick(1000), random_doc()}};
  }
  if (a == "clientJoined") return Message{std::nullopt, ClientJoined{peer}};
  if (a == "clientLeft") return Message{std::nullopt, ClientLeft{client}};
  if (a == "identity") return Message{std::nullopt, Identity{client, color}};
  Rejected r{std::nullopt, std::nullopt, "StaleTarget", pick(2) ? "layerId" : ""};
  if (pick(2)) r.refTimeStamp = ts;
  if (pick(2)) r.refSeq = 1 + pick(99);
  return Message{std::nullopt, r};
}

}  // namespace

TEST_CASE("example drawing frame decodes") {
  auto r = decode_message(colier::testing::kExampleFrame);
  REQUIRE(r.ok());
  const auto& m = r.value();
  CHECK_FALSE(m.seq.has_value());
  const auto* c = std::get_if<doc::ChangeMessage>(&m.body);
  REQUIRE(c);
  CHECK(c->clientId == "m82pY9bvAeIAAAH");
  CHECK(c->timeStamp == 1617804631471);
  const auto* np = std::get_if<doc::op::NewPath>(&c->mutation);
  REQUIRE(np);
  CHECK(np->color.hex() == "#795EB3");
  CHECK(np->width == 10.0);
  CHECK(np->path == colier::testing::example_path());
  CHECK(module_of(m.body) == "drawing");
  CHECK(action_of(m.body) == "newPath");
}

TEST_CASE("example frame survives re-encoding") {
  auto m = decode_message(colier::testing::kExampleFrame).value();
  const std::string bytes = encode_message(m);
  CHECK(bytes.find("446.99") != std::string::npos);
  CHECK(bytes.find("\"width\":\"10\"") != std::string::npos);
  CHECK(bytes.find("\"timeStamp\":\"1617804631471\"") != std::string::npos);
  CHECK(decode_message(bytes).value() == m);
}

TEST_CASE("cursor at the origin") {
  auto r = decode_message(frame("presence", "cursor", {{"timeStamp", "5"}, {"clientId", "a"}, {"x", "0"}, {"y", "0"}}));
  REQUIRE(r.ok());
  CHECK(r.value().body == Body{Cursor{"a", 5, 0.0, 0.0}});
}

TEST_CASE("envelope errors") {
  CHECK(decode_error(R"({"message":{"cursor":{}}})") == DecodeError{Kind::MissingField, "module"});
  CHECK(decode_error(R"({"module":"presence"})") == DecodeError{Kind::MissingField, "message"});
  CHECK(decode_error(R"({"module":"nope","message":{"x":{}}})") == DecodeError{Kind::UnknownModule, "nope"});
  CHECK(decode_error(R"({"module":"layer","message":{"fly":{}}})").kind == Kind::UnknownAction);
  CHECK(decode_error(R"({"module":"layer","message":{}})") == DecodeError{Kind::BadValue, "message"});
  CHECK(decode_error(R"({"module":"layer","message":{"a":{},"b":{}}})") == DecodeError{Kind::BadValue, "message"});
  CHECK(decode_error("{oops") == DecodeError{Kind::BadValue, "frame"});
  CHECK(decode_error("[1,2]") == DecodeError{Kind::BadValue, "frame"});
  CHECK(decode_error(R"({"module":7,"message":{}})") == DecodeError{Kind::BadValue, "module"});
}

TEST_CASE("payload value errors name the field") {
  Json up{{"timeStamp", "1"}, {"layerId", "L1"}, {"opacity", "1.5"}};
  CHECK(decode_error(frame("layer", "updateProperty", up)) == DecodeError{Kind::BadValue, "opacity"});

  auto np = new_path_payload();
  np["path"][0][0] = "L";
  CHECK(decode_error(frame("drawing", "newPath", np)) == DecodeError{Kind::BadValue, "path[0]"});
  np = new_path_payload();
  np["path"][2] = Json::array({"Q", 1, 2});
  CHECK(decode_error(frame("drawing", "newPath", np)) == DecodeError{Kind::BadValue, "path[2]"});
  np = new_path_payload();
  np["path"] = Json::array();
  CHECK(decode_error(frame("drawing", "newPath", np)) == DecodeError{Kind::BadValue, "path"});
  np = new_path_payload();
  np["color"] = "purple";
  CHECK(decode_error(frame("drawing", "newPath", np)) == DecodeError{Kind::BadValue, "color"});
  np = new_path_payload();
  np.erase("timeStamp");
  CHECK(decode_error(frame("drawing", "newPath", np)) == DecodeError{Kind::MissingField, "timeStamp"});

  Json vp{{"timeStamp", "1"}, {"layerId", "L1"}, {"vcaId", "V1"}, {"params", {{"gamma", "2"}}}};
  CHECK(decode_error(frame("pipeline", "updateParam", vp)) == DecodeError{Kind::BadValue, "params.gamma"});
  vp["params"] = {{"blockSize", "2.5"}};
  CHECK(decode_error(frame("pipeline", "updateParam", vp)) == DecodeError{Kind::BadValue, "params.blockSize"});
  vp["params"] = {{"strength", "0.9"}};
  CHECK(decode_message(frame("pipeline", "updateParam", vp)).ok());

  Json av{{"timeStamp", "1"}, {"layerId", "L1"}, {"effect", "vignette"}, {"params", {{"amount", "2"}}}};
  CHECK(decode_error(frame("pipeline", "addVca", av)) == DecodeError{Kind::BadValue, "params.amount"});
  av["effect"] = "blur";
  CHECK(decode_error(frame("pipeline", "addVca", av)) == DecodeError{Kind::BadValue, "effect"});
}

TEST_CASE("seq is only valid on mutations") {
  Json j = Json::parse(colier::testing::kExampleFrame);
  j["seq"] = "0";
  CHECK(decode_error(j.dump()) == DecodeError{Kind::BadValue, "seq"});
  j["seq"] = "12";
  auto r = decode_message(j.dump());
  REQUIRE(r.ok());
  CHECK(r.value().seq == 12u);
  CHECK(decode_error(R"({"module":"session","seq":"3","message":{"list":{}}})") == DecodeError{Kind::BadValue, "seq"});
}

TEST_CASE("empty chat text round-trips") {
  Message m{std::nullopt, ChatPost{"a", 9, ""}};
  auto r = decode_message(encode_message(m));
  REQUIRE(r.ok());
  CHECK(r.value() == m);
}

TEST_CASE("validate_payload mirrors decoding") {
  CHECK(validate_payload("layer", "updateProperty", {{"timeStamp", "1"}, {"layerId", "L1"}}).ok());
  CHECK(validate_payload("layer", "updateProperty", {{"timeStamp", "1"}}).error() ==
        DecodeError{Kind::MissingField, "layerId"});
  CHECK(validate_payload("nope", "x", Json::object()).error().kind == Kind::UnknownModule);
  CHECK(find_action("session", "rejected")->server_only);
  CHECK_FALSE(find_action("drawing", "newPath")->server_only);
  CHECK(find_action("drawing", "fly") == nullptr);
}

TEST_CASE("every action round-trips through the codec") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    for (std::size_t i = 0; i < registry().size(); ++i) {
      Message m = random_message(rng, i);
      CHECK(module_of(m.body) == registry()[i].module);
      CHECK(action_of(m.body) == registry()[i].action);
      const std::string bytes = encode_message(m);
      auto r = decode_message(bytes);
      if (!r.ok()) FAIL(r.error().message() << " for " << bytes);
      REQUIRE(r.value() == m);
      REQUIRE(encode_message(r.value()) == bytes);
    }
  }
}

TEST_CASE("decoder is total over mangled frames") {
  std::mt19937_64 rng(3);
  std::vector<std::string> seeds;
  for (std::size_t i = 0; i < registry().size(); ++i) seeds.push_back(encode_message(random_message(rng, i)));
  seeds.push_back(colier::testing::kExampleFrame);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const std::string alphabet = "{}[]\":,0123456789.-eE+ abcxyzLMQ\\nulltruefalse#";
  for (int i = 0; i < 20000; ++i) {
    std::string f = seeds[pick(seeds.size())];
    for (std::size_t k = 1 + pick(4); k > 0; --k) {
      switch (pick(3)) {
        case 0: f[pick(f.size())] = alphabet[pick(alphabet.size())]; break;
        case 1: f.erase(pick(f.size()), 1 + pick(4)); break;
        default: f.insert(pick(f.size() + 1), 1, alphabet[pick(alphabet.size())]); break;
      }
      if (f.empty()) f = "{";
    }
    auto r = decode_message(f);
    if (r.ok()) (void)encode_message(r.value());
  }
  std::string big = R"({"module":"chat","message":{"post":{"timeStamp":"1","text":")";
  big += std::string(kMaxFrameBytes, 'a') + "\"}}}";
  CHECK(decode_error(big) == DecodeError{Kind::BadValue, "frame"});
}
