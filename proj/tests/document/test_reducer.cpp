#include <algorithm>
#include <random>

#include "colier/document/reducer.hpp"
#include "colier/document/serialization.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace colier;
using namespace colier::doc;
using colier::testing::change;
using colier::testing::doc_with_layers;

TEST_SUITE("apply_change") {
  TEST_CASE("example newPath lands on the named layer") {
    auto d = doc_with_layers({"L0"});
    auto r = apply_change(d, colier::testing::example_change("L0"));
    REQUIRE(r.ok());
    const Layer& l = r.value().doc.layers[0];
    REQUIRE(l.strokes.size() == 1);
    const Stroke& s = l.strokes[0];
    CHECK(s.path.size() == 6);
    CHECK(s.color.hex() == "#795EB3");
    CHECK(s.width == 10);
    CHECK(s.clientId == "m82pY9bvAeIAAAH");
    CHECK(s.timeStamp == 1617804631471);
    CHECK_FALSE(s.undone);
    CHECK(r.value().event.createdId == s.id);
  }

  TEST_CASE("addLayer on an empty document") {
    auto d = make_document("empty", 800, 600);
    auto r = apply_change(d, change("a", op::AddLayer{}));
    REQUIRE(r.ok());
    const auto& out = r.value().doc;
    REQUIRE(out.layers.size() == 1);
    const Layer& l = out.layers[0];
    CHECK(l.opacity == 1.0);
    CHECK(l.visible);
    CHECK_FALSE(l.locked);
    CHECK(l.transform.is_identity());
    CHECK(l.id == "L00000001");
    CHECK(out.idCounter == 1);
  }

  TEST_CASE("edit after delete is dropped as StaleTarget") {
    auto d = doc_with_layers({"L0", "L1"});
    auto del = apply_change(d, change("a", op::DeleteLayer{"L1"}));
    REQUIRE(del.ok());
    const auto after_delete = del.value().doc;
    op::UpdateLayer u{"L1"};
    u.opacity = 0.5;
    auto r = apply_change(after_delete, change("b", u));
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == RejectCode::StaleTarget);
    CHECK(canonical(after_delete) == canonical(del.value().doc));
  }

  TEST_CASE("parameter updates resolve to the last one applied") {
    auto d = doc_with_layers({"L0"});
    auto added = apply_change(d, change("a", op::AddVca{"L0", Effect::Vignette, std::nullopt, {}}));
    REQUIRE(added.ok());
    auto cur = added.value().doc;
    const std::string vca = added.value().event.createdId;
    for (double v : {0.2, 0.5, 0.9}) {
      op::UpdateVcaParams u{"L0", vca, {}};
      u.params["strength"] = v;
      auto r = apply_change(cur, change(v < 0.5 ? "a" : "b", u));
      REQUIRE(r.ok());
      cur = r.value().doc;
    }
    CHECK(cur.layers[0].pipeline[0].param("strength") == 0.9);
  }

  TEST_CASE("invalid values are rejected") {
    auto d = doc_with_layers({"L0"});
    op::UpdateLayer u{"L0"};
    u.opacity = 1.5;
    auto r = apply_change(d, change("a", u));
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == RejectCode::InvalidValue);

    op::AddVca bad{"L0", Effect::Contrast, std::nullopt, {{"blockSize", 4}}};
    auto r2 = apply_change(d, change("a", bad));
    REQUIRE_FALSE(r2.ok());
    CHECK(r2.error().detail == "params.blockSize");

    op::AddVca frac{"L0", Effect::Pixelation, std::nullopt, {{"blockSize", 2.5}}};
    CHECK_FALSE(apply_change(d, change("a", frac)).ok());

    op::NewPath np{"L0", Color{}, 0.0, {PathCommand::move_to(1, 1)}};
    CHECK(apply_change(d, change("a", np)).error().code == RejectCode::InvalidValue);
    np.width = 2;
    np.path = {PathCommand::line_to(1, 1)};
    CHECK(apply_change(d, change("a", np)).error().code == RejectCode::MalformedPayload);
  }

  TEST_CASE("degenerate transforms are clamped and normalized") {
    auto d = doc_with_layers({"L0"});
    op::UpdateLayer u{"L0"};
    u.scaleX = 0.0;
    u.scaleY = -3.0;
    u.rotation = -90.0;
    auto r = apply_change(d, change("a", u));
    REQUIRE(r.ok());
    const auto& t = r.value().doc.layers[0].transform;
    CHECK(t.scaleX == kMinScale);
    CHECK(t.scaleY == kMinScale);
    CHECK(t.rotation == 270.0);
    u = op::UpdateLayer{"L0"};
    u.rotation = 720.0;
    CHECK(apply_change(d, change("a", u)).value().doc.layers[0].transform.rotation == 0.0);
  }

  TEST_CASE("reorder moves one layer and keeps the rest in order") {
    auto d = doc_with_layers({"A", "B", "C", "D"});
    auto r = apply_change(d, change("a", op::ReorderLayer{"A", 2}));
    REQUIRE(r.ok());
    std::vector<std::string> ids;
    for (const auto& l : r.value().doc.layers) ids.push_back(l.id);
    CHECK(ids == std::vector<std::string>{"B", "C", "A", "D"});
    auto back = apply_change(r.value().doc, change("a", op::ReorderLayer{"A", 0}));
    CHECK(back.value().doc == d);
    CHECK(apply_change(d, change("a", op::ReorderLayer{"A", 4})).error().code == RejectCode::InvalidValue);
    // same index is an accepted no-op
    auto same = apply_change(d, change("a", op::ReorderLayer{"B", 1}));
    REQUIRE(same.ok());
    CHECK(same.value().doc == d);
  }

  TEST_CASE("pipeline add, reorder, toggle, remove") {
    auto d = doc_with_layers({"L0"});
    std::vector<std::string> ids;
    for (auto e : {Effect::Contrast, Effect::Pixelation, Effect::ChromaZoom}) {
      auto r = apply_change(d, change("a", op::AddVca{"L0", e, std::nullopt, {}}));
      REQUIRE(r.ok());
      ids.push_back(r.value().event.createdId);
      d = r.value().doc;
    }
    CHECK(d.layers[0].pipeline[1].param("blockSize") == 8);
    d = apply_change(d, change("a", op::ReorderVca{"L0", ids[2], 0})).value().doc;
    CHECK(d.layers[0].pipeline[0].id == ids[2]);
    d = apply_change(d, change("a", op::SetVcaEnabled{"L0", ids[0], false})).value().doc;
    CHECK_FALSE(d.layers[0].find_vca(ids[0])->enabled);
    d = apply_change(d, change("a", op::RemoveVca{"L0", ids[1]})).value().doc;
    CHECK(d.layers[0].pipeline.size() == 2);
    auto stale = apply_change(d, change("a", op::SetVcaEnabled{"L0", ids[1], true}));
    CHECK(stale.error().code == RejectCode::StaleTarget);
  }
}

TEST_SUITE("check_permission") {
  TransformLeaseTable no_leases;

  SessionDocument exclusively_locked_by(std::string owner) {
    auto d = doc_with_layers({"L0"});
    d.layers[0].exclusiveLock = ExclusiveLockInfo{std::move(owner), 5};
    return d;
  }

  TEST_CASE("exclusive lock blocks other clients") {
    auto d = exclusively_locked_by("A");
    op::UpdateLayer u{"L0"};
    u.opacity = 0.3;
    auto p = check_permission(d, change("B", u), no_leases, 0);
    CHECK_FALSE(p.allowed);
    CHECK(p.reason == DenyReason::ExclusiveLock);
    CHECK(check_permission(d, change("A", u), no_leases, 0).allowed);
    CHECK(apply_change(d, change("B", u)).error().reason() == "ExclusiveLock");
  }

  TEST_CASE("unrestricted layer allows drawing") {
    auto d = doc_with_layers({"L0"});
    auto p = check_permission(d, colier::testing::example_change("L0"), no_leases, 0);
    CHECK(p.allowed);
    CHECK(p.reason == DenyReason::None);
  }

  TEST_CASE("exclusive unlock by another client is allowed and notifies the owner") {
    auto d = exclusively_locked_by("A");
    auto p = check_permission(d, change("B", op::ExclusiveUnlock{"L0"}), no_leases, 0);
    CHECK(p.allowed);
    REQUIRE(p.notifyOwner);
    CHECK(*p.notifyOwner == "A");
    auto r = apply_change(d, change("B", op::ExclusiveUnlock{"L0"}));
    REQUIRE(r.ok());
    CHECK(r.value().event.notifyOwner == std::optional<ClientId>("A"));
    CHECK_FALSE(r.value().doc.layers[0].exclusiveLock);
    // owner unlocking itself sends no notice
    auto own = apply_change(d, change("A", op::ExclusiveUnlock{"L0"}));
    CHECK_FALSE(own.value().event.notifyOwner);
  }

  TEST_CASE("transform lease blocks other clients' transforms only") {
    auto d = doc_with_layers({"L0"});
    TransformLeaseTable leases;
    REQUIRE(leases.acquire("L0", "A", 1000));
    op::UpdateLayer move{"L0"};
    move.tx = 10;
    auto p = check_permission(d, change("B", move), leases, 2000);
    CHECK_FALSE(p.allowed);
    CHECK(p.reason == DenyReason::TransformLease);
    CHECK(check_permission(d, change("A", move), leases, 2000).allowed);
    op::UpdateLayer fade{"L0"};
    fade.opacity = 0.1;
    CHECK(check_permission(d, change("B", fade), leases, 2000).allowed);
    // expired at acquire time + ttl
    CHECK(check_permission(d, change("B", move), leases, 1000 + TransformLeaseTable::kTtlMs).allowed);
  }

  TEST_CASE("plain lock blocks content edits but not lock toggles") {
    auto d = doc_with_layers({"L0"});
    d.layers[0].locked = true;
    auto p = check_permission(d, colier::testing::example_change("L0"), no_leases, 0);
    CHECK(p.reason == DenyReason::Locked);
    CHECK(check_permission(d, change("B", op::Unlock{"L0"}), no_leases, 0).allowed);
    CHECK(check_permission(d, change("B", op::ExclusiveLock{"L0"}), no_leases, 0).allowed);
    CHECK(check_permission(d, change("B", op::DeleteLayer{"L0"}), no_leases, 0).reason == DenyReason::Locked);
  }

  TEST_CASE("lease table keeps one holder per layer") {
    TransformLeaseTable t;
    CHECK(t.acquire("L0", "A", 0));
    CHECK_FALSE(t.acquire("L0", "B", 10));
    CHECK(t.acquire("L0", "A", 20));  // refresh
    CHECK(t.entries().at("L0").expiresAt == 20 + TransformLeaseTable::kTtlMs);
    t.release("L0", "B");  // not the holder
    CHECK(t.holder("L0", 30) == std::optional<ClientId>("A"));
    t.release_all("A");
    CHECK_FALSE(t.holder("L0", 30));
  }
}

TEST_SUITE("undo/redo") {
  SessionDocument three_strokes() {
    auto d = doc_with_layers({"L0"});
    for (auto [author, ts] : {std::pair{"A", 1}, {"B", 2}, {"A", 3}}) {
      op::NewPath np{"L0", Color{1, 2, 3}, 2.0, {PathCommand::move_to(ts, ts)}};
      d = apply_change(d, change(author, np, ts)).value().doc;
    }
    return d;
  }

  // Reference: the author's last live stroke found by reverse scan.
  std::optional<std::size_t> last_live_of(const Layer& l, const std::string& author) {
    for (std::size_t i = l.strokes.size(); i-- > 0;) {
      if (l.strokes[i].clientId == author && !l.strokes[i].undone) return i;
    }
    return std::nullopt;
  }

  TEST_CASE("undo marks the author's latest stroke only") {
    auto d = three_strokes();
    auto expected = last_live_of(d.layers[0], "A");
    REQUIRE(expected == std::optional<std::size_t>(2));
    auto r = undo_stroke(d, "A", "L0");
    REQUIRE(r.ok());
    const auto& s = r.value().layers[0].strokes;
    CHECK(s[2].undone);
    CHECK_FALSE(s[0].undone);
    CHECK(s[1] == d.layers[0].strokes[1]);
  }

  TEST_CASE("nothing to undo or redo") {
    auto d = doc_with_layers({"L0"});
    CHECK(undo_stroke(d, "A", "L0").error().code == RejectCode::NothingToUndo);
    CHECK(redo_stroke(three_strokes(), "A", "L0").error().code == RejectCode::NothingToRedo);
    CHECK(undo_stroke(three_strokes(), "Z", "L0").error().code == RejectCode::NothingToUndo);
  }

  TEST_CASE("undo then redo restores identical bytes") {
    auto d = three_strokes();
    auto u = undo_stroke(d, "A", "L0");
    auto r = redo_stroke(u.value(), "A", "L0");
    REQUIRE(r.ok());
    CHECK(canonical(r.value()) == canonical(d));
  }

  TEST_CASE("redo restores the most recently undone stroke first") {
    auto d = three_strokes();
    d = undo_stroke(d, "A", "L0").value();  // A2
    d = undo_stroke(d, "A", "L0").value();  // A1
    d = redo_stroke(d, "A", "L0").value();
    CHECK_FALSE(d.layers[0].strokes[0].undone);
    CHECK(d.layers[0].strokes[2].undone);
    d = redo_stroke(d, "A", "L0").value();
    CHECK(canonical(d) == canonical(three_strokes()));
  }
}

TEST_SUITE("reducer properties") {
  constexpr int kCases = 1500;

  TEST_CASE("determinism, rejection no-ops, lock soundness, permutation safety, undo locality") {
    std::mt19937_64 rng(20240407);
    auto d = doc_with_layers({"L0", "L1"});
    int accepted = 0;
    int rejected = 0;
    for (int i = 0; i < kCases; ++i) {
      if (i % 300 == 0) d = doc_with_layers({"L0", "L1"});
      auto c = colier::testing::random_change(d, rng);
      const std::string before = canonical(d);

      auto r1 = apply_change(d, c);
      auto r2 = apply_change(d, c);
      REQUIRE(r1.ok() == r2.ok());
      CHECK(canonical(d) == before);
      if (!r1.ok()) {
        ++rejected;
        CHECK(r1.error() == r2.error());
        continue;
      }
      ++accepted;
      const auto& next = r1.value().doc;
      REQUIRE(canonical(next) == canonical(r2.value().doc));

      // No accepted change targets a layer exclusively held by someone else,
      // apart from the unlock escape hatch.
      if (const LayerId* target = target_layer(c.mutation)) {
        if (const Layer* l = d.find_layer(*target); l && l->exclusiveLock) {
          CHECK((l->exclusiveLock->owner == c.clientId ||
                 std::holds_alternative<op::ExclusiveUnlock>(c.mutation)));
        }
      }
      if (std::holds_alternative<op::ReorderLayer>(c.mutation)) {
        std::vector<std::string> a, b;
        for (const auto& l : d.layers) a.push_back(l.id);
        for (const auto& l : next.layers) b.push_back(l.id);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
      }
      if (std::holds_alternative<op::UndoPath>(c.mutation) || std::holds_alternative<op::RedoPath>(c.mutation)) {
        for (std::size_t li = 0; li < d.layers.size(); ++li) {
          const auto& old_strokes = d.layers[li].strokes;
          const auto& new_strokes = next.layers[li].strokes;
          REQUIRE(old_strokes.size() == new_strokes.size());
          for (std::size_t si = 0; si < old_strokes.size(); ++si) {
            if (old_strokes[si].clientId != c.clientId) CHECK(old_strokes[si] == new_strokes[si]);
          }
        }
      }
      d = next;
    }
    CHECK(accepted > 300);
    CHECK(rejected > 100);
  }
}
