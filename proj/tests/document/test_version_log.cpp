#include <random>

#include "colier/document/serialization.hpp"
#include "colier/document/version_log.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace colier;
using namespace colier::doc;
using colier::testing::change;

namespace {

SequencedEvent event(Seq seq) { return {seq, change("a", op::AddLayer{})}; }

// Live document maintained next to the log, as a sequencer would.
struct Run {
  SessionDocument initial = colier::testing::doc_with_layers({"L0"});
  SessionDocument live = initial;
  VersionLog log;
  std::vector<std::string> history{canonical(initial)};  // history[k] = state at seq k

  void drive(std::mt19937_64& rng, int attempts) {
    for (int i = 0; i < attempts; ++i) {
      auto c = colier::testing::random_change(live, rng);
      auto r = apply_change_in_place(live, c);
      if (!r) continue;
      REQUIRE(log.append({log.head() + 1, c}, live).ok());
      history.push_back(canonical(live));
    }
  }
};

}  // namespace

TEST_CASE("append_log keeps seq contiguous and snapshots on the interval") {
  VersionLog log;
  auto d = make_document("x", 10, 10);
  REQUIRE(log.append(event(1), d).ok());
  CHECK(log.entries().size() == 1);
  CHECK(log.snapshots().empty());

  for (Seq s = 2; s <= 99; ++s) REQUIRE(log.append(event(s), d).ok());
  CHECK(log.snapshots().empty());
  REQUIRE(log.append(event(100), d).ok());
  CHECK(log.snapshots().count(100) == 1);
  CHECK(log.snapshots().size() == 1);
}

TEST_CASE("append_log reports a gap") {
  VersionLog log;
  auto d = make_document("x", 10, 10);
  for (Seq s = 1; s <= 5; ++s) REQUIRE(log.append(event(s), d).ok());
  auto r = log.append(event(7), d);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error() == SequenceGap{6, 7});
  CHECK(log.head() == 5);
}

TEST_CASE("replay to zero returns the initial document") {
  VersionLog log;
  auto initial = colier::testing::doc_with_layers({"L0"});
  auto r = replay(log, initial, 0);
  REQUIRE(r.ok());
  CHECK(r.value() == initial);
  CHECK(replay(log, initial, 1).error().kind == ReplayError::Kind::BeyondHead);
}

TEST_CASE("replay reproduces every historical state of a randomized run") {
  std::mt19937_64 rng(7);
  Run run;
  run.drive(rng, 900);
  REQUIRE(run.log.head() > 150);
  CHECK(run.log.snapshots().size() == run.log.head() / 100);

  for (Seq k = 0; k <= run.log.head(); ++k) {
    auto r = replay(run.log, run.initial, k);
    REQUIRE(r.ok());
    REQUIRE(canonical(r.value()) == run.history[k]);
  }
  auto last = replay(run.log, run.initial, run.log.head());
  CHECK(canonical(last.value()) == canonical(run.live));
}

TEST_CASE("snapshot-accelerated replay equals replay from scratch") {
  std::mt19937_64 rng(99);
  Run run;
  run.drive(rng, 700);
  REQUIRE(run.log.head() >= 150);
  auto fast = replay(run.log, run.initial, 150);
  auto slow = replay_from_scratch(run.log, run.initial, 150);
  REQUIRE(fast.ok());
  REQUIRE(slow.ok());
  CHECK(canonical(fast.value()) == canonical(slow.value()));
}

TEST_CASE("replay equivalence holds across 1000 independent short runs") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    Run run;
    run.drive(rng, 12);
    auto r = replay(run.log, run.initial, run.log.head());
    REQUIRE(r.ok());
    REQUIRE(canonical(r.value()) == canonical(run.live));
  }
}
