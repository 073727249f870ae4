#pragma once

#include <map>
#include <vector>

#include "colier/common/result.hpp"
#include "colier/document/reducer.hpp"
#include "colier/document/types.hpp"

namespace colier::doc {

struct SequenceGap {
  Seq expected = 0;
  Seq got = 0;
  bool operator==(const SequenceGap&) const = default;
};

struct ReplayError {
  enum class Kind { SequenceGap, BeyondHead, Rejected } kind = Kind::SequenceGap;
  Seq seq = 0;
  std::string detail;
};

/// Ordered history of accepted changes, with a document snapshot every
/// `snapshot_interval` events so that any historical state is reachable in
/// at most that many reducer steps.
class VersionLog {
 public:
  static constexpr Seq kDefaultSnapshotInterval = 100;

  explicit VersionLog(Seq snapshot_interval = kDefaultSnapshotInterval);

  /// Requires event.seq == head() + 1.
  Result<Unit, SequenceGap> append(SequencedEvent event, const SessionDocument& doc_after);

  Seq head() const { return entries_.empty() ? 0 : entries_.back().seq; }
  Seq snapshot_interval() const { return interval_; }
  const std::vector<SequencedEvent>& entries() const { return entries_; }
  const std::map<Seq, SessionDocument>& snapshots() const { return snapshots_; }

 private:
  Seq interval_;
  std::vector<SequencedEvent> entries_;
  std::map<Seq, SessionDocument> snapshots_;
};

/// State after events 1..upto, starting from the closest snapshot at or
/// before `upto` (or from `initial`).
Result<SessionDocument, ReplayError> replay(const VersionLog& log, const SessionDocument& initial,
                                            Seq upto);

/// Replays without snapshots, always from `initial`. Used as the reference
/// path when checking snapshot-accelerated replay.
Result<SessionDocument, ReplayError> replay_from_scratch(const VersionLog& log,
                                                         const SessionDocument& initial, Seq upto);

}  // namespace colier::doc
