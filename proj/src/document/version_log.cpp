#include "colier/document/version_log.hpp"

#include <string>

namespace colier::doc {

VersionLog::VersionLog(Seq snapshot_interval)
    : interval_(snapshot_interval == 0 ? kDefaultSnapshotInterval : snapshot_interval) {}

Result<Unit, SequenceGap> VersionLog::append(SequencedEvent event, const SessionDocument& doc_after) {
  const Seq expected = head() + 1;
  if (event.seq != expected) return SequenceGap{expected, event.seq};
  const Seq seq = event.seq;
  entries_.push_back(std::move(event));
  if (seq % interval_ == 0) snapshots_.insert_or_assign(seq, doc_after);
  return Unit{};
}

namespace {

Result<SessionDocument, ReplayError> replay_range(const VersionLog& log, SessionDocument doc,
                                                  Seq from, Seq upto) {
  const auto& entries = log.entries();
  for (Seq s = from + 1; s <= upto; ++s) {
    const auto& ev = entries[s - 1];
    if (ev.seq != s) {
      return ReplayError{ReplayError::Kind::SequenceGap, s,
                         "expected seq " + std::to_string(s) + ", found " + std::to_string(ev.seq)};
    }
    auto r = apply_change_in_place(doc, ev.change);
    if (!r) return ReplayError{ReplayError::Kind::Rejected, s, std::string(r.error().reason())};
  }
  return doc;
}

}  // namespace

Result<SessionDocument, ReplayError> replay(const VersionLog& log, const SessionDocument& initial,
                                            Seq upto) {
  if (upto > log.entries().size()) {
    return ReplayError{ReplayError::Kind::BeyondHead, upto, "beyond log head"};
  }
  const auto& snaps = log.snapshots();
  auto it = snaps.upper_bound(upto);
  if (it != snaps.begin()) {
    --it;
    return replay_range(log, it->second, it->first, upto);
  }
  return replay_range(log, initial, 0, upto);
}

Result<SessionDocument, ReplayError> replay_from_scratch(const VersionLog& log,
                                                         const SessionDocument& initial, Seq upto) {
  if (upto > log.entries().size()) {
    return ReplayError{ReplayError::Kind::BeyondHead, upto, "beyond log head"};
  }
  return replay_range(log, initial, 0, upto);
}

}  // namespace colier::doc
