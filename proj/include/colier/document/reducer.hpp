#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "colier/common/result.hpp"
#include "colier/document/types.hpp"

namespace colier::doc {

enum class RejectCode {
  StaleTarget,
  PermissionDenied,
  InvalidValue,
  MalformedPayload,
  NothingToUndo,
  NothingToRedo,
};

enum class DenyReason { None, ExclusiveLock, Locked, TransformLease };

struct Reject {
  RejectCode code = RejectCode::MalformedPayload;
  DenyReason deny = DenyReason::None;
  std::string detail;

  /// Stable reason token used on the wire and in reports. Permission denials
  /// report their specific cause ("ExclusiveLock", "Locked", "TransformLease").
  std::string_view reason() const;
  bool operator==(const Reject&) const = default;
};

std::optional<Reject> reject_from_reason(std::string_view reason, std::string detail = {});

/// Summary of an applied change, for observers and the sequencer.
struct DomainEvent {
  std::string_view action;
  LayerId layerId;
  std::string createdId;  // id minted by addLayer / newPath / addVca
  std::optional<ClientId> notifyOwner;  // exclusiveUnlock by a non-owner
};

struct TransformLease {
  ClientId holder;
  Millis expiresAt = 0;
  bool operator==(const TransformLease&) const = default;
};

/// Short-lived implicit locks on layer transforms. At most one lease per
/// layer; a lease whose expiry has passed counts as absent.
class TransformLeaseTable {
 public:
  static constexpr Millis kTtlMs = 30'000;

  std::optional<ClientId> holder(std::string_view layer, Millis now) const;
  /// Grants or refreshes the lease for `client`. Fails if another client
  /// holds an unexpired lease.
  bool acquire(const LayerId& layer, const ClientId& client, Millis now);
  void release(std::string_view layer, std::string_view client);
  void release_all(std::string_view client);
  void erase_expired(Millis now);
  void erase_layer(std::string_view layer);

  const std::map<LayerId, TransformLease, std::less<>>& entries() const { return leases_; }

 private:
  std::map<LayerId, TransformLease, std::less<>> leases_;
};

struct Permission {
  bool allowed = true;
  DenyReason reason = DenyReason::None;
  std::optional<ClientId> notifyOwner;
};

/// Lock rules for `change` against its (existing) target layer.
Permission check_permission(const SessionDocument& doc, const ChangeMessage& change,
                            const TransformLeaseTable& leases, Millis now);

/// Applies `change` to `doc`. All checks run before any write, so on
/// rejection `doc` is left untouched. Lease rules are not consulted here;
/// the sequencer checks them before calling in.
Result<DomainEvent, Reject> apply_change_in_place(SessionDocument& doc, const ChangeMessage& change);

struct Applied {
  SessionDocument doc;
  DomainEvent event;
};

/// Pure form of apply_change_in_place.
Result<Applied, Reject> apply_change(const SessionDocument& doc, const ChangeMessage& change);

Result<SessionDocument, Reject> undo_stroke(const SessionDocument& doc, std::string_view client,
                                            std::string_view layer);
Result<SessionDocument, Reject> redo_stroke(const SessionDocument& doc, std::string_view client,
                                            std::string_view layer);

/// Server identifier for the n-th minted object: prefix plus a zero-padded
/// counter, so ids sort lexically in creation order.
std::string make_id(char prefix, std::uint64_t n);

}  // namespace colier::doc
