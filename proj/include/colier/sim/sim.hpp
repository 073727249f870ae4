#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "colier/client/client.hpp"
#include "colier/common/numbers.hpp"
#include "colier/document/types.hpp"

namespace colier::sim {

using doc::Millis;
using doc::Seq;

enum class Category { Draw, LayerProp, Structure, Lock, Vca };
inline constexpr std::array<std::string_view, 5> kCategoryNames = {"draw", "layerProp", "structure", "lock", "vca"};

struct ScenarioConfig {
  int clients = 2;
  int ops = 100;  // edit intents across all clients
  Millis latencyMin = 0;
  Millis latencyMax = 0;
  std::uint64_t seed = 1;
  std::array<double, 5> conflictMix = {1, 1, 1, 1, 1};  // indexed by Category
  doc::SessionDocument sessionTemplate = default_template();
  Millis thinkMaxMs = 40;  // per-client gap between intents, uniform in [0, max]
  double wallBoundSeconds = 30;

  static doc::SessionDocument default_template(int layers = 3);
  /// Throws std::invalid_argument when the config breaks its invariants.
  void validate() const;
};

/// One scheduled edit. Targets are resolved against the issuing client's
/// local store when the intent fires, so a stale view really does produce
/// stale requests. `draws` feeds that resolution deterministically.
struct Intent {
  int client = 0;
  Millis at = 0;
  Category category = Category::Draw;
  int action = 0;  // sub-kind within the category
  std::array<double, 8> draws{};
  std::optional<doc::Mutation> scripted;  // used verbatim when present
  bool operator==(const Intent&) const = default;
};

using Schedule = std::vector<std::vector<Intent>>;  // one list per client, in time order

Schedule generate_ops(const ScenarioConfig& config);

/// Builds the mutation an intent stands for, given what the client sees.
doc::Mutation resolve_intent(const Intent& intent, const doc::SessionDocument& view);

struct ScenarioReport {
  bool converged = false;
  Seq finalSeq = 0;
  std::string serverHash;
  std::vector<std::string> perClientFinalHash;
  std::map<std::string, std::int64_t> rejectedCount;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t totalIntents = 0;
  Millis maxObservedPropagationMs = 0;
  std::int64_t orderingViolations = 0;
  std::string divergence;  // first differing path, empty when converged
  std::vector<std::vector<std::string>> clientLayerOrder;
  doc::SessionDocument finalDocument;  // the server's, not serialized in the report
  bool operator==(const ScenarioReport&) const = default;
};

Json report_to_json(const ScenarioReport& r);

class Timeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `schedule` (or generate_ops(config) when empty) on a virtual clock
/// until no message is in flight and no client has pending changes.
ScenarioReport run_scenario(const ScenarioConfig& config, const Schedule& schedule = {});

struct Convergence {
  bool converged = true;
  std::string diff;  // "client <i>: <json pointer>" for the first mismatch
};

/// Byte-compares canonical serializations of every store against the server.
Convergence check_convergence(const doc::SessionDocument& server, Seq serverSeq,
                              const std::vector<const client::LocalStore*>& stores);

/// First JSON pointer at which two documents differ; empty when equal.
std::string first_difference(const Json& a, const Json& b, const std::string& at = "");

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string document_hash(const doc::SessionDocument& d, Seq seq);

}  // namespace colier::sim
