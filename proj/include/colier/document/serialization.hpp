#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "colier/common/numbers.hpp"
#include "colier/document/types.hpp"

namespace colier::doc {

/// Malformed document input. `where()` is a JSON-pointer-like path
/// ("/layers/0/opacity") or the name of the missing field.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string where, const std::string& reason)
      : std::runtime_error(where + ": " + reason), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class UnsupportedVersion : public std::runtime_error {
 public:
  explicit UnsupportedVersion(int version)
      : std::runtime_error("unsupported document version " + std::to_string(version)),
        version_(version) {}
  int version() const { return version_; }

 private:
  int version_;
};

/// Canonical JSON tree: keys in fixed declared order, reals as shortest
/// round-trip decimals.
Json document_to_json(const SessionDocument& doc);
SessionDocument document_from_json(const Json& j);

Json stroke_to_json(const Stroke& s);
Json path_to_json(const std::vector<PathCommand>& path);
/// Throws FormatError with `at` as the path prefix.
std::vector<PathCommand> path_from_json(const Json& j, const std::string& at);

/// Compact canonical bytes; the equality oracle for replicas and replay.
std::string canonical(const SessionDocument& doc);
std::string fingerprint(const SessionDocument& doc);  // hex FNV-1a of canonical()

/// document.json contents. `seq` records which log position the document
/// reflects and is written only when non-zero.
std::string save_document(const SessionDocument& doc, Seq seq = 0);

struct LoadedDocument {
  SessionDocument doc;
  Seq seq = 0;
};

/// Throws FormatError or UnsupportedVersion.
LoadedDocument load_document(std::string_view bytes);

}  // namespace colier::doc
