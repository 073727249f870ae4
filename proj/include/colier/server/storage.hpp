#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "colier/document/types.hpp"
#include "colier/document/version_log.hpp"

namespace colier::server {

/// On-disk layout of one session directory:
///   base.json        document at seq 0
///   document.json    autosaved document, with its "seq"
///   changelog.jsonl  one sequenced change frame per line, append-only
///   assets/          layer bitmaps (PNG)
class SessionStorage {
 public:
  explicit SessionStorage(std::filesystem::path dir);

  /// Lays out a fresh session directory holding `base`.
  static SessionStorage create(const std::filesystem::path& dir, const doc::SessionDocument& base);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path assets_dir() const { return dir_ / "assets"; }

  /// Appends and flushes one line. Throws std::runtime_error on I/O failure.
  void append(const doc::SequencedEvent& ev);
  void save_document(const doc::SessionDocument& doc, doc::Seq seq);

 private:
  std::filesystem::path dir_;
  std::ofstream changelog_;
};

struct LoadedSession {
  doc::SessionDocument base;
  doc::SessionDocument document;
  doc::VersionLog log;
  std::vector<std::string> warnings;
};

/// Rebuilds a session as replay(base, changelog). A torn final changelog
/// line is dropped and the file truncated to the valid prefix. Throws
/// doc::FormatError / doc::UnsupportedVersion on anything else.
LoadedSession load_session(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace colier::server
