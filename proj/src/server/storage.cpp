#include "colier/server/storage.hpp"

#include <iterator>
#include <sstream>
#include <system_error>

#include "colier/document/serialization.hpp"
#include "colier/protocol/codec.hpp"

namespace colier::server {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())) || !out.flush()) {
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, path);
}

SessionStorage::SessionStorage(fs::path dir) : dir_(std::move(dir)) {
  changelog_.open(dir_ / "changelog.jsonl", std::ios::binary | std::ios::app);
  if (!changelog_) throw std::runtime_error((dir_ / "changelog.jsonl").string() + ": cannot open");
}

SessionStorage SessionStorage::create(const fs::path& dir, const doc::SessionDocument& base) {
  fs::create_directories(dir / "assets");
  const std::string bytes = doc::save_document(base);
  write_file_atomic(dir / "base.json", bytes);
  write_file_atomic(dir / "document.json", bytes);
  return SessionStorage(dir);
}

void SessionStorage::append(const doc::SequencedEvent& ev) {
  changelog_ << proto::encode_message(proto::sequenced(ev)) << '\n';
  changelog_.flush();
  if (!changelog_) throw std::runtime_error((dir_ / "changelog.jsonl").string() + ": append failed");
}

void SessionStorage::save_document(const doc::SessionDocument& doc, doc::Seq seq) {
  write_file_atomic(dir_ / "document.json", doc::save_document(doc, seq));
}

LoadedSession load_session(const fs::path& dir) {
  LoadedSession out;
  const fs::path base_path = dir / "base.json", doc_path = dir / "document.json";
  std::optional<doc::LoadedDocument> saved;
  if (fs::exists(doc_path)) saved = doc::load_document(read_file(doc_path));

  if (fs::exists(base_path)) {
    auto base = doc::load_document(read_file(base_path));
    if (base.seq != 0) throw doc::FormatError("base.json", "base document must be at seq 0");
    out.base = std::move(base.doc);
  } else if (saved && saved->seq == 0) {
    // Hand-made session: the document itself is the starting point.
    out.base = saved->doc;
    write_file_atomic(base_path, doc::save_document(out.base));
  } else {
    throw doc::FormatError("base.json", "missing");
  }

  out.document = out.base;
  const fs::path log_path = dir / "changelog.jsonl";
  if (fs::exists(log_path)) {
    const std::string text = read_file(log_path);
    std::size_t pos = 0, valid_end = 0;
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const bool last = nl == std::string::npos;
      const std::string_view line(text.data() + pos, (last ? text.size() : nl) - pos);
      const doc::Seq expect = out.log.head() + 1;
      auto decoded = proto::decode_message(line);
      const auto* change = decoded.ok() ? std::get_if<doc::ChangeMessage>(&decoded.value().body) : nullptr;
      if (!change || !decoded.value().seq) {
        // An interrupted append leaves at most one partial line at the end.
        if (last || text.find_first_not_of(" \r\n\t", nl) == std::string::npos) {
          out.warnings.push_back("changelog: dropped torn entry after seq " + std::to_string(out.log.head()));
          break;
        }
        throw doc::FormatError("changelog.jsonl:" + std::to_string(expect), "undecodable entry");
      }
      if (*decoded.value().seq != expect) {
        throw doc::FormatError("changelog.jsonl:" + std::to_string(expect),
                               "sequence gap, found " + std::to_string(*decoded.value().seq));
      }
      if (auto r = doc::apply_change_in_place(out.document, *change); !r.ok()) {
        throw doc::FormatError("changelog.jsonl:" + std::to_string(expect),
                               "entry does not apply: " + std::string(r.error().reason()));
      }
      (void)out.log.append({expect, *change}, out.document);
      pos = last ? text.size() : nl + 1;
      valid_end = pos;
    }
    if (valid_end < text.size()) write_file_atomic(log_path, std::string_view(text).substr(0, valid_end));
  }

  if (saved && saved->seq > out.log.head()) {
    throw doc::FormatError("document.json", "seq " + std::to_string(saved->seq) + " is beyond the changelog head " +
                                                std::to_string(out.log.head()));
  }
  fs::create_directories(dir / "assets");
  return out;
}

}  // namespace colier::server
