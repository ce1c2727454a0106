#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dvault/errors.hpp"
#include "dvault/hash.hpp"
#include "dvault/keystore.hpp"

namespace dvault {

inline constexpr std::string_view kRegistryManifestName = "keys.manifest";

struct KeyEntry {
  std::uint16_t key_id = 0;
  std::string filename;
  std::string sha256_hex;  // hash of the cleaned bases, not the raw file
};

namespace detail {
inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path.string());
  return std::move(ss).str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed on " + path.string());
}
}  // namespace detail

/// A directory of FASTA key files plus a sidecar manifest assigning stable
/// key ids. Ciphertext metadata references the id, never the filename.
///
/// Manifest line format: "<key_id> <filename> <sha256-of-bases>".
class KeyRegistry {
 public:
  explicit KeyRegistry(std::filesystem::path dir) : dir_(std::move(dir)) {
    const auto manifest = dir_ / kRegistryManifestName;
    if (!std::filesystem::exists(manifest)) return;
    std::istringstream in(detail::read_text_file(manifest));
    std::string line;
    std::set<std::uint16_t> seen;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream fields(line);
      long id = -1;
      KeyEntry entry;
      if (!(fields >> id >> entry.filename >> entry.sha256_hex))
        throw RegistryError("bad manifest line: " + line);
      if (id < 0 || id > kMaxKeyId)
        throw RegistryError("key_id out of range: " + std::to_string(id));
      entry.key_id = static_cast<std::uint16_t>(id);
      if (!seen.insert(entry.key_id).second)
        throw RegistryError("duplicate key_id " + std::to_string(id));
      entries_.push_back(std::move(entry));
    }
  }

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<KeyEntry>& entries() const { return entries_; }

  bool contains(std::uint16_t key_id) const {
    return find(key_id) != nullptr;
  }

  /// Ingest a FASTA file, copy it into the registry directory, and record it
  /// under the next free id. Returns the assigned id.
  std::uint16_t add_key(const std::filesystem::path& fasta) {
    const auto text = detail::read_text_file(fasta);
    auto key = ingest_fasta(text, fasta.filename().string());
    std::uint16_t next = 0;
    for (const auto& e : entries_)
      next = std::max<std::uint16_t>(next, e.key_id + 1);
    if (next > kMaxKeyId) throw RegistryError("registry full (4096 keys)");

    std::filesystem::create_directories(dir_);
    std::string filename = fasta.filename().string();
    std::error_code ec;
    const bool already_here =
        std::filesystem::exists(dir_ / filename) &&
        std::filesystem::equivalent(fasta, dir_ / filename, ec) && !ec;
    if (std::filesystem::exists(dir_ / filename) && !already_here)
      filename = std::to_string(next) + "_" + filename;
    if (!already_here)
      std::filesystem::copy_file(
          fasta, dir_ / filename,
          std::filesystem::copy_options::overwrite_existing);

    entries_.push_back({next, filename, sha256_hex(key.bases)});
    rewrite_manifest();
    return next;
  }

  KeySequence load(std::uint16_t key_id) const {
    const KeyEntry* entry = find(key_id);
    if (!entry)
      throw UnknownKey("key_id " + std::to_string(key_id) +
                       " not present in registry " + dir_.string());
    auto key = ingest_fasta(detail::read_text_file(dir_ / entry->filename),
                            entry->filename, key_id);
    if (sha256_hex(key.bases) != entry->sha256_hex)
      throw RegistryError("key " + std::to_string(key_id) + " (" +
                          entry->filename + ") does not match recorded hash");
    return key;
  }

  /// Build (and cache) the position index for a key.
  const KeyIndex& index(std::uint16_t key_id) const {
    auto it = cache_.find(key_id);
    if (it == cache_.end())
      it = cache_.emplace(key_id, KeyIndex(load(key_id))).first;
    return it->second;
  }

  /// Ids of keys in which all 256 quadruples occur.
  std::vector<std::uint16_t> complete_key_ids() const {
    std::vector<std::uint16_t> out;
    for (const auto& e : entries_)
      if (validate_key(index(e.key_id)).complete) out.push_back(e.key_id);
    return out;
  }

 private:
  const KeyEntry* find(std::uint16_t key_id) const {
    for (const auto& e : entries_)
      if (e.key_id == key_id) return &e;
    return nullptr;
  }

  void rewrite_manifest() const {
    std::ostringstream out;
    for (const auto& e : entries_)
      out << e.key_id << ' ' << e.filename << ' ' << e.sha256_hex << '\n';
    detail::write_text_file(dir_ / kRegistryManifestName, out.str());
  }

  std::filesystem::path dir_;
  std::vector<KeyEntry> entries_;
  mutable std::map<std::uint16_t, KeyIndex> cache_;
};

}  // namespace dvault
