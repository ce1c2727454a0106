#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>

#include "dvault/cipher.hpp"
#include "dvault/errors.hpp"
#include "dvault/hash.hpp"
#include "dvault/registry.hpp"
#include "dvault/rng.hpp"

namespace dvault {

enum class BackendKind { LocalDirectory, HttpObjectStore };

/// One storage provider. Local directories stand in for providers in
/// hermetic setups; the HTTP kind speaks a minimal object protocol
/// (PUT/GET/HEAD on /{bucket}/{object_id}, optional bearer token).
struct BackendDescriptor {
  std::string cloud_id;
  BackendKind kind = BackendKind::LocalDirectory;
  std::string location;  // directory path or base URL
  std::string bucket;    // http only
  std::string auth_env;  // env var holding the bearer token, http only
};

/// Config file: one backend per line, `cloud_id kind location [bucket]
/// [auth_env]`; blank lines and '#' comments ignored.
inline std::vector<BackendDescriptor> parse_cloud_config(
    std::string_view text) {
  std::vector<BackendDescriptor> backends;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    BackendDescriptor b;
    std::string kind;
    if (!(fields >> b.cloud_id >> kind >> b.location))
      throw ConfigError("bad backend line: " + line);
    if (kind == "local-directory") {
      b.kind = BackendKind::LocalDirectory;
      std::string extra;
      if (fields >> extra)
        throw ConfigError("local-directory takes no bucket: " + line);
    } else if (kind == "http-object-store") {
      b.kind = BackendKind::HttpObjectStore;
      if (!(fields >> b.bucket))
        throw ConfigError("http-object-store needs a bucket: " + line);
      fields >> b.auth_env;  // optional
    } else {
      throw ConfigError("unknown backend kind: " + kind);
    }
    for (const auto& existing : backends)
      if (existing.cloud_id == b.cloud_id)
        throw ConfigError("duplicate cloud_id: " + b.cloud_id);
    backends.push_back(std::move(b));
  }
  return backends;
}

inline std::vector<BackendDescriptor> load_cloud_config(
    const std::filesystem::path& path) {
  return parse_cloud_config(detail::read_text_file(path));
}

namespace detail {

inline void check_object_id(std::string_view object_id) {
  if (object_id.empty() || object_id == "." || object_id == "..")
    throw InvalidArgument("bad object id");
  for (char c : object_id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' &&
        c != '_' && c != '-')
      throw InvalidArgument("object id must be [A-Za-z0-9._-]+");
}

inline httplib::Headers http_headers(const BackendDescriptor& b) {
  httplib::Headers headers;
  if (!b.auth_env.empty()) {
    if (const char* token = std::getenv(b.auth_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  return headers;
}

inline httplib::Client http_client(const BackendDescriptor& b) {
  httplib::Client cli(b.location);
  cli.set_connection_timeout(5, 0);
  cli.set_read_timeout(30, 0);
  cli.set_write_timeout(30, 0);
  return cli;
}

inline std::string http_path(const BackendDescriptor& b,
                             std::string_view object_id) {
  return "/" + b.bucket + "/" + std::string(object_id);
}

}  // namespace detail

/// Durable store of opaque bytes under object_id. Throws Unavailable when
/// the backend cannot be reached or written.
inline void backend_put(const BackendDescriptor& b, std::string_view object_id,
                        std::span<const std::uint8_t> bytes) {
  detail::check_object_id(object_id);
  if (b.kind == BackendKind::LocalDirectory) {
    std::error_code ec;
    std::filesystem::create_directories(b.location, ec);
    const auto target = std::filesystem::path(b.location) / object_id;
    const auto tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Unavailable("cannot write to " + b.location);
      out.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Unavailable("write failed under " + b.location);
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw Unavailable("rename failed under " + b.location);
    return;
  }
  auto cli = detail::http_client(b);
  auto res = cli.Put(detail::http_path(b, object_id),
                     detail::http_headers(b),
                     reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                     "application/octet-stream");
  if (!res) throw Unavailable(b.cloud_id + ": " + to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Unavailable(b.cloud_id + ": PUT returned " +
                      std::to_string(res->status));
}

/// Fetch exactly the bytes previously put. NotFound for unknown ids,
/// Unavailable for transport failures.
inline std::vector<std::uint8_t> backend_get(const BackendDescriptor& b,
                                             std::string_view object_id) {
  detail::check_object_id(object_id);
  if (b.kind == BackendKind::LocalDirectory) {
    const auto target = std::filesystem::path(b.location) / object_id;
    if (!std::filesystem::exists(target))
      throw NotFound(std::string(object_id) + " not in " + b.cloud_id);
    std::ifstream in(target, std::ios::binary);
    if (!in) throw Unavailable("cannot open " + target.string());
    std::vector<std::uint8_t> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Unavailable("read failed on " + target.string());
    return bytes;
  }
  auto cli = detail::http_client(b);
  auto res = cli.Get(detail::http_path(b, object_id), detail::http_headers(b));
  if (!res) throw Unavailable(b.cloud_id + ": " + to_string(res.error()));
  if (res->status == 404)
    throw NotFound(std::string(object_id) + " not in " + b.cloud_id);
  if (res->status < 200 || res->status >= 300)
    throw Unavailable(b.cloud_id + ": GET returned " +
                      std::to_string(res->status));
  return std::vector<std::uint8_t>(res->body.begin(), res->body.end());
}

inline bool backend_exists(const BackendDescriptor& b,
                           std::string_view object_id) {
  detail::check_object_id(object_id);
  if (b.kind == BackendKind::LocalDirectory)
    return std::filesystem::exists(std::filesystem::path(b.location) /
                                   object_id);
  auto cli = detail::http_client(b);
  auto res = cli.Head(detail::http_path(b, object_id),
                      detail::http_headers(b));
  if (!res) throw Unavailable(b.cloud_id + ": " + to_string(res.error()));
  if (res->status == 404) return false;
  if (res->status < 200 || res->status >= 300)
    throw Unavailable(b.cloud_id + ": HEAD returned " +
                      std::to_string(res->status));
  return true;
}

// ---------------------------------------------------------------------------
// Replicated store / retrieve
// ---------------------------------------------------------------------------

struct ReplicaRecord {
  std::string cloud_id;
  std::string object_id;  // hex sha256 of the container bytes
  std::uint16_t key_id = 0;
  std::uint8_t pattern = 0;
  std::string container_sha256;
};

/// The retrieval root, kept client-side. Records where every independently
/// encrypted replica of one image lives and the plaintext hash that each
/// decryption must reproduce.
struct StoreManifest {
  std::string image_name;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::string plaintext_sha256;
  std::vector<ReplicaRecord> replicas;
};

inline constexpr std::string_view kManifestMagic = "DVMF1";

/// Tab-separated text: a header line
/// `DVMF1 <image_name> <width> <height> <plaintext_sha256>` followed by one
/// `<cloud_id> <object_id> <key_id> <pattern> <container_sha256>` per replica.
inline std::string serialize_manifest(const StoreManifest& m) {
  if (m.replicas.empty()) throw ConfigError("manifest needs >= 1 replica");
  if (m.image_name.find_first_of("\t\n") != std::string::npos)
    throw ConfigError("image name must not contain tabs or newlines");
  std::ostringstream out;
  out << kManifestMagic << '\t' << m.image_name << '\t' << m.width << '\t'
      << m.height << '\t' << m.plaintext_sha256 << '\n';
  for (const auto& r : m.replicas)
    out << r.cloud_id << '\t' << r.object_id << '\t' << r.key_id << '\t'
        << int(r.pattern) << '\t' << r.container_sha256 << '\n';
  return out.str();
}

inline StoreManifest parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty manifest");
  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = s.find('\t', start);
      fields.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (!fields.empty() && !fields.back().empty() &&
        fields.back().back() == '\r')
      fields.back().pop_back();
    return fields;
  };

  auto header = split(line);
  if (header.size() != 5 || header[0] != kManifestMagic)
    throw ConfigError("bad manifest header");
  StoreManifest m;
  try {
    m.image_name = header[1];
    m.width = static_cast<std::uint32_t>(std::stoul(header[2]));
    m.height = static_cast<std::uint32_t>(std::stoul(header[3]));
    m.plaintext_sha256 = header[4];
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = split(line);
      if (fields.size() != 5)
        throw ConfigError("bad replica line: " + line);
      ReplicaRecord r;
      r.cloud_id = fields[0];
      r.object_id = fields[1];
      const unsigned long key_id = std::stoul(fields[2]);
      const unsigned long pattern = std::stoul(fields[3]);
      if (key_id > kMaxKeyId || pattern >= kPatternCount)
        throw ConfigError("replica metadata out of range: " + line);
      r.key_id = static_cast<std::uint16_t>(key_id);
      r.pattern = static_cast<std::uint8_t>(pattern);
      r.container_sha256 = fields[4];
      m.replicas.push_back(std::move(r));
    }
  } catch (const std::logic_error&) {  // stoul
    throw ConfigError("bad number in manifest");
  }
  if (m.replicas.empty()) throw ConfigError("manifest lists no replicas");
  return m;
}

/// Encrypt the image once per cloud, each replica with an independently
/// drawn (key, pattern, seed), and upload. Containers are content-addressed
/// by their sha256, so repeated puts of identical bytes are harmless.
/// Backends that fail are skipped; at least one replica must survive.
template <RandomSource R>
StoreManifest store_replicated(std::span<const std::uint8_t> pixels,
                               std::uint32_t width, std::uint32_t height,
                               const std::vector<BackendDescriptor>& clouds,
                               const KeyRegistry& registry, R& rng,
                               const EncryptOptions& base_opts = {},
                               std::string image_name = "image") {
  if (clouds.empty()) throw ConfigError("no clouds configured");
  const auto complete = registry.complete_key_ids();
  if (complete.empty())
    throw RegistryError("registry has no complete key");

  StoreManifest manifest;
  manifest.image_name = std::move(image_name);
  manifest.width = width;
  manifest.height = height;
  manifest.plaintext_sha256 = sha256_hex(pixels);

  std::string failures;
  for (const auto& cloud : clouds) {
    const std::uint16_t key_id =
        complete[bounded(rng, complete.size())];
    const PatternId pattern{std::uint8_t(bounded(rng, kPatternCount))};
    EncryptOptions opts = base_opts;
    opts.seed = rng.next_u64();
    try {
      const CipherContainer container = encrypt(
          pixels, width, height, registry.index(key_id), pattern, rng, opts);
      const auto bytes = serialize(container);
      const std::string digest = sha256_hex(bytes);
      backend_put(cloud, digest, bytes);
      manifest.replicas.push_back(
          {cloud.cloud_id, digest, key_id, pattern.id, digest});
    } catch (const Unavailable& e) {
      failures += failures.empty() ? e.what() : std::string("; ") + e.what();
    }
  }
  if (manifest.replicas.empty())
    throw AllBackendsFailed("no replica stored: " + failures);
  return manifest;
}

/// Try the replicas in manifest order; the first one that downloads,
/// deserializes, decrypts and matches the manifest's plaintext hash wins.
inline std::vector<std::uint8_t> retrieve(
    const StoreManifest& manifest,
    const std::vector<BackendDescriptor>& clouds,
    const KeyRegistry& registry) {
  if (clouds.empty()) throw ConfigError("no clouds configured");
  if (manifest.replicas.empty())
    throw ConfigError("manifest lists no replicas");
  bool any_reachable = false;
  std::string failures;
  for (const auto& replica : manifest.replicas) {
    const BackendDescriptor* cloud = nullptr;
    for (const auto& b : clouds)
      if (b.cloud_id == replica.cloud_id) cloud = &b;
    if (!cloud) {
      failures += replica.cloud_id + " not configured; ";
      continue;
    }
    std::vector<std::uint8_t> bytes;
    try {
      bytes = backend_get(*cloud, replica.object_id);
    } catch (const Error& e) {  // NotFound or Unavailable
      failures += std::string(e.what()) + "; ";
      continue;
    }
    any_reachable = true;
    try {
      const auto pixels = decrypt(deserialize(bytes), registry);
      if (sha256_hex(pixels) != manifest.plaintext_sha256)
        throw ChecksumMismatch("plaintext hash mismatch");
      return pixels;
    } catch (const Error& e) {
      failures += replica.cloud_id + ": " + e.what() + "; ";
    }
  }
  if (any_reachable)
    throw IntegrityFailure("every reachable replica failed: " + failures);
  throw AllReplicasUnavailable("no replica reachable: " + failures);
}

}  // namespace dvault
