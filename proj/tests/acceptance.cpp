// Acceptance suite: one line per criterion, FAIL details inline.
// Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dvault/dvault.hpp"
#include "test_support.hpp"

using namespace dvault;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& message) {
    if (condition) return;
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += message;
  }
  void note(const std::string& message) {
    if (!detail.empty()) detail += "; ";
    detail += message;
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit_s,
               const std::function<void(Checker&)>& body) {
  Checker check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("unexpected exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (time_limit_s > 0)
    check.expect(elapsed < time_limit_s,
                 "took " + std::to_string(elapsed) + " s, limit " +
                     std::to_string(time_limit_s) + " s");
  if (!check.ok) ++failures;
  std::printf("%s  criterion %2d: %s (%.2f s)%s%s\n",
              check.ok ? "PASS" : "FAIL", id, title.c_str(), elapsed,
              check.detail.empty() ? "" : " -- ", check.detail.c_str());
  std::fflush(stdout);
}

KeyIndex make_index(std::mt19937_64& rng, std::size_t bases,
                    std::uint16_t id = 0) {
  return KeyIndex(KeySequence{id, testsupport::random_bases(rng, bases), "acc"});
}

bool grid_is_magic(const MagicGrid& grid, std::uint32_t expected_sum) {
  const std::uint32_t n = grid.n;
  std::vector<bool> seen(n * n + 1, false);
  for (auto v : grid.cells) {
    if (v < 1 || v > n * n || seen[v]) return false;
    seen[v] = true;
  }
  std::uint32_t d0 = 0, d1 = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t row = 0, col = 0;
    for (std::uint32_t j = 0; j < n; ++j) {
      row += grid.at(i, j);
      col += grid.at(j, i);
    }
    if (row != expected_sum || col != expected_sum) return false;
    d0 += grid.at(i, i);
    d1 += grid.at(i, n - 1 - i);
  }
  return d0 == expected_sum && d1 == expected_sum;
}

// --- criteria ---------------------------------------------------------------

void criterion_roundtrip(Checker& check) {
  std::mt19937_64 rng(1001);
  const KeyIndex index = make_index(rng, 200000);
  check.expect(validate_key(index).complete, "key unexpectedly incomplete");

  const std::pair<std::uint32_t, std::uint32_t> sizes[] = {
      {8, 8}, {64, 64}, {128, 96}};
  SplitMix64 enc_rng(5);
  std::set<int> patterns_seen;
  for (int i = 0; i < 50; ++i) {
    const auto [w, h] = sizes[i % 3];
    const PatternId pattern{std::uint8_t(i % kPatternCount)};
    patterns_seen.insert(pattern.id);
    EncryptOptions opts;
    opts.corner_embed = (i / kPatternCount) % 2 == 0;
    const auto pixels = testsupport::random_pixels(rng, std::size_t(w) * h);
    const auto container = encrypt(std::span<const std::uint8_t>(pixels), w, h,
                                   index, pattern, enc_rng, opts);
    const auto back = decrypt_with_index(container, index);
    if (back != pixels) {
      check.expect(false,
                   "roundtrip mismatch at iteration " + std::to_string(i));
      return;
    }
  }
  check.expect(patterns_seen.size() == kPatternCount,
               "not all 16 patterns exercised");
}

void criterion_magic(Checker& check) {
  const MagicGrid base = magic_square(8);
  const std::vector<std::uint32_t> row0 = {1, 63, 62, 4, 5, 59, 58, 8};
  check.expect(std::equal(row0.begin(), row0.end(), base.cells.begin()),
               "base grid row 0 differs from the reference");
  for (int k = 0; k < 8; ++k)
    check.expect(grid_is_magic(magic_variant(base, k), 260),
                 "variant " + std::to_string(k) + " is not magic");
}

void criterion_zigzag(Checker& check) {
  const std::vector<std::uint32_t> jpeg = {0, 1, 4, 8,  5,  2,  3,  6,
                                           9, 12, 13, 10, 7, 11, 14, 15};
  check.expect(zigzag_order(4, 0).visit == jpeg,
               "variant 0 deviates from the JPEG order");
  for (std::uint32_t n : {4u, 8u}) {
    for (int v = 0; v < 8; ++v) {
      const auto visit = zigzag_order(n, v).visit;
      std::set<std::uint32_t> s(visit.begin(), visit.end());
      check.expect(visit.size() == n * n && s.size() == n * n &&
                       *s.rbegin() == n * n - 1,
                   "variant " + std::to_string(v) + " at n=" +
                       std::to_string(n) + " is not a bijection");
    }
  }
}

void criterion_correlation(Checker& check) {
  std::mt19937_64 rng(1004);
  const KeyIndex index = make_index(rng, 1000000);  // 1-Mbase random key
  const auto plain = testsupport::gradient_image(64, 64);
  const double r_plain =
      correlation(plain, 64, 64, Direction::Horizontal).r;
  check.expect(r_plain >= 0.9, "plaintext horizontal r < 0.9");

  SplitMix64 enc_rng(9);
  EncryptOptions opts;  // defaults: 4-byte pointers
  opts.seed = 424242;
  const auto container = encrypt(std::span<const std::uint8_t>(plain), 64, 64,
                                 index, PatternId{6}, enc_rng, opts);
  const auto rendered = render_cipher_image(container);
  std::ostringstream measured;
  for (auto d : {Direction::Horizontal, Direction::Vertical,
                 Direction::Diagonal}) {
    const double r =
        correlation(rendered.bytes, rendered.width, rendered.height, d).r;
    measured << to_string(d) << " r=" << r << " ";
    check.expect(std::abs(r) < 0.05,
                 std::string("|r| >= 0.05 along ") + to_string(d) + " (r=" +
                     std::to_string(r) +
                     "; columns of constant/low-entropy high pointer bytes "
                     "correlate vertically when the key does not fill the "
                     "pointer width, see README Limitations)");
  }
  check.note("measured: " + measured.str());
}

void criterion_scramble_inverse(Checker& check) {
  std::mt19937_64 rng(1005);
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t w = 1 + rng() % 40, h = 1 + rng() % 40;
    std::vector<std::uint16_t> cells(std::size_t(w) * h);
    for (auto& c : cells) c = std::uint16_t(rng());
    const PatternId pattern{std::uint8_t(i % kPatternCount)};
    const auto forward =
        scramble_cells(std::span<const std::uint16_t>(cells), w, h, pattern);
    if (descramble_cells(std::span<const std::uint16_t>(forward), w, h,
                         pattern) != cells) {
      check.expect(false, "inverse failed at iteration " + std::to_string(i));
      return;
    }
  }
}

void criterion_keystore_oracles(Checker& check) {
  std::mt19937_64 rng(1006);
  for (int i = 0; i < 1000; ++i) {
    const std::string bases = testsupport::random_bases(rng, 4 + rng() % 300);
    const KeyIndex index(KeySequence{0, bases, "acc"});
    const auto quad = Quadruple::from_byte(std::uint8_t(rng()));
    const auto start = std::uint32_t(rng() % bases.size());

    bool naive = false;
    for (std::size_t p = start; p + 4 <= bases.size(); ++p)
      if (bases.compare(p, 4, quad.str()) == 0) { naive = true; break; }
    if (detect(index, quad, start) != naive) {
      check.expect(false, "detect disagrees with the naive scan at iteration " +
                              std::to_string(i));
      return;
    }

    if (!index.positions(quad).empty()) {
      std::set<std::uint32_t> candidates;
      for (std::size_t p = 0; p + 4 <= bases.size(); ++p)
        if (bases.compare(p, 4, quad.str()) == 0)
          candidates.insert(std::uint32_t(p));
      SplitMix64 sel(i);
      if (!candidates.count(crypt_select(index, quad, sel).offset)) {
        check.expect(false, "crypt_select left the brute-force candidate set");
        return;
      }
    }
  }

  const KeyIndex big = make_index(rng, 5000);
  SplitMix64 sel(77);
  int draws = 0;
  while (draws < 10000) {
    const auto quad = Quadruple::from_byte(std::uint8_t(rng()));
    if (big.positions(quad).empty()) continue;
    ++draws;
    if (big.quad_at(crypt_select(big, quad, sel).offset) != quad) {
      check.expect(false, "selected pointer dereferenced to a different quad");
      return;
    }
  }
}

void criterion_avalanche(Checker& check) {
  std::mt19937_64 rng(1007);
  const KeyIndex index = make_index(rng, 1000000);
  check.expect(index.min_multiplicity() >= 100, "min multiplicity < 100");
  const auto pixels = testsupport::random_pixels(rng, 64 * 64);

  for (std::uint64_t bit : {0ull, 8ull * 64 * 32 + 3, 8ull * 64 * 64 - 1}) {
    const auto local =
        avalanche(pixels, 64, 64, bit, index, PatternId{3}, 500, 500);
    const double cells = local.cell_change_ratio * 64 * 64;
    check.expect(cells >= 1.0 && cells <= 2.0,
                 "equal-seed flip changed " + std::to_string(cells) +
                     " cells at bit " + std::to_string(bit));
  }

  const auto global =
      avalanche(pixels, 64, 64, 0, index, PatternId{3}, 500, 501);
  check.expect(global.cell_change_ratio >= 0.99,
               "independent-seed change ratio " +
                   std::to_string(global.cell_change_ratio) + " < 0.99");
}

void criterion_corner_metadata(Checker& check) {
  std::mt19937_64 rng(1008);
  testsupport::TempDir dir;
  const std::string bases = testsupport::random_bases(rng, 120000);
  testsupport::write_file(dir / "k.fa", bases);
  const std::string digest = sha256_hex(bases);

  std::set<std::uint16_t> ids;
  while (ids.size() < 200) ids.insert(std::uint16_t(rng() % 4096));
  std::string manifest;
  for (auto id : ids)
    manifest += std::to_string(id) + " k.fa " + digest + "\n";
  testsupport::write_file(dir / std::string(kRegistryManifestName), manifest);
  const KeyRegistry registry(dir.path());

  SplitMix64 enc_rng(21);
  int i = 0;
  for (auto id : ids) {
    const PatternId pattern{std::uint8_t(i++ % kPatternCount)};
    const auto pixels = testsupport::random_pixels(rng, 8 * 8);
    const auto container = encrypt(std::span<const std::uint8_t>(pixels), 8, 8,
                                   registry.index(id), pattern, enc_rng);
    if (!container.corner_embedded || container.pattern != kPatternSentinel ||
        container.key_id != kKeyIdSentinel) {
      check.expect(false, "metadata not embedded for key " + std::to_string(id));
      return;
    }
    const auto meta = extract_corner_metadata(container);
    if (meta.pattern.id != pattern.id || meta.key_id != id) {
      check.expect(false, "extract(embed) mismatch for key " +
                              std::to_string(id) + " pattern " +
                              std::to_string(pattern.id));
      return;
    }
    if (decrypt(container, registry) != pixels) {
      check.expect(false,
                   "corner-only decryption failed for key " + std::to_string(id));
      return;
    }
  }
}

void criterion_multicloud(Checker& check) {
  std::mt19937_64 rng(1009);
  testsupport::TempDir dir;
  KeyRegistry registry(dir / "keys");
  for (int i = 0; i < 2; ++i) {
    const auto fasta = dir / ("k" + std::to_string(i) + ".fa");
    testsupport::write_file(fasta, testsupport::random_bases(rng, 60000));
    registry.add_key(fasta);
  }

  std::vector<BackendDescriptor> clouds;
  for (int i = 0; i < 3; ++i)
    clouds.push_back({"cloud" + std::to_string(i), BackendKind::LocalDirectory,
                      (dir / ("c" + std::to_string(i))).string(), "", ""});

  const auto pixels = testsupport::random_pixels(rng, 32 * 32);
  SplitMix64 store_rng(31);
  const auto manifest =
      store_replicated(std::span<const std::uint8_t>(pixels), 32, 32, clouds,
                       registry, store_rng, {}, "acc");
  check.expect(manifest.replicas.size() == 3, "expected 3 replicas");

  std::map<std::string, std::vector<std::uint8_t>> objects;
  std::set<std::string> distinct;
  for (std::size_t i = 0; i < manifest.replicas.size(); ++i) {
    const auto& r = manifest.replicas[i];
    const auto bytes = backend_get(clouds[i], r.object_id);
    distinct.insert(sha256_hex(bytes));
    objects[r.object_id] = bytes;
    check.expect(decrypt(deserialize(bytes), registry) == pixels,
                 "replica " + r.cloud_id + " decrypts differently");
  }
  check.expect(distinct.size() == 3, "containers are not pairwise distinct");

  // deleting any two replicas leaves the image retrievable
  for (int keep = 0; keep < 3; ++keep) {
    for (int i = 0; i < 3; ++i) {
      const auto path = std::filesystem::path(clouds[i].location) /
                        manifest.replicas[i].object_id;
      std::filesystem::remove(path);
      if (i == keep)
        backend_put(clouds[i], manifest.replicas[i].object_id,
                    objects[manifest.replicas[i].object_id]);
    }
    bool recovered = false;
    try {
      recovered = retrieve(manifest, clouds, registry) == pixels;
    } catch (const Error&) {}
    check.expect(recovered, "failover with only cloud " + std::to_string(keep) +
                                " alive did not recover the image");
  }

  // corrupting all three replicas must surface as an integrity failure
  for (int i = 0; i < 3; ++i) {
    auto bytes = objects[manifest.replicas[i].object_id];
    bytes[20] ^= 0x01;  // CRC field
    backend_put(clouds[i], manifest.replicas[i].object_id, bytes);
  }
  try {
    retrieve(manifest, clouds, registry);
    check.expect(false, "corrupted replicas were accepted");
  } catch (const IntegrityFailure&) {
  } catch (const Error& e) {
    check.expect(false, std::string("wrong failure type: ") + e.what());
  }
}

void criterion_container_format(Checker& check) {
  std::mt19937_64 rng(1010);
  for (int trial = 0; trial < 200; ++trial) {
    CipherContainer c;
    c.width = 1 + rng() % 24;
    c.height = 1 + rng() % 24;
    c.pointer_width = std::uint8_t(1 + rng() % 4);
    c.corner_embedded = (c.width >= 2 && c.height >= 2) && (rng() % 2);
    if (c.corner_embedded) {
      c.pattern = kPatternSentinel;
      c.key_id = kKeyIdSentinel;
    } else {
      c.pattern = std::uint8_t(rng() % 16);
      c.key_id = std::uint16_t(rng() % 4096);
    }
    c.plaintext_crc32 = std::uint32_t(rng());
    const std::uint64_t limit =
        c.pointer_width >= 4 ? 0xffffffffull
                             : (1ull << (8 * c.pointer_width)) - 1;
    c.payload.resize(std::size_t(c.width) * c.height);
    for (auto& p : c.payload) p = std::uint32_t(rng() % (limit + 1));

    const auto back = deserialize(serialize(c));
    if (back.width != c.width || back.height != c.height ||
        back.pointer_width != c.pointer_width || back.pattern != c.pattern ||
        back.key_id != c.key_id || back.corner_embedded != c.corner_embedded ||
        back.plaintext_crc32 != c.plaintext_crc32 ||
        back.payload != c.payload) {
      check.expect(false, "roundtrip mismatch at trial " + std::to_string(trial));
      return;
    }
  }

  // golden fixture pinning the 24-byte header layout
  CipherContainer c;
  c.width = 2;
  c.height = 2;
  c.pointer_width = 4;
  c.pattern = 7;
  c.key_id = 0x0123;
  c.corner_embedded = false;
  c.plaintext_crc32 = 0xdeadbeef;
  c.payload = {0x00000000, 0x00000001, 0x00010203, 0xfffffffe};
  const std::vector<std::uint8_t> golden = {
      'D',  'V',  'L',  'T',  0x01, 0x00, 0x00, 0x00,
      0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02,
      0x04, 0x07, 0x01, 0x23, 0xde, 0xad, 0xbe, 0xef,
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01,
      0x00, 0x01, 0x02, 0x03, 0xff, 0xff, 0xff, 0xfe,
  };
  check.expect(serialize(c) == golden, "golden header bytes differ");
}

}  // namespace

int main() {
  std::printf("dvault acceptance suite\n");
  criterion(1, "decrypt(encrypt(x)) = x over sizes x patterns x corner modes",
            60.0, criterion_roundtrip);
  criterion(2, "order-8 magic square reference row and 8 magic variants", 1.0,
            criterion_magic);
  criterion(3, "zigzag variant 0 JPEG order; 8 bijective variants", 0,
            criterion_zigzag);
  criterion(4, "rendered ciphertext decorrelates a gradient (1-Mbase key)",
            10.0, criterion_correlation);
  criterion(5, "descramble . scramble = identity, 1000 images, 16 patterns", 0,
            criterion_scramble_inverse);
  criterion(6, "detect/crypt_select match naive oracles; 10k deref draws", 0,
            criterion_keystore_oracles);
  criterion(7, "avalanche: local under equal seeds, global under fresh seeds",
            10.0, criterion_avalanche);
  criterion(8, "corner metadata roundtrips and decrypts, 200 (pattern,key) pairs",
            0, criterion_corner_metadata);
  criterion(9, "3-cloud replication: distinct replicas, failover, integrity",
            10.0, criterion_multicloud);
  criterion(10, "container serialization roundtrip and golden header", 0,
            criterion_container_format);

  if (failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
