#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "dvault/codec.hpp"
#include "dvault/errors.hpp"
#include "dvault/rng.hpp"

namespace dvault {

inline constexpr std::uint16_t kMaxKeyId = 4095;

/// A key DNA sequence: uppercase A/C/G/T only, at least 4 bases.
struct KeySequence {
  std::uint16_t key_id = 0;
  std::string bases;
  std::string source_name;
};

/// Parse FASTA-ish text into a usable key sequence. Header lines ('>' or ';')
/// are dropped, letters are uppercased, and anything outside {A,C,G,T}
/// (ambiguity codes, gaps, digits) is discarded.
inline KeySequence ingest_fasta(std::string_view text,
                                std::string_view source_name = {},
                                std::uint16_t key_id = 0) {
  KeySequence key;
  key.key_id = key_id;
  key.source_name = std::string(source_name);
  key.bases.reserve(text.size());
  bool at_line_start = true;
  bool in_header = false;
  for (char c : text) {
    if (c == '\n') {
      at_line_start = true;
      in_header = false;
      continue;
    }
    if (at_line_start) {
      at_line_start = false;
      in_header = (c == '>' || c == ';');
    }
    if (in_header) continue;
    const char upper = (c >= 'a' && c <= 'z') ? char(c - 'a' + 'A') : c;
    if (is_nucleotide_char(upper)) key.bases.push_back(upper);
  }
  if (key.bases.size() < 4)
    throw EmptyKey("fewer than 4 usable bases in " +
                   (key.source_name.empty() ? std::string("input")
                                            : key.source_name));
  return key;
}

/// A pointer into the key sequence: the start offset of a four-base window.
/// The byte width used to store it is a container-level concern.
struct Pointer {
  std::uint32_t offset = 0;
};

/// Position lists for all 256 quadruples over the key's overlapping windows
/// (stride 1). Immutable once built; shareable across threads.
class KeyIndex {
 public:
  explicit KeyIndex(KeySequence key) : key_(std::move(key)) {
    const auto& bases = key_.bases;
    if (bases.size() < 4) throw EmptyKey("key needs at least 4 bases");
    std::uint8_t window = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      window = static_cast<std::uint8_t>(
          (window << 2) |
          static_cast<std::uint8_t>(nucleotide_from_char(bases[i])));
      if (i >= 3) positions_[window].push_back(static_cast<std::uint32_t>(i - 3));
    }
    min_multiplicity_ = static_cast<std::uint32_t>(
        std::ranges::min(positions_ | std::views::transform(
                                          [](const auto& v) { return v.size(); })));
  }

  const KeySequence& key() const { return key_; }
  std::uint32_t length() const {
    return static_cast<std::uint32_t>(key_.bases.size());
  }
  /// Number of overlapping windows, length - 3.
  std::uint32_t window_count() const { return length() - 3; }
  std::uint32_t max_offset() const { return length() - 4; }
  std::uint32_t min_multiplicity() const { return min_multiplicity_; }

  const std::vector<std::uint32_t>& positions(Quadruple q) const {
    return positions_[q.to_byte()];
  }

  /// The quadruple spelled at bases[offset .. offset+4).
  Quadruple quad_at(std::uint32_t offset) const {
    if (offset > max_offset())
      throw InvalidArgument("offset " + std::to_string(offset) +
                            " beyond key length " + std::to_string(length()));
    return Quadruple::from_bases(
        std::string_view(key_.bases).substr(offset, 4));
  }

 private:
  KeySequence key_;
  std::array<std::vector<std::uint32_t>, 256> positions_{};
  std::uint32_t min_multiplicity_ = 0;
};

/// True iff some occurrence of quad starts at an offset >= start. Equivalent
/// to a naive forward substring scan beginning at start.
inline bool detect(const KeyIndex& index, Quadruple quad,
                   std::uint32_t start) {
  if (start >= index.length())
    throw InvalidArgument("start beyond key length");
  const auto& pos = index.positions(quad);
  return std::ranges::lower_bound(pos, start) != pos.end();
}

/// One-to-many substitution: a uniformly random occurrence of quad.
template <RandomSource R>
Pointer crypt_select(const KeyIndex& index, Quadruple quad, R& rng) {
  const auto& pos = index.positions(quad);
  if (pos.empty())
    throw QuadrupleAbsent("quadruple " + quad.str() + " does not occur in key " +
                          std::to_string(index.key().key_id));
  return Pointer{pos[bounded(rng, pos.size())]};
}

/// Uniform draw restricted to occurrences whose offset mod 16 equals nibble.
/// Used to hide metadata in the low nibble of a pointer without breaking it.
template <RandomSource R>
Pointer crypt_select_constrained(const KeyIndex& index, Quadruple quad, R& rng,
                                 std::uint8_t nibble) {
  if (nibble > 0xf) throw InvalidArgument("nibble must be 0..15");
  const auto& pos = index.positions(quad);
  if (pos.empty())
    throw QuadrupleAbsent("quadruple " + quad.str() + " does not occur in key " +
                          std::to_string(index.key().key_id));
  std::vector<std::uint32_t> subset;
  for (std::uint32_t p : pos)
    if ((p & 0xf) == nibble) subset.push_back(p);
  if (subset.empty())
    throw NoConstrainedPosition("no occurrence of " + quad.str() +
                                " with offset mod 16 = " +
                                std::to_string(nibble));
  return Pointer{subset[bounded(rng, subset.size())]};
}

/// Per-quadruple multiplicity summary. A key is complete iff every one of the
/// 256 quadruples occurs at least once.
struct KeyReport {
  std::uint16_t key_id = 0;
  std::uint32_t window_count = 0;
  std::array<std::uint32_t, 256> multiplicity{};
  std::uint32_t min_multiplicity = 0;
  std::uint32_t absent = 0;
  bool complete = false;
  double mean_multiplicity_present = 0.0;
};

inline KeyReport validate_key(const KeyIndex& index) {
  KeyReport report;
  report.key_id = index.key().key_id;
  report.window_count = index.window_count();
  std::uint64_t present_total = 0;
  std::uint32_t present = 0;
  for (int b = 0; b < 256; ++b) {
    const auto m = static_cast<std::uint32_t>(
        index.positions(Quadruple::from_byte(std::uint8_t(b))).size());
    report.multiplicity[b] = m;
    if (m == 0) {
      ++report.absent;
    } else {
      ++present;
      present_total += m;
    }
  }
  report.min_multiplicity = index.min_multiplicity();
  report.complete = (report.absent == 0);
  report.mean_multiplicity_present =
      present ? double(present_total) / present : 0.0;
  return report;
}

}  // namespace dvault
