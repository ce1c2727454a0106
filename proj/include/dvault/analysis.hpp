#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dvault/cipher.hpp"
#include "dvault/errors.hpp"
#include "dvault/keystore.hpp"
#include "dvault/registry.hpp"
#include "dvault/scramble.hpp"

namespace dvault {

enum class Direction { Horizontal, Vertical, Diagonal };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Horizontal: return "horizontal";
    case Direction::Vertical: return "vertical";
    default: return "diagonal";
  }
}

struct CorrelationReport {
  Direction direction = Direction::Horizontal;
  double r = 0.0;
  std::uint64_t n = 0;  // number of adjacent pairs
};

/// Pearson correlation over every adjacent pixel pair in the given
/// direction (horizontal (i,j)-(i,j+1), vertical (i,j)-(i+1,j), diagonal
/// (i,j)-(i+1,j+1)):
///
///   r = (n*sum(xy) - sum(x)*sum(y))
///       / (sqrt(n*sum(x^2) - sum(x)^2) * sqrt(n*sum(y^2) - sum(y)^2))
///
/// Sums are accumulated exactly in integers; only the final division is
/// floating point. A zero marginal variance raises DegenerateVariance rather
/// than silently reporting 0.
inline CorrelationReport correlation(std::span<const std::uint8_t> image,
                                     std::uint32_t width, std::uint32_t height,
                                     Direction direction) {
  if (image.size() != std::uint64_t(width) * height)
    throw DimensionMismatch("pixel count does not match dimensions");
  const std::uint32_t dc = direction != Direction::Vertical ? 1 : 0;
  const std::uint32_t dr = direction != Direction::Horizontal ? 1 : 0;
  if (width <= dc || height <= dr)
    throw InvalidArgument("image too small for adjacent pairs");

  std::uint64_t n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::uint32_t r = 0; r + dr < height; ++r) {
    for (std::uint32_t c = 0; c + dc < width; ++c) {
      const std::uint64_t x = image[std::uint64_t(r) * width + c];
      const std::uint64_t y = image[std::uint64_t(r + dr) * width + c + dc];
      ++n;
      sx += x; sy += y;
      sxx += x * x; syy += y * y; sxy += x * y;
    }
  }
  if (n < 2) throw InvalidArgument("fewer than 2 adjacent pairs");

  using i128 = __int128;
  const i128 num = i128(n) * sxy - i128(sx) * sy;
  const i128 dx = i128(n) * sxx - i128(sx) * sx;
  const i128 dy = i128(n) * syy - i128(sy) * sy;
  if (dx == 0 || dy == 0)
    throw DegenerateVariance(
        std::string("zero variance along ") + to_string(direction) +
        " pairs (constant image)");
  const double r =
      double(num) / (std::sqrt(double(dx)) * std::sqrt(double(dy)));
  return {direction, r, n};
}

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram(std::span<const std::uint8_t> bytes) {
  Histogram h{};
  for (std::uint8_t b : bytes) ++h[b];
  return h;
}

/// Normalized L1 distance between two histograms, in [0, 1]:
/// half the sum of |p1 - p2| over per-bin probabilities.
inline double histogram_distance(const Histogram& h1, const Histogram& h2) {
  std::uint64_t t1 = 0, t2 = 0;
  for (int i = 0; i < 256; ++i) {
    t1 += h1[i];
    t2 += h2[i];
  }
  if (t1 == 0 || t2 == 0) throw EmptyHistogram("histogram has no samples");
  double sum = 0.0;
  for (int i = 0; i < 256; ++i)
    sum += std::abs(double(h1[i]) / t1 - double(h2[i]) / t2);
  return sum / 2.0;
}

struct AvalancheReport {
  std::uint64_t flipped_bit = 0;
  double cell_change_ratio = 0.0;  // payload cells whose pointer changed
  double bit_change_ratio = 0.0;   // differing bits of the serialized payload
};

/// Encrypt the image with seed_a, flip one plaintext bit (bit 0 is the least
/// significant bit of pixel 0) and encrypt with seed_b, then compare the two
/// payloads. Equal seeds isolate the flipped pixel's cell; independent seeds
/// re-randomize everything.
inline AvalancheReport avalanche(std::span<const std::uint8_t> pixels,
                                 std::uint32_t width, std::uint32_t height,
                                 std::uint64_t bit_index, const KeyIndex& index,
                                 PatternId pattern, std::uint64_t seed_a,
                                 std::uint64_t seed_b,
                                 EncryptOptions opts = {}) {
  if (bit_index >= std::uint64_t(8) * width * height)
    throw InvalidArgument("bit index beyond image");
  std::vector<std::uint8_t> flipped(pixels.begin(), pixels.end());
  flipped[bit_index / 8] ^= std::uint8_t(1u << (bit_index % 8));

  SplitMix64 unused(0);
  opts.seed = seed_a;
  const CipherContainer a =
      encrypt(pixels, width, height, index, pattern, unused, opts);
  opts.seed = seed_b;
  const CipherContainer b =
      encrypt(std::span<const std::uint8_t>(flipped), width, height, index,
              pattern, unused, opts);

  std::uint64_t changed_cells = 0;
  for (std::size_t i = 0; i < a.payload.size(); ++i)
    changed_cells += a.payload[i] != b.payload[i];

  const auto bytes_a = render_cipher_image(a).bytes;
  const auto bytes_b = render_cipher_image(b).bytes;
  std::uint64_t changed_bits = 0;
  for (std::size_t i = 0; i < bytes_a.size(); ++i)
    changed_bits += std::popcount(std::uint8_t(bytes_a[i] ^ bytes_b[i]));

  AvalancheReport report;
  report.flipped_bit = bit_index;
  report.cell_change_ratio = double(changed_cells) / a.payload.size();
  report.bit_change_ratio = double(changed_bits) / (bytes_a.size() * 8.0);
  return report;
}

struct KeyStats {
  std::uint16_t key_id = 0;
  bool complete = false;
  std::uint32_t window_count = 0;
  std::uint32_t min_multiplicity = 0;
  std::uint32_t absent = 0;
  double mean_multiplicity_present = 0.0;
  double mean_log2_choices = 0.0;  // mean log2 multiplicity over present quads
};

/// Brute-force accounting: how many (key, pattern) combinations an attacker
/// faces, plus the per-cell substitution uncertainty of each key.
struct KeyspaceReport {
  std::size_t key_count = 0;
  int pattern_count = kPatternCount;
  std::vector<KeyStats> keys;
  double mean_log2_choices = 0.0;  // mean over keys
};

inline KeyspaceReport keyspace_report(const KeyRegistry& registry) {
  KeyspaceReport report;
  report.key_count = registry.entries().size();
  double log2_sum = 0.0;
  for (const auto& entry : registry.entries()) {
    const KeyReport kr = validate_key(registry.index(entry.key_id));
    KeyStats stats;
    stats.key_id = entry.key_id;
    stats.complete = kr.complete;
    stats.window_count = kr.window_count;
    stats.min_multiplicity = kr.min_multiplicity;
    stats.absent = kr.absent;
    stats.mean_multiplicity_present = kr.mean_multiplicity_present;
    double s = 0.0;
    int present = 0;
    for (std::uint32_t m : kr.multiplicity)
      if (m > 0) {
        s += std::log2(double(m));
        ++present;
      }
    stats.mean_log2_choices = present ? s / present : 0.0;
    log2_sum += stats.mean_log2_choices;
    report.keys.push_back(stats);
  }
  report.mean_log2_choices =
      report.keys.empty() ? 0.0 : log2_sum / double(report.keys.size());
  return report;
}

}  // namespace dvault
