#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvault/codec.hpp"
#include "dvault/errors.hpp"
#include "dvault/hash.hpp"
#include "dvault/keystore.hpp"
#include "dvault/registry.hpp"
#include "dvault/rng.hpp"
#include "dvault/scramble.hpp"

namespace dvault {

inline constexpr char kContainerMagic[4] = {'D', 'V', 'L', 'T'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;
inline constexpr std::uint8_t kPatternSentinel = 0xff;   // read from corners
inline constexpr std::uint16_t kKeyIdSentinel = 0xffff;  // read from corners

struct EncryptOptions {
  std::uint8_t pointer_width = 4;  // bytes per stored pointer, 1..4
  bool corner_embed = true;
  std::optional<std::uint64_t> seed;  // deterministic when set
};

/// The ciphertext object: a 24-byte header plus width*height pointers into
/// the key sequence, in scrambled raster order.
///
/// Wire layout (big-endian):
///   0..3   magic "DVLT"
///   4      version (1)
///   5      flags (bit 0: corner_embedded)
///   6..7   reserved, zero
///   8..11  width
///   12..15 height
///   16     pointer_width (1..4)
///   17     pattern id, or 0xFF when carried in the corners
///   18..19 key id, or 0xFFFF when carried in the corners
///   20..23 CRC-32 of the plaintext pixels
///   24..   payload: height*width pointers, each pointer_width bytes
struct CipherContainer {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t pointer_width = 4;
  std::uint8_t pattern = kPatternSentinel;
  std::uint16_t key_id = kKeyIdSentinel;
  bool corner_embedded = false;
  std::uint32_t plaintext_crc32 = 0;
  std::vector<std::uint32_t> payload;

  std::uint64_t cell_count() const {
    return std::uint64_t(width) * height;
  }
};

struct CornerMetadata {
  PatternId pattern;
  std::uint16_t key_id = 0;
};

namespace detail {
inline std::uint64_t max_offset_for_width(std::uint8_t pointer_width) {
  return pointer_width >= 8 ? ~std::uint64_t{0}
                            : (std::uint64_t{1} << (8 * pointer_width)) - 1;
}

// corner cells of the stored layout: TL, TR, BL, BR
inline std::array<std::uint64_t, 4> corner_cells(std::uint32_t w,
                                                 std::uint32_t h) {
  return {0, std::uint64_t(w) - 1, std::uint64_t(h - 1) * w,
          std::uint64_t(h) * w - 1};
}
}  // namespace detail

/// Recover (pattern, key_id) hidden in the low nibbles of the four corner
/// pointers: TL carries the pattern, TR/BL/BR carry key id bits 11-8, 7-4,
/// 3-0.
inline CornerMetadata extract_corner_metadata(const CipherContainer& c) {
  if (!c.corner_embedded)
    throw NotEmbedded("container does not carry corner metadata");
  if (c.width < 2 || c.height < 2 ||
      c.payload.size() != c.cell_count())
    throw MalformedContainer("corner metadata needs a full >=2x2 payload");
  const auto corners = detail::corner_cells(c.width, c.height);
  const auto nibble = [&](int i) {
    return static_cast<std::uint16_t>(c.payload[corners[i]] & 0xf);
  };
  CornerMetadata meta;
  meta.pattern = PatternId{static_cast<std::uint8_t>(nibble(0))};
  meta.key_id = static_cast<std::uint16_t>((nibble(1) << 8) | (nibble(2) << 4) |
                                           nibble(3));
  return meta;
}

/// Encrypt one grayscale plane. Pipeline: synthesize -> translate ->
/// substitute each quadruple with a random occurrence pointer -> scramble ->
/// re-select the corner pointers so their low nibbles spell (pattern,
/// key_id). When no constrained occurrence exists (or the image is smaller
/// than 2x2) the metadata stays in the header instead.
///
/// With opts.seed set, every substitution draw comes from an independent
/// per-cell stream derived from (seed, cell index), so output is reproducible
/// and cells can be processed in any order.
template <RandomSource R>
CipherContainer encrypt(std::span<const std::uint8_t> pixels,
                        std::uint32_t width, std::uint32_t height,
                        const KeyIndex& index, PatternId pattern, R& rng,
                        const EncryptOptions& opts = {}) {
  check_pattern(pattern);
  if (opts.pointer_width < 1 || opts.pointer_width > 4)
    throw InvalidArgument("pointer_width must be 1..4");
  if (index.key().key_id > kMaxKeyId)
    throw InvalidArgument("key_id exceeds 4095");
  if (index.max_offset() > detail::max_offset_for_width(opts.pointer_width))
    throw PointerOverflow(
        "key of " + std::to_string(index.length()) +
        " bases needs wider pointers than " +
        std::to_string(opts.pointer_width) + " bytes");

  const DnaImage dna = synthesize(pixels, width, height);
  const std::vector<Quadruple> translated = translate(dna.quads);

  const std::uint64_t master =
      opts.seed ? *opts.seed : rng.next_u64();
  const std::uint64_t n = std::uint64_t(width) * height;

  std::vector<std::uint32_t> offsets(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    SplitMix64 cell_rng = stream_for(master, i);
    offsets[i] = crypt_select(index, translated[i], cell_rng).offset;
  }

  CipherContainer out;
  out.width = width;
  out.height = height;
  out.pointer_width = opts.pointer_width;
  out.plaintext_crc32 = crc32(pixels);
  out.payload =
      scramble_cells(std::span<const std::uint32_t>(offsets), width, height,
                     pattern);

  bool embedded = false;
  if (opts.corner_embed && width >= 2 && height >= 2) {
    const std::uint16_t key_id = index.key().key_id;
    const std::array<std::uint8_t, 4> nibbles = {
        pattern.id, std::uint8_t((key_id >> 8) & 0xf),
        std::uint8_t((key_id >> 4) & 0xf), std::uint8_t(key_id & 0xf)};
    const auto corners = detail::corner_cells(width, height);
    std::array<std::uint32_t, 4> reselected{};
    embedded = true;
    for (int j = 0; j < 4 && embedded; ++j) {
      const Quadruple quad = index.quad_at(out.payload[corners[j]]);
      SplitMix64 corner_rng = stream_for(master, n + std::uint64_t(j));
      try {
        reselected[j] =
            crypt_select_constrained(index, quad, corner_rng, nibbles[j])
                .offset;
      } catch (const NoConstrainedPosition&) {
        embedded = false;  // all-or-nothing: keep metadata in the header
      }
    }
    if (embedded)
      for (int j = 0; j < 4; ++j) out.payload[corners[j]] = reselected[j];
  }

  out.corner_embedded = embedded;
  out.pattern = embedded ? kPatternSentinel : pattern.id;
  out.key_id = embedded ? kKeyIdSentinel : index.key().key_id;
  return out;
}

/// Decrypt against a specific key index. The caller has already resolved the
/// key id; pattern still comes from the container (header or corners).
inline std::vector<std::uint8_t> decrypt_with_index(const CipherContainer& c,
                                                    const KeyIndex& index) {
  if (c.width == 0 || c.height == 0 || c.payload.size() != c.cell_count())
    throw MalformedContainer("payload does not match dimensions");
  PatternId pattern{c.pattern};
  if (c.corner_embedded) {
    pattern = extract_corner_metadata(c).pattern;
  } else if (c.pattern >= kPatternCount) {
    throw MalformedContainer("no pattern in header and corners not embedded");
  }

  const std::vector<std::uint32_t> offsets = descramble_cells(
      std::span<const std::uint32_t>(c.payload), c.width, c.height, pattern);

  std::vector<Quadruple> quads;
  quads.reserve(offsets.size());
  for (std::uint32_t off : offsets) {
    if (off > index.max_offset())
      throw MalformedContainer("pointer offset " + std::to_string(off) +
                               " out of range for key of " +
                               std::to_string(index.length()) + " bases");
    quads.push_back(index.quad_at(off));
  }

  DnaImage dna{c.width, c.height, translate(quads)};
  std::vector<std::uint8_t> pixels = rev_synthesize(dna);
  if (crc32(pixels) != c.plaintext_crc32)
    throw ChecksumMismatch("plaintext CRC-32 does not match (corrupted "
                           "container or wrong key)");
  return pixels;
}

/// Full decryption: resolve (pattern, key_id) from the corners or the
/// header, look the key up in the registry, then invert the pipeline and
/// verify the plaintext checksum.
inline std::vector<std::uint8_t> decrypt(const CipherContainer& c,
                                         const KeyRegistry& registry) {
  std::uint16_t key_id = c.key_id;
  if (c.corner_embedded)
    key_id = extract_corner_metadata(c).key_id;
  else if (c.key_id > kMaxKeyId)
    throw MalformedContainer("no key id in header and corners not embedded");
  return decrypt_with_index(c, registry.index(key_id));
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

namespace detail {
inline void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}
inline std::uint32_t get_u32_be(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}
}  // namespace detail

inline std::vector<std::uint8_t> serialize(const CipherContainer& c) {
  if (c.width == 0 || c.height == 0 || c.payload.size() != c.cell_count())
    throw MalformedContainer("payload does not match dimensions");
  if (c.pointer_width < 1 || c.pointer_width > 4)
    throw MalformedContainer("pointer_width must be 1..4");
  if (c.corner_embedded && (c.width < 2 || c.height < 2))
    throw MalformedContainer("corner embedding needs width, height >= 2");
  const std::uint64_t limit = detail::max_offset_for_width(c.pointer_width);

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + c.payload.size() * c.pointer_width);
  out.insert(out.end(), kContainerMagic, kContainerMagic + 4);
  out.push_back(kContainerVersion);
  out.push_back(c.corner_embedded ? 0x01 : 0x00);
  out.push_back(0);
  out.push_back(0);
  detail::put_u32_be(out, c.width);
  detail::put_u32_be(out, c.height);
  out.push_back(c.pointer_width);
  out.push_back(c.pattern);
  out.push_back(std::uint8_t(c.key_id >> 8));
  out.push_back(std::uint8_t(c.key_id));
  detail::put_u32_be(out, c.plaintext_crc32);
  for (std::uint32_t off : c.payload) {
    if (off > limit)
      throw MalformedContainer("pointer offset does not fit pointer_width");
    for (int b = c.pointer_width - 1; b >= 0; --b)
      out.push_back(std::uint8_t(off >> (8 * b)));
  }
  return out;
}

inline CipherContainer deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize)
    throw MalformedContainer("truncated header");
  if (!std::equal(kContainerMagic, kContainerMagic + 4, bytes.begin()))
    throw MalformedContainer("bad magic");
  if (bytes[4] != kContainerVersion)
    throw MalformedContainer("unsupported version " + std::to_string(bytes[4]));
  if (bytes[5] & ~0x01)
    throw MalformedContainer("unknown flag bits");
  if (bytes[6] != 0 || bytes[7] != 0)
    throw MalformedContainer("reserved bytes must be zero");

  CipherContainer c;
  c.corner_embedded = bytes[5] & 0x01;
  c.width = detail::get_u32_be(bytes.data() + 8);
  c.height = detail::get_u32_be(bytes.data() + 12);
  c.pointer_width = bytes[16];
  c.pattern = bytes[17];
  c.key_id = std::uint16_t((std::uint16_t(bytes[18]) << 8) | bytes[19]);
  c.plaintext_crc32 = detail::get_u32_be(bytes.data() + 20);

  if (c.width == 0 || c.height == 0)
    throw MalformedContainer("zero dimension");
  if (c.pointer_width < 1 || c.pointer_width > 4)
    throw MalformedContainer("pointer_width must be 1..4");
  if (c.pattern != kPatternSentinel && c.pattern >= kPatternCount)
    throw MalformedContainer("pattern id out of range");
  if (c.key_id != kKeyIdSentinel && c.key_id > kMaxKeyId)
    throw MalformedContainer("key id out of range");
  if (c.corner_embedded && (c.width < 2 || c.height < 2))
    throw MalformedContainer("corner embedding needs width, height >= 2");
  if (!c.corner_embedded &&
      (c.pattern == kPatternSentinel || c.key_id == kKeyIdSentinel))
    throw MalformedContainer(
        "metadata neither in header nor embedded in corners");

  const std::uint64_t cells = c.cell_count();
  if (cells > (std::uint64_t{1} << 32))
    throw MalformedContainer("implausible image size");
  if (bytes.size() - kHeaderSize != cells * c.pointer_width)
    throw MalformedContainer("payload size does not match header");

  c.payload.reserve(cells);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (std::uint64_t i = 0; i < cells; ++i) {
    std::uint32_t off = 0;
    for (int b = 0; b < c.pointer_width; ++b) off = (off << 8) | *p++;
    c.payload.push_back(off);
  }
  return c;
}

/// The payload as an 8-bit image (height rows, width*pointer_width columns)
/// for histogram and correlation analysis.
struct RenderedCipher {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> bytes;
};

inline RenderedCipher render_cipher_image(const CipherContainer& c) {
  RenderedCipher img;
  img.width = c.width * c.pointer_width;
  img.height = c.height;
  img.bytes.reserve(c.payload.size() * c.pointer_width);
  for (std::uint32_t off : c.payload)
    for (int b = c.pointer_width - 1; b >= 0; --b)
      img.bytes.push_back(std::uint8_t(off >> (8 * b)));
  return img;
}

}  // namespace dvault
