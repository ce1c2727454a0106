#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvault/errors.hpp"

namespace dvault {

/// The four bases with their 2-bit digital codes: C=00, T=01, A=10, G=11.
enum class Nucleotide : std::uint8_t { C = 0, T = 1, A = 2, G = 3 };

constexpr char to_char(Nucleotide n) {
  constexpr char table[4] = {'C', 'T', 'A', 'G'};
  return table[static_cast<std::uint8_t>(n)];
}

constexpr bool is_nucleotide_char(char c) {
  return c == 'A' || c == 'C' || c == 'G' || c == 'T';
}

constexpr Nucleotide nucleotide_from_char(char c) {
  switch (c) {
    case 'C': return Nucleotide::C;
    case 'T': return Nucleotide::T;
    case 'A': return Nucleotide::A;
    case 'G': return Nucleotide::G;
    default: throw InvalidArgument(std::string("not a nucleotide: '") + c + "'");
  }
}

/// Four bases encoding exactly one byte, most-significant bit-pair first:
/// byte b7b6 b5b4 b3b2 b1b0 -> bases (b7b6)(b5b4)(b3b2)(b1b0).
class Quadruple {
 public:
  constexpr Quadruple() = default;

  static constexpr Quadruple from_byte(std::uint8_t b) { return Quadruple(b); }

  static constexpr Quadruple from_bases(std::string_view bases4) {
    if (bases4.size() != 4)
      throw InvalidArgument("quadruple needs exactly 4 bases");
    std::uint8_t v = 0;
    for (char c : bases4)
      v = static_cast<std::uint8_t>(
          (v << 2) | static_cast<std::uint8_t>(nucleotide_from_char(c)));
    return Quadruple(v);
  }

  constexpr std::uint8_t to_byte() const { return value_; }

  /// i in 0..3; base(0) holds the most significant bit-pair.
  constexpr Nucleotide base(int i) const {
    return static_cast<Nucleotide>((value_ >> (6 - 2 * i)) & 0x3);
  }

  std::string str() const {
    std::string s(4, '?');
    for (int i = 0; i < 4; ++i) s[i] = to_char(base(i));
    return s;
  }

  constexpr auto operator<=>(const Quadruple&) const = default;

 private:
  explicit constexpr Quadruple(std::uint8_t v) : value_(v) {}
  std::uint8_t value_ = 0;
};

/// An image in base form: one quadruple per pixel, raster order.
struct DnaImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Quadruple> quads;
};

/// Pixel bytes -> quadruples, raster order.
inline DnaImage synthesize(std::span<const std::uint8_t> pixels,
                           std::uint32_t width, std::uint32_t height) {
  if (width == 0 || height == 0)
    throw DimensionMismatch("width and height must be >= 1");
  const std::uint64_t n = std::uint64_t(width) * height;
  if (pixels.size() != n)
    throw DimensionMismatch("pixel count " + std::to_string(pixels.size()) +
                            " != " + std::to_string(width) + "x" +
                            std::to_string(height));
  DnaImage img{width, height, {}};
  img.quads.reserve(pixels.size());
  for (std::uint8_t b : pixels) img.quads.push_back(Quadruple::from_byte(b));
  return img;
}

/// Exact inverse of synthesize.
inline std::vector<std::uint8_t> rev_synthesize(const DnaImage& img) {
  std::vector<std::uint8_t> out;
  out.reserve(img.quads.size());
  for (Quadruple q : img.quads) out.push_back(q.to_byte());
  return out;
}

/// Swap adjacent quadruples pairwise: out[2i] = in[2i+1], out[2i+1] = in[2i].
/// An odd final quadruple passes through unchanged. Involution.
inline std::vector<Quadruple> translate(std::span<const Quadruple> quads) {
  std::vector<Quadruple> out(quads.begin(), quads.end());
  for (std::size_t i = 0; i + 1 < out.size(); i += 2)
    std::swap(out[i], out[i + 1]);
  return out;
}

}  // namespace dvault
