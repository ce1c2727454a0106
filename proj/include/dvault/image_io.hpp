#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "dvault/errors.hpp"

namespace dvault {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // raster order
};

/// Three grayscale planes of an RGB image, processed independently.
struct RgbPlanes {
  GrayImage r, g, b;
};

namespace detail {

// next PNM header token, skipping whitespace and '#' comments
inline std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(char(c));
  }
  return tok;
}

inline std::uint32_t pnm_number(std::istream& in, const char* what) {
  const std::string tok = pnm_token(in);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw IoError(std::string("bad PNM ") + what);
  const unsigned long v = std::stoul(tok);
  if (v == 0 || v > 0xffffffffull)
    throw IoError(std::string("PNM ") + what + " out of range");
  return static_cast<std::uint32_t>(v);
}

inline std::vector<std::uint8_t> read_exact(std::istream& in, std::size_t n,
                                            const std::string& name) {
  std::vector<std::uint8_t> data(n);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError("truncated pixel data in " + name);
  return data;
}

}  // namespace detail

/// Binary PGM ("P5"), maxval up to 255.
inline GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (detail::pnm_token(in) != "P5")
    throw IoError(path.string() + " is not a binary PGM (P5)");
  GrayImage img;
  img.width = detail::pnm_number(in, "width");
  img.height = detail::pnm_number(in, "height");
  const std::uint32_t maxval = detail::pnm_number(in, "maxval");
  if (maxval > 255)
    throw IoError("16-bit PGM not supported: " + path.string());
  img.pixels = detail::read_exact(
      in, std::size_t(img.width) * img.height, path.string());
  return img;
}

inline void write_pgm(const std::filesystem::path& path,
                      const GrayImage& img) {
  if (img.pixels.size() != std::size_t(img.width) * img.height)
    throw DimensionMismatch("pixel count does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

/// Headerless 8-bit grayscale; dimensions supplied by the caller.
inline GrayImage read_raw(const std::filesystem::path& path,
                          std::uint32_t width, std::uint32_t height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  GrayImage img{width, height, {}};
  img.pixels = detail::read_exact(in, std::size_t(width) * height,
                                  path.string());
  in.peek();
  if (!in.eof())
    throw IoError(path.string() + " larger than " + std::to_string(width) +
                  "x" + std::to_string(height));
  return img;
}

inline void write_raw(const std::filesystem::path& path,
                      std::span<const std::uint8_t> pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

/// Binary PPM ("P6") split channel-planewise into three grayscale planes.
inline RgbPlanes read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (detail::pnm_token(in) != "P6")
    throw IoError(path.string() + " is not a binary PPM (P6)");
  const std::uint32_t w = detail::pnm_number(in, "width");
  const std::uint32_t h = detail::pnm_number(in, "height");
  const std::uint32_t maxval = detail::pnm_number(in, "maxval");
  if (maxval > 255)
    throw IoError("16-bit PPM not supported: " + path.string());
  const auto data =
      detail::read_exact(in, std::size_t(w) * h * 3, path.string());
  RgbPlanes planes{{w, h, {}}, {w, h, {}}, {w, h, {}}};
  planes.r.pixels.reserve(std::size_t(w) * h);
  planes.g.pixels.reserve(std::size_t(w) * h);
  planes.b.pixels.reserve(std::size_t(w) * h);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    planes.r.pixels.push_back(data[i]);
    planes.g.pixels.push_back(data[i + 1]);
    planes.b.pixels.push_back(data[i + 2]);
  }
  return planes;
}

inline void write_ppm(const std::filesystem::path& path,
                      const RgbPlanes& planes) {
  const auto& [r, g, b] = planes;
  if (r.width != g.width || g.width != b.width || r.height != g.height ||
      g.height != b.height)
    throw DimensionMismatch("plane dimensions differ");
  if (r.pixels.size() != std::size_t(r.width) * r.height ||
      g.pixels.size() != r.pixels.size() || b.pixels.size() != r.pixels.size())
    throw DimensionMismatch("pixel count does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << r.width << " " << r.height << "\n255\n";
  for (std::size_t i = 0; i < r.pixels.size(); ++i) {
    out.put(char(r.pixels[i]));
    out.put(char(g.pixels[i]));
    out.put(char(b.pixels[i]));
  }
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace dvault
