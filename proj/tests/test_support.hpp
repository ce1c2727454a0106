#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

/// Self-deleting temporary directory.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    static std::atomic<unsigned> counter{0};
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate =
          base / ("dvault_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string random_bases(std::mt19937_64& rng, std::size_t n) {
  static constexpr char alphabet[] = {'A', 'C', 'G', 'T'};
  std::string s(n, 'A');
  for (auto& c : s) c = alphabet[rng() & 3];
  return s;
}

inline std::vector<std::uint8_t> random_pixels(std::mt19937_64& rng,
                                               std::size_t n) {
  std::vector<std::uint8_t> p(n);
  for (auto& b : p) b = std::uint8_t(rng());
  return p;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

/// 64x64 left-to-right gradient: strong horizontal correlation by
/// construction.
inline std::vector<std::uint8_t> gradient_image(std::uint32_t width = 64,
                                                std::uint32_t height = 64) {
  std::vector<std::uint8_t> img(std::size_t(width) * height);
  for (std::uint32_t r = 0; r < height; ++r)
    for (std::uint32_t c = 0; c < width; ++c)
      img[std::size_t(r) * width + c] =
          std::uint8_t(c * 255 / (width > 1 ? width - 1 : 1));
  return img;
}

}  // namespace testsupport
