#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dvault/image_io.hpp"
#include "test_support.hpp"

using namespace dvault;
using testsupport::TempDir;

TEST_CASE("pgm write/read roundtrip", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(5);
  GrayImage img{37, 21, {}};
  img.pixels.resize(37 * 21);
  for (auto& p : img.pixels) p = std::uint8_t(rng());

  const auto path = dir / "img.pgm";
  write_pgm(path, img);
  const GrayImage back = read_pgm(path);
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("pgm header parsing tolerates comments", "[io]") {
  TempDir dir;
  const auto path = dir / "c.pgm";
  testsupport::write_file(path,
                          "P5 # format\n# a comment line\n 3 # width\n2\n255\n"
                          "\x01\x02\x03\x04\x05\x06");
  const GrayImage img = read_pgm(path);
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.pixels == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("pgm rejects bad inputs", "[io]") {
  TempDir dir;
  const auto ascii = dir / "a.pgm";
  testsupport::write_file(ascii, "P2\n2 2\n255\n0 1 2 3\n");
  CHECK_THROWS_AS(read_pgm(ascii), IoError);

  const auto wide = dir / "w.pgm";
  testsupport::write_file(wide, "P5\n2 2\n65535\n\0\0\0\0\0\0\0\0");
  CHECK_THROWS_AS(read_pgm(wide), IoError);

  const auto truncated = dir / "t.pgm";
  testsupport::write_file(truncated, "P5\n4 4\n255\nxy");
  CHECK_THROWS_AS(read_pgm(truncated), IoError);

  CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);
}

TEST_CASE("raw read checks the byte count", "[io]") {
  TempDir dir;
  const auto path = dir / "img.raw";
  std::vector<std::uint8_t> pixels{9, 8, 7, 6, 5, 4};
  write_raw(path, pixels);
  const GrayImage img = read_raw(path, 3, 2);
  CHECK(img.pixels == pixels);
  CHECK_THROWS_AS(read_raw(path, 4, 2), IoError);  // short file
  CHECK_THROWS_AS(read_raw(path, 3, 1), IoError);  // trailing bytes
}

TEST_CASE("ppm splits into planes and merges back", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(6);
  RgbPlanes planes{{5, 4, {}}, {5, 4, {}}, {5, 4, {}}};
  for (auto* plane : {&planes.r, &planes.g, &planes.b}) {
    plane->pixels.resize(20);
    for (auto& p : plane->pixels) p = std::uint8_t(rng());
  }
  const auto path = dir / "img.ppm";
  write_ppm(path, planes);
  const RgbPlanes back = read_ppm(path);
  CHECK(back.r.pixels == planes.r.pixels);
  CHECK(back.g.pixels == planes.g.pixels);
  CHECK(back.b.pixels == planes.b.pixels);
  CHECK(back.b.width == 5);
  CHECK(back.b.height == 4);
}
