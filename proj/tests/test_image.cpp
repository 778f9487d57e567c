#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "fragmark/error.hpp"
#include "fragmark/image.hpp"
#include "test_support.hpp"

using namespace fragmark;
using fragmark::testing::random_image;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fragmark_image_" + name);
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected fragmark::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("load_image reads a 2x2 P5 file byte for byte") {
  const auto path = temp_file("2x2.pgm");
  write_bytes(path, std::string("P5\n2 2\n255\n") + std::string{'\x00', '\xff', '\x80', '\x07'});
  const GrayImage img = load_image(path);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.pixels == std::vector<std::uint8_t>{0, 255, 128, 7});
}

TEST_CASE("PGM header tolerates comments and mixed whitespace") {
  const std::string text = std::string("P5 # magic\n# comment line\n 3\t1\n255\n") + "abc";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  const GrayImage img = parse_pgm(bytes);
  CHECK(img.width == 3);
  CHECK(img.pixels == std::vector<std::uint8_t>{'a', 'b', 'c'});
}

TEST_CASE("512x512 PGM round trip") {
  const auto img = random_image(512, 512, 7);
  const auto path = temp_file("512.pgm");
  save_image(path, img);
  const auto back = load_image(path);
  CHECK(back.size() == 262144);
  CHECK(back == img);
}

TEST_CASE("PGM writer emits the canonical header") {
  const GrayImage img(2, 1, std::vector<std::uint8_t>{1, 2});
  const auto bytes = encode_pgm(img);
  const std::string header(bytes.begin(), bytes.end() - 2);
  CHECK(header == "P5\n2 1\n255\n");
}

TEST_CASE("malformed PGM inputs are rejected") {
  auto parse = [](const std::string& s) {
    return code_of([&] { parse_pgm(std::vector<std::uint8_t>(s.begin(), s.end())); });
  };
  CHECK(parse("P2\n2 2\n255\n0 1 2 3\n") == ErrorCode::MalformedPgm);
  CHECK(parse("P5\n2 2\n65535\n") == ErrorCode::MalformedPgm);
  CHECK(parse("P5\n2 2\n255\nabc") == ErrorCode::MalformedPgm);
  CHECK(parse("P5\n2") == ErrorCode::MalformedPgm);
  CHECK(parse("") == ErrorCode::MalformedPgm);
  CHECK(code_of([] { load_image(temp_file("does-not-exist.pgm")); }) == ErrorCode::FileNotFound);
}

TEST_CASE("extract_plane_bits follows the pixel-major contract") {
  const GrayImage one(1, 1, std::vector<std::uint8_t>{0b10000000});
  const int msb[] = {7};
  CHECK(extract_plane_bits(one, msb).bits()[0] == 1);

  const GrayImage two(2, 1, std::vector<std::uint8_t>{0b11000000, 0b01000000});
  const int planes[] = {7, 6};
  const auto bits = extract_plane_bits(two, planes);
  CHECK(std::vector<std::uint8_t>(bits.bits().begin(), bits.bits().end()) ==
        std::vector<std::uint8_t>{1, 1, 0, 1});

  const int reversed[] = {6, 7};
  const auto bits_r = extract_plane_bits(two, reversed);
  CHECK(std::vector<std::uint8_t>(bits_r.bits().begin(), bits_r.bits().end()) ==
        std::vector<std::uint8_t>{1, 1, 1, 0});
}

TEST_CASE("invalid plane lists are rejected") {
  const GrayImage img(1, 1);
  const int bad_index[] = {8};
  const int repeated[] = {3, 3};
  CHECK(code_of([&] { extract_plane_bits(img, bad_index); }) == ErrorCode::InvalidPlaneIndex);
  CHECK(code_of([&] { extract_plane_bits(img, repeated); }) == ErrorCode::InvalidPlaneIndex);
  CHECK(code_of([&] { extract_plane_bits(img, std::span<const int>{}); }) == ErrorCode::InvalidPlaneIndex);
}

TEST_CASE("replace_plane_bits examples") {
  const int low2[] = {1, 0};
  const GrayImage full(1, 1, std::vector<std::uint8_t>{0xFF});
  CHECK(replace_plane_bits(full, low2, BitString(std::vector<std::uint8_t>{0, 0})).pixels[0] == 0b11111100);

  const int lsb[] = {0};
  const GrayImage zero(1, 1, std::vector<std::uint8_t>{0});
  CHECK(replace_plane_bits(zero, lsb, BitString(std::vector<std::uint8_t>{1})).pixels[0] == 1);

  CHECK(code_of([&] { replace_plane_bits(zero, low2, BitString(1)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("property: extract/replace round trip and untouched planes") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 17);
    const int h = 1 + static_cast<int>(rng() % 13);
    const auto img = random_image(w, h, rng());
    std::vector<int> planes(8);
    std::iota(planes.begin(), planes.end(), 0);
    std::shuffle(planes.begin(), planes.end(), rng);
    planes.resize(1 + rng() % 8);

    CHECK(replace_plane_bits(img, planes, extract_plane_bits(img, planes)) == img);

    BitString noise(img.size() * planes.size());
    for (auto& bit : noise.bits()) bit = rng() & 1u;
    const auto out = replace_plane_bits(img, planes, noise);
    CHECK(extract_plane_bits(out, planes) == noise);
    std::uint8_t touched = 0;
    for (int p : planes) touched |= static_cast<std::uint8_t>(1u << p);
    for (std::size_t i = 0; i < img.size(); ++i)
      REQUIRE((out.pixels[i] & ~touched) == (img.pixels[i] & ~touched));
  }
}

TEST_CASE("block_pixel_indices geometry") {
  const BlockGrid grid(4, 4, 2);
  CHECK(grid.block_pixel_indices(0) == std::vector<std::size_t>{0, 1, 4, 5});
  CHECK(grid.block_pixel_indices(3) == std::vector<std::size_t>{10, 11, 14, 15});
  CHECK(code_of([&] { grid.block_pixel_indices(4); }) == ErrorCode::BlockOutOfRange);
  CHECK(BlockGrid(512, 512, 2).block_count() == 65536);
  CHECK(code_of([] { BlockGrid(5, 4, 2); }) == ErrorCode::DivisibilityError);
}

TEST_CASE("property: blocks partition the pixel set") {
  for (auto [w, h, b] : {std::tuple{4, 4, 2}, {12, 6, 3}, {16, 8, 4}, {7, 5, 1}}) {
    const BlockGrid grid(w, h, b);
    std::vector<int> hits(static_cast<std::size_t>(w * h), 0);
    for (std::size_t k = 0; k < grid.block_count(); ++k)
      for (auto p : grid.block_pixel_indices(k)) ++hits[p];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int n) { return n == 1; }));
  }
}

TEST_CASE("PBM encoding packs rows MSB-first with padding") {
  const std::vector<std::uint8_t> bits = {1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  const auto bytes = encode_pbm(10, 2, bits);
  const std::string header = "P4\n10 2\n";
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(header.size())) == header);
  CHECK(bytes[header.size() + 0] == 0x80);
  CHECK(bytes[header.size() + 1] == 0x80);
  CHECK(bytes[header.size() + 2] == 0x80);
  CHECK(bytes[header.size() + 3] == 0x40);
}
