#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fragmark/image.hpp"
#include "fragmark/keystream.hpp"

namespace fragmark::testing {

inline GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

// Smooth synthetic scene: gradients, ripples and mild noise. `variant`
// changes orientation and frequencies so different variants differ everywhere.
inline GrayImage scene_image(int w, int h, int variant) {
  std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(variant));
  std::normal_distribution<double> noise(0.0, 4.0);
  const double fx = 0.011 * (variant + 1);
  const double fy = 0.017 * (variant % 3 + 1);
  const double phase = 0.9 * variant;
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 128.0 + 60.0 * std::sin(fx * x + phase) * std::cos(fy * y - phase) +
                 40.0 * ((variant % 2 ? x : y) / static_cast<double>(w) - 0.5) + noise(rng);
      v = std::clamp(v, 0.0, 255.0);
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
    }
  return img;
}

inline Seed seed_from(std::uint64_t x) {
  Seed s{};
  for (int i = 0; i < 8; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x >> (56 - 8 * i));
  s[31] = 0x5a;
  return s;
}

inline KeySet keys_from(std::uint64_t x) {
  return {seed_from(3 * x + 1), seed_from(3 * x + 2), seed_from(3 * x + 3)};
}

// The key set the Python reference uses for its frozen embeddings.
inline KeySet reference_keys() {
  KeySet k;
  for (int i = 0; i < 32; ++i) {
    k.scramble[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    k.matrix[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(32 + i);
    k.embed[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(64 + i);
  }
  return k;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

template <class T, std::size_t N>
std::vector<std::uint8_t> bytes_of(const T (&arr)[N]) {
  std::vector<std::uint8_t> out;
  for (auto v : arr) out.push_back(static_cast<std::uint8_t>(v));
  return out;
}

// Binomial 3-sigma half-width for rate p over n trials.
inline double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace fragmark::testing
