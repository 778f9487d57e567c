#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fragmark {

using Seed = std::array<std::uint8_t, 32>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

// Domain tags separating the three key roles.
inline constexpr std::string_view kScrambleTag = "scramble";
inline constexpr std::string_view kMatrixTag = "matrix";
inline constexpr std::string_view kEmbedTag = "embed";

struct KeySet {
  Seed scramble{};
  Seed matrix{};
  Seed embed{};

  bool operator==(const KeySet&) const = default;
};

std::string seed_to_hex(const Seed& seed);
Seed seed_from_hex(std::string_view hex);

// Key file: three lines `scramble=<64 hex>`, `matrix=<64 hex>`, `embed=<64 hex>`.
std::string format_key_file(const KeySet& keys);
KeySet parse_key_file(std::string_view text);
KeySet load_key_file(const std::filesystem::path& path);
void save_key_file(const std::filesystem::path& path, const KeySet& keys);
KeySet generate_keys();  // OS randomness
bool has_zero_seed(const KeySet& keys) noexcept;

// SHA-256 counter-mode byte stream: block k is SHA-256(seed || tag || k as
// 64-bit big-endian). Single consumer.
class KeyStream {
 public:
  KeyStream(const Seed& seed, std::string_view tag);

  std::uint8_t next_byte();
  // Eight stream bytes, big-endian.
  std::uint64_t next_u64();
  // Uniform draw in [0, bound) by rejection sampling.
  std::uint64_t uniform(std::uint64_t bound);

 private:
  void refill();

  std::vector<std::uint8_t> prefix_;  // seed || tag || counter
  std::size_t tag_end_;
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t pos_ = block_.size();
};

// Bijection on {0..n-1}; map[i] is the image of i.
struct Permutation {
  std::vector<std::uint32_t> map;

  Permutation() = default;
  explicit Permutation(std::vector<std::uint32_t> m) : map(std::move(m)) {}
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return map.size(); }
  std::uint32_t operator[](std::size_t i) const { return map[i]; }
  bool is_valid() const;

  auto operator<=>(const Permutation&) const = default;
};

Permutation gen_permutation(KeyStream& stream, std::size_t n);
Permutation invert_permutation(const Permutation& p);
// (a ∘ b)(i) = a(b(i))
Permutation compose(const Permutation& a, const Permutation& b);

// Comma-separated index map, e.g. "1,0,2".
std::string format_permutation(const Permutation& p);
Permutation parse_permutation(std::string_view text);

// Dense GF(2) matrix, each row packed into 64-bit words (bit c of the row is
// bit c % 64 of word c / 64).
class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool get(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, bool value);

  // y = H * x over GF(2); x holds cols() bits.
  void multiply(std::span<const std::uint8_t> x, std::span<std::uint8_t> y) const;

  static BitMatrix identity(std::size_t n);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_per_row_;
  std::vector<std::uint64_t> words_;
};

// Row-major fill from the stream's bits, MSB-first within each byte.
BitMatrix gen_binary_matrix(KeyStream& stream, std::size_t rows, std::size_t cols);

}  // namespace fragmark
