#include <doctest.h>

#include <algorithm>
#include <random>

#include "fragmark/attacks.hpp"
#include "fragmark/error.hpp"
#include "fragmark/keystream.hpp"
#include "oracles/frozen.inc"
#include "test_support.hpp"

using namespace fragmark;
using fragmark::testing::seed_from;
using fragmark::testing::to_hex;

namespace {

std::vector<std::uint8_t> take(KeyStream& s, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = s.next_byte();
  return out;
}

std::vector<std::uint32_t> as_map(std::span<const int> values) {
  return {values.begin(), values.end()};
}

}  // namespace

TEST_CASE("stream blocks match SHA-256(seed || tag || counter)") {
  KeyStream s(Seed{}, "perm");
  CHECK(to_hex(take(s, 32)) == kZeroSeedPermBlock0);
  CHECK(to_hex(take(s, 32)) == kZeroSeedPermBlock1);
}

TEST_CASE("different tags on the same seed give different streams") {
  KeyStream a(Seed{}, kScrambleTag);
  KeyStream b(Seed{}, kMatrixTag);
  const auto first_a = to_hex(take(a, 32));
  const auto first_b = to_hex(take(b, 32));
  CHECK(first_a == kZeroSeedScrambleBlock0);
  CHECK(first_b == kZeroSeedMatrixBlock0);
  CHECK(first_a != first_b);
}

TEST_CASE("streams are deterministic") {
  KeyStream a(seed_from(42), "embed");
  KeyStream b(seed_from(42), "embed");
  CHECK(take(a, 1024) == take(b, 1024));
}

TEST_CASE("tags longer than 16 bytes are rejected") {
  CHECK_NOTHROW(KeyStream(Seed{}, "0123456789abcdef"));
  CHECK_THROWS_AS(KeyStream(Seed{}, "0123456789abcdefg"), Error);
}

TEST_CASE("gen_permutation matches the reference shuffle") {
  Seed seed{};
  for (int i = 0; i < 32; ++i) seed[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  {
    KeyStream s(seed, kEmbedTag);
    CHECK(gen_permutation(s, 8).map == as_map(kPermSeqEmbed8));
  }
  {
    KeyStream s(seed, kEmbedTag);
    CHECK(gen_permutation(s, 12).map == as_map(kPermSeqEmbed12));
  }
  {
    KeyStream s(seed, kScrambleTag);
    CHECK(gen_permutation(s, 100).map == as_map(kPermSeqScramble100));
  }
}

TEST_CASE("gen_permutation edge cases and bijectivity") {
  KeyStream s(seed_from(1), "perm");
  CHECK(gen_permutation(s, 1) == Permutation::identity(1));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    KeyStream stream(seed_from(rng()), "perm");
    auto p = gen_permutation(stream, n);
    CHECK(p.is_valid());
    auto sorted = p.map;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == Permutation::identity(n).map);

    KeyStream again(seed_from(0), "perm");
    KeyStream again2(seed_from(0), "perm");
    CHECK(gen_permutation(again, n) == gen_permutation(again2, n));
  }
}

TEST_CASE("gen_permutation is uniform over S_8 (chi-squared, 10^6 seeds)") {
  constexpr std::size_t kSeeds = 1'000'000;
  std::vector<std::uint32_t> counts(40320, 0);
  std::vector<std::uint64_t> fact = {1, 1, 2, 6, 24, 120, 720, 5040};
  for (std::size_t i = 0; i < kSeeds; ++i) {
    KeyStream s(seed_from(i), kEmbedTag);
    auto p = gen_permutation(s, 8).map;
    // Lehmer rank
    std::uint64_t rank = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      std::uint64_t smaller = 0;
      for (std::size_t j = k + 1; j < 8; ++j) smaller += p[j] < p[k];
      rank += smaller * fact[7 - k];
    }
    ++counts[rank];
  }
  const double expected = static_cast<double>(kSeeds) / 40320.0;
  double chi2 = 0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  MESSAGE("chi2 = " << chi2 << " (critical " << kChi2Critical40319p01 << ")");
  CHECK(chi2 < kChi2Critical40319p01);
}

TEST_CASE("uniform draws stay in range") {
  KeyStream s(seed_from(3), "u");
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull, (1ull << 63) + 1}) {
    for (int i = 0; i < 50; ++i) CHECK(s.uniform(bound) < std::max<std::uint64_t>(bound, 1));
  }
}

TEST_CASE("gen_binary_matrix matches the reference fill") {
  Seed seed{};
  for (int i = 0; i < 32; ++i) seed[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  KeyStream s(seed, kMatrixTag);
  const BitMatrix m = gen_binary_matrix(s, 8, 32);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 32; ++c) REQUIRE(m.get(r, c) == (kMatrixSeq8x32[r * 32 + c] != 0));
}

TEST_CASE("gen_binary_matrix small cases and density") {
  // Find a stream whose first bit is 1.
  for (std::uint64_t k = 0;; ++k) {
    KeyStream probe(seed_from(k), kMatrixTag);
    if (!(probe.next_byte() & 0x80)) continue;
    KeyStream s(seed_from(k), kMatrixTag);
    const auto m = gen_binary_matrix(s, 1, 1);
    CHECK(m.get(0, 0));
    break;
  }
  for (std::uint64_t k = 0; k < 20; ++k) {
    KeyStream a(seed_from(k), kMatrixTag);
    KeyStream b(seed_from(k), kMatrixTag);
    const auto ma = gen_binary_matrix(a, 8, 32);
    const auto mb = gen_binary_matrix(b, 8, 32);
    int ones = 0;
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 32; ++c) {
        REQUIRE(ma.get(r, c) == mb.get(r, c));
        ones += ma.get(r, c);
      }
    // 256 fair bits: mean 128, sigma 8; [0.40, 0.60] is beyond 3 sigma.
    CHECK(ones >= 103);
    CHECK(ones <= 153);
  }
}

TEST_CASE("BitMatrix multiply is the GF(2) product") {
  std::mt19937_64 rng(17);
  for (std::size_t cols : {1u, 5u, 32u, 64u, 65u, 130u}) {
    KeyStream s(seed_from(cols), kMatrixTag);
    const std::size_t rows = 1 + rng() % 9;
    const auto m = gen_binary_matrix(s, rows, cols);
    std::vector<std::uint8_t> x(cols), y(rows);
    for (auto& bit : x) bit = rng() & 1u;
    m.multiply(x, y);
    for (std::size_t r = 0; r < rows; ++r) {
      int acc = 0;
      for (std::size_t c = 0; c < cols; ++c) acc += m.get(r, c) * x[c];
      REQUIRE(y[r] == (acc & 1));
    }
  }
  const auto id = BitMatrix::identity(4);
  std::vector<std::uint8_t> x = {1, 0, 1, 1}, y(4);
  id.multiply(x, y);
  CHECK(y == x);
}

TEST_CASE("permutation inverse and composition") {
  CHECK(invert_permutation(Permutation::identity(5)) == Permutation::identity(5));
  const Permutation swap({1, 0});
  CHECK(invert_permutation(swap) == swap);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    KeyStream s(seed_from(rng()), "perm");
    const auto p = gen_permutation(s, 1 + rng() % 64);
    const auto inv = invert_permutation(p);
    CHECK(compose(p, inv) == Permutation::identity(p.size()));
    CHECK(compose(inv, p) == Permutation::identity(p.size()));
    CHECK(invert_permutation(inv) == p);
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(inv[p[i]] == i);
  }
}

TEST_CASE("permutation text form") {
  const Permutation p({3, 1, 0, 2});
  CHECK(format_permutation(p) == "3,1,0,2");
  CHECK(parse_permutation("3, 1,0 ,2") == p);
  CHECK_THROWS_AS(parse_permutation("0,0"), Error);
  CHECK_THROWS_AS(parse_permutation("1,x"), Error);
  CHECK_THROWS_AS(parse_permutation(""), Error);
}

TEST_CASE("key files") {
  const auto keys = fragmark::testing::keys_from(9);
  CHECK(parse_key_file(format_key_file(keys)) == keys);
  CHECK(format_key_file(keys).find("scramble=") == 0);
  CHECK_THROWS_AS(parse_key_file("scramble=00\nmatrix=00\nembed=00\n"), Error);
  CHECK_THROWS_AS(parse_key_file("scramble=" + std::string(64, '0') + "\n"), Error);
  CHECK_THROWS_AS(parse_key_file("bogus=" + std::string(64, '0') + "\n"), Error);
  CHECK(has_zero_seed(KeySet{}));
  CHECK_FALSE(has_zero_seed(keys));
  const auto a = generate_keys();
  const auto b = generate_keys();
  CHECK(a != b);
}

TEST_CASE("lexicographic unranking agrees with next_permutation") {
  auto perm = Permutation::identity(6).map;
  std::uint64_t rank = 0;
  do {
    REQUIRE(unrank_permutation(6, rank).map == perm);
    ++rank;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(rank == 720);
}
