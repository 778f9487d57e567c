#include "fragmark/keystream.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "fragmark/error.hpp"

namespace fragmark {

namespace {

struct MdDeleter {
  void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};
struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* sha256_md() {
  static const std::unique_ptr<EVP_MD, MdDeleter> md(EVP_MD_fetch(nullptr, "SHA256", nullptr));
  return md.get();
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  // One context per thread; EVP_DigestInit_ex resets it.
  thread_local const std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
  Digest out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), sha256_md(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
    throw std::runtime_error("SHA-256 failed");
  return out;
}

// --- keys ------------------------------------------------------------------

std::string seed_to_hex(const Seed& seed) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto byte : seed) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xf]);
  }
  return out;
}

Seed seed_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(ErrorCode::MalformedKeyFile, "seed must be 64 hex digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorCode::MalformedKeyFile, std::string("invalid hex digit '") + c + "'");
  };
  Seed seed{};
  for (std::size_t i = 0; i < seed.size(); ++i)
    seed[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return seed;
}

std::string format_key_file(const KeySet& keys) {
  return "scramble=" + seed_to_hex(keys.scramble) + "\nmatrix=" + seed_to_hex(keys.matrix) +
         "\nembed=" + seed_to_hex(keys.embed) + "\n";
}

KeySet parse_key_file(std::string_view text) {
  KeySet keys;
  unsigned found = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedKeyFile, "expected name=hex, got '" + line + "'");
    const auto name = line.substr(0, eq);
    const auto value = std::string_view(line).substr(eq + 1);
    if (name == "scramble") {
      keys.scramble = seed_from_hex(value);
      found |= 1;
    } else if (name == "matrix") {
      keys.matrix = seed_from_hex(value);
      found |= 2;
    } else if (name == "embed") {
      keys.embed = seed_from_hex(value);
      found |= 4;
    } else {
      throw Error(ErrorCode::MalformedKeyFile, "unknown key '" + name + "'");
    }
  }
  if (found != 7) throw Error(ErrorCode::MalformedKeyFile, "key file needs scramble, matrix and embed");
  return keys;
}

KeySet load_key_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::FileNotFound, "no such file: " + path.string());
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_file(buffer.str());
}

void save_key_file(const std::filesystem::path& path, const KeySet& keys) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << format_key_file(keys);
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

KeySet generate_keys() {
  KeySet keys;
  for (Seed* seed : {&keys.scramble, &keys.matrix, &keys.embed})
    if (RAND_bytes(seed->data(), static_cast<int>(seed->size())) != 1)
      throw Error(ErrorCode::Io, "OS randomness unavailable");
  return keys;
}

bool has_zero_seed(const KeySet& keys) noexcept {
  auto zero = [](const Seed& s) { return std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; }); };
  return zero(keys.scramble) || zero(keys.matrix) || zero(keys.embed);
}

// --- stream ----------------------------------------------------------------

KeyStream::KeyStream(const Seed& seed, std::string_view tag) {
  if (tag.size() > 16) throw Error(ErrorCode::TagTooLong, "domain tag longer than 16 bytes");
  prefix_.assign(seed.begin(), seed.end());
  prefix_.insert(prefix_.end(), tag.begin(), tag.end());
  tag_end_ = prefix_.size();
  prefix_.resize(tag_end_ + 8);
}

void KeyStream::refill() {
  for (int i = 0; i < 8; ++i) prefix_[tag_end_ + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  block_ = sha256(prefix_);
  ++counter_;
  pos_ = 0;
}

std::uint8_t KeyStream::next_byte() {
  if (pos_ == block_.size()) refill();
  return block_[pos_++];
}

std::uint64_t KeyStream::next_u64() {
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x = x << 8 | next_byte();
  return x;
}

std::uint64_t KeyStream::uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // [2^64 mod bound, 2^64) holds a whole number of residue cycles.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const auto x = next_u64();
    if (x >= threshold) return x % bound;
  }
}

// --- permutations ----------------------------------------------------------

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::uint32_t> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = static_cast<std::uint32_t>(i);
  return Permutation(std::move(map));
}

bool Permutation::is_valid() const {
  std::vector<bool> seen(map.size(), false);
  for (auto x : map) {
    if (x >= map.size() || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

Permutation gen_permutation(KeyStream& stream, std::size_t n) {
  auto p = Permutation::identity(n);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = stream.uniform(i + 1);
    std::swap(p.map[i], p.map[j]);
  }
  return p;
}

Permutation invert_permutation(const Permutation& p) {
  std::vector<std::uint32_t> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p.map[i]] = static_cast<std::uint32_t>(i);
  return Permutation(std::move(inv));
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::PermutationSizeMismatch, "composing permutations of different size");
  std::vector<std::uint32_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.map[b.map[i]];
  return Permutation(std::move(out));
}

std::string format_permutation(const Permutation& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(p.map[i]);
  }
  return out;
}

Permutation parse_permutation(std::string_view text) {
  std::vector<std::uint32_t> map;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    auto field = text.substr(start, comma - start);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
    if (field.empty() || !std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::PermutationSizeMismatch, "malformed permutation '" + std::string(text) + "'");
    map.push_back(static_cast<std::uint32_t>(std::stoul(std::string(field))));
    start = comma + 1;
  }
  Permutation p(std::move(map));
  if (!p.is_valid())
    throw Error(ErrorCode::PermutationSizeMismatch, "'" + std::string(text) + "' is not a bijection");
  return p;
}

// --- GF(2) matrices --------------------------------------------------------

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64), words_(rows * words_per_row_, 0) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::LengthMismatch, "matrix dimensions must be positive");
}

bool BitMatrix::get(std::size_t r, std::size_t c) const {
  return (words_[r * words_per_row_ + c / 64] >> (c % 64)) & 1u;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool value) {
  auto& w = words_[r * words_per_row_ + c / 64];
  const std::uint64_t bit = std::uint64_t{1} << (c % 64);
  w = value ? (w | bit) : (w & ~bit);
}

void BitMatrix::multiply(std::span<const std::uint8_t> x, std::span<std::uint8_t> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw Error(ErrorCode::LengthMismatch, "matrix-vector size mismatch");
  std::vector<std::uint64_t> packed(words_per_row_, 0);
  for (std::size_t c = 0; c < cols_; ++c) packed[c / 64] |= std::uint64_t{x[c] & 1u} << (c % 64);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w) acc ^= words_[r * words_per_row_ + w] & packed[w];
    y[r] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix gen_binary_matrix(KeyStream& stream, std::size_t rows, std::size_t cols) {
  BitMatrix m(rows, cols);
  std::uint8_t byte = 0;
  int left = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (left == 0) {
        byte = stream.next_byte();
        left = 8;
      }
      --left;
      m.set(r, c, (byte >> left) & 1u);
    }
  return m;
}

}  // namespace fragmark
