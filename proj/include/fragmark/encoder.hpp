#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fragmark/image.hpp"
#include "fragmark/keystream.hpp"
#include "fragmark/scheme.hpp"

namespace fragmark {

// The m MSB planes of the image reordered by the scramble permutation sigma:
// C[sigma[j]] = M[j].
BitString scramble_msb(const GrayImage& img, const Scheme& scheme, const KeySet& keys);

// Splits C into consecutive u-bit subsets and maps each through its own v x u
// matrix: r_j = H_j * c_j. `matrix_for(j)` supplies H_j for j = 0..S-1 in order.
BitString gf2_encode(const BitString& C, std::size_t u, std::size_t v,
                     const std::function<BitMatrix(std::size_t)>& matrix_for);

// gf2_encode with H_j drawn sequentially from the matrix key stream.
BitString encode_reference(const BitString& C, const Scheme& scheme, const KeySet& keys);

// Keyless authentication: SHA-256 of (msb || ref) packed MSB-first, truncated
// to the first La digest bits.
BitString auth_bits(const BitString& block_msb, const BitString& block_ref, int La);
// Allocation-light form for hot loops; `out` receives La bits.
void auth_bits_into(std::span<const std::uint8_t> block_msb,
                    std::span<const std::uint8_t> block_ref, std::span<std::uint8_t> out);

// Canonical per-block watermark vector: auth bits then reference bits.
// The embedded vector satisfies embedded[pi[i]] = canonical[i].
void permute_watermark(std::span<const std::uint8_t> canonical, const Permutation& pi,
                       std::span<std::uint8_t> embedded);
void unpermute_watermark(std::span<const std::uint8_t> embedded, const Permutation& pi,
                         std::span<std::uint8_t> canonical);

// The embedding permutation over l*b^2 positions, shared by every block.
Permutation embedding_permutation(const Scheme& scheme, const KeySet& keys);

// Everything the embedder produces besides the image, kept for inspection.
struct EmbedTrace {
  BitString reference;                        // v*S bits
  std::vector<std::vector<std::uint8_t>> canonical;  // per block, l*b^2 bits
  Permutation pi;
};

GrayImage embed(const GrayImage& img, const Scheme& scheme, const KeySet& keys,
                EmbedTrace* trace = nullptr);
GrayImage embed(const GrayImage& img, const SchemeParams& params, const KeySet& keys);

}  // namespace fragmark
