#include "fragmark/encoder.hpp"

#include <string>

#include "fragmark/error.hpp"

namespace fragmark {

BitString scramble_msb(const GrayImage& img, const Scheme& scheme, const KeySet& keys) {
  const auto planes = msb_planes(scheme.params.m);
  const BitString msb = extract_plane_bits(img, planes);
  KeyStream stream(keys.scramble, kScrambleTag);
  const Permutation sigma = gen_permutation(stream, msb.size());
  BitString scrambled(msb.size());
  for (std::size_t j = 0; j < msb.size(); ++j) scrambled[sigma[j]] = msb[j];
  return scrambled;
}

BitString gf2_encode(const BitString& C, std::size_t u, std::size_t v,
                     const std::function<BitMatrix(std::size_t)>& matrix_for) {
  if (u == 0 || C.size() % u != 0)
    throw Error(ErrorCode::LengthMismatch, "|C|=" + std::to_string(C.size()) + " is not a multiple of u");
  const std::size_t subsets = C.size() / u;
  BitString out(subsets * v);
  auto dst = out.bits();
  for (std::size_t j = 0; j < subsets; ++j) {
    const BitMatrix H = matrix_for(j);
    if (H.rows() != v || H.cols() != u) throw Error(ErrorCode::LengthMismatch, "H_j has the wrong shape");
    H.multiply(C.slice(j * u, u), dst.subspan(j * v, v));
  }
  return out;
}

BitString encode_reference(const BitString& C, const Scheme& scheme, const KeySet& keys) {
  const auto u = static_cast<std::size_t>(scheme.params.u);
  const auto v = static_cast<std::size_t>(scheme.params.v);
  if (C.size() != scheme.subsets * u)
    throw Error(ErrorCode::LengthMismatch, "|C| must equal m*N = u*S");
  KeyStream stream(keys.matrix, kMatrixTag);
  return gf2_encode(C, u, v, [&](std::size_t) { return gen_binary_matrix(stream, v, u); });
}

void auth_bits_into(std::span<const std::uint8_t> block_msb, std::span<const std::uint8_t> block_ref,
                    std::span<std::uint8_t> out) {
  if (out.size() > 256) throw Error(ErrorCode::LaOutOfRange, "La exceeds the digest length");
  thread_local std::vector<std::uint8_t> packed;
  const std::size_t total = block_msb.size() + block_ref.size();
  packed.assign((total + 7) / 8, 0);
  std::size_t i = 0;
  for (auto bit : block_msb) {
    packed[i / 8] |= static_cast<std::uint8_t>((bit & 1u) << (7 - i % 8));
    ++i;
  }
  for (auto bit : block_ref) {
    packed[i / 8] |= static_cast<std::uint8_t>((bit & 1u) << (7 - i % 8));
    ++i;
  }
  const Digest digest = sha256(packed);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (digest[k / 8] >> (7 - k % 8)) & 1u;
}

BitString auth_bits(const BitString& block_msb, const BitString& block_ref, int La) {
  if (La < 1 || La > 256) throw Error(ErrorCode::LaOutOfRange, "La must lie in 1..256");
  BitString out(static_cast<std::size_t>(La));
  auth_bits_into(block_msb.bits(), block_ref.bits(), out.bits());
  return out;
}

void permute_watermark(std::span<const std::uint8_t> canonical, const Permutation& pi,
                       std::span<std::uint8_t> embedded) {
  if (canonical.size() != pi.size() || embedded.size() != pi.size())
    throw Error(ErrorCode::PermutationSizeMismatch, "watermark length does not match permutation");
  for (std::size_t i = 0; i < canonical.size(); ++i) embedded[pi[i]] = canonical[i];
}

void unpermute_watermark(std::span<const std::uint8_t> embedded, const Permutation& pi,
                         std::span<std::uint8_t> canonical) {
  if (canonical.size() != pi.size() || embedded.size() != pi.size())
    throw Error(ErrorCode::PermutationSizeMismatch, "watermark length does not match permutation");
  for (std::size_t i = 0; i < canonical.size(); ++i) canonical[i] = embedded[pi[i]];
}

Permutation embedding_permutation(const Scheme& scheme, const KeySet& keys) {
  KeyStream stream(keys.embed, kEmbedTag);
  return gen_permutation(stream, static_cast<std::size_t>(scheme.watermark_bits));
}

GrayImage embed(const GrayImage& img, const Scheme& scheme, const KeySet& keys, EmbedTrace* trace) {
  if (img.width != scheme.width || img.height != scheme.height)
    throw Error(ErrorCode::DimensionMismatch, "image size differs from the validated scheme");
  const BlockGrid grid = scheme.grid();
  const BitString reference = encode_reference(scramble_msb(img, scheme, keys), scheme, keys);
  const auto per_block = static_cast<std::size_t>(scheme.reference_bits_per_block);
  if (reference.size() != per_block * scheme.block_count)
    throw Error(ErrorCode::ConstraintViolation, "reference bits do not fill the blocks exactly");

  const Permutation pi = embedding_permutation(scheme, keys);
  const auto auth_planes = msb_planes(scheme.m_prime);
  const auto wm_planes = lsb_planes(scheme.params.l);
  const auto La = static_cast<std::size_t>(scheme.params.La);
  const auto wm_bits = static_cast<std::size_t>(scheme.watermark_bits);

  GrayImage out = img;
  if (trace) trace->canonical.assign(scheme.block_count, {});
  const auto blocks = static_cast<std::ptrdiff_t>(scheme.block_count);

  // Each block reads cover MSB planes that embedding never writes (m' <= 8 - l)
  // and writes only its own pixels.
#pragma omp parallel
  {
    std::vector<std::uint8_t> msb(static_cast<std::size_t>(scheme.auth_input_bits));
    std::vector<std::uint8_t> canonical(wm_bits);
    std::vector<std::uint8_t> embedded(wm_bits);
#pragma omp for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
      const auto block = static_cast<std::size_t>(blk);
      const auto ref = reference.slice(block * per_block, per_block);
      read_block_planes(img, grid, block, auth_planes, msb);
      auth_bits_into(msb, ref, std::span(canonical).first(La));
      std::copy(ref.begin(), ref.end(), canonical.begin() + static_cast<std::ptrdiff_t>(La));
      permute_watermark(canonical, pi, embedded);
      write_block_planes(out, grid, block, wm_planes, embedded);
      if (trace) trace->canonical[block] = canonical;
    }
  }

  if (trace) {
    trace->reference = reference;
    trace->pi = pi;
  }
  return out;
}

GrayImage embed(const GrayImage& img, const SchemeParams& params, const KeySet& keys) {
  return embed(img, validate_params(params, img.width, img.height), keys);
}

}  // namespace fragmark
