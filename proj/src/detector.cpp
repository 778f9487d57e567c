#include "fragmark/detector.hpp"

#include <algorithm>
#include <numeric>

#include "fragmark/encoder.hpp"
#include "fragmark/error.hpp"

namespace fragmark {

std::size_t DetectionMap::tampered_count() const {
  return static_cast<std::size_t>(std::count(tampered.begin(), tampered.end(), std::uint8_t{1}));
}

double DetectionMap::tampered_rate() const {
  return tampered.empty() ? 0.0 : static_cast<double>(tampered_count()) / static_cast<double>(tampered.size());
}

BlockWatermark extract_block_watermark(const GrayImage& img, const Scheme& scheme, const Permutation& pi,
                                       std::size_t block_id) {
  const auto wm_bits = static_cast<std::size_t>(scheme.watermark_bits);
  if (pi.size() != wm_bits) throw Error(ErrorCode::PermutationSizeMismatch, "permutation size != l*b^2");
  std::vector<std::uint8_t> embedded(wm_bits);
  std::vector<std::uint8_t> canonical(wm_bits);
  read_block_planes(img, scheme.grid(), block_id, lsb_planes(scheme.params.l), embedded);
  unpermute_watermark(embedded, pi, canonical);
  const auto La = static_cast<std::ptrdiff_t>(scheme.params.La);
  return {BitString({canonical.begin(), canonical.begin() + La}),
          BitString({canonical.begin() + La, canonical.end()})};
}

BlockWatermark extract_block_watermark(const GrayImage& img, const Scheme& scheme, const KeySet& keys,
                                       std::size_t block_id) {
  return extract_block_watermark(img, scheme, embedding_permutation(scheme, keys), block_id);
}

namespace {

struct BlockChecker {
  const GrayImage& img;
  const Scheme& scheme;
  BlockGrid grid;
  Permutation pi;
  std::vector<int> auth_planes;
  std::vector<int> wm_planes;

  BlockChecker(const GrayImage& image, const Scheme& s, const KeySet& keys)
      : img(image),
        scheme(s),
        grid(s.grid()),
        pi(embedding_permutation(s, keys)),
        auth_planes(msb_planes(s.m_prime)),
        wm_planes(lsb_planes(s.params.l)) {
    if (img.width != s.width || img.height != s.height)
      throw Error(ErrorCode::DimensionMismatch, "image size differs from the validated scheme");
  }

  struct Scratch {
    std::vector<std::uint8_t> msb, embedded, canonical, recomputed;
    explicit Scratch(const Scheme& s)
        : msb(static_cast<std::size_t>(s.auth_input_bits)),
          embedded(static_cast<std::size_t>(s.watermark_bits)),
          canonical(static_cast<std::size_t>(s.watermark_bits)),
          recomputed(static_cast<std::size_t>(s.params.La)) {}
  };

  bool tampered(std::size_t block, Scratch& w) const {
    read_block_planes(img, grid, block, wm_planes, w.embedded);
    unpermute_watermark(w.embedded, pi, w.canonical);
    read_block_planes(img, grid, block, auth_planes, w.msb);
    const auto La = w.recomputed.size();
    auth_bits_into(w.msb, std::span(w.canonical).subspan(La), w.recomputed);
    return !std::equal(w.recomputed.begin(), w.recomputed.end(), w.canonical.begin());
  }

  DetectionMap empty_map() const {
    DetectionMap map;
    map.blocks_x = grid.blocks_x();
    map.blocks_y = grid.blocks_y();
    map.tampered.assign(grid.block_count(), 0);
    return map;
  }
};

}  // namespace

DetectionMap detect(const GrayImage& img, const Scheme& scheme, const KeySet& keys) {
  const BlockChecker checker(img, scheme, keys);
  DetectionMap map = checker.empty_map();
  const auto blocks = static_cast<std::ptrdiff_t>(map.tampered.size());
#pragma omp parallel
  {
    BlockChecker::Scratch scratch(scheme);
#pragma omp for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk)
      map.tampered[static_cast<std::size_t>(blk)] = checker.tampered(static_cast<std::size_t>(blk), scratch) ? 1 : 0;
  }
  return map;
}

DetectionMap detect_serial(const GrayImage& img, const Scheme& scheme, const KeySet& keys) {
  const BlockChecker checker(img, scheme, keys);
  DetectionMap map = checker.empty_map();
  BlockChecker::Scratch scratch(scheme);
  for (std::size_t block = 0; block < map.tampered.size(); ++block)
    map.tampered[block] = checker.tampered(block, scratch) ? 1 : 0;
  return map;
}

void save_detection_mask(const std::filesystem::path& path, const DetectionMap& map, int scale) {
  if (scale < 1) throw Error(ErrorCode::DimensionMismatch, "mask scale must be positive");
  const int w = map.blocks_x * scale;
  const int h = map.blocks_y * scale;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      bits[static_cast<std::size_t>(y) * w + x] =
          map.tampered[static_cast<std::size_t>(y / scale) * map.blocks_x + x / scale];
  save_pbm(path, w, h, bits);
}

}  // namespace fragmark
