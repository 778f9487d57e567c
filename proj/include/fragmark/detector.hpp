#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fragmark/image.hpp"
#include "fragmark/keystream.hpp"
#include "fragmark/scheme.hpp"

namespace fragmark {

struct DetectionMap {
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<std::uint8_t> tampered;  // per block, row-major; 1 = tampered

  bool is_tampered(std::size_t block_id) const { return tampered[block_id] != 0; }
  std::size_t tampered_count() const;
  std::size_t block_count() const noexcept { return tampered.size(); }
  double tampered_rate() const;

  bool operator==(const DetectionMap&) const = default;
};

struct BlockWatermark {
  BitString auth;       // La bits
  BitString reference;  // l*b^2 - La bits
};

BlockWatermark extract_block_watermark(const GrayImage& img, const Scheme& scheme,
                                       const Permutation& pi, std::size_t block_id);
BlockWatermark extract_block_watermark(const GrayImage& img, const Scheme& scheme,
                                       const KeySet& keys, std::size_t block_id);

// Per-block verdicts; blocks are checked in parallel.
DetectionMap detect(const GrayImage& img, const Scheme& scheme, const KeySet& keys);
// Single-threaded reference for the same verdicts.
DetectionMap detect_serial(const GrayImage& img, const Scheme& scheme, const KeySet& keys);

// P4 mask with `scale` x `scale` pixels per block, 1 = tampered. scale = b
// gives a mask the size of the image.
void save_detection_mask(const std::filesystem::path& path, const DetectionMap& map,
                         int scale = 1);

}  // namespace fragmark
