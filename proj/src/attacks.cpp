#include "fragmark/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fragmark/encoder.hpp"
#include "fragmark/error.hpp"

namespace fragmark {

namespace mp = boost::multiprecision;

// --- collage ---------------------------------------------------------------

namespace {

void check_donors(std::span<const GrayImage> donors) {
  if (donors.empty()) throw Error(ErrorCode::EmptyAssignment, "no donor images");
  for (const auto& d : donors)
    if (d.width != donors[0].width || d.height != donors[0].height)
      throw Error(ErrorCode::DimensionMismatch, "donor images differ in size");
}

}  // namespace

RegionAssignment quadrant_assignment(const BlockGrid& grid) {
  RegionAssignment assign{grid.blocks_x(), grid.blocks_y(), {}};
  assign.source.resize(grid.block_count());
  const int half_x = grid.blocks_x() / 2;
  const int half_y = grid.blocks_y() / 2;
  for (int by = 0; by < grid.blocks_y(); ++by)
    for (int bx = 0; bx < grid.blocks_x(); ++bx)
      assign.source[static_cast<std::size_t>(by) * grid.blocks_x() + bx] =
          static_cast<std::uint32_t>((by >= half_y ? 2 : 0) + (bx >= half_x ? 1 : 0));
  return assign;
}

RegionAssignment parse_assignment(std::string_view text) {
  RegionAssignment assign;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::vector<std::uint32_t> values;
    std::string token;
    while (row >> token) {
      if (token.front() == '#') break;
      if (!std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw Error(ErrorCode::EmptyAssignment, "bad donor index '" + token + "'");
      values.push_back(static_cast<std::uint32_t>(std::stoul(token)));
    }
    if (values.empty()) continue;
    if (assign.blocks_x == 0) assign.blocks_x = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != assign.blocks_x)
      throw Error(ErrorCode::DimensionMismatch, "assignment rows have different lengths");
    assign.source.insert(assign.source.end(), values.begin(), values.end());
    ++assign.blocks_y;
  }
  if (assign.source.empty()) throw Error(ErrorCode::EmptyAssignment, "assignment is empty");
  return assign;
}

GrayImage collage(std::span<const GrayImage> donors, const RegionAssignment& assign, int block_side) {
  check_donors(donors);
  if (assign.source.empty()) throw Error(ErrorCode::EmptyAssignment, "assignment is empty");
  const BlockGrid grid(donors[0].width, donors[0].height, block_side);
  if (assign.blocks_x != grid.blocks_x() || assign.blocks_y != grid.blocks_y() ||
      assign.source.size() != grid.block_count())
    throw Error(ErrorCode::DimensionMismatch, "assignment does not match the block grid");

  GrayImage out = donors[0];
  std::vector<std::size_t> pixels(static_cast<std::size_t>(block_side) * block_side);
  for (std::size_t block = 0; block < grid.block_count(); ++block) {
    const auto src = assign.source[block];
    if (src >= donors.size())
      throw Error(ErrorCode::EmptyAssignment, "block " + std::to_string(block) + " names missing donor " +
                                                  std::to_string(src));
    grid.block_pixel_indices(block, pixels);
    for (auto p : pixels) out.pixels[p] = donors[src].pixels[p];
  }
  return out;
}

GrayImage pixel_quadrant_collage(std::span<const GrayImage> donors, int split_x, int split_y) {
  check_donors(donors);
  if (donors.size() != 4) throw Error(ErrorCode::EmptyAssignment, "quadrant collage needs four donors");
  GrayImage out = donors[0];
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const std::size_t src = (y >= split_y ? 2 : 0) + (x >= split_x ? 1 : 0);
      out.at(x, y) = donors[src].at(x, y);
    }
  return out;
}

// --- candidate space -------------------------------------------------------

mp::cpp_int count_candidates(int l, int b) {
  mp::cpp_int out = 1;
  const int n = l * b * b;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

double log2_of(const mp::cpp_int& value) {
  if (value <= 0) return -INFINITY;
  const auto top = mp::msb(value);
  if (top < 53) return std::log2(value.convert_to<double>());
  const mp::cpp_int head = value >> (top - 52);
  return static_cast<double>(top - 52) + std::log2(head.convert_to<double>());
}

Permutation unrank_permutation(std::size_t n, std::uint64_t rank) {
  std::vector<std::uint64_t> fact(n + 1, 1);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  if (n > static_cast<std::size_t>(kMaxSearchPositions) || rank >= fact[n])
    throw Error(ErrorCode::PermutationSizeMismatch, "rank outside the permutation space");
  std::vector<std::uint32_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = fact[n - 1 - i];
    const auto idx = static_cast<std::size_t>(rank / f);
    rank %= f;
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return Permutation(std::move(out));
}

// --- observation and filtering --------------------------------------------

std::vector<BlockObservation> observe_blocks(const GrayImage& img, const Scheme& scheme, std::size_t limit) {
  const BlockGrid grid = scheme.grid();
  const std::size_t count = limit == 0 ? grid.block_count() : std::min(limit, grid.block_count());
  const auto wm_planes = lsb_planes(scheme.params.l);
  const auto auth_planes = msb_planes(scheme.m_prime);
  std::vector<BlockObservation> out(count);
  for (std::size_t block = 0; block < count; ++block) {
    out[block].embedded.resize(static_cast<std::size_t>(scheme.watermark_bits));
    out[block].msb.resize(static_cast<std::size_t>(scheme.auth_input_bits));
    read_block_planes(img, grid, block, wm_planes, out[block].embedded);
    read_block_planes(img, grid, block, auth_planes, out[block].msb);
  }
  return out;
}

bool candidate_passes(const BlockObservation& obs, const Scheme& scheme, std::span<const std::uint32_t> pi) {
  thread_local std::vector<std::uint8_t> canonical;
  thread_local std::vector<std::uint8_t> recomputed;
  const std::size_t n = obs.embedded.size();
  const auto La = static_cast<std::size_t>(scheme.params.La);
  canonical.resize(n);
  recomputed.resize(La);
  for (std::size_t i = 0; i < n; ++i) canonical[i] = obs.embedded[pi[i]];
  auth_bits_into(obs.msb, std::span<const std::uint8_t>(canonical).subspan(La), recomputed);
  return std::equal(recomputed.begin(), recomputed.end(), canonical.begin());
}

namespace {

struct SearchSetup {
  Scheme scheme_a;
  Scheme scheme_b;
  std::size_t positions = 0;
  std::uint64_t total = 0;
  std::vector<BlockObservation> screen;
  std::vector<BlockObservation> verify;
};

Scheme validate_for_attack(const SchemeParams& params, const GrayImage& img, const char* which) {
  try {
    return validate_params(params, img.width, img.height);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParamsMismatch, std::string("parameters do not fit image ") + which + ": " + e.what());
  }
}

SearchSetup prepare_search(const GrayImage& img_a, const GrayImage& img_b, const SchemeParams& params,
                           const CrackOptions& options) {
  SearchSetup s;
  s.scheme_a = validate_for_attack(params, img_a, "A");
  s.scheme_b = validate_for_attack(params, img_b, "B");
  s.positions = static_cast<std::size_t>(s.scheme_a.watermark_bits);
  if (s.positions > static_cast<std::size_t>(kMaxSearchPositions)) {
    std::ostringstream msg;
    // One decimal, truncated, as candidate-space sizes are usually quoted.
    const double bits = std::floor(log2_of(count_candidates(params.l, params.b)) * 10.0) / 10.0;
    msg.precision(1);
    msg << std::fixed << "exhaustive search over (l*b^2)! = " << s.positions << "! ~ 2^" << bits
        << " candidates is infeasible";
    throw Error(ErrorCode::SearchTooLarge, msg.str());
  }
  s.total = 1;
  for (std::size_t k = 2; k <= s.positions; ++k) s.total *= k;
  if (s.total > kLongSearchThreshold && !options.allow_long)
    throw Error(ErrorCode::SearchTooLarge, std::to_string(s.total) +
                                               " candidates exceed the default budget; rerun with --long");
  s.screen = observe_blocks(img_a, s.scheme_a, options.screen_blocks);
  s.verify = observe_blocks(img_b, s.scheme_b, options.verify_blocks);
  return s;
}

// Screens one candidate against image A with early exit. Returns the number of
// leading blocks passed (== screen.size() for a survivor).
std::size_t screen_candidate(const SearchSetup& s, std::span<const std::uint32_t> pi) {
  std::size_t passed = 0;
  for (const auto& obs : s.screen) {
    if (!candidate_passes(obs, s.scheme_a, pi)) break;
    ++passed;
  }
  return passed;
}

CrackResult finish(const SearchSetup& s, std::vector<Permutation> screened, std::uint64_t first_passes,
                   std::chrono::steady_clock::time_point start) {
  CrackResult result;
  result.tested_count = s.total;
  result.first_block_passes = first_passes;
  result.screen_survivors = screened.size();
  for (auto& candidate : screened) {
    const bool ok = std::all_of(s.verify.begin(), s.verify.end(), [&](const BlockObservation& obs) {
      return candidate_passes(obs, s.scheme_b, candidate.map);
    });
    if (ok) result.survivors.push_back(std::move(candidate));
  }
  std::sort(result.survivors.begin(), result.survivors.end());
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.survivors.empty())
    throw Error(ErrorCode::NoSurvivors,
                "no permutation is consistent with both images (" + std::to_string(result.screen_survivors) +
                    " passed image A); the images were not marked with the same key and parameters");
  return result;
}

}  // namespace

CrackResult crack_permutation(const GrayImage& img_a, const GrayImage& img_b, const SchemeParams& params,
                              const CrackOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const SearchSetup s = prepare_search(img_a, img_b, params, options);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk);
  const auto chunks = static_cast<std::int64_t>((s.total + chunk - 1) / chunk);

  std::vector<Permutation> screened;
  std::uint64_t first_passes = 0;

#ifdef _OPENMP
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel num_threads(threads) reduction(+ : first_passes)
#endif
  {
    std::vector<Permutation> local;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1) nowait
#endif
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk;
      const std::uint64_t end = std::min(s.total, begin + chunk);
      auto perm = unrank_permutation(s.positions, begin).map;
      for (std::uint64_t rank = begin; rank < end; ++rank) {
        const auto passed = screen_candidate(s, perm);
        if (passed > 0) ++first_passes;
        if (passed == s.screen.size()) local.emplace_back(perm);
        std::next_permutation(perm.begin(), perm.end());
      }
    }
#ifdef _OPENMP
#pragma omp critical(fragmark_crack_merge)
#endif
    screened.insert(screened.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
  }
  std::sort(screened.begin(), screened.end());
  return finish(s, std::move(screened), first_passes, start);
}

CrackResult crack_permutation_serial(const GrayImage& img_a, const GrayImage& img_b, const SchemeParams& params,
                                     const CrackOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const SearchSetup s = prepare_search(img_a, img_b, params, options);
  std::vector<Permutation> screened;
  std::uint64_t first_passes = 0;
  auto perm = Permutation::identity(s.positions).map;
  std::uint64_t tested = 0;
  do {
    ++tested;
    const auto passed = screen_candidate(s, perm);
    if (passed > 0) ++first_passes;
    if (passed == s.screen.size()) screened.emplace_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (tested != s.total) throw std::logic_error("serial sweep visited " + std::to_string(tested) + " candidates");
  return finish(s, std::move(screened), first_passes, start);
}

// --- forgery ---------------------------------------------------------------

GrayImage forge(const GrayImage& img_auth, const GrayImage& new_content, std::span<const std::size_t> blocks,
                const Scheme& scheme, const Permutation& pi) {
  if (pi.size() != static_cast<std::size_t>(scheme.watermark_bits) || !pi.is_valid())
    throw Error(ErrorCode::PermutationSizeMismatch,
                "permutation must be a bijection on " + std::to_string(scheme.watermark_bits) + " positions");
  if (img_auth.width != scheme.width || img_auth.height != scheme.height || new_content.width != img_auth.width ||
      new_content.height != img_auth.height)
    throw Error(ErrorCode::DimensionMismatch, "forgery inputs must match the scheme's image size");

  const BlockGrid grid = scheme.grid();
  const auto wm_planes = lsb_planes(scheme.params.l);
  const auto auth_planes = msb_planes(scheme.m_prime);
  const auto content_mask = static_cast<std::uint8_t>(0xFFu << (8 - scheme.params.m));
  const auto La = static_cast<std::size_t>(scheme.params.La);
  const auto n = static_cast<std::size_t>(scheme.watermark_bits);

  GrayImage out = img_auth;
  std::vector<std::size_t> pixels(static_cast<std::size_t>(scheme.params.b) * scheme.params.b);
  std::vector<std::uint8_t> embedded(n), canonical(n), msb(static_cast<std::size_t>(scheme.auth_input_bits));
  for (auto block : blocks) {
    // Stored reference bits are read before the block's pixels change.
    read_block_planes(img_auth, grid, block, wm_planes, embedded);
    unpermute_watermark(embedded, pi, canonical);
    grid.block_pixel_indices(block, pixels);
    for (auto p : pixels)
      out.pixels[p] = static_cast<std::uint8_t>((new_content.pixels[p] & content_mask) |
                                                (img_auth.pixels[p] & ~content_mask));
    read_block_planes(out, grid, block, auth_planes, msb);
    auth_bits_into(msb, std::span<const std::uint8_t>(canonical).subspan(La), std::span(canonical).first(La));
    permute_watermark(canonical, pi, embedded);
    write_block_planes(out, grid, block, wm_planes, embedded);
  }
  return out;
}

}  // namespace fragmark
