// fragmark: embed, verify and attack self-embedding fragile watermarks.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 `detect` found at
// least one tampered block. Errors go to stderr as `error:<code>:<message>`.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fragmark/attacks.hpp"
#include "fragmark/detector.hpp"
#include "fragmark/encoder.hpp"
#include "fragmark/error.hpp"

namespace {

using namespace fragmark;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitTampered = 3;

struct ModeFlags {
  std::string mode = "6,2";
  int block = 2;
  std::optional<int> La, u, v;
  std::string params_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "embedding mode m,l")->capture_default_str();
    cmd->add_option("--block", block, "block side b")->capture_default_str();
    cmd->add_option("--La", La, "authentication bits per block");
    cmd->add_option("--u", u, "reference subset size");
    cmd->add_option("--v", v, "reference bits per subset");
    cmd->add_option("--params", params_file, "params file m=..,l=..,b=..,La=..,u=..,v=..");
  }

  SchemeParams resolve() const {
    const auto comma = mode.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MalformedParams, "--mode expects m,l");
    SchemeParams p;
    try {
      p = default_params(std::stoi(mode.substr(0, comma)), std::stoi(mode.substr(comma + 1)), block);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedParams, "--mode expects m,l");
    }
    if (!params_file.empty()) {
      std::ifstream in(params_file);
      if (!in) throw Error(ErrorCode::FileNotFound, "cannot read params file " + params_file);
      std::stringstream text;
      text << in.rdbuf();
      p = parse_params(text.str(), p);
    }
    if (La) p.La = *La;
    if (u) p.u = *u;
    if (v) p.v = *v;
    return p;
  }
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::MalformedPgm:
    case ErrorCode::MalformedKeyFile:
    case ErrorCode::Io:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

KeySet read_keys(const std::string& path) {
  KeySet keys = load_key_file(path);
  if (has_zero_seed(keys)) std::cerr << "warning: key file " << path << " contains an all-zero seed\n";
  return keys;
}

std::vector<std::size_t> blocks_in_region(const Scheme& s, const std::vector<int>& region) {
  const BlockGrid grid = s.grid();
  int x0 = 0, y0 = 0, x1 = grid.blocks_x(), y1 = grid.blocks_y();
  if (!region.empty()) {
    if (region.size() != 4) throw Error(ErrorCode::DimensionMismatch, "--region expects bx0,by0,bx1,by1");
    x0 = region[0], y0 = region[1], x1 = region[2], y1 = region[3];
    if (x0 < 0 || y0 < 0 || x1 > grid.blocks_x() || y1 > grid.blocks_y() || x0 > x1 || y0 > y1)
      throw Error(ErrorCode::BlockOutOfRange, "--region outside the block grid");
  }
  std::vector<std::size_t> out;
  for (int by = y0; by < y1; ++by)
    for (int bx = x0; bx < x1; ++bx) out.push_back(static_cast<std::size_t>(by) * grid.blocks_x() + bx);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-embedding fragile watermark: embedding, tamper detection and attacks"};
  app.require_subcommand(1, 1);

  // keygen
  std::string keygen_out;
  auto* keygen = app.add_subcommand("keygen", "write a fresh key file from OS randomness");
  keygen->add_option("--out", keygen_out, "key file to write")->required();

  // embed
  std::string embed_in, embed_out, embed_keys;
  ModeFlags embed_mode;
  auto* embed_cmd = app.add_subcommand("embed", "watermark a PGM image");
  embed_cmd->add_option("--in", embed_in, "cover image (P5)")->required();
  embed_cmd->add_option("--out", embed_out, "watermarked image (P5)")->required();
  embed_cmd->add_option("--keys,--seed-file", embed_keys, "key file")->required();
  embed_mode.attach(embed_cmd);

  // detect
  std::string detect_in, detect_keys, detect_mask;
  int mask_scale = 0;
  ModeFlags detect_mode;
  auto* detect_cmd = app.add_subcommand("detect", "check every block of a watermarked image");
  detect_cmd->add_option("--in", detect_in, "image to verify (P5)")->required();
  detect_cmd->add_option("--keys,--seed-file", detect_keys, "key file")->required();
  detect_cmd->add_option("--mask", detect_mask, "write the verdict map as a P4 mask");
  detect_cmd->add_option("--mask-scale", mask_scale, "mask pixels per block side (default: b)");
  detect_mode.attach(detect_cmd);

  // collage
  std::vector<std::string> quadrants, donors;
  std::string collage_out, assign_file;
  std::vector<int> split;
  int collage_block = 2;
  auto* collage_cmd = app.add_subcommand("collage", "assemble a forgery from authenticated images");
  auto* quad_opt = collage_cmd->add_option("--quadrants", quadrants, "four images: TL TR BL BR")->expected(4);
  auto* donors_opt = collage_cmd->add_option("--donors", donors, "donor images indexed by --assign");
  collage_cmd->add_option("--assign", assign_file, "block assignment file (one row of donor indices per block row)");
  collage_cmd->add_option("--split", split, "pixel-level quadrant split x,y (ignores block boundaries)")
      ->delimiter(',')
      ->expected(2);
  collage_cmd->add_option("--block", collage_block, "block side b")->capture_default_str();
  collage_cmd->add_option("--out", collage_out, "collage image (P5)")->required();
  quad_opt->excludes(donors_opt);

  // crack
  std::string crack_a, crack_b;
  ModeFlags crack_mode;
  CrackOptions crack_options;
  bool crack_serial = false;
  auto* crack_cmd = app.add_subcommand("crack", "recover the embedding permutation from two authenticated images");
  crack_cmd->add_option("--a", crack_a, "first authenticated image")->required();
  crack_cmd->add_option("--b", crack_b, "second authenticated image")->required();
  crack_cmd->add_option("--threads", crack_options.threads, "worker threads (default: all cores)");
  crack_cmd->add_option("--screen-blocks", crack_options.screen_blocks, "blocks of A used for screening (0 = all)")
      ->capture_default_str();
  crack_cmd->add_option("--verify-blocks", crack_options.verify_blocks, "blocks of B used for verification (0 = all)")
      ->capture_default_str();
  crack_cmd->add_flag("--long", crack_options.allow_long, "allow candidate spaces above 10^7");
  crack_cmd->add_flag("--serial", crack_serial, "use the single-threaded reference search");
  crack_mode.attach(crack_cmd);

  // forge
  std::string forge_in, forge_content, forge_perm, forge_out;
  std::vector<int> forge_region;
  ModeFlags forge_mode;
  auto* forge_cmd = app.add_subcommand("forge", "write new content into authenticated blocks with a recovered permutation");
  forge_cmd->add_option("--in", forge_in, "authenticated image")->required();
  forge_cmd->add_option("--content", forge_content, "image supplying the new MSB content")->required();
  forge_cmd->add_option("--perm", forge_perm, "recovered permutation, comma-separated")->required();
  forge_cmd->add_option("--region", forge_region, "block rectangle bx0,by0,bx1,by1 (default: whole image)")
      ->delimiter(',')
      ->expected(4);
  forge_cmd->add_option("--out", forge_out, "forged image (P5)")->required();
  forge_mode.attach(forge_cmd);

  // params-check
  int check_width = 512, check_height = 512;
  ModeFlags check_mode;
  auto* check_cmd = app.add_subcommand("params-check", "validate scheme parameters for an image size");
  check_cmd->add_option("--width", check_width)->capture_default_str();
  check_cmd->add_option("--height", check_height)->capture_default_str();
  check_mode.attach(check_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:Usage:" << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (keygen->parsed()) {
      save_key_file(keygen_out, generate_keys());
      std::cout << "wrote " << keygen_out << "\n";
      return kExitOk;
    }

    if (embed_cmd->parsed()) {
      const auto cover = load_image(embed_in);
      const auto scheme = validate_params(embed_mode.resolve(), cover.width, cover.height);
      save_image(embed_out, embed(cover, scheme, read_keys(embed_keys)));
      std::cout << "mode=" << mode_name(scheme.mode) << " params=" << format_params(scheme.params)
                << " blocks=" << scheme.block_count << "\n";
      return kExitOk;
    }

    if (detect_cmd->parsed()) {
      const auto img = load_image(detect_in);
      const auto scheme = validate_params(detect_mode.resolve(), img.width, img.height);
      const auto map = detect(img, scheme, read_keys(detect_keys));
      if (!detect_mask.empty())
        save_detection_mask(detect_mask, map, mask_scale > 0 ? mask_scale : scheme.params.b);
      std::cout << "tampered_blocks=" << map.tampered_count() << " total=" << map.block_count() << "\n";
      std::cout << "tampered_rate=" << map.tampered_rate() << "\n";
      return map.tampered_count() > 0 ? kExitTampered : kExitOk;
    }

    if (collage_cmd->parsed()) {
      std::vector<GrayImage> images;
      for (const auto& path : quadrants.empty() ? donors : quadrants) images.push_back(load_image(path));
      if (images.empty()) throw Error(ErrorCode::EmptyAssignment, "give --quadrants or --donors");
      GrayImage out;
      if (!split.empty()) {
        if (quadrants.empty()) throw Error(ErrorCode::EmptyAssignment, "--split needs --quadrants");
        out = pixel_quadrant_collage(images, split[0], split[1]);
      } else if (!quadrants.empty()) {
        out = collage(images, quadrant_assignment(BlockGrid(images[0].width, images[0].height, collage_block)),
                      collage_block);
      } else {
        if (assign_file.empty()) throw Error(ErrorCode::EmptyAssignment, "--donors needs --assign");
        std::ifstream in(assign_file);
        if (!in) throw Error(ErrorCode::FileNotFound, "cannot read assignment file " + assign_file);
        std::stringstream text;
        text << in.rdbuf();
        out = collage(images, parse_assignment(text.str()), collage_block);
      }
      save_image(collage_out, out);
      std::cout << "wrote " << collage_out << "\n";
      return kExitOk;
    }

    if (crack_cmd->parsed()) {
      const auto a = load_image(crack_a);
      const auto b = load_image(crack_b);
      const auto params = crack_mode.resolve();
      const auto result = crack_serial ? crack_permutation_serial(a, b, params, crack_options)
                                       : crack_permutation(a, b, params, crack_options);
      std::cout << "survivors=" << result.survivors.size() << "\n";
      for (const auto& p : result.survivors) std::cout << "survivor=" << format_permutation(p) << "\n";
      std::cout << "tested_count=" << result.tested_count << "\n";
      std::cout << "first_block_passes=" << result.first_block_passes << "\n";
      std::cout << "elapsed_seconds=" << result.elapsed_seconds << "\n";
      return kExitOk;
    }

    if (forge_cmd->parsed()) {
      const auto img = load_image(forge_in);
      const auto content = load_image(forge_content);
      const auto scheme = validate_params(forge_mode.resolve(), img.width, img.height);
      const auto blocks = blocks_in_region(scheme, forge_region);
      save_image(forge_out, forge(img, content, blocks, scheme, parse_permutation(forge_perm)));
      std::cout << "forged_blocks=" << blocks.size() << "\n";
      return kExitOk;
    }

    if (check_cmd->parsed()) {
      const auto s = validate_params(check_mode.resolve(), check_width, check_height);
      std::cout << "params=" << format_params(s.params) << "\n"
                << "mode=" << mode_name(s.mode) << "\n"
                << "m_prime=" << s.m_prime << "\n"
                << "S=" << s.subsets << "\n"
                << "blocks=" << s.block_count << "\n"
                << "reference_bits=" << s.subsets * static_cast<std::size_t>(s.params.v) << "\n"
                << "candidates=" << count_candidates(s.params.l, s.params.b) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error:" << error_code_name(e.code()) << ":" << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error:Internal:" << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
