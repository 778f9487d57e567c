// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "fragmark/attacks.hpp"
#include "fragmark/detector.hpp"
#include "fragmark/encoder.hpp"
#include "test_support.hpp"

using namespace fragmark;
using fragmark::testing::keys_from;
using fragmark::testing::scene_image;

namespace {

struct Fixture {
  Scheme scheme = validate_params(default_params(6, 2, 2), 512, 512);
  KeySet keys = keys_from(1);
  GrayImage a = embed(scene_image(512, 512, 0), scheme, keys);
  GrayImage b = embed(scene_image(512, 512, 1), scheme, keys);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Embed(benchmark::State& state) {
  const auto& f = fixture();
  const auto cover = scene_image(512, 512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(embed(cover, f.scheme, f.keys));
}

void BM_Detect(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect(f.a, f.scheme, f.keys));
}

void BM_DetectSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(detect_serial(f.a, f.scheme, f.keys));
}

void BM_Crack(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(crack_permutation(f.a, f.b, f.scheme.params));
}

void BM_CrackSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(crack_permutation_serial(f.a, f.b, f.scheme.params));
}

}  // namespace

BENCHMARK(BM_Embed)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Detect)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Crack)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrackSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
