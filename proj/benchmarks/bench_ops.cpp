// Microbenchmarks for the perturbation operators and the scoring hot
// paths. Sizes mirror a typical benchmark chart (roughly 4:3, a few
// hundred pixels wide); the ink operators additionally run at their
// full-resolution scale to expose the resampling cost.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "chaos/kind.hpp"
#include "chaos/metrics.hpp"
#include "chaos/rng.hpp"
#include "chaos/schedule.hpp"
#include "chaos/text.hpp"
#include "chaos/visual.hpp"

using namespace chaos;

namespace {

Raster make_chart(int w, int h) {
  Raster img(w, h, 255);
  RngStream rng(7);
  for (int x = 0; x < w; ++x) {
    img.at(x, h - 2, 0) = img.at(x, h - 2, 1) = img.at(x, h - 2, 2) = 30;
  }
  for (int y = 0; y < h; ++y) {
    img.at(1, y, 0) = img.at(1, y, 1) = img.at(1, y, 2) = 30;
  }
  int bars = 6;
  int bw = (w - 8) / (2 * bars);
  for (int b = 0; b < bars; ++b) {
    int bh = 4 + static_cast<int>(rng.uniform_below(h - 8));
    int x0 = 4 + 2 * b * bw;
    std::uint8_t rgb[3] = {static_cast<std::uint8_t>(40 + 20 * b),
                           static_cast<std::uint8_t>(200 - 25 * b),
                           static_cast<std::uint8_t>(90 + 15 * b)};
    for (int y = h - 2 - bh; y < h - 2; ++y) {
      for (int x = x0; x < x0 + bw && x < w; ++x) {
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
      }
    }
  }
  return img;
}

const SeveritySchedule& schedule() {
  static SeveritySchedule sched = SeveritySchedule::defaults();
  return sched;
}

void bm_visual(benchmark::State& state) {
  auto kind = static_cast<PerturbationKind>(state.range(0));
  int level = static_cast<int>(state.range(1));
  Raster img = make_chart(320, 240);
  PerturbationSpec spec = resolve_spec(kind, level, schedule());
  for (auto _ : state) {
    RngStream rng(42);
    benchmark::DoNotOptimize(apply_visual(img, spec, rng));
  }
  state.SetLabel(std::string(kind_code(kind)) + " L" + std::to_string(level));
}

void bm_textual(benchmark::State& state) {
  auto kind = static_cast<PerturbationKind>(state.range(0));
  int level = static_cast<int>(state.range(1));
  TextSample sample;
  sample.text =
      "What is the total revenue of the West region in 2020 compared to the "
      "highest bar of the chart?";
  PerturbationSpec spec = resolve_spec(kind, level, schedule());
  for (auto _ : state) {
    RngStream rng(42);
    benchmark::DoNotOptimize(apply_textual(sample, spec, rng));
  }
  state.SetLabel(std::string(kind_code(kind)) + " L" + std::to_string(level));
}

void bm_relaxed_match(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(relaxed_match("1,234.5", "1234"));
    benchmark::DoNotOptimize(relaxed_match("Green", " green "));
  }
}

void bm_robustness(benchmark::State& state) {
  std::vector<double> levels = {0.7742, 0.6720, 0.4283};
  for (auto _ : state) {
    benchmark::DoNotOptimize(robustness(0.8132, levels));
  }
}

void visual_args(benchmark::internal::Benchmark* b) {
  for (PerturbationKind kind : visual_kinds()) {
    b->Args({static_cast<long>(kind), 5});
  }
  // the two morphology operators dominate runtime; show the severe end too
  b->Args({static_cast<long>(PerturbationKind::IB), 9});
  b->Args({static_cast<long>(PerturbationKind::IH), 9});
}

void textual_args(benchmark::internal::Benchmark* b) {
  for (PerturbationKind kind : textual_kinds()) {
    b->Args({static_cast<long>(kind), 5});
  }
}

BENCHMARK(bm_visual)->Apply(visual_args)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_textual)->Apply(textual_args);
BENCHMARK(bm_relaxed_match);
BENCHMARK(bm_robustness);

}  // namespace

BENCHMARK_MAIN();
