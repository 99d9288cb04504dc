// Serial reference versus OpenMP kernel for each parallel stage. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "exprlbp/detect.hpp"
#include "exprlbp/evaluate.hpp"
#include "exprlbp/lbp.hpp"
#include "exprlbp/preprocess.hpp"

using namespace exprlbp;

namespace {

GrayImage noise_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

// Two stumps over halves and a center-surround pair; passes a fraction of
// windows so later stages do real work.
HaarCascade bench_cascade() {
  HaarCascade c{24, 24, {}};
  const WeakClassifier halves{{{{{0, 0, 12, 24}, 1.0}, {{12, 0, 12, 24}, -1.0}}}, -0.05, 0.0, 1.0};
  const WeakClassifier core{{{{{4, 4, 16, 16}, 1.0}, {{0, 0, 24, 24}, -256.0 / 576.0}}}, 0.0, 0.0, 1.0};
  c.stages.push_back({{halves}, 0.5});
  c.stages.push_back({{core, halves}, 1.5});
  return c;
}

void BM_LbpMap(benchmark::State& state) {
  const GrayImage img = noise_image(640, 480, 1);
  for (auto _ : state) {
    auto m = state.range(0) ? lbp_map(img) : serial::lbp_map(img);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * 640 * 480);
}
BENCHMARK(BM_LbpMap)->ArgName("parallel")->Arg(0)->Arg(1);

void BM_Bilateral(benchmark::State& state) {
  const GrayImage img = noise_image(640, 480, 2);
  const BilateralParams p;
  for (auto _ : state) {
    auto out = state.range(0) ? bilateral_filter(img, p) : serial::bilateral_filter(img, p);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 640 * 480);
}
BENCHMARK(BM_Bilateral)->ArgName("parallel")->Arg(0)->Arg(1);

void BM_ExtractBatch(benchmark::State& state) {
  std::vector<GrayImage> faces;
  for (unsigned i = 0; i < 540; ++i) faces.push_back(noise_image(40, 40, 100 + i));
  const FeatureConfig cfg;
  for (auto _ : state) {
    auto fv = state.range(0) ? extract_features_batch(faces, cfg) : serial::extract_features_batch(faces, cfg);
    benchmark::DoNotOptimize(fv);
  }
  state.SetItemsProcessed(state.iterations() * 540);
}
BENCHMARK(BM_ExtractBatch)->ArgName("parallel")->Arg(0)->Arg(1);

void BM_RawDetections(benchmark::State& state) {
  const GrayImage img = noise_image(320, 240, 3);
  const HaarCascade cascade = bench_cascade();
  const DetectParams p;
  for (auto _ : state) {
    auto r = state.range(0) ? raw_detections(img, cascade, p) : serial::raw_detections(img, cascade, p);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RawDetections)->ArgName("parallel")->Arg(0)->Arg(1);

void BM_TrainModel(benchmark::State& state) {
  const FeatureConfig cfg;
  SamplesByClass samples;
  const auto set = synth_dataset(7, 90, 10);
  for (const auto& li : set) samples[index_of(li.label)].push_back(extract_features(li.image, cfg).values);
  for (auto _ : state) {
    auto m = state.range(0) ? train_model(samples, 40, cfg) : serial::train_model(samples, 40, cfg);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_TrainModel)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvaluateImages(benchmark::State& state) {
  const FeatureConfig cfg;
  const BilateralParams bil;
  const ExpressionModel model = train_from_images(synth_dataset(7, 90, 10), 40, cfg, bil);
  const auto test = synth_dataset(8, 50, 10);
  const PreprocessConfig pre = preprocess_for(cfg, bil);
  for (auto _ : state) {
    auto r = state.range(0) ? evaluate_images(model, test, pre, {}) : serial::evaluate_images(model, test, pre, {});
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(test.size()));
}
BENCHMARK(BM_EvaluateImages)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
