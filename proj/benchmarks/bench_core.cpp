/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "cfaudit/dataset.hpp"
#include "cfaudit/distance.hpp"
#include "cfaudit/engine.hpp"
#include "cfaudit/image.hpp"
#include "cfaudit/models.hpp"

namespace cfaudit {
namespace {

const std::filesystem::path kData = CFAUDIT_DATA_DIR;

const Dataset& Credit() {
  static const Dataset data =
      LoadCsv(kData / "credit_synthetic.csv", LoadSchema(kData / "credit.schema.json"));
  return data;
}

void BM_MixedDistance(benchmark::State& state) {
  const Dataset& data = Credit();
  const MixedDistance d(data.schema, data.stats);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d(data.rows[i % data.size()], data.rows[(i + 7) % data.size()]));
    ++i;
  }
}
BENCHMARK(BM_MixedDistance);

Image Noise(std::size_t side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img{side, side, std::vector<double>(side * side)};
  for (double& p : img.pixels) p = u(rng);
  return img;
}

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Image a = Noise(side, rng);
  const Image b = Noise(side, rng);
  const std::size_t window = FitWindow(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(Ssim(a, b, window));
}
BENCHMARK(BM_Ssim)->Arg(8)->Arg(28);

void BM_MlpPredictBatch(benchmark::State& state) {
  const Dataset& data = Credit();
  ModelConfig cfg;
  cfg.kind = ModelKind::kMlp;
  cfg.epochs = 5;
  const TrainResult trained = Train(data, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(trained.model->PredictBatch(data.rows));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_MlpPredictBatch)->Unit(benchmark::kMillisecond);

// One generation on the credit schema with a tree model.
void BM_GeneticGeneration(benchmark::State& state) {
  const Dataset& data = Credit();
  ModelConfig cfg;
  cfg.kind = ModelKind::kDecisionTree;
  const TrainResult trained = Train(data, cfg);
  const MixedDistance d(data.schema, data.stats);
  const GeneticEngine engine(data.schema, *trained.model, d, GAConfig{});
  const SearchProblem problem = engine.MakeProblem(data.rows[0], {});
  Rng rng(3);
  const Population start = engine.InitializePopulation(problem, rng);
  for (auto _ : state) {
    state.PauseTiming();
    Population population = start;
    state.ResumeTiming();
    engine.Evolve(population, problem, rng);
    benchmark::DoNotOptimize(population.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(engine.population_size()));
}
BENCHMARK(BM_GeneticGeneration)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace cfaudit

BENCHMARK_MAIN();
