// Copyright 2026 The scenesearch Authors. Licensed under the Apache License, Version 2.0.
// See LICENSE in the project root.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <set>
#include <unistd.h>

#include "scenesearch/aesrank.hpp"
#include "scenesearch/concepts.hpp"
#include "scenesearch/engine.hpp"
#include "scenesearch/fixture.hpp"
#include "scenesearch/hypercolumn.hpp"
#include "scenesearch/linear_svm.hpp"
#include "scenesearch/rng.hpp"

using namespace scenesearch;

namespace {

Tensor random_map(Rng& rng, std::size_t side) {
  std::vector<float> v(side * side);
  for (auto& x : v) x = static_cast<float>(rng.uniform());
  return Tensor({side, side}, std::move(v));
}

void BM_BilinearResize(benchmark::State& state) {
  Rng rng(1);
  const auto map = random_map(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hypercolumn::bilinear_resize(map, 56));
}
BENCHMARK(BM_BilinearResize)->Arg(2)->Arg(8)->Arg(32);

void BM_Hypercolumns(benchmark::State& state) {
  Rng rng(2);
  hypercolumn::ActivationBundle bundle;
  for (std::size_t side : {32u, 16u, 8u, 4u, 2u}) bundle.block_maps.push_back(random_map(rng, side));
  const EngineConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(hypercolumn::build_hypercolumns(bundle, config));
}
BENCHMARK(BM_Hypercolumns);

void BM_BiasedSvm(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  svm::Samples x(n, 256);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 == 0 ? 1 : -1;
    for (auto& v : x.row(i)) v = rng.normal() + 0.3 * y[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(svm::train_biased_svm(x, y, 1.0));
}
BENCHMARK(BM_BiasedSvm)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_UnbiasedSvm(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  svm::Samples x(n, 10);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x.row(i)) v = rng.normal() + 0.2;
  }
  for (auto _ : state) benchmark::DoNotOptimize(svm::train_unbiased_svm(x, 3.0));
}
BENCHMARK(BM_UnbiasedSvm)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

// One generated fixture with every offline artifact, shared by the engine benchmarks.
struct Prepared {
  std::filesystem::path dir;
  Dataset dataset;
  concepts::ClassifierSet classifiers;
  std::map<std::string, std::string> concept_map;
  hypercolumn::PhiTable phi;
  aesrank::RankModel model;
  engine::Index index;

  Prepared() {
    dir = std::filesystem::temp_directory_path() / ("scenesearch-bench-" + std::to_string(::getpid()));
    dataset = load_dataset(fixture::generate_fixture(dir, {}).manifest);
    const auto categories = concepts::build_categories(dataset);
    concept_map = concepts::map_transcript_concepts(dataset, categories);
    std::set<std::string> wanted;
    for (const auto& [lemma, id] : concept_map) wanted.insert(id);
    classifiers = concepts::train_classifiers(categories, {wanted.begin(), wanted.end()}, {}, 1, 0);
    phi = hypercolumn::compute_phi_table(dataset, {}, 0);
    model = aesrank::train_rank(aesrank::pairs_from_votes(aesrank::group_votes(dataset.votes)), phi, 3.0);
    index = engine::build_index(dataset, concept_map, classifiers, model, phi, {}, 0);
  }
  ~Prepared() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
};

Prepared& prepared() {
  static Prepared p;
  return p;
}

void BM_BuildIndex(benchmark::State& state) {
  auto& p = prepared();
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine::build_index(p.dataset, p.concept_map, p.classifiers, p.model, p.phi, {}, threads));
  }
}
BENCHMARK(BM_BuildIndex)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Query(benchmark::State& state) {
  auto& p = prepared();
  engine::QueryOptions options;
  options.k = 10;
  for (auto _ : state) benchmark::DoNotOptimize(engine::query(p.index, p.dataset.embeddings, "penguin calf", options));
}
BENCHMARK(BM_Query)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
