#include <benchmark/benchmark.h>

#include <cmath>
#include <sstream>

#include "dirtybench/classify.hpp"
#include "dirtybench/cluster.hpp"
#include "dirtybench/corruption.hpp"
#include "dirtybench/evaluate.hpp"
#include "dirtybench/random.hpp"
#include "dirtybench/regress.hpp"
#include "dirtybench/robustness.hpp"

using namespace dirtybench;

namespace {

Dataset blobs(std::size_t n, std::size_t features, std::size_t classes) {
  Rng rng(1);
  std::ostringstream s;
  for (std::size_t f = 0; f < features; ++f) s << "x" << f << ",";
  s << "label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (std::size_t f = 0; f < features; ++f) s << format_number(static_cast<double>(c * 2 + f) + rng.uniform01()) << ",";
    s << "class" << c << "\n";
  }
  LoadOptions o;
  o.categorical_target = true;
  return parse_dataset(s.str(), o);
}

Dataset linear(std::size_t n, std::size_t features) {
  Rng rng(2);
  std::ostringstream s;
  for (std::size_t f = 0; f < features; ++f) s << "x" << f << ",";
  s << "y\n";
  for (std::size_t i = 0; i < n; ++i) {
    double y = 1.0;
    for (std::size_t f = 0; f < features; ++f) {
      const double x = rng.uniform01() * 10.0;
      y += static_cast<double>(f + 1) * x;
      s << format_number(x) << ",";
    }
    s << format_number(y + rng.uniform01()) << "\n";
  }
  return parse_dataset(s.str());
}

void BM_Sensibility(benchmark::State& state) {
  MetricSeries s;
  Rng rng(3);
  for (int i = 0; i < 26; ++i) {
    s.rates.push_back(0.02 * i);
    s.values.push_back(rng.uniform01());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sensibility(s));
    benchmark::DoNotOptimize(keeping_point(s, 0.1));
  }
}
BENCHMARK(BM_Sensibility);

void BM_InjectMissing(benchmark::State& state) {
  const Dataset d = blobs(static_cast<std::size_t>(state.range(0)), 4, 3);
  CorruptionSpec spec;
  spec.rate = 0.3;
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(inject(d, spec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InjectMissing)->Arg(1000)->Arg(10000);

void BM_CrossValidate(benchmark::State& state) {
  const auto algorithm = static_cast<AlgorithmId>(state.range(0));
  const std::size_t classes = algorithm == AlgorithmId::logistic_regression ? 2 : 3;
  const Dataset d = task_of(algorithm) == Task::regression ? linear(200, 3) : blobs(150, 4, classes);
  CorruptionSpec spec;
  spec.rate = 0.2;
  EvalOptions options;
  options.timing = false;
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(d, algorithm, {}, spec, options, 7));
  state.SetLabel(std::string(to_string(algorithm)));
}
BENCHMARK(BM_CrossValidate)->DenseRange(0, 15)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const Points p = clustering_points(blobs(static_cast<std::size_t>(state.range(0)), 4, 3));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(p, {3, 1}));
}
BENCHMARK(BM_KMeans)->Arg(150)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LeastSquares(benchmark::State& state) {
  const Dataset d = linear(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fit_least_squares(d));
}
BENCHMARK(BM_LeastSquares)->Arg(200)->Arg(5000);

}  // namespace
BENCHMARK_MAIN();
