// Serial reference sweep against the OpenMP fan-out over the shipped catalogs.
#include <benchmark/benchmark.h>

#include "theta_forge/verify.hpp"

namespace {

using namespace theta_forge;

const ValueCatalog& values() {
  static const ValueCatalog catalog = ValueCatalog::load(THETA_FORGE_DEFAULT_CATALOG_DIR "/values.catalog");
  return catalog;
}

const RelationCatalog& relations() {
  static const RelationCatalog catalog = RelationCatalog::load(THETA_FORGE_DEFAULT_CATALOG_DIR "/relations.catalog");
  return catalog;
}

void BM_Values(benchmark::State& state, Execution exec) {
  const Precision prec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(verify_values(values(), prec, exec));
}

void BM_Relations(benchmark::State& state, Execution exec) {
  const Precision prec(static_cast<int>(state.range(0)));
  const auto samples = default_relation_samples(prec.bits());
  for (auto _ : state) benchmark::DoNotOptimize(verify_relations(relations(), samples, prec, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Values, serial, Execution::serial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Values, parallel, Execution::parallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Relations, serial, Execution::serial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Relations, parallel, Execution::parallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
