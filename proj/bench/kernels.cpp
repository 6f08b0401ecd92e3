// Serial reference vs OpenMP kernel on the same inputs. Thread count comes
// from MIXEDSYS_BENCH_THREADS when set, otherwise from the OpenMP runtime.
#include "mixedsys/defect_lab.hpp"
#include "mixedsys/parallel.hpp"
#include "mixedsys/projector_topology.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>

using namespace mixedsys;

namespace {

const SystemFamily& young_family() {
    static const SystemFamily f = make_young(3, 120);
    return f;
}

void BM_Gram(benchmark::State& state, bool parallel) {
    const auto& f = young_family();
    const auto xs = f.primal().first(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(parallel ? gram(xs) : gram_serial(xs));
}

void BM_DistanceProfile(benchmark::State& state, bool parallel) {
    const SystemFamily f = make_defect_pair(2, 60);
    std::vector<SparseVector> probes;
    for (SparseVector::Index c = 1; c <= 6; ++c) probes.push_back(SparseVector::unit(c));
    const std::vector<std::size_t> n_list{10, 20, 30, 40, 50, 60};
    const Set sigma = Set::all();
    for (auto _ : state)
        benchmark::DoNotOptimize(parallel ? distance_profile(f, sigma, probes, n_list)
                                          : distance_profile_serial(f, sigma, probes, n_list));
}

void BM_DefectTable(benchmark::State& state, bool parallel) {
    const SystemFamily f = make_random_finite(static_cast<long>(state.range(0)), state.range(0), 11, true);
    for (auto _ : state) benchmark::DoNotOptimize(parallel ? defect_table(f) : defect_table_serial(f));
}

void BM_MetricDs(benchmark::State& state, bool parallel) {
    const SystemFamily f = make_e1_plus_ek(40);
    MetricOptions o;
    o.terms = static_cast<std::size_t>(state.range(0));
    const Set a = Set::residues(2, {1}), b = Set::residues(3, {0, 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(parallel ? metric_ds(f, a, b, 30, o) : metric_ds_serial(f, a, b, 30, o));
}

void BM_MetricDw(benchmark::State& state, bool parallel) {
    const SystemFamily f = make_e1_plus_ek(40);
    MetricOptions o;
    o.terms = static_cast<std::size_t>(state.range(0));
    const Set a = Set::residues(2, {1}), b = Set::residues(3, {0, 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(parallel ? metric_dw(f, a, b, 30, o) : metric_dw_serial(f, a, b, 30, o));
}

} // namespace

BENCHMARK_CAPTURE(BM_Gram, serial, false)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gram, parallel, true)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DistanceProfile, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DistanceProfile, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DefectTable, serial, false)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_DefectTable, parallel, true)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MetricDs, serial, false)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MetricDs, parallel, true)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MetricDw, serial, false)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MetricDw, parallel, true)->Arg(10)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    if (const char* t = std::getenv("MIXEDSYS_BENCH_THREADS")) set_worker_count(std::atoi(t));
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
