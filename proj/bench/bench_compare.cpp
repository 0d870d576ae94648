// Parallel compare() against its serial reference, and the dense and sparse
// network forward passes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "zec/drl.hpp"
#include "zec/harness.hpp"

namespace {

using namespace zec;

const std::vector<Strategy> kStrategies{Strategy::Learned, Strategy::AlwaysShare, Strategy::NeverShare,
                                        Strategy::Random};

void BM_CompareParallel(benchmark::State& state)
{
    const auto config = harness::build_scenario(1, Season::Winter, 0);
    const std::vector<std::uint64_t> seeds{0, 1, 2, 3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(harness::compare(config, kStrategies, static_cast<int>(state.range(0)), seeds));
    }
}
BENCHMARK(BM_CompareParallel)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CompareSerial(benchmark::State& state)
{
    const auto config = harness::build_scenario(1, Season::Winter, 0);
    const std::vector<std::uint64_t> seeds{0, 1, 2, 3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            harness::compare_serial(config, kStrategies, static_cast<int>(state.range(0)), seeds));
    }
}
BENCHMARK(BM_CompareSerial)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

struct ForwardFixture {
    nn::QNetwork net;
    drl::EncodedInput input;
    drl::ActiveBits bits;

    ForwardFixture()
    {
        std::mt19937_64 rng(7);
        net = nn::QNetwork::glorot(drl::network_sizes(LearningParams{}), rng);
        const drl::StateParts s{17, 3, EnergyLevel::Medium};
        input = drl::encode(s, Action::RequestNeighbour);
        bits = drl::encode_active(s, Action::RequestNeighbour);
    }
};

void BM_ForwardDense(benchmark::State& state)
{
    ForwardFixture f;
    auto ws = f.net.make_workspace();
    for (auto _ : state) benchmark::DoNotOptimize(f.net.forward(f.input, ws));
}
BENCHMARK(BM_ForwardDense);

void BM_ForwardSparse(benchmark::State& state)
{
    ForwardFixture f;
    auto ws = f.net.make_workspace();
    for (auto _ : state) benchmark::DoNotOptimize(f.net.forward_sparse(f.bits.span(), ws));
}
BENCHMARK(BM_ForwardSparse);

}  // namespace

BENCHMARK_MAIN();
