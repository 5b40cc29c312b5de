#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "hsiband/bandstats.hpp"
#include "hsiband/composite.hpp"
#include "hsiband/cube.hpp"
#include "hsiband/infotheory.hpp"
#include "hsiband/rng.hpp"

namespace {

using namespace hsiband;

Eigen::MatrixXd random_samples(int n, int bands, std::uint64_t seed) {
    Eigen::MatrixXd m(n, bands);
    rng::Stream s(seed);
    for (int j = 0; j < bands; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = s.next_unit();
    return m;
}

SpectralCube random_cube(int rows, int cols, int bands, std::uint64_t seed) {
    SpectralCube cube;
    cube.rows = rows;
    cube.cols = cols;
    cube.axis = WavelengthAxis::uniform(450.0, 950.0, bands);
    cube.data.resize(static_cast<std::size_t>(bands) * rows * cols);
    rng::Stream s(seed);
    for (auto& v : cube.data) v = static_cast<float>(s.next_unit());
    return cube;
}

PatchSet bench_patches() {
    PatchSet ps;
    ps.patches.push_back({"background", 0, 2, 2, 12, 12});
    ps.patches.push_back({"target_a", 1, 20, 20, 10, 10});
    ps.patches.push_back({"target_b", 1, 40, 40, 10, 10});
    ps.class_names = {"background", "target"};
    return ps;
}

void BM_CorrelationMatrix(benchmark::State& state) {
    const int bands = static_cast<int>(state.range(0));
    Eigen::MatrixXd samples = random_samples(512, bands, 11);
    for (auto _ : state) {
        CorrelationMatrix corr = correlation_matrix(samples);
        benchmark::DoNotOptimize(corr.values.data());
    }
}
BENCHMARK(BM_CorrelationMatrix)->Arg(32)->Arg(128);

void BM_JmimRank(benchmark::State& state) {
    const int bands = static_cast<int>(state.range(0));
    const int n = 1000;
    Eigen::MatrixXd samples = random_samples(n, bands, 13);
    std::vector<DiscretizedBand> discretized;
    discretized.reserve(static_cast<std::size_t>(bands));
    for (int j = 0; j < bands; ++j) {
        std::vector<double> col(samples.col(j).data(), samples.col(j).data() + n);
        discretized.push_back(quantize_band(col, 32));
    }
    ClassVector classes;
    classes.labels.resize(n);
    for (int i = 0; i < n; ++i) classes.labels[static_cast<std::size_t>(i)] = i % 2;
    classes.n_classes = 2;
    for (auto _ : state) {
        JmimResult r = jmim_rank(discretized, classes, 3);
        benchmark::DoNotOptimize(r.order.data());
    }
}
BENCHMARK(BM_JmimRank)->Arg(32)->Arg(128);

void BM_CsnrTable(benchmark::State& state) {
    SpectralCube cube = random_cube(64, 64, static_cast<int>(state.range(0)), 17);
    PatchSet ps = bench_patches();
    for (auto _ : state) {
        CsnrTable table = csnr_table(cube, ps, 50, 42, 0);
        benchmark::DoNotOptimize(table.values.data());
    }
}
BENCHMARK(BM_CsnrTable)->Arg(64)->Arg(128);

void BM_ReconstructComposite(benchmark::State& state) {
    SpectralCube cube = random_cube(96, 96, 128, 19);
    ChannelMapping mapping;
    mapping.red_center = 60;
    mapping.green_center = 20;
    mapping.blue_center = 100;
    mapping.half_width = 7;
    for (auto _ : state) {
        CompositeImage img = reconstruct_composite(cube, mapping);
        benchmark::DoNotOptimize(img.image.pixels.data());
    }
}
BENCHMARK(BM_ReconstructComposite);

}  // namespace

BENCHMARK_MAIN();
