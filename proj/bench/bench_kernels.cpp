// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "hcs/kernels.hpp"
#include "hcs/restore.hpp"
#include "hcs/serial_kernels.hpp"

namespace {

hcs::Image2D noise_image(int side) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    hcs::Image2D img(side, side);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

void BM_GaussianSerial(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::serial::gaussian_convolve(img, 5.0));
}

void BM_GaussianParallel(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::gaussian_convolve(img, 5.0));
}

void BM_SobelSerial(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::serial::sobel_magnitude(img));
}

void BM_SobelParallel(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::sobel_magnitude(img));
}

void BM_RichardsonLucySerial(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::serial::richardson_lucy(img, 1.0, 30));
}

void BM_RichardsonLucyParallel(benchmark::State& state) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hcs::richardson_lucy(img, 1.0, 30));
}

}  // namespace

BENCHMARK(BM_GaussianSerial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianParallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SobelSerial)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SobelParallel)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RichardsonLucySerial)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RichardsonLucyParallel)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
