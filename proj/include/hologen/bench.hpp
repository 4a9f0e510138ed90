#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hologen/choice.hpp"
#include "hologen/field.hpp"

namespace hologen {

struct BenchResult {
    std::string label;
    int resolution = 0;
    int repetitions = 0;
    int pairs = 0;
    int threads = 1;
    double mean_seconds = 0.0;  // per forward+inverse pair (scaling bench)
    double sigma_seconds = 0.0; // sample standard deviation of per-run means
    std::map<std::string, double> breakdown;

    bool operator==(const BenchResult&) const = default;
};

struct FftBenchOptions {
    std::vector<int> sizes;
    int runs = 100;
    int pairs_per_run = 1000;
    Precision precision = Precision::F32;
    int threads = 1;
};

// Times pairs_per_run forward+inverse transforms per run, runs times per
// size, after two untimed warm-up pairs. Sizes must be powers of two in
// [64, 4096]; allocation failure at a size skips it with a warning on stderr.
// If the timer cannot resolve 1/100th of a run, pairs_per_run is increased
// for that size.
std::vector<BenchResult> bench_fft_scaling(const FftBenchOptions& opts);

// Per-pair time predicted by the N^2 log2 N scaling model, anchored so the
// smallest measured size matches exactly.
std::vector<double> fft_model_curve(const std::vector<BenchResult>& results);

// CSV with one row per size: label, resolution, repetitions, pairs, threads,
// mean and sigma (shortest exact decimal), and the model column. Parsing
// reproduces the BenchResult list bit-for-bit.
std::string fft_bench_csv(const std::vector<BenchResult>& results);
std::vector<BenchResult> parse_fft_bench_csv(const std::string& csv);

// gnuplot script plotting measured points with 2-sigma error bars against the
// model curve from a CSV written by fft_bench_csv.
std::string fft_bench_gnuplot(const std::string& csv_filename);

// Runs one algorithm on a synthetic target at the given square resolution and
// reports the wall-clock split across transform / constraint / metric / other
// as fractions of the run (summing to 1). iterations means evaluation count
// for the search family and subframe count for the time-averaged family.
BenchResult bench_phase_breakdown(AlgorithmVariant variant, int resolution, int iterations,
                                  Precision precision = Precision::F64, uint64_t seed = 1);

} // namespace hologen
