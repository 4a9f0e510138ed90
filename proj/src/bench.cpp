#include "hologen/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <iostream>
#include <new>
#include <sstream>
#include <stdexcept>

#include "hologen/fft.hpp"
#include "hologen/ifta.hpp"
#include "hologen/numfmt.hpp"
#include "hologen/ospr.hpp"
#include "hologen/patterns.hpp"
#include "hologen/rng.hpp"
#include "hologen/search.hpp"

namespace hologen {
namespace {

using Clock = std::chrono::steady_clock;

bool power_of_two_in_range(int n) {
    return n >= 64 && n <= 4096 && (n & (n - 1)) == 0;
}

// Smallest observable interval of the monotonic clock.
double timer_resolution() {
    double best = 1.0;
    for (int i = 0; i < 512; ++i) {
        auto t0 = Clock::now();
        auto t1 = t0;
        while (t1 == t0) t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

using detail::format_double;
using detail::parse_double;

template <typename T>
std::vector<BenchResult> fft_scaling_impl(const FftBenchOptions& opts) {
    auto backend = make_fft_backend<T>(opts.threads);
    const double res = timer_resolution();
    std::vector<BenchResult> out;

    for (int n : opts.sizes) {
        size_t count = static_cast<size_t>(n) * n;
        std::vector<std::complex<T>> in, scratch;
        try {
            in.resize(count);
            scratch.resize(count);
            backend->warm(n, n);
        } catch (const std::bad_alloc&) {
            std::cerr << "warning: skipping size " << n << ": allocation failed\n";
            continue;
        }
        Rng rng(42);
        for (auto& z : in)
            z = {static_cast<T>(rng.uniform(-1.0, 1.0)), static_cast<T>(rng.uniform(-1.0, 1.0))};

        for (int w = 0; w < 2; ++w) {
            backend->forward(n, n, in.data(), scratch.data());
            backend->inverse(n, n, scratch.data(), in.data());
        }

        int pairs = std::max(1, opts.pairs_per_run);
        std::vector<double> per_run;
        for (;;) {
            per_run.clear();
            per_run.reserve(static_cast<size_t>(opts.runs));
            double shortest = 1e300;
            for (int r = 0; r < opts.runs; ++r) {
                auto t0 = Clock::now();
                for (int p = 0; p < pairs; ++p) {
                    backend->forward(n, n, in.data(), scratch.data());
                    backend->inverse(n, n, scratch.data(), in.data());
                }
                double dt = std::chrono::duration<double>(Clock::now() - t0).count();
                shortest = std::min(shortest, dt);
                per_run.push_back(dt / pairs);
            }
            if (shortest >= 100.0 * res || pairs >= 10'000'000) break;
            pairs *= 10;
        }

        double mean = 0.0;
        for (double v : per_run) mean += v;
        mean /= per_run.size();
        double ss = 0.0;
        for (double v : per_run) ss += (v - mean) * (v - mean);
        double sigma = per_run.size() > 1 ? std::sqrt(ss / (per_run.size() - 1)) : 0.0;

        BenchResult r;
        r.label = std::string("fft_pair_") + to_string(opts.precision);
        r.resolution = n;
        r.repetitions = opts.runs;
        r.pairs = pairs;
        r.threads = opts.threads;
        r.mean_seconds = mean;
        r.sigma_seconds = sigma;
        out.push_back(std::move(r));
    }
    return out;
}

template <typename T>
BenchResult breakdown_impl(AlgorithmVariant variant, int resolution, int iterations,
                           uint64_t seed) {
    TargetSpec target;
    target.amplitude = patterns::smooth_blobs(resolution, resolution);
    normalize_image(target.amplitude, Normalization::UnitEnergy);
    target.freedoms.phase = true;

    RunReport<T> rep;
    switch (variant) {
        case AlgorithmVariant::Gs:
        case AlgorithmVariant::WeightedGs:
        case AlgorithmVariant::LiuTaghizadeh: {
            IftaConfig cfg;
            cfg.variant = variant == AlgorithmVariant::Gs ? IftaVariant::GS
                          : variant == AlgorithmVariant::WeightedGs
                              ? IftaVariant::WeightedGS
                              : IftaVariant::LiuTaghizadeh;
            cfg.iterations = iterations;
            cfg.slm = SlmSpec::full_circle_phase(256);
            cfg.target = target;
            cfg.seed = seed;
            rep = run_ifta<T>(cfg);
            break;
        }
        case AlgorithmVariant::DirectSearch:
        case AlgorithmVariant::SimulatedAnnealing: {
            SearchConfig cfg;
            cfg.variant = variant == AlgorithmVariant::DirectSearch
                              ? SearchVariant::DirectSearch
                              : SearchVariant::SimulatedAnnealing;
            cfg.max_evaluations = iterations;
            cfg.slm = SlmSpec::binary_phase();
            cfg.target = target;
            cfg.seed = seed;
            if (cfg.variant == SearchVariant::SimulatedAnnealing) {
                cfg.sa_t0 = 0.1;
                cfg.sa_decay = std::pow(10.0, -6.0 / iterations);
            }
            rep = run_search<T>(cfg);
            break;
        }
        case AlgorithmVariant::Ospr:
        case AlgorithmVariant::AdaptiveOspr: {
            OsprConfig cfg;
            cfg.variant = variant == AlgorithmVariant::Ospr ? OsprVariant::Ospr
                                                            : OsprVariant::AdaptiveOspr;
            cfg.subframes = iterations;
            cfg.slm = SlmSpec::binary_phase();
            cfg.target = target;
            cfg.seed = seed;
            rep = run_ospr_variant<T>(cfg).report;
            break;
        }
    }

    BenchResult r;
    r.label = std::string("breakdown_") + to_string(variant);
    r.resolution = resolution;
    r.repetitions = 1;
    r.threads = 1;
    r.mean_seconds = rep.seconds;
    double total = rep.profile.transform + rep.profile.constraint + rep.profile.metric +
                   rep.profile.other;
    if (total > 0.0) {
        r.breakdown["transform"] = rep.profile.transform / total;
        r.breakdown["constraint"] = rep.profile.constraint / total;
        r.breakdown["metric"] = rep.profile.metric / total;
        r.breakdown["other"] = rep.profile.other / total;
    } else {
        r.breakdown["other"] = 1.0;
    }
    return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::vector<BenchResult> bench_fft_scaling(const FftBenchOptions& opts) {
    if (opts.sizes.empty())
        throw std::invalid_argument("bench_fft_scaling: no sizes given");
    for (int n : opts.sizes)
        if (!power_of_two_in_range(n))
            throw std::invalid_argument(
                "bench_fft_scaling: sizes must be powers of two in [64, 4096]");
    if (opts.runs < 2) throw std::invalid_argument("bench_fft_scaling: runs must be >= 2");
    if (opts.pairs_per_run < 1)
        throw std::invalid_argument("bench_fft_scaling: pairs_per_run must be >= 1");
    if (opts.threads < 1)
        throw std::invalid_argument("bench_fft_scaling: threads must be >= 1");
    return opts.precision == Precision::F32 ? fft_scaling_impl<float>(opts)
                                            : fft_scaling_impl<double>(opts);
}

std::vector<double> fft_model_curve(const std::vector<BenchResult>& results) {
    if (results.empty()) return {};
    const BenchResult* anchor = &results[0];
    for (const BenchResult& r : results)
        if (r.resolution < anchor->resolution) anchor = &r;
    auto weight = [](int n) {
        return static_cast<double>(n) * n * std::log2(static_cast<double>(n));
    };
    std::vector<double> model;
    model.reserve(results.size());
    for (const BenchResult& r : results)
        model.push_back(anchor->mean_seconds * weight(r.resolution) /
                        weight(anchor->resolution));
    return model;
}

std::string fft_bench_csv(const std::vector<BenchResult>& results) {
    std::vector<double> model = fft_model_curve(results);
    std::ostringstream os;
    os << "label,resolution,repetitions,pairs,threads,mean_seconds,sigma_seconds,"
          "model_seconds\n";
    for (size_t i = 0; i < results.size(); ++i) {
        const BenchResult& r = results[i];
        os << r.label << ',' << r.resolution << ',' << r.repetitions << ',' << r.pairs << ','
           << r.threads << ',' << format_double(r.mean_seconds) << ','
           << format_double(r.sigma_seconds) << ',' << format_double(model[i]) << '\n';
    }
    return os.str();
}

std::vector<BenchResult> parse_fft_bench_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    std::vector<BenchResult> out;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 8)
            throw std::invalid_argument("bench csv: expected 8 fields per row");
        BenchResult r;
        r.label = f[0];
        r.resolution = static_cast<int>(parse_double(f[1]));
        r.repetitions = static_cast<int>(parse_double(f[2]));
        r.pairs = static_cast<int>(parse_double(f[3]));
        r.threads = static_cast<int>(parse_double(f[4]));
        r.mean_seconds = parse_double(f[5]);
        r.sigma_seconds = parse_double(f[6]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string fft_bench_gnuplot(const std::string& csv_filename) {
    std::ostringstream os;
    os << "set terminal pngcairo size 900,600\n"
       << "set output 'fft_bench.png'\n"
       << "set datafile separator ','\n"
       << "set logscale xy\n"
       << "set xlabel 'resolution (pixels per side)'\n"
       << "set ylabel 'seconds per transform pair'\n"
       << "set key left top\n"
       << "plot '" << csv_filename
       << "' every ::1 using 2:6:(2*$7) with yerrorbars title 'measured (2 sigma)', \\\n"
       << "     '" << csv_filename << "' every ::1 using 2:8 with lines title 'n^2 log n model'\n";
    return os.str();
}

BenchResult bench_phase_breakdown(AlgorithmVariant variant, int resolution, int iterations,
                                  Precision precision, uint64_t seed) {
    if (resolution < 2)
        throw std::invalid_argument("bench_phase_breakdown: resolution must be >= 2");
    if (iterations < 1)
        throw std::invalid_argument("bench_phase_breakdown: iterations must be >= 1");
    return precision == Precision::F32
               ? breakdown_impl<float>(variant, resolution, iterations, seed)
               : breakdown_impl<double>(variant, resolution, iterations, seed);
}

} // namespace hologen
