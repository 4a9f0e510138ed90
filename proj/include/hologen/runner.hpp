#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hologen/bench.hpp"
#include "hologen/config.hpp"

namespace hologen {

struct GenerateOutcome {
    std::string algorithm;
    double final_error = 0.0;
    double seconds = 0.0;
    std::vector<std::string> artifacts;
};

// Loads inputs, runs the configured algorithm, writes requested artifacts
// into the config's output directory, and prints a name=value summary to log.
// Throws ConfigError for problems attributable to the config; anything else
// is a runtime failure. Partially written artifacts are removed on throw.
GenerateOutcome run_generate(const JobConfig& cfg, const std::string& base_dir,
                             std::ostream& log);

/// Exit codes: 0 success, 1 config error, 2 runtime error.
int cmd_generate(const std::string& config_path, std::ostream& out, std::ostream& err);

// Runs every config in dir matching the glob pattern, optionally jobs-way
// concurrent. Per-job logs land next to the configs; a summary table goes to
// out and to <dir>/batch_summary.csv. Nonzero exit if any job failed.
int cmd_batch(const std::string& dir, const std::string& pattern, int jobs, std::ostream& out,
              std::ostream& err);

struct MetricsRequest {
    std::string target_path;
    std::string dump_path;
    Normalization normalization = Normalization::MaxToOne;
    bool want_mse = true;
    bool want_ssim = false;
    bool phase_sensitive = false;
    bool scale_free = false;
    std::string mask_path;
    std::string phase_image_path;
};

int cmd_metrics(const MetricsRequest& req, std::ostream& out, std::ostream& err);

struct BenchFftRequest {
    std::vector<int> sizes{256, 512, 1024, 2048};
    int runs = 100;
    int pairs = 1000;
    Precision precision = Precision::F32;
    int threads = 1;
    std::string csv_path = "fft_bench.csv";
    bool plot = false;
};

int cmd_bench_fft(const BenchFftRequest& req, std::ostream& out, std::ostream& err);

struct BenchBreakdownRequest {
    AlgorithmVariant algorithm = AlgorithmVariant::Gs;
    int resolution = 1024;
    int iterations = 50;
    Precision precision = Precision::F32;
    uint64_t seed = 1;
};

int cmd_bench_breakdown(const BenchBreakdownRequest& req, std::ostream& out, std::ostream& err);

} // namespace hologen
