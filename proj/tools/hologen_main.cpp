#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hologen/runner.hpp"

int main(int argc, char** argv) {
    using namespace hologen;

    CLI::App app{"hologen: computer-generated holography toolkit"};
    app.require_subcommand(1);

    const std::map<std::string, Precision> precision_names{{"f32", Precision::F32},
                                                           {"f64", Precision::F64}};
    const std::map<std::string, Normalization> norm_names{
        {"max_to_one", Normalization::MaxToOne}, {"unit_energy", Normalization::UnitEnergy}};
    const std::map<std::string, AlgorithmVariant> algorithm_names{
        {"gs", AlgorithmVariant::Gs},
        {"wgs", AlgorithmVariant::WeightedGs},
        {"lt", AlgorithmVariant::LiuTaghizadeh},
        {"ds", AlgorithmVariant::DirectSearch},
        {"sa", AlgorithmVariant::SimulatedAnnealing},
        {"ospr", AlgorithmVariant::Ospr},
        {"adaptive_ospr", AlgorithmVariant::AdaptiveOspr}};

    std::string config_path;
    CLI::App* gen = app.add_subcommand("generate", "Run one job config and write its artifacts");
    gen->add_option("config", config_path, "Job config JSON file")->required();

    std::string batch_dir;
    std::string batch_pattern = "*.json";
    int batch_jobs = 1;
    CLI::App* batch =
        app.add_subcommand("batch", "Run every matching job config in a directory");
    batch->add_option("dir", batch_dir, "Directory containing job configs")->required();
    batch->add_option("--pattern", batch_pattern, "Config filename glob")
        ->capture_default_str();
    batch->add_option("--jobs", batch_jobs, "Concurrent jobs")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();

    MetricsRequest mreq;
    bool met_mse = false, met_ssim = false;
    CLI::App* met = app.add_subcommand(
        "metrics", "Evaluate error metrics of a field dump against a target image");
    met->add_option("--target", mreq.target_path, "Target image (PNG or BMP)")->required();
    met->add_option("--field", mreq.dump_path, "Replay field dump (HGF1)")->required();
    met->add_flag("--mse", met_mse, "Report mean squared error (default)");
    met->add_flag("--ssim", met_ssim, "Report structural similarity");
    met->add_flag("--phase-sensitive", mreq.phase_sensitive, "Compare complex values");
    met->add_flag("--scale-free", mreq.scale_free, "Fit a global gain before comparing");
    met->add_option("--mask", mreq.mask_path, "Region-of-interest mask image");
    met->add_option("--phase-image", mreq.phase_image_path, "Target phase image");
    met->add_option("--normalization", mreq.normalization, "Target normalization")
        ->transform(CLI::CheckedTransformer(norm_names, CLI::ignore_case));

    CLI::App* bench = app.add_subcommand("bench", "Transform and algorithm benchmarks");
    bench->require_subcommand(1);

    BenchFftRequest freq;
    CLI::App* bfft =
        bench->add_subcommand("fft", "Forward+inverse transform pair scaling benchmark");
    bfft->add_option("--sizes", freq.sizes, "Square resolutions (powers of two)")
        ->delimiter(',')
        ->capture_default_str();
    bfft->add_option("--runs", freq.runs, "Timed runs per size")->capture_default_str();
    bfft->add_option("--pairs", freq.pairs, "Transform pairs per run")->capture_default_str();
    bfft->add_option("--precision", freq.precision, "Field precision")
        ->transform(CLI::CheckedTransformer(precision_names, CLI::ignore_case));
    bfft->add_option("--threads", freq.threads, "Backend threads")->capture_default_str();
    bfft->add_option("--csv", freq.csv_path, "Output CSV path")->capture_default_str();
    bfft->add_flag("--plot", freq.plot, "Also emit a gnuplot script");

    BenchBreakdownRequest breq;
    CLI::App* bbrk =
        bench->add_subcommand("breakdown", "Per-phase time fractions of one algorithm run");
    bbrk->add_option("--algorithm", breq.algorithm, "Algorithm to profile")
        ->transform(CLI::CheckedTransformer(algorithm_names, CLI::ignore_case));
    bbrk->add_option("--resolution", breq.resolution, "Square resolution (power of two)")
        ->capture_default_str();
    bbrk->add_option("--iterations", breq.iterations, "Iterations / evaluation budget scale")
        ->capture_default_str();
    bbrk->add_option("--precision", breq.precision, "Field precision")
        ->transform(CLI::CheckedTransformer(precision_names, CLI::ignore_case));
    bbrk->add_option("--seed", breq.seed, "Random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*gen) return cmd_generate(config_path, std::cout, std::cerr);
    if (*batch) return cmd_batch(batch_dir, batch_pattern, batch_jobs, std::cout, std::cerr);
    if (*met) {
        mreq.want_mse = met_mse || !met_ssim;
        mreq.want_ssim = met_ssim;
        return cmd_metrics(mreq, std::cout, std::cerr);
    }
    if (*bfft) return cmd_bench_fft(freq, std::cout, std::cerr);
    if (*bbrk) return cmd_bench_breakdown(breq, std::cout, std::cerr);
    return 1;
}
