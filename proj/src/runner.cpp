#include "hologen/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <sstream>
#include <thread>

#include "hologen/ifta.hpp"
#include "hologen/io.hpp"
#include "hologen/ospr.hpp"
#include "hologen/search.hpp"

namespace hologen {
namespace {

namespace fs = std::filesystem;

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return buf;
}

// Removes everything this run managed to write if it fails midway.
class ArtifactTracker {
public:
    void add(std::string path) { written_.push_back(std::move(path)); }

    const std::vector<std::string>& paths() const { return written_; }

    void discard_all() {
        std::error_code ec;
        for (const std::string& p : written_) fs::remove(p, ec);
        written_.clear();
    }

private:
    std::vector<std::string> written_;
};

// 8-bit phase images put 256 gray levels on one turn, so 255 maps to 255/256
// of a turn and the [0,1) invariant holds.
RealImage load_phase_image(const std::string& path) {
    RealImage img = read_image_gray(path);
    for (double& v : img.data) v *= 255.0 / 256.0;
    return img;
}

TargetSpec build_target(const JobConfig& cfg, const std::string& base_dir) {
    TargetSpec t;
    try {
        t.amplitude = load_target(resolve_config_path(base_dir, cfg.target.image_path),
                                  cfg.target.normalization);
    } catch (const std::exception& e) {
        throw ConfigError("target.image", e.what());
    }
    if (!cfg.target.phase_image_path.empty()) {
        try {
            t.phase = load_phase_image(
                resolve_config_path(base_dir, cfg.target.phase_image_path));
        } catch (const std::exception& e) {
            throw ConfigError("target.phase_image", e.what());
        }
    }
    if (!cfg.target.roi_mask_path.empty()) {
        try {
            t.roi = load_mask(resolve_config_path(base_dir, cfg.target.roi_mask_path));
        } catch (const std::exception& e) {
            throw ConfigError("target.roi_mask", e.what());
        }
    }
    t.freedoms = cfg.target.freedoms;
    try {
        t.validate();
    } catch (const std::exception& e) {
        throw ConfigError("target", e.what());
    }
    return t;
}

SlmSpec build_slm(const JobConfig& cfg, const std::string& base_dir, int nx, int ny) {
    SlmSpec spec;
    if (cfg.slm.mode == SlmMode::Phase) {
        spec = cfg.slm.full_circle
                   ? SlmSpec::full_circle_phase(cfg.slm.levels, cfg.slm.min_arg)
                   : SlmSpec::phase(cfg.slm.levels, cfg.slm.min_arg, cfg.slm.max_arg);
    } else {
        spec = SlmSpec::amplitude(cfg.slm.levels, cfg.slm.min_amp, cfg.slm.max_amp);
    }
    if (!cfg.slm.illumination_path.empty()) {
        AnyField any;
        try {
            any = read_field_dump(resolve_config_path(base_dir, cfg.slm.illumination_path),
                                  Domain::Aperture);
        } catch (const std::exception& e) {
            throw ConfigError("slm.illumination", e.what());
        }
        ComplexField<double> illum = std::visit(
            [](const auto& f) {
                ComplexField<double> out(f.nx, f.ny, Domain::Aperture);
                for (size_t i = 0; i < f.data.size(); ++i)
                    out.data[i] = {static_cast<double>(f.data[i].real()),
                                   static_cast<double>(f.data[i].imag())};
                return out;
            },
            any);
        if (illum.nx != nx || illum.ny != ny)
            throw ConfigError("slm.illumination",
                              "dimension mismatch: illumination " + std::to_string(illum.nx) +
                                  "x" + std::to_string(illum.ny) + " vs target " +
                                  std::to_string(nx) + "x" + std::to_string(ny));
        spec.illumination = std::move(illum);
    }
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError("slm", e.what());
    }
    return spec;
}

std::string gnuplot_trace_script(const std::string& csv_name,
                                 const std::vector<std::string>& trace_names) {
    std::ostringstream os;
    os << "set terminal pngcairo size 900,600\n"
       << "set output 'trace.png'\n"
       << "set datafile separator ','\n"
       << "set xlabel 'iteration'\n"
       << "set ylabel 'error'\n"
       << "set logscale y\n"
       << "plot ";
    for (size_t i = 0; i < trace_names.size(); ++i) {
        if (i) os << ", \\\n     ";
        os << "'< grep \"," << trace_names[i] << ",\" " << csv_name
           << "' using 1:3 with linespoints title '" << trace_names[i] << "'";
    }
    os << "\n";
    return os.str();
}

template <typename T>
struct RunProducts {
    RunReport<T> report;
    std::vector<ComplexField<T>> frames; // time-averaged family only
    double subframe_statistic = 0.0;
    bool has_subframe_statistic = false;
};

template <typename T>
RunProducts<T> dispatch_algorithm(const JobConfig& cfg, const TargetSpec& target,
                                  const SlmSpec& slm) {
    const AlgorithmSettings& a = cfg.algorithm;
    RunProducts<T> out;
    switch (a.kind) {
        case AlgorithmVariant::Gs:
        case AlgorithmVariant::WeightedGs:
        case AlgorithmVariant::LiuTaghizadeh: {
            IftaConfig ic;
            ic.variant = a.kind == AlgorithmVariant::Gs ? IftaVariant::GS
                         : a.kind == AlgorithmVariant::WeightedGs
                             ? IftaVariant::WeightedGS
                             : IftaVariant::LiuTaghizadeh;
            ic.iterations = a.iterations;
            ic.slm = slm;
            ic.target = target;
            ic.seed = cfg.seed;
            ic.weight_clamp_lo = a.weight_clamp_lo;
            ic.weight_clamp_hi = a.weight_clamp_hi;
            ic.lt_initial_fraction = a.lt_initial_fraction;
            ic.init_phase = a.init_phase;
            if (cfg.propagation.fresnel) {
                Propagator<T> prop = Propagator<T>::fresnel(
                    target.width(), target.height(), cfg.propagation.params);
                out.report = run_ifta<T>(ic, &prop);
            } else {
                out.report = run_ifta<T>(ic);
            }
            break;
        }
        case AlgorithmVariant::DirectSearch:
        case AlgorithmVariant::SimulatedAnnealing: {
            SearchConfig sc;
            sc.variant = a.kind == AlgorithmVariant::DirectSearch
                             ? SearchVariant::DirectSearch
                             : SearchVariant::SimulatedAnnealing;
            sc.max_evaluations = a.max_evaluations;
            sc.slm = slm;
            sc.target = target;
            sc.metric.kind = a.metric_kind;
            sc.metric.phase_sensitive = a.metric_phase_sensitive;
            sc.metric.scale_free = target.freedoms.scale;
            sc.seed = cfg.seed;
            sc.pixel_order = a.pixel_order;
            sc.sa_t0 = a.sa_t0;
            sc.sa_decay = a.sa_decay;
            sc.init = a.search_init;
            sc.resync_every = a.resync_every;
            out.report = run_search<T>(
                sc, cfg.propagation.fresnel ? &cfg.propagation.params : nullptr);
            break;
        }
        case AlgorithmVariant::Ospr:
        case AlgorithmVariant::AdaptiveOspr: {
            OsprConfig oc;
            oc.variant = a.kind == AlgorithmVariant::Ospr ? OsprVariant::Ospr
                                                          : OsprVariant::AdaptiveOspr;
            oc.subframes = a.subframes;
            oc.slm = slm;
            oc.target = target;
            oc.seed = cfg.seed;
            oc.feedback_gain = a.feedback_gain;
            OsprRun<T> run = run_ospr_variant<T>(oc);
            out.report = std::move(run.report);
            out.frames = std::move(run.set.frames);
            out.subframe_statistic = subframe_mse_statistic(run.set.per_frame_mse);
            out.has_subframe_statistic = true;
            break;
        }
    }
    return out;
}

template <typename T>
GenerateOutcome run_generate_typed(const JobConfig& cfg, const std::string& base_dir,
                                   std::ostream& log) {
    TargetSpec target = build_target(cfg, base_dir);
    SlmSpec slm = build_slm(cfg, base_dir, target.width(), target.height());

    RunProducts<T> products = dispatch_algorithm<T>(cfg, target, slm);
    RunReport<T>& rep = products.report;

    std::string out_dir = resolve_config_path(base_dir, cfg.io.output_dir);
    fs::create_directories(out_dir);
    auto out_path = [&out_dir](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };

    ArtifactTracker tracker;
    try {
        if (cfg.io.field_dump) {
            std::string p = out_path("hologram.hgf");
            write_field_dump(p, rep.hologram);
            tracker.add(p);
            p = out_path("replay.hgf");
            write_field_dump(p, rep.replay);
            tracker.add(p);
            for (size_t i = 0; i < products.frames.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%03zu.hgf", i);
                p = out_path(name);
                write_field_dump(p, products.frames[i]);
                tracker.add(p);
            }
        }
        if (cfg.io.hologram_png) {
            Quantiser<T> quant(slm, rep.hologram.nx, rep.hologram.ny);
            std::vector<int32_t> levels(rep.hologram.data.size());
            for (size_t i = 0; i < levels.size(); ++i)
                levels[i] = quant.decide(i, rep.hologram.data[i]);
            std::string p = out_path("hologram.png");
            write_hologram_png(p, levels, rep.hologram.nx, rep.hologram.ny,
                               quant.level_count());
            tracker.add(p);
        }
        if (cfg.io.replay_png) {
            std::string p = out_path("replay.png");
            write_replay_png(p, rep.replay);
            tracker.add(p);
            tracker.add(p + ".scale.txt");
        }
        if (cfg.io.trace_csv || cfg.io.plot) {
            std::string p = out_path("trace.csv");
            write_text_file(p, trace_csv(rep.trace, rep.extra_traces));
            tracker.add(p);
        }
        if (cfg.io.plot) {
            std::vector<std::string> names{rep.trace.name};
            for (const MetricTrace& t : rep.extra_traces) names.push_back(t.name);
            std::string p = out_path("trace_plot.gp");
            write_text_file(p, gnuplot_trace_script("trace.csv", names));
            tracker.add(p);
        }
    } catch (...) {
        tracker.discard_all();
        throw;
    }

    for (const std::string& p : tracker.paths()) log << "wrote: " << p << "\n";
    log << "algorithm=" << rep.algorithm << "\n";
    if (products.has_subframe_statistic)
        log << "subframe_mse_statistic=" << fmt9(products.subframe_statistic) << "\n";
    log << "final_error=" << fmt9(rep.final_error) << "\n";
    char sec[32];
    std::snprintf(sec, sizeof sec, "%.3f", rep.seconds);
    log << "seconds=" << sec << "\n";

    GenerateOutcome outcome;
    outcome.algorithm = rep.algorithm;
    outcome.final_error = rep.final_error;
    outcome.seconds = rep.seconds;
    outcome.artifacts = tracker.paths();
    return outcome;
}

bool glob_match(const std::string& name, const std::string& pattern) {
    std::string re;
    for (char c : pattern) {
        switch (c) {
            case '*': re += ".*"; break;
            case '?': re += '.'; break;
            default:
                if (std::isalnum(static_cast<unsigned char>(c))) {
                    re += c;
                } else {
                    re += '\\';
                    re += c;
                }
        }
    }
    return std::regex_match(name, std::regex(re));
}

struct BatchRow {
    std::string job;
    bool ok = false;
    double final_error = 0.0;
    double seconds = 0.0;
    std::string message;
};

} // namespace

GenerateOutcome run_generate(const JobConfig& cfg, const std::string& base_dir,
                             std::ostream& log) {
    validate_job_config(cfg, base_dir);
    return cfg.precision == Precision::F32 ? run_generate_typed<float>(cfg, base_dir, log)
                                           : run_generate_typed<double>(cfg, base_dir, log);
}

int cmd_generate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    }
    try {
        JobConfig cfg = parse_job_config(text);
        std::string base = fs::path(config_path).parent_path().string();
        run_generate(cfg, base, out);
        return 0;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_batch(const std::string& dir, const std::string& pattern, int jobs, std::ostream& out,
              std::ostream& err) {
    std::vector<std::string> configs;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() &&
                glob_match(entry.path().filename().string(), pattern))
                configs.push_back(entry.path().string());
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        err << "no jobs matched\n";
        return 1;
    }

    if (jobs < 1) jobs = 1;
    if (jobs > 64) jobs = 64;
    jobs = std::min<int>(jobs, static_cast<int>(configs.size()));

    std::vector<BatchRow> rows(configs.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            BatchRow& row = rows[i];
            row.job = fs::path(configs[i]).filename().string();
            std::ostringstream log;
            try {
                JobConfig cfg = parse_job_config(read_text_file(configs[i]));
                std::string base = fs::path(configs[i]).parent_path().string();
                GenerateOutcome o = run_generate(cfg, base, log);
                row.ok = true;
                row.final_error = o.final_error;
                row.seconds = o.seconds;
            } catch (const std::exception& e) {
                row.ok = false;
                row.message = e.what();
                log << "failed: " << e.what() << "\n";
            }
            std::string log_path =
                (fs::path(dir) / (fs::path(configs[i]).stem().string() + ".log")).string();
            try {
                write_text_file(log_path, log.str());
            } catch (...) {
                // A failed log write must not take the whole batch down.
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    char line[256];
    std::snprintf(line, sizeof line, "%-32s %-8s %16s %10s", "job", "status", "final_error",
                  "seconds");
    out << line << "\n";
    std::string csv = "job,status,final_error,seconds,message\n";
    bool any_failed = false;
    for (const BatchRow& r : rows) {
        if (r.ok) {
            std::snprintf(line, sizeof line, "%-32s %-8s %16s %10.3f", r.job.c_str(), "ok",
                          fmt9(r.final_error).c_str(), r.seconds);
        } else {
            any_failed = true;
            std::snprintf(line, sizeof line, "%-32s %-8s %16s %10s", r.job.c_str(), "failed",
                          "-", "-");
        }
        out << line << "\n";
        std::string msg = r.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        csv += r.job + ',' + (r.ok ? "ok" : "failed") + ',' +
               (r.ok ? fmt9(r.final_error) : std::string("-")) + ',' +
               (r.ok ? fmt9(r.seconds) : std::string("-")) + ',' + msg + '\n';
    }
    try {
        write_text_file((fs::path(dir) / "batch_summary.csv").string(), csv);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return any_failed ? 1 : 0;
}

int cmd_metrics(const MetricsRequest& req, std::ostream& out, std::ostream& err) {
    try {
        RealImage target = load_target(req.target_path, req.normalization);
        AnyField any = read_field_dump(req.dump_path, Domain::Replay);
        int fnx = std::visit([](const auto& f) { return f.nx; }, any);
        int fny = std::visit([](const auto& f) { return f.ny; }, any);
        if (fnx != target.width || fny != target.height) {
            err << "dimension mismatch: target " << target.width << "x" << target.height
                << " vs field " << fnx << "x" << fny << "\n";
            return 1;
        }

        MetricConfig mcfg;
        mcfg.phase_sensitive = req.phase_sensitive;
        mcfg.scale_free = req.scale_free;
        if (!req.mask_path.empty()) {
            RegionMask mask = load_mask(req.mask_path);
            if (mask.width != target.width || mask.height != target.height) {
                err << "dimension mismatch: target " << target.width << "x" << target.height
                    << " vs mask " << mask.width << "x" << mask.height << "\n";
                return 1;
            }
            mcfg.mask = std::move(mask);
        }
        std::optional<RealImage> phase_rad;
        if (!req.phase_image_path.empty()) {
            RealImage turns = load_phase_image(req.phase_image_path);
            if (turns.width != target.width || turns.height != target.height) {
                err << "dimension mismatch: target " << target.width << "x" << target.height
                    << " vs phase image " << turns.width << "x" << turns.height << "\n";
                return 1;
            }
            constexpr double two_pi = 6.283185307179586476925286766559;
            phase_rad = RealImage(turns.width, turns.height);
            for (size_t i = 0; i < turns.data.size(); ++i)
                phase_rad->data[i] = two_pi * turns.data[i];
        }
        const RealImage* phase_ptr = phase_rad ? &*phase_rad : nullptr;

        auto run = [&](const auto& field) {
            if (req.want_mse) {
                mcfg.kind = MetricKind::MSE;
                out << "mse=" << fmt9(mse(target, field, mcfg, phase_ptr)) << "\n";
            }
            if (req.want_ssim) {
                mcfg.kind = MetricKind::SSIM;
                out << "ssim=" << fmt9(ssim(target, field, mcfg, phase_ptr)) << "\n";
            }
        };
        std::visit(run, any);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_bench_fft(const BenchFftRequest& req, std::ostream& out, std::ostream& err) {
    FftBenchOptions opts;
    opts.sizes = req.sizes;
    opts.runs = req.runs;
    opts.pairs_per_run = req.pairs;
    opts.precision = req.precision;
    opts.threads = req.threads;
    std::vector<BenchResult> results;
    try {
        results = bench_fft_scaling(opts);
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::string csv = fft_bench_csv(results);
        write_text_file(req.csv_path, csv);
        out << csv;
        if (req.plot) {
            fs::path gp = fs::path(req.csv_path).parent_path() / "fft_bench.gp";
            write_text_file(gp.string(),
                            fft_bench_gnuplot(fs::path(req.csv_path).filename().string()));
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_bench_breakdown(const BenchBreakdownRequest& req, std::ostream& out,
                        std::ostream& err) {
    try {
        BenchResult r =
            bench_phase_breakdown(req.algorithm, req.resolution, req.iterations,
                                  req.precision, req.seed);
        out << "algorithm=" << to_string(req.algorithm) << "\n";
        out << "resolution=" << r.resolution << "\n";
        char buf[64];
        for (const auto& [name, frac] : r.breakdown) {
            std::snprintf(buf, sizeof buf, "%.4f", frac);
            out << name << "_fraction=" << buf << "\n";
        }
        std::snprintf(buf, sizeof buf, "%.3f", r.mean_seconds);
        out << "seconds=" << buf << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace hologen
