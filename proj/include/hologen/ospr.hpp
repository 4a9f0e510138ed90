#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hologen/fft.hpp"
#include "hologen/metrics.hpp"
#include "hologen/quantise.hpp"
#include "hologen/report.hpp"
#include "hologen/rng.hpp"
#include "hologen/target.hpp"

namespace hologen {

enum class OsprVariant { Ospr, AdaptiveOspr };

struct OsprConfig {
    OsprVariant variant = OsprVariant::Ospr;
    int subframes = 1;
    SlmSpec slm;
    TargetSpec target;
    uint64_t seed = 0;
    // Adaptive feedback strength: 0 disables feedback (identical to plain
    // OSPR), 1 applies the full intensity-budget correction.
    double feedback_gain = 1.0;

    void validate() const {
        if (subframes < 1)
            throw std::invalid_argument("OsprConfig: subframes must be >= 1");
        if (!(feedback_gain >= 0.0 && feedback_gain <= 1.0))
            throw std::invalid_argument("OsprConfig: feedback_gain must be in [0,1]");
        slm.validate();
        target.validate();
    }
};

// A temporal sequence of holograms whose time-averaged replay intensity
// approximates the target.
template <typename T>
struct SubframeSet {
    std::vector<ComplexField<T>> frames;
    RealImage mean_intensity{1, 1};
    std::vector<double> per_frame_mse;
};

template <typename T>
struct OsprRun {
    SubframeSet<T> set;
    RunReport<T> report;
};

// Aggregate per-subframe error statistic (1/sqrt(N)) * sum of MSE_n. Exported
// for reporting alongside the measured error of the averaged intensity; the
// two are related but not equal.
inline double subframe_mse_statistic(const std::vector<double>& per_frame_mse) {
    if (per_frame_mse.empty())
        throw std::invalid_argument("subframe_mse_statistic: empty list");
    double s = 0.0;
    for (double v : per_frame_mse) s += v;
    return s / std::sqrt(static_cast<double>(per_frame_mse.size()));
}

namespace detail {

template <typename T>
OsprRun<T> run_ospr_impl(const OsprConfig& cfg, FftBackend<T>* backend) {
    cfg.validate();
    const TargetSpec& tgt = cfg.target;
    const int nx = tgt.width(), ny = tgt.height();
    const size_t npix = static_cast<size_t>(nx) * ny;
    const int N = cfg.subframes;
    const bool adaptive = cfg.variant == OsprVariant::AdaptiveOspr;
    const double g = adaptive ? cfg.feedback_gain : 0.0;

    OsprRun<T> run;
    RunReport<T>& rep = run.report;
    rep.algorithm = adaptive ? "adaptive_ospr" : "ospr";
    rep.seed = cfg.seed;
    rep.trace.name = "cumulative_mse";
    MetricTrace frame_trace;
    frame_trace.name = "frame_mse";

    auto run_start = std::chrono::steady_clock::now();

    Quantiser<T> quant(cfg.slm, nx, ny);
    Rng rng = Rng(cfg.seed).fork(0);

    MetricConfig mcfg;
    mcfg.kind = MetricKind::MSE;
    mcfg.phase_sensitive = false;
    mcfg.scale_free = tgt.freedoms.scale;
    if (tgt.roi) mcfg.mask = *tgt.roi;

    const RealImage& target = tgt.amplitude;
    std::vector<double> t2(npix);
    for (size_t i = 0; i < npix; ++i) t2[i] = target.data[i] * target.data[i];

    std::vector<double> sum_intensity(npix, 0.0);
    RealImage amp(nx, ny);
    run.set.frames.reserve(static_cast<size_t>(N));

    for (int n = 1; n <= N; ++n) {
        if (!adaptive || n == 1) {
            amp.data = target.data;
        } else {
            // Intensity budget: aim frame n so the running average lands on
            // the target intensity, clamped at zero for overshot pixels.
            for (size_t i = 0; i < npix; ++i) {
                double budget = n * t2[i] - (n - 1) * (sum_intensity[i] / (n - 1));
                double tn = std::sqrt(std::max(0.0, budget));
                amp.data[i] = (1.0 - g) * target.data[i] + g * tn;
            }
        }

        ComplexField<T> seeded = seed_random_phase<T>(amp, rng);
        auto t0 = std::chrono::steady_clock::now();
        ComplexField<T> f = fft_inverse(seeded, backend);
        rep.profile.transform += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        quant.apply(f);
        rep.profile.constraint += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        ComplexField<T> R = fft_forward(f, backend);
        rep.profile.transform += seconds_since(t0);

        run.set.frames.push_back(std::move(f));

        t0 = std::chrono::steady_clock::now();
        for (size_t i = 0; i < npix; ++i) {
            double re = R.data[i].real(), im = R.data[i].imag();
            sum_intensity[i] += re * re + im * im;
        }
        run.set.per_frame_mse.push_back(mse(target, R, mcfg));
        frame_trace.append(n, run.set.per_frame_mse.back());

        // Perceived image after n frames: amplitude of the averaged intensity.
        ComplexField<double> cum(nx, ny, Domain::Replay);
        for (size_t i = 0; i < npix; ++i)
            cum.data[i] = {std::sqrt(sum_intensity[i] / n), 0.0};
        rep.trace.append(n, mse(target, cum, mcfg));
        rep.profile.metric += seconds_since(t0);
    }

    run.set.mean_intensity = RealImage(nx, ny);
    for (size_t i = 0; i < npix; ++i)
        run.set.mean_intensity.data[i] = sum_intensity[i] / N;

    rep.hologram = run.set.frames.back();
    rep.replay = ComplexField<T>(nx, ny, Domain::Replay);
    for (size_t i = 0; i < npix; ++i)
        rep.replay.data[i] = {static_cast<T>(std::sqrt(sum_intensity[i] / N)), T(0)};
    rep.final_error = rep.trace.points.back().second;
    rep.evaluations = N;
    rep.extra_traces.push_back(std::move(frame_trace));
    rep.seconds = seconds_since(run_start);
    double counted = rep.profile.transform + rep.profile.constraint + rep.profile.metric;
    rep.profile.other = std::max(0.0, rep.seconds - counted);
    return run;
}

} // namespace detail

template <typename T>
OsprRun<T> run_ospr(const OsprConfig& cfg, FftBackend<T>* backend = nullptr) {
    if (cfg.variant != OsprVariant::Ospr)
        throw std::invalid_argument("run_ospr: config variant mismatch");
    return detail::run_ospr_impl<T>(cfg, backend);
}

template <typename T>
OsprRun<T> run_adaptive_ospr(const OsprConfig& cfg, FftBackend<T>* backend = nullptr) {
    if (cfg.variant != OsprVariant::AdaptiveOspr)
        throw std::invalid_argument("run_adaptive_ospr: config variant mismatch");
    return detail::run_ospr_impl<T>(cfg, backend);
}

template <typename T>
OsprRun<T> run_ospr_variant(const OsprConfig& cfg, FftBackend<T>* backend = nullptr) {
    return detail::run_ospr_impl<T>(cfg, backend);
}

} // namespace hologen
