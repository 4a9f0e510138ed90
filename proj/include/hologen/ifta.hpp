#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hologen/metrics.hpp"
#include "hologen/propagation.hpp"
#include "hologen/quantise.hpp"
#include "hologen/report.hpp"
#include "hologen/rng.hpp"
#include "hologen/target.hpp"

namespace hologen {

enum class IftaVariant { GS, WeightedGS, LiuTaghizadeh };

// Where the initial replay phase comes from. Auto uses the supplied target
// phase when the target is phase-sensitive (phase image present, phase
// freedom off) so that an exactly-representable target is a fixed point from
// iteration 1, and uniform random phase otherwise. Flat (zero phase) exists
// for debugging.
enum class InitPhase { Auto, Random, Flat };

enum class LtGrowth { Linear };

struct IftaConfig {
    IftaVariant variant = IftaVariant::GS;
    int iterations = 1;
    SlmSpec slm;
    TargetSpec target;
    uint64_t seed = 0;
    double weight_clamp_lo = 0.1;
    double weight_clamp_hi = 10.0;
    double lt_initial_fraction = 0.1;
    LtGrowth lt_growth = LtGrowth::Linear;
    InitPhase init_phase = InitPhase::Auto;

    void validate() const {
        if (iterations < 1)
            throw std::invalid_argument("IftaConfig: iterations must be >= 1");
        if (!(weight_clamp_lo > 0) || !(weight_clamp_hi >= weight_clamp_lo))
            throw std::invalid_argument("IftaConfig: weight clamp bounds invalid");
        if (!(lt_initial_fraction > 0) || !(lt_initial_fraction <= 1))
            throw std::invalid_argument("IftaConfig: lt_initial_fraction must be in (0,1]");
        slm.validate();
        target.validate();
    }
};

// Active-area schedule for the expanding-region variant: linear growth from
// the initial fraction to exactly 1 at the final iteration.
inline std::vector<double> lt_area_fractions(int iterations, double initial_fraction) {
    if (iterations < 1) throw std::invalid_argument("lt_area_fractions: iterations must be >= 1");
    std::vector<double> a(iterations);
    for (int k = 1; k < iterations; ++k)
        a[k - 1] = initial_fraction +
                   (1.0 - initial_fraction) * (k - 1) / (iterations - 1);
    a[iterations - 1] = 1.0;
    return a;
}

namespace detail {

struct LtRect {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0; // half-open
    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

// Centered sub-rectangle of the roi bounding box with the requested area
// fraction (sides scaled by sqrt(fraction), at least one pixel each).
inline LtRect lt_active_rect(int bx0, int by0, int bw, int bh, double fraction) {
    double side = std::sqrt(fraction);
    int aw = std::max(1, static_cast<int>(std::lround(bw * side)));
    int ah = std::max(1, static_cast<int>(std::lround(bh * side)));
    LtRect r;
    r.x0 = bx0 + (bw - aw) / 2;
    r.y0 = by0 + (bh - ah) / 2;
    r.x1 = r.x0 + aw;
    r.y1 = r.y0 + ah;
    return r;
}

template <typename T>
RunReport<T> run_ifta(const IftaConfig& cfg, const Propagator<T>* prop_in) {
    cfg.validate();
    const TargetSpec& tgt = cfg.target;
    const int nx = tgt.width(), ny = tgt.height();
    const size_t n = tgt.amplitude.data.size();
    constexpr double two_pi = 6.283185307179586476925286766559;

    Propagator<T> default_prop = Propagator<T>::fourier();
    const Propagator<T>& prop = prop_in ? *prop_in : default_prop;
    Quantiser<T> quant(cfg.slm, nx, ny);

    const uint8_t* roi = tgt.roi ? tgt.roi->data.data() : nullptr;

    MetricConfig mcfg;
    mcfg.kind = MetricKind::MSE;
    mcfg.phase_sensitive = false;
    mcfg.scale_free = tgt.freedoms.scale;
    if (tgt.roi) mcfg.mask = *tgt.roi;

    // Target phase in radians, used for enforcement when phase freedom is off.
    std::vector<double> tphase;
    if (tgt.phase) {
        tphase.resize(n);
        for (size_t i = 0; i < n; ++i) tphase[i] = two_pi * tgt.phase->data[i];
    }

    RunReport<T> rep;
    rep.seed = cfg.seed;
    rep.trace.name = "mse";
    switch (cfg.variant) {
        case IftaVariant::GS: rep.algorithm = "gs"; break;
        case IftaVariant::WeightedGS: rep.algorithm = "wgs"; break;
        case IftaVariant::LiuTaghizadeh: rep.algorithm = "lt"; break;
    }

    auto run_start = std::chrono::steady_clock::now();

    Rng rng = Rng(cfg.seed).fork(0);
    bool target_phase_init =
        cfg.init_phase == InitPhase::Auto && tgt.phase && !tgt.freedoms.phase;
    ComplexField<T> R(nx, ny, Domain::Replay);
    if (cfg.init_phase == InitPhase::Flat) {
        for (size_t i = 0; i < n; ++i)
            R.data[i] = std::complex<T>(static_cast<T>(tgt.amplitude.data[i]), 0);
    } else if (target_phase_init) {
        for (size_t i = 0; i < n; ++i) {
            double a = tgt.amplitude.data[i];
            R.data[i] = std::complex<T>(static_cast<T>(a * std::cos(tphase[i])),
                                        static_cast<T>(a * std::sin(tphase[i])));
        }
    } else {
        R = seed_random_phase<T>(tgt.amplitude, rng);
    }

    std::vector<double> w;
    if (cfg.variant == IftaVariant::WeightedGS) w.assign(n, 1.0);

    std::vector<double> fractions;
    int bx0 = 0, by0 = 0, bw = nx, bh = ny;
    if (cfg.variant == IftaVariant::LiuTaghizadeh) {
        fractions = lt_area_fractions(cfg.iterations, cfg.lt_initial_fraction);
        if (roi) {
            bx0 = nx;
            by0 = ny;
            int bx1 = -1, by1 = -1;
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x)
                    if (roi[static_cast<size_t>(y) * nx + x]) {
                        bx0 = std::min(bx0, x);
                        bx1 = std::max(bx1, x);
                        by0 = std::min(by0, y);
                        by1 = std::max(by1, y);
                    }
            bw = bx1 - bx0 + 1;
            bh = by1 - by0 + 1;
        }
    }

    ComplexField<T> f(nx, ny, Domain::Aperture);
    for (int k = 1; k <= cfg.iterations; ++k) {
        auto t0 = std::chrono::steady_clock::now();
        f = prop.inverse(R);
        rep.profile.transform += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        quant.apply(f);
        rep.profile.constraint += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        R = prop.forward(f);
        rep.profile.transform += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        rep.trace.append(k, mse(tgt.amplitude, R, mcfg));
        rep.profile.metric += seconds_since(t0);

        if (k == cfg.iterations) break;

        // Replay-plane constraint enforcement.
        t0 = std::chrono::steady_clock::now();
        LtRect active;
        bool lt = cfg.variant == IftaVariant::LiuTaghizadeh;
        if (lt) active = lt_active_rect(bx0, by0, bw, bh, fractions[k - 1]);
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                size_t i = static_cast<size_t>(y) * nx + x;
                if (!roi || roi[i]) {
                    // The expanding-region variant leaves not-yet-active roi
                    // pixels fully free this iteration.
                    if (lt && !active.contains(x, y)) continue;
                    double amp = tgt.amplitude.data[i];
                    if (!w.empty() && amp > 0) {
                        double re = R.data[i].real(), im = R.data[i].imag();
                        double r = std::sqrt(re * re + im * im);
                        double cand = w[i] * amp / std::max(r, 1e-12);
                        w[i] = std::min(std::max(cand, cfg.weight_clamp_lo), cfg.weight_clamp_hi);
                        amp *= w[i];
                    }
                    if (tgt.freedoms.phase) {
                        double re = R.data[i].real(), im = R.data[i].imag();
                        double r = std::sqrt(re * re + im * im);
                        if (r > 0) {
                            double s = amp / r;
                            R.data[i] = std::complex<T>(static_cast<T>(re * s),
                                                        static_cast<T>(im * s));
                        } else {
                            R.data[i] = std::complex<T>(static_cast<T>(amp), 0);
                        }
                    } else {
                        double ph = tphase.empty() ? 0.0 : tphase[i];
                        R.data[i] = std::complex<T>(static_cast<T>(amp * std::cos(ph)),
                                                    static_cast<T>(amp * std::sin(ph)));
                    }
                } else if (!tgt.freedoms.amplitude_outside_roi) {
                    R.data[i] = std::complex<T>(0, 0);
                }
            }
        }
        rep.profile.constraint += seconds_since(t0);
    }

    rep.hologram = f;
    rep.replay = R;
    rep.final_error = rep.trace.points.back().second;
    rep.seconds = seconds_since(run_start);
    double counted = rep.profile.transform + rep.profile.constraint + rep.profile.metric;
    rep.profile.other = std::max(0.0, rep.seconds - counted);
    return rep;
}

} // namespace detail

template <typename T>
RunReport<T> run_gs(const IftaConfig& cfg, const Propagator<T>* prop = nullptr) {
    if (cfg.variant != IftaVariant::GS)
        throw std::invalid_argument("run_gs: config variant mismatch");
    return detail::run_ifta<T>(cfg, prop);
}

template <typename T>
RunReport<T> run_weighted_gs(const IftaConfig& cfg, const Propagator<T>* prop = nullptr) {
    if (cfg.variant != IftaVariant::WeightedGS)
        throw std::invalid_argument("run_weighted_gs: config variant mismatch");
    return detail::run_ifta<T>(cfg, prop);
}

template <typename T>
RunReport<T> run_liu_taghizadeh(const IftaConfig& cfg, const Propagator<T>* prop = nullptr) {
    if (cfg.variant != IftaVariant::LiuTaghizadeh)
        throw std::invalid_argument("run_liu_taghizadeh: config variant mismatch");
    return detail::run_ifta<T>(cfg, prop);
}

template <typename T>
RunReport<T> run_ifta(const IftaConfig& cfg, const Propagator<T>* prop = nullptr) {
    return detail::run_ifta<T>(cfg, prop);
}

} // namespace hologen
