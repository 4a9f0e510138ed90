#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hologen/field.hpp"

namespace hologen {

enum class MetricKind { MSE, SSIM };

// How to compare a replay field against the target. phase_sensitive compares
// complex values (target phase defaults to zero); otherwise only magnitudes.
// scale_free lets a non-negative global gain act on the replay before the
// comparison (MSE only; SSIM already normalizes means and variances away).
struct MetricConfig {
    MetricKind kind = MetricKind::MSE;
    bool phase_sensitive = false;
    std::optional<RegionMask> mask;
    bool scale_free = false;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate(int width, int height) const {
        if (!(k1 > 0) || !(k2 > 0) || !(dynamic_range > 0))
            throw std::invalid_argument("MetricConfig: k1, k2 and dynamic_range must be positive");
        if (mask) {
            if (mask->width != width || mask->height != height)
                throw std::invalid_argument("MetricConfig: mask dimensions mismatch");
            if (mask->covered() == 0)
                throw std::invalid_argument("MetricConfig: mask covers no pixels");
        }
    }
};

namespace detail {

template <typename T>
void check_metric_inputs(const RealImage& target, const ComplexField<T>& replay,
                         const MetricConfig& cfg, const RealImage* target_phase) {
    if (target.width != replay.nx || target.height != replay.ny)
        throw std::invalid_argument("metric: target and replay dimensions mismatch");
    if (target_phase &&
        (target_phase->width != target.width || target_phase->height != target.height))
        throw std::invalid_argument("metric: target phase dimensions mismatch");
    cfg.validate(target.width, target.height);
    require_finite(target, "metric");
    require_finite(replay, "metric");
    if (target_phase) require_finite(*target_phase, "metric");
}

inline bool masked_out(const MetricConfig& cfg, size_t i) {
    return cfg.mask && cfg.mask->data[i] == 0;
}

} // namespace detail

// Mean squared error between target amplitude T and replay R over the masked
// region (whole field when unmasked), M = covered pixel count:
//   phase-insensitive:  (1/M) * sum (T - |R|)^2
//   phase-sensitive:    (1/M) * sum |T*exp(i*phiT) - R|^2
// scale_free first fits gain g >= 0 minimizing the sum (closed form
// g = sum(T|R|)/sum(|R|^2), projection onto the replay in the sensitive
// case) and evaluates the sum at that gain. target_phase is in radians;
// phiT = 0 when absent.
template <typename T>
double mse(const RealImage& target, const ComplexField<T>& replay,
           const MetricConfig& cfg = {}, const RealImage* target_phase = nullptr) {
    detail::check_metric_inputs(target, replay, cfg, target_phase);
    const size_t n = target.data.size();
    size_t m = 0;
    double acc = 0.0;
    if (!cfg.phase_sensitive) {
        double g = 1.0;
        if (cfg.scale_free) {
            double s_tr = 0.0, s_rr = 0.0;
            for (size_t i = 0; i < n; ++i) {
                if (detail::masked_out(cfg, i)) continue;
                double re = replay.data[i].real(), im = replay.data[i].imag();
                double r = std::sqrt(re * re + im * im);
                s_tr += target.data[i] * r;
                s_rr += r * r;
            }
            g = s_rr > 0.0 ? s_tr / s_rr : 0.0;
            if (g < 0.0) g = 0.0;
        }
        for (size_t i = 0; i < n; ++i) {
            if (detail::masked_out(cfg, i)) continue;
            double re = replay.data[i].real(), im = replay.data[i].imag();
            double d = target.data[i] - g * std::sqrt(re * re + im * im);
            acc += d * d;
            ++m;
        }
    } else {
        double g = 1.0;
        if (cfg.scale_free) {
            double s_proj = 0.0, s_rr = 0.0;
            for (size_t i = 0; i < n; ++i) {
                if (detail::masked_out(cfg, i)) continue;
                double phi = target_phase ? target_phase->data[i] : 0.0;
                double tr = target.data[i] * std::cos(phi);
                double ti = target.data[i] * std::sin(phi);
                double re = replay.data[i].real(), im = replay.data[i].imag();
                s_proj += re * tr + im * ti;
                s_rr += re * re + im * im;
            }
            g = s_rr > 0.0 ? s_proj / s_rr : 0.0;
            if (g < 0.0) g = 0.0;
        }
        for (size_t i = 0; i < n; ++i) {
            if (detail::masked_out(cfg, i)) continue;
            double phi = target_phase ? target_phase->data[i] : 0.0;
            double dr = target.data[i] * std::cos(phi) - g * replay.data[i].real();
            double di = target.data[i] * std::sin(phi) - g * replay.data[i].imag();
            acc += dr * dr + di * di;
            ++m;
        }
    }
    return acc / static_cast<double>(m);
}

// Global structural similarity over the masked region. The replay enters as
// the comparison image |R| (phase-insensitive) or Re(R*exp(-i*phiT))
// (phase-sensitive). Population statistics (divisor M), no sliding window:
//   ssim = (2*muT*muC + c1)(2*cov + c2) / ((muT^2 + muC^2 + c1)(varT + varC + c2))
// with c1 = (k1*L)^2, c2 = (k2*L)^2. Result is in [-1, 1].
template <typename T>
double ssim(const RealImage& target, const ComplexField<T>& replay,
            const MetricConfig& cfg = {}, const RealImage* target_phase = nullptr) {
    detail::check_metric_inputs(target, replay, cfg, target_phase);
    const size_t n = target.data.size();
    std::vector<double> comp;
    comp.reserve(n);
    std::vector<double> tgt;
    tgt.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (detail::masked_out(cfg, i)) continue;
        double re = replay.data[i].real(), im = replay.data[i].imag();
        if (!cfg.phase_sensitive) {
            comp.push_back(std::sqrt(re * re + im * im));
        } else {
            double phi = target_phase ? target_phase->data[i] : 0.0;
            comp.push_back(re * std::cos(phi) + im * std::sin(phi));
        }
        tgt.push_back(target.data[i]);
    }
    const double m = static_cast<double>(tgt.size());
    double su = 0.0, sv = 0.0;
    for (size_t i = 0; i < tgt.size(); ++i) {
        su += tgt[i];
        sv += comp[i];
    }
    double mu_t = su / m, mu_c = sv / m;
    double var_t = 0.0, var_c = 0.0, cov = 0.0;
    for (size_t i = 0; i < tgt.size(); ++i) {
        double dt = tgt[i] - mu_t, dc = comp[i] - mu_c;
        var_t += dt * dt;
        var_c += dc * dc;
        cov += dt * dc;
    }
    var_t /= m;
    var_c /= m;
    cov /= m;
    double c1 = cfg.k1 * cfg.dynamic_range * (cfg.k1 * cfg.dynamic_range);
    double c2 = cfg.k2 * cfg.dynamic_range * (cfg.k2 * cfg.dynamic_range);
    return ((2.0 * mu_t * mu_c + c1) * (2.0 * cov + c2)) /
           ((mu_t * mu_t + mu_c * mu_c + c1) * (var_t + var_c + c2));
}

// Single entry point for algorithms that minimize a configured metric. MSE is
// returned as-is; SSIM is folded to the dissimilarity 1 - ssim so that lower
// is always better.
template <typename T>
double evaluate_metric(const RealImage& target, const ComplexField<T>& replay,
                       const MetricConfig& cfg, const RealImage* target_phase = nullptr) {
    if (cfg.kind == MetricKind::MSE) return mse(target, replay, cfg, target_phase);
    return 1.0 - ssim(target, replay, cfg, target_phase);
}

} // namespace hologen
