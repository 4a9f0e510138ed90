#pragma once

#include <algorithm>
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

enum class SearchVariant { DirectSearch, SimulatedAnnealing };
enum class PixelOrder { UniformRandom, RasterSweep };
enum class SearchInit { QuantisedIfft, RandomStates };

struct SearchConfig {
    SearchVariant variant = SearchVariant::DirectSearch;
    int64_t max_evaluations = 1;
    SlmSpec slm;
    TargetSpec target;
    MetricConfig metric;
    uint64_t seed = 0;
    PixelOrder pixel_order = PixelOrder::UniformRandom;
    // Annealing schedule T_k = sa_t0 * sa_decay^k over the zero-based
    // evaluation index. Required for SimulatedAnnealing, must stay unset (0)
    // for DirectSearch.
    double sa_t0 = 0.0;
    double sa_decay = 0.0;
    SearchInit init = SearchInit::QuantisedIfft;
    // Full-transform resynchronization cadence (accepted updates); bounds
    // floating-point drift of the incremental replay cache.
    int64_t resync_every = 1000;
    bool record_decisions = false;

    void validate() const {
        if (max_evaluations < 1)
            throw std::invalid_argument("SearchConfig: max_evaluations must be >= 1");
        if (variant == SearchVariant::SimulatedAnnealing) {
            if (!(sa_t0 > 0))
                throw std::invalid_argument("SearchConfig: sa_t0 must be > 0");
            if (!(sa_decay > 0) || !(sa_decay < 1))
                throw std::invalid_argument("SearchConfig: sa_decay must be in (0,1)");
        } else {
            if (sa_t0 != 0.0 || sa_decay != 0.0)
                throw std::invalid_argument(
                    "SearchConfig: sa_t0/sa_decay are only valid for simulated annealing");
        }
        if (resync_every < 1)
            throw std::invalid_argument("SearchConfig: resync_every must be >= 1");
        slm.validate();
        target.validate();
    }
};

// Hologram plus a cached replay transform that is updated in O(N^2) per
// single-pixel change instead of O(N^2 log N) for a full transform: by
// linearity, changing aperture pixel (x,y) by d shifts every replay sample by
//   d * Q[x,y] * exp(-2*pi*i*(u*x/Nx + v*y/Ny)) / sqrt(Nx*Ny)
// (Q = 1 for far-field propagation). The cache and all error bookkeeping are
// kept in double regardless of the field precision so drift stays near
// round-off; a full transform resynchronizes the cache every resync_every
// accepted updates anyway.
template <typename T>
class IncrementalReplayState {
public:
    IncrementalReplayState(ComplexField<T> hologram, std::vector<int32_t> levels,
                           const Quantiser<T>& quant, const TargetSpec& target,
                           MetricConfig metric, const FresnelParams* fresnel = nullptr,
                           int64_t resync_every = 1000)
        : holo_(std::move(hologram)),
          levels_(std::move(levels)),
          quant_(&quant),
          nx_(holo_.nx),
          ny_(holo_.ny),
          resync_every_(resync_every) {
        if (holo_.domain != Domain::Aperture)
            throw std::invalid_argument("IncrementalReplayState: hologram must be aperture-domain");
        if (levels_.size() != holo_.data.size())
            throw std::invalid_argument("IncrementalReplayState: level array size mismatch");
        if (target.width() != nx_ || target.height() != ny_)
            throw std::invalid_argument("IncrementalReplayState: target dimensions mismatch");
        target_ = target.amplitude;
        mcfg_ = std::move(metric);
        if (!mcfg_.mask && target.roi) mcfg_.mask = *target.roi;
        mcfg_.validate(nx_, ny_);
        constexpr double two_pi = 6.283185307179586476925286766559;
        if (target.phase) {
            phase_rad_ = RealImage(nx_, ny_);
            for (size_t i = 0; i < target.phase->data.size(); ++i)
                phase_rad_->data[i] = two_pi * target.phase->data[i];
        }
        dprop_ = fresnel ? Propagator<double>::fresnel(nx_, ny_, *fresnel)
                         : Propagator<double>::fourier();
        wx_.resize(nx_);
        wy_.resize(ny_);
        for (int j = 0; j < nx_; ++j) {
            double a = -two_pi * j / nx_;
            wx_[j] = {std::cos(a), std::sin(a)};
        }
        for (int j = 0; j < ny_; ++j) {
            double a = -two_pi * j / ny_;
            wy_[j] = {std::cos(a), std::sin(a)};
        }
        norm_ = 1.0 / std::sqrt(static_cast<double>(nx_) * ny_);
        // Masked-cell tables: linear index, replay coordinates, target values.
        const uint8_t* m = mcfg_.mask ? mcfg_.mask->data.data() : nullptr;
        for (int v = 0; v < ny_; ++v)
            for (int u = 0; u < nx_; ++u) {
                size_t i = static_cast<size_t>(v) * nx_ + u;
                if (m && !m[i]) continue;
                midx_.push_back(i);
                mu_.push_back(u);
                mv_.push_back(v);
                mt_.push_back(target_.data[i]);
                mphi_.push_back(phase_rad_ ? phase_rad_->data[i] : 0.0);
            }
        sum_t_ = 0.0;
        sum_tt_ = 0.0;
        for (double t : mt_) {
            sum_t_ += t;
            sum_tt_ += t * t;
        }
        scratch_.resize(midx_.size());
        resync();
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const ComplexField<T>& hologram() const { return holo_; }
    double cached_error() const { return cached_error_; }
    int64_t accepted() const { return accepted_; }
    int level_at(int x, int y) const { return levels_[index(x, y)]; }
    const std::vector<int32_t>& levels() const { return levels_; }

    // Cached replay cast to the field precision.
    ComplexField<T> replay() const {
        ComplexField<T> out(nx_, ny_, Domain::Replay);
        for (size_t i = 0; i < replay_.size(); ++i)
            out.data[i] = std::complex<T>(static_cast<T>(replay_[i].real()),
                                          static_cast<T>(replay_[i].imag()));
        return out;
    }

    ComplexField<double> replay_f64() const {
        ComplexField<double> out(nx_, ny_, Domain::Replay);
        out.data = replay_;
        return out;
    }

    // Metric value the hologram would have after writing new_value at (x,y),
    // evaluated by streaming the masked cells against the shifted cache. The
    // hologram and cache are not modified.
    double trial_error(int x, int y, std::complex<T> new_value) const {
        check_index(x, y);
        size_t i = index(x, y);
        std::complex<double> delta(static_cast<double>(new_value.real()) - holo_.data[i].real(),
                                   static_cast<double>(new_value.imag()) - holo_.data[i].imag());
        delta *= dprop_.aperture_factor(x, y);
        delta *= norm_;
        return evaluate_with_delta(x, y, delta);
    }

    // Apply a previously evaluated trial: shift the whole cache by the pixel's
    // delta, store the new state, adopt its error, and resync on cadence.
    void commit(int x, int y, std::complex<T> new_value, int new_level, double new_error) {
        check_index(x, y);
        size_t i = index(x, y);
        if (new_level < 0 || new_level >= quant_->level_count())
            throw std::invalid_argument("IncrementalReplayState: level out of range");
        std::complex<double> delta(static_cast<double>(new_value.real()) - holo_.data[i].real(),
                                   static_cast<double>(new_value.imag()) - holo_.data[i].imag());
        delta *= dprop_.aperture_factor(x, y);
        delta *= norm_;
        for (int v = 0; v < ny_; ++v) {
            std::complex<double> row = delta * wy_[static_cast<size_t>(v) * y % ny_];
            std::complex<double>* out = replay_.data() + static_cast<size_t>(v) * nx_;
            for (int u = 0; u < nx_; ++u)
                out[u] += row * wx_[static_cast<size_t>(u) * x % nx_];
        }
        holo_.data[i] = new_value;
        levels_[i] = new_level;
        cached_error_ = new_error;
        ++accepted_;
        if (accepted_ % resync_every_ == 0) resync();
    }

    // Validate-and-apply in one step: new_value must match one of the allowed
    // states at (x,y).
    void update(int x, int y, std::complex<T> new_value) {
        check_index(x, y);
        size_t i = index(x, y);
        int found = -1;
        for (int k = 0; k < quant_->level_count(); ++k) {
            std::complex<T> s = quant_->state_value(i, k);
            double dr = static_cast<double>(new_value.real()) - s.real();
            double di = static_cast<double>(new_value.imag()) - s.imag();
            double mag = std::abs(std::complex<double>(s.real(), s.imag()));
            if (std::sqrt(dr * dr + di * di) <= 1e-9 * std::max(1.0, mag)) {
                found = k;
                break;
            }
        }
        if (found < 0)
            throw std::invalid_argument("incremental_update: value is not an allowed state");
        double err = trial_error(x, y, new_value);
        commit(x, y, new_value, found, err);
    }

    // Rebuild the cache with a full transform of the current hologram (in
    // double) and recompute the error from scratch.
    void resync() {
        ComplexField<double> h(nx_, ny_, Domain::Aperture);
        for (size_t i = 0; i < holo_.data.size(); ++i)
            h.data[i] = std::complex<double>(holo_.data[i].real(), holo_.data[i].imag());
        replay_ = dprop_.forward(h).data;
        cached_error_ = evaluate_metric(target_, replay_f64(), mcfg_,
                                        phase_rad_ ? &*phase_rad_ : nullptr);
    }

private:
    size_t index(int x, int y) const { return static_cast<size_t>(y) * nx_ + x; }

    void check_index(int x, int y) const {
        if (x < 0 || x >= nx_ || y < 0 || y >= ny_)
            throw std::invalid_argument("IncrementalReplayState: pixel index out of range");
    }

    // Streams sum statistics over masked cells of (cache + delta-shift),
    // computing the same quantity the public metric functions produce.
    double evaluate_with_delta(int x, int y, std::complex<double> delta) const {
        const size_t m = midx_.size();
        const double md = static_cast<double>(m);
        const bool mse_kind = mcfg_.kind == MetricKind::MSE;
        if (mse_kind && !mcfg_.phase_sensitive && !mcfg_.scale_free) {
            double acc = 0.0;
            for (size_t j = 0; j < m; ++j) {
                std::complex<double> r = cell(j, x, y, delta);
                double d = mt_[j] - std::abs(r);
                acc += d * d;
            }
            return acc / md;
        }
        if (mse_kind && !mcfg_.phase_sensitive) {
            double s_tr = 0.0, s_rr = 0.0;
            for (size_t j = 0; j < m; ++j) {
                double a = std::abs(cell(j, x, y, delta));
                scratch_[j] = a;
                s_tr += mt_[j] * a;
                s_rr += a * a;
            }
            double g = s_rr > 0.0 ? s_tr / s_rr : 0.0;
            if (g < 0.0) g = 0.0;
            double acc = 0.0;
            for (size_t j = 0; j < m; ++j) {
                double d = mt_[j] - g * scratch_[j];
                acc += d * d;
            }
            return acc / md;
        }
        if (mse_kind) {
            double g = 1.0;
            if (mcfg_.scale_free) {
                double s_proj = 0.0, s_rr = 0.0;
                for (size_t j = 0; j < m; ++j) {
                    std::complex<double> r = cell(j, x, y, delta);
                    double tr = mt_[j] * std::cos(mphi_[j]);
                    double ti = mt_[j] * std::sin(mphi_[j]);
                    s_proj += r.real() * tr + r.imag() * ti;
                    s_rr += std::norm(r);
                }
                g = s_rr > 0.0 ? s_proj / s_rr : 0.0;
                if (g < 0.0) g = 0.0;
            }
            double acc = 0.0;
            for (size_t j = 0; j < m; ++j) {
                std::complex<double> r = cell(j, x, y, delta);
                double dr = mt_[j] * std::cos(mphi_[j]) - g * r.real();
                double di = mt_[j] * std::sin(mphi_[j]) - g * r.imag();
                acc += dr * dr + di * di;
            }
            return acc / md;
        }
        // SSIM objective 1 - ssim: stream the comparison image's moments.
        double sc = 0.0, scc = 0.0, stc = 0.0;
        for (size_t j = 0; j < m; ++j) {
            std::complex<double> r = cell(j, x, y, delta);
            double c = mcfg_.phase_sensitive
                           ? r.real() * std::cos(mphi_[j]) + r.imag() * std::sin(mphi_[j])
                           : std::abs(r);
            sc += c;
            scc += c * c;
            stc += mt_[j] * c;
        }
        double mu_t = sum_t_ / md, mu_c = sc / md;
        double var_t = sum_tt_ / md - mu_t * mu_t;
        double var_c = scc / md - mu_c * mu_c;
        double cov = stc / md - mu_t * mu_c;
        double c1 = mcfg_.k1 * mcfg_.dynamic_range * (mcfg_.k1 * mcfg_.dynamic_range);
        double c2 = mcfg_.k2 * mcfg_.dynamic_range * (mcfg_.k2 * mcfg_.dynamic_range);
        double s = ((2.0 * mu_t * mu_c + c1) * (2.0 * cov + c2)) /
                   ((mu_t * mu_t + mu_c * mu_c + c1) * (var_t + var_c + c2));
        return 1.0 - s;
    }

    std::complex<double> cell(size_t j, int x, int y, std::complex<double> delta) const {
        size_t tw = static_cast<size_t>(mu_[j]) * x % nx_;
        size_t th = static_cast<size_t>(mv_[j]) * y % ny_;
        return replay_[midx_[j]] + delta * (wx_[tw] * wy_[th]);
    }

    ComplexField<T> holo_;
    std::vector<int32_t> levels_;
    const Quantiser<T>* quant_;
    int nx_, ny_;
    int64_t resync_every_;
    int64_t accepted_ = 0;
    double cached_error_ = 0.0;
    double norm_ = 1.0;
    Propagator<double> dprop_;
    RealImage target_;
    std::optional<RealImage> phase_rad_;
    MetricConfig mcfg_;
    std::vector<std::complex<double>> replay_;
    std::vector<std::complex<double>> wx_, wy_;
    std::vector<size_t> midx_;
    std::vector<int> mu_, mv_;
    std::vector<double> mt_, mphi_;
    double sum_t_ = 0.0, sum_tt_ = 0.0;
    mutable std::vector<double> scratch_;
};

template <typename T>
void incremental_update(IncrementalReplayState<T>& state, int x, int y,
                        std::complex<T> new_value) {
    state.update(x, y, new_value);
}

namespace detail {

template <typename T>
RunReport<T> run_search(const SearchConfig& cfg, const FresnelParams* fresnel) {
    cfg.validate();
    const TargetSpec& tgt = cfg.target;
    const int nx = tgt.width(), ny = tgt.height();
    const bool sa = cfg.variant == SearchVariant::SimulatedAnnealing;

    RunReport<T> rep;
    rep.algorithm = sa ? "sa" : "ds";
    rep.seed = cfg.seed;
    rep.trace.name = cfg.metric.kind == MetricKind::MSE ? "mse" : "dissimilarity";

    auto run_start = std::chrono::steady_clock::now();

    Propagator<T> prop = fresnel ? Propagator<T>::fresnel(nx, ny, *fresnel)
                                 : Propagator<T>::fourier();
    Quantiser<T> quant(cfg.slm, nx, ny);
    const int levels = quant.level_count();

    Rng master(cfg.seed);
    Rng init_rng = master.fork(0);
    Rng prop_rng = master.fork(1);
    Rng accept_rng = master.fork(2);

    ComplexField<T> f(nx, ny, Domain::Aperture);
    std::vector<int32_t> lv;
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.init == SearchInit::QuantisedIfft) {
        ComplexField<T> R0 = seed_random_phase<T>(tgt.amplitude, init_rng);
        f = prop.inverse(R0);
        quant.apply(f, &lv);
    } else {
        lv.resize(f.data.size());
        for (size_t i = 0; i < f.data.size(); ++i) {
            int k = static_cast<int>(init_rng.below(static_cast<uint32_t>(levels)));
            lv[i] = k;
            f.data[i] = quant.state_value(i, k);
        }
    }
    IncrementalReplayState<T> state(std::move(f), std::move(lv), quant, tgt, cfg.metric,
                                    fresnel, cfg.resync_every);
    rep.profile.transform += seconds_since(t0);

    rep.trace.append(0, state.cached_error());

    double best_err = state.cached_error();
    ComplexField<T> best_holo = state.hologram();
    MetricTrace best_trace;
    best_trace.name = "best";
    best_trace.append(0, best_err);

    if (cfg.record_decisions) rep.decisions.reserve(static_cast<size_t>(cfg.max_evaluations));

    for (int64_t k = 1; k <= cfg.max_evaluations; ++k) {
        int x, y;
        if (cfg.pixel_order == PixelOrder::UniformRandom) {
            x = static_cast<int>(prop_rng.below(static_cast<uint32_t>(nx)));
            y = static_cast<int>(prop_rng.below(static_cast<uint32_t>(ny)));
        } else {
            int64_t idx = (k - 1) % (static_cast<int64_t>(nx) * ny);
            x = static_cast<int>(idx % nx);
            y = static_cast<int>(idx / nx);
        }
        size_t i = static_cast<size_t>(y) * nx + x;
        int cur = state.level_at(x, y);
        int j = static_cast<int>(prop_rng.below(static_cast<uint32_t>(levels - 1)));
        if (j >= cur) ++j;
        std::complex<T> v = quant.state_value(i, j);

        t0 = std::chrono::steady_clock::now();
        double cand = state.trial_error(x, y, v);
        rep.profile.transform += seconds_since(t0);

        double de = cand - state.cached_error();
        bool accept;
        if (!sa) {
            accept = de < 0;
        } else if (de < 0) {
            accept = true;
        } else {
            double temp = cfg.sa_t0 * std::pow(cfg.sa_decay, static_cast<double>(k - 1));
            accept = accept_rng.uniform01() < std::exp(-de / temp);
        }
        if (cfg.record_decisions) rep.decisions.push_back(accept ? 1 : 0);
        if (accept) {
            t0 = std::chrono::steady_clock::now();
            state.commit(x, y, v, j, cand);
            rep.profile.transform += seconds_since(t0);
            if (state.cached_error() < best_err) {
                best_err = state.cached_error();
                best_holo = state.hologram();
                best_trace.append(k, best_err);
            }
        }
        if (accept || k % 100 == 0) rep.trace.append(k, state.cached_error());
    }

    rep.evaluations = cfg.max_evaluations;
    rep.accepted = state.accepted();

    const ComplexField<T>& final_holo = sa ? best_holo : state.hologram();
    t0 = std::chrono::steady_clock::now();
    rep.hologram = final_holo;
    rep.replay = prop.forward(final_holo);
    rep.profile.transform += seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    MetricConfig mcfg = cfg.metric;
    if (!mcfg.mask && tgt.roi) mcfg.mask = *tgt.roi;
    std::optional<RealImage> phase_rad;
    if (tgt.phase) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        phase_rad = RealImage(nx, ny);
        for (size_t p = 0; p < tgt.phase->data.size(); ++p)
            phase_rad->data[p] = two_pi * tgt.phase->data[p];
    }
    rep.final_error =
        evaluate_metric(tgt.amplitude, rep.replay, mcfg, phase_rad ? &*phase_rad : nullptr);
    rep.profile.metric += seconds_since(t0);

    if (sa) rep.extra_traces.push_back(std::move(best_trace));
    rep.seconds = seconds_since(run_start);
    double counted = rep.profile.transform + rep.profile.constraint + rep.profile.metric;
    rep.profile.other = std::max(0.0, rep.seconds - counted);
    return rep;
}

} // namespace detail

template <typename T>
RunReport<T> run_direct_search(const SearchConfig& cfg, const FresnelParams* fresnel = nullptr) {
    if (cfg.variant != SearchVariant::DirectSearch)
        throw std::invalid_argument("run_direct_search: config variant mismatch");
    return detail::run_search<T>(cfg, fresnel);
}

template <typename T>
RunReport<T> run_simulated_annealing(const SearchConfig& cfg,
                                     const FresnelParams* fresnel = nullptr) {
    if (cfg.variant != SearchVariant::SimulatedAnnealing)
        throw std::invalid_argument("run_simulated_annealing: config variant mismatch");
    return detail::run_search<T>(cfg, fresnel);
}

template <typename T>
RunReport<T> run_search(const SearchConfig& cfg, const FresnelParams* fresnel = nullptr) {
    return detail::run_search<T>(cfg, fresnel);
}

} // namespace hologen
