#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hologen/field.hpp"

namespace hologen {

enum class SlmMode { Amplitude, Phase };

// Modulation scheme of the target device: how many states it has and where
// they sit. Phase-mode states are unit-magnitude phasors; amplitude-mode
// states are non-negative reals. An optional per-pixel illumination field
// scales/rotates the realized states.
struct SlmSpec {
    SlmMode mode = SlmMode::Phase;
    int levels = 2;
    // Phase mode. full_circle means the levels tile the whole circle with
    // spacing 2*pi/levels; otherwise they span [min_arg, max_arg] inclusive
    // with spacing (max_arg - min_arg)/(levels - 1).
    double min_arg = 0.0;
    double max_arg = 0.0;
    bool full_circle = false;
    // Amplitude mode.
    double min_amp = 0.0;
    double max_amp = 1.0;
    std::optional<ComplexField<double>> illumination;

    static SlmSpec phase(int levels, double min_arg, double max_arg) {
        SlmSpec s;
        s.mode = SlmMode::Phase;
        s.levels = levels;
        s.min_arg = min_arg;
        s.max_arg = max_arg;
        s.full_circle = false;
        s.validate();
        return s;
    }

    static SlmSpec full_circle_phase(int levels, double start_arg = 0.0) {
        SlmSpec s;
        s.mode = SlmMode::Phase;
        s.levels = levels;
        s.min_arg = start_arg;
        s.max_arg = start_arg + 6.283185307179586476925286766559;
        s.full_circle = true;
        s.validate();
        return s;
    }

    // Two states at {0, pi}.
    static SlmSpec binary_phase() { return phase(2, 0.0, 3.1415926535897932384626433832795); }

    static SlmSpec amplitude(int levels, double min_amp = 0.0, double max_amp = 1.0) {
        SlmSpec s;
        s.mode = SlmMode::Amplitude;
        s.levels = levels;
        s.min_amp = min_amp;
        s.max_amp = max_amp;
        s.validate();
        return s;
    }

    static SlmSpec binary_amplitude() { return amplitude(2, 0.0, 1.0); }

    void validate() const {
        constexpr double two_pi = 6.283185307179586476925286766559;
        if (levels < 2) throw std::invalid_argument("SlmSpec: levels must be >= 2");
        if (mode == SlmMode::Phase) {
            if (!std::isfinite(min_arg) || !std::isfinite(max_arg))
                throw std::invalid_argument("SlmSpec: phase range must be finite");
            if (!(min_arg < max_arg) || max_arg - min_arg > two_pi * (1 + 1e-12))
                throw std::invalid_argument(
                    "SlmSpec: phase range must satisfy min_arg < max_arg <= min_arg + 2*pi");
            if (full_circle && std::abs((max_arg - min_arg) - two_pi) > 1e-9)
                throw std::invalid_argument("SlmSpec: full_circle requires a 2*pi range");
        } else {
            if (!std::isfinite(min_amp) || !std::isfinite(max_amp))
                throw std::invalid_argument("SlmSpec: amplitude range must be finite");
            if (!(min_amp >= 0) || !(min_amp < max_amp))
                throw std::invalid_argument("SlmSpec: need 0 <= min_amp < max_amp");
        }
        if (illumination) {
            for (const auto& z : illumination->data) {
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw std::invalid_argument("SlmSpec: illumination must be finite");
                if (z.real() == 0.0 && z.imag() == 0.0)
                    throw std::invalid_argument("SlmSpec: illumination must be nowhere zero");
            }
        }
    }

    // Level spacing along the state parameter (radians or amplitude units).
    double spacing() const {
        constexpr double two_pi = 6.283185307179586476925286766559;
        if (mode == SlmMode::Phase)
            return full_circle ? two_pi / levels : (max_arg - min_arg) / (levels - 1);
        return (max_amp - min_amp) / (levels - 1);
    }
};

// The canonical state set under unit illumination. Phase mode: unit phasors
// exp(i(min_arg + k*spacing)); amplitude mode: real levels. Per-pixel realized
// states are illumination[x,y] * state (phase mode) or state rotated to the
// illumination phase (amplitude mode).
inline std::vector<std::complex<double>> allowed_states(const SlmSpec& spec) {
    spec.validate();
    std::vector<std::complex<double>> states(spec.levels);
    double spac = spec.spacing();
    for (int k = 0; k < spec.levels; ++k) {
        if (spec.mode == SlmMode::Phase) {
            double a = spec.min_arg + k * spac;
            states[k] = {std::cos(a), std::sin(a)};
        } else {
            states[k] = {spec.min_amp + k * spac, 0.0};
        }
    }
    return states;
}

// Precomputed quantisation context for one field size. Snapping decisions:
//   phase mode      diff = arg(f) - arg(illumination), wrapped to
//                   [0, 2*pi) relative to min_arg; in-range values round to
//                   the nearest level (half away from zero on the level
//                   index); out-of-range values clamp to whichever boundary
//                   is nearer around the circle (the midpoint of the excluded
//                   arc is the watershed; the exact midpoint goes to the max
//                   boundary).
//   amplitude mode  the level nearest to |f|; input phase is discarded and
//                   the output adopts the illumination phase.
template <typename T>
class Quantiser {
public:
    Quantiser(const SlmSpec& spec, int nx, int ny) : spec_(spec), nx_(nx), ny_(ny) {
        spec.validate();
        if (spec.illumination &&
            (spec.illumination->nx != nx || spec.illumination->ny != ny))
            throw std::invalid_argument("Quantiser: illumination dimensions mismatch");
        auto canonical = allowed_states(spec);
        levels_ = spec.levels;
        states_.resize(levels_);
        for (int k = 0; k < levels_; ++k)
            states_[k] = std::complex<T>(static_cast<T>(canonical[k].real()),
                                         static_cast<T>(canonical[k].imag()));
        spac_ = spec.spacing();
        inv_spac_ = 1.0 / spac_;
        range_ = spec.mode == SlmMode::Phase ? spec.max_arg - spec.min_arg : 0.0;
        if (spec.illumination) {
            const auto& il = spec.illumination->data;
            illum_arg_.resize(il.size());
            illum_unit_.resize(il.size());
            illum_.resize(il.size());
            for (size_t i = 0; i < il.size(); ++i) {
                double a = std::abs(il[i]);
                illum_arg_[i] = std::arg(il[i]);
                illum_unit_[i] = std::complex<T>(static_cast<T>(il[i].real() / a),
                                                 static_cast<T>(il[i].imag() / a));
                illum_[i] = std::complex<T>(static_cast<T>(il[i].real()),
                                            static_cast<T>(il[i].imag()));
            }
        }
    }

    int level_count() const { return levels_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const SlmSpec& spec() const { return spec_; }

    // Level index the pixel value snaps to.
    int decide(size_t i, std::complex<T> v) const {
        constexpr double two_pi = 6.283185307179586476925286766559;
        if (spec_.mode == SlmMode::Phase) {
            double ang = std::atan2(static_cast<double>(v.imag()), static_cast<double>(v.real()));
            if (!illum_arg_.empty()) ang -= illum_arg_[i];
            double d = ang - spec_.min_arg;
            d -= two_pi * std::floor(d / two_pi);
            if (spec_.full_circle) {
                int k = static_cast<int>(std::lround(d * inv_spac_));
                return k >= levels_ ? 0 : k;
            }
            if (d <= range_) {
                int k = static_cast<int>(std::lround(d * inv_spac_));
                return k > levels_ - 1 ? levels_ - 1 : k;
            }
            return (d - range_ <= two_pi - d) ? levels_ - 1 : 0;
        }
        double re = v.real(), im = v.imag();
        double a = std::sqrt(re * re + im * im);
        long k = std::lround((a - spec_.min_amp) * inv_spac_);
        if (k < 0) k = 0;
        if (k > levels_ - 1) k = levels_ - 1;
        return static_cast<int>(k);
    }

    // Realized output value for level k at pixel i.
    std::complex<T> state_value(size_t i, int k) const {
        if (spec_.mode == SlmMode::Phase)
            return illum_.empty() ? states_[k] : illum_[i] * states_[k];
        return illum_unit_.empty() ? states_[k] : illum_unit_[i] * states_[k];
    }

    // Snap every pixel in place; optionally record the chosen level indices.
    void apply(ComplexField<T>& f, std::vector<int32_t>* levels_out = nullptr) const {
        check_field(f);
        if (levels_out) levels_out->resize(f.data.size());
        for (size_t i = 0; i < f.data.size(); ++i) {
            int k = decide(i, f.data[i]);
            f.data[i] = state_value(i, k);
            if (levels_out) (*levels_out)[i] = k;
        }
    }

private:
    void check_field(const ComplexField<T>& f) const {
        if (f.nx != nx_ || f.ny != ny_)
            throw std::invalid_argument("Quantiser: field dimensions mismatch");
    }

    SlmSpec spec_;
    int nx_, ny_, levels_;
    double spac_, inv_spac_, range_;
    std::vector<std::complex<T>> states_;
    std::vector<double> illum_arg_;
    std::vector<std::complex<T>> illum_unit_;
    std::vector<std::complex<T>> illum_;
};

// One-shot projection onto the allowed state set.
template <typename T>
ComplexField<T> quantise_field(const ComplexField<T>& field, const SlmSpec& spec) {
    if (field.domain != Domain::Aperture)
        throw std::invalid_argument("quantise_field: input must be aperture-domain");
    require_finite(field, "quantise_field");
    Quantiser<T> q(spec, field.nx, field.ny);
    ComplexField<T> out = field;
    q.apply(out);
    return out;
}

// Diagnostic: mean squared distance between a field and its projection.
// Zero iff the field is already fully constrained.
template <typename T>
double quantisation_metric_distance(const ComplexField<T>& field, const SlmSpec& spec) {
    ComplexField<T> q = quantise_field(field, spec);
    double acc = 0.0;
    for (size_t i = 0; i < field.data.size(); ++i) {
        double dr = static_cast<double>(field.data[i].real()) - q.data[i].real();
        double di = static_cast<double>(field.data[i].imag()) - q.data[i].imag();
        acc += dr * dr + di * di;
    }
    return acc / static_cast<double>(field.data.size());
}

} // namespace hologen
