#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "hologen/field.hpp"

namespace hologen {

// Amplitude scaling applied when preparing a target: peak value 1.0, or total
// energy matched to a uniform unit-amplitude aperture (sum of squares = N).
enum class Normalization { MaxToOne, UnitEnergy };

inline void normalize_image(RealImage& img, Normalization norm) {
    double acc = 0.0;
    if (norm == Normalization::MaxToOne) {
        for (double v : img.data) acc = v > acc ? v : acc;
        if (acc == 0.0) return; // all-black stays all-black
    } else {
        for (double v : img.data) acc += v * v;
        if (acc <= 0.0)
            throw std::invalid_argument(
                "normalize_image: zero-energy image cannot be energy-normalized");
    }
    double s = norm == Normalization::MaxToOne
                   ? 1.0 / acc
                   : std::sqrt(static_cast<double>(img.data.size()) / acc);
    for (double& v : img.data) v *= s;
}

// The three slacks a generation algorithm may exploit: don't-care amplitude
// outside the region of interest, free replay phase, and free global scale.
struct Freedoms {
    bool amplitude_outside_roi = false;
    bool phase = true;
    bool scale = false;

    bool operator==(const Freedoms&) const = default;
};

// What the replay field should look like. amplitude is the desired |R|;
// phase, when present, holds the desired arg(R) as fractions of a turn in
// [0,1); roi limits both enforcement and metrics.
struct TargetSpec {
    RealImage amplitude;
    std::optional<RealImage> phase;
    std::optional<RegionMask> roi;
    Freedoms freedoms;

    int width() const { return amplitude.width; }
    int height() const { return amplitude.height; }

    void validate() const {
        if (amplitude.width <= 0 || amplitude.height <= 0)
            throw std::invalid_argument("TargetSpec: amplitude image is empty");
        require_finite(amplitude, "TargetSpec.amplitude");
        for (double v : amplitude.data)
            if (v < 0)
                throw std::invalid_argument("TargetSpec: amplitude must be non-negative");
        if (phase) {
            if (phase->width != amplitude.width || phase->height != amplitude.height)
                throw std::invalid_argument("TargetSpec: phase dimensions mismatch");
            require_finite(*phase, "TargetSpec.phase");
        }
        if (roi) {
            if (roi->width != amplitude.width || roi->height != amplitude.height)
                throw std::invalid_argument("TargetSpec: roi dimensions mismatch");
            if (roi->covered() == 0)
                throw std::invalid_argument("TargetSpec: roi covers no pixels");
        }
    }
};

} // namespace hologen
