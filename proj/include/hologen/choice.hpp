#pragma once

#include <array>
#include <string>

#include "hologen/quantise.hpp"

namespace hologen {

enum class AlgorithmVariant {
    Gs,
    WeightedGs,
    LiuTaghizadeh,
    DirectSearch,
    SimulatedAnnealing,
    Ospr,
    AdaptiveOspr,
};

inline const char* to_string(AlgorithmVariant v) {
    switch (v) {
        case AlgorithmVariant::Gs: return "gs";
        case AlgorithmVariant::WeightedGs: return "wgs";
        case AlgorithmVariant::LiuTaghizadeh: return "lt";
        case AlgorithmVariant::DirectSearch: return "ds";
        case AlgorithmVariant::SimulatedAnnealing: return "sa";
        case AlgorithmVariant::Ospr: return "ospr";
        case AlgorithmVariant::AdaptiveOspr: return "adaptive_ospr";
    }
    return "unknown";
}

using AlgorithmRanking = std::array<AlgorithmVariant, 7>;

// Static decision chart. Realtime display wants the time-averaged family
// regardless of modulation; multi-level phase modulators converge smoothly
// under iterative transform algorithms; binary or amplitude (piecewise)
// modulators favour hill-climbing search. Ties within a branch keep family
// order: iterative transform, then search, then time-averaged. The
// phase_insensitive flag does not change the ranking; it is accepted because
// the error regime a caller optimizes for is part of the decision context,
// but every family here supports both regimes.
AlgorithmRanking suggest_algorithm(const SlmSpec& slm, bool phase_insensitive, bool realtime);

} // namespace hologen
