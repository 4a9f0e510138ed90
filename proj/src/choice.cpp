#include "hologen/choice.hpp"

namespace hologen {

AlgorithmRanking suggest_algorithm(const SlmSpec& slm, bool phase_insensitive, bool realtime) {
    slm.validate();
    (void)phase_insensitive;
    using V = AlgorithmVariant;
    if (realtime)
        return {V::Ospr, V::AdaptiveOspr, V::Gs, V::WeightedGs, V::LiuTaghizadeh,
                V::DirectSearch, V::SimulatedAnnealing};
    if (slm.mode == SlmMode::Phase && slm.levels >= 3)
        return {V::Gs, V::WeightedGs, V::LiuTaghizadeh, V::DirectSearch,
                V::SimulatedAnnealing, V::Ospr, V::AdaptiveOspr};
    return {V::DirectSearch, V::SimulatedAnnealing, V::Gs, V::WeightedGs,
            V::LiuTaghizadeh, V::Ospr, V::AdaptiveOspr};
}

} // namespace hologen
