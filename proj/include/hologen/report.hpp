#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hologen/field.hpp"

namespace hologen {

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

// Named convergence trace: (iteration, value) pairs with strictly increasing
// iteration numbers.
struct MetricTrace {
    std::string name = "metric";
    std::vector<std::pair<int64_t, double>> points;

    void append(int64_t iteration, double value) {
        if (!points.empty() && iteration <= points.back().first)
            throw std::invalid_argument("MetricTrace: iterations must be strictly increasing");
        points.emplace_back(iteration, value);
    }

    size_t size() const { return points.size(); }
};

// Wall-clock split of a run across work categories, in seconds.
struct PhaseProfile {
    double transform = 0.0;
    double constraint = 0.0;
    double metric = 0.0;
    double other = 0.0;

    double total() const { return transform + constraint + metric + other; }
};

// Everything a single algorithm run reports back.
template <typename T>
struct RunReport {
    std::string algorithm;
    uint64_t seed = 0;
    ComplexField<T> hologram;
    ComplexField<T> replay;
    MetricTrace trace;
    std::vector<MetricTrace> extra_traces;
    double final_error = 0.0;
    double seconds = 0.0;
    PhaseProfile profile;
    // Search-specific counters; zero elsewhere.
    int64_t evaluations = 0;
    int64_t accepted = 0;
    // Per-evaluation accept/reject log, populated only when a search is asked
    // to record decisions.
    std::vector<uint8_t> decisions;
};

} // namespace hologen
