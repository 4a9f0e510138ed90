#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hologen/choice.hpp"
#include "hologen/ifta.hpp"
#include "hologen/metrics.hpp"
#include "hologen/propagation.hpp"
#include "hologen/search.hpp"
#include "hologen/target.hpp"

namespace hologen {

// Configuration problem tied to a dotted field path ("slm.levels"); the CLI
// maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? "config error: " + message
                                           : "config error at " + field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Declarative job description: paths stay paths until the runner loads them.
struct AlgorithmSettings {
    AlgorithmVariant kind = AlgorithmVariant::Gs;
    // Iterative transform family.
    int iterations = 25;
    double weight_clamp_lo = 0.1;
    double weight_clamp_hi = 10.0;
    double lt_initial_fraction = 0.1;
    InitPhase init_phase = InitPhase::Auto;
    // Search family.
    int64_t max_evaluations = 10000;
    PixelOrder pixel_order = PixelOrder::UniformRandom;
    double sa_t0 = 0.0;
    double sa_decay = 0.0;
    SearchInit search_init = SearchInit::QuantisedIfft;
    int64_t resync_every = 1000;
    MetricKind metric_kind = MetricKind::MSE;
    bool metric_phase_sensitive = false;
    // Time-averaged family.
    int subframes = 24;
    double feedback_gain = 1.0;

    bool operator==(const AlgorithmSettings&) const = default;
};

struct SlmConfig {
    SlmMode mode = SlmMode::Phase;
    int levels = 256;
    bool full_circle = true;
    double min_arg = 0.0;
    double max_arg = 6.283185307179586476925286766559;
    double min_amp = 0.0;
    double max_amp = 1.0;
    std::string illumination_path; // optional HGF1 dump

    bool operator==(const SlmConfig&) const = default;
};

struct TargetConfig {
    std::string image_path;
    Normalization normalization = Normalization::MaxToOne;
    std::string phase_image_path; // optional; 8-bit gray, 256 levels per turn
    std::string roi_mask_path;    // optional
    Freedoms freedoms;

    bool operator==(const TargetConfig&) const = default;
};

struct PropagationConfig {
    bool fresnel = false;
    FresnelParams params;

    bool operator==(const PropagationConfig&) const = default;
};

struct IoConfig {
    std::string output_dir = "out";
    bool hologram_png = true;
    bool field_dump = true;
    bool replay_png = false;
    bool trace_csv = true;
    bool plot = false;

    bool operator==(const IoConfig&) const = default;
};

struct JobConfig {
    int schema_version = 1;
    AlgorithmSettings algorithm;
    SlmConfig slm;
    TargetConfig target;
    PropagationConfig propagation;
    Precision precision = Precision::F32;
    uint64_t seed = 0;
    IoConfig io;

    bool operator==(const JobConfig&) const = default;
};

/// Strict JSON parsing: unknown keys, missing required fields, and type
// mismatches all raise ConfigError naming the field path. Parsing performs
// shape checks only; semantic checks live in validate_job_config.
JobConfig parse_job_config(const std::string& json_text);

// Complete JSON document with every field explicit; parsing it back yields an
// equal JobConfig.
std::string serialize_job_config(const JobConfig& cfg);

// Semantic validation including path resolvability. Relative paths resolve
// against base_dir (the config file's directory).
void validate_job_config(const JobConfig& cfg, const std::string& base_dir);

// base_dir-relative resolution for config path fields.
std::string resolve_config_path(const std::string& base_dir, const std::string& path);

} // namespace hologen
