#include "hologen/config.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <initializer_list>

namespace hologen {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sub(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(sub(path, item.key().c_str()), "unknown field");
    }
}

const json& get_obj(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(sub(path, key), "missing required field");
    const json& v = obj.at(key);
    if (!v.is_object()) throw ConfigError(sub(path, key), "expected an object");
    return v;
}

std::string get_str(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(sub(path, key), "missing required field");
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(sub(path, key), "expected a string");
    return v.get<std::string>();
}

std::string get_str_or(const json& obj, const std::string& path, const char* key,
                       const std::string& def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(sub(path, key), "expected a string");
    return v.get<std::string>();
}

int64_t get_int(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(sub(path, key), "missing required field");
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(sub(path, key), "expected an integer");
    return v.get<int64_t>();
}

int64_t get_int_or(const json& obj, const std::string& path, const char* key, int64_t def) {
    if (!obj.contains(key)) return def;
    return get_int(obj, path, key);
}

uint64_t get_u64_or(const json& obj, const std::string& path, const char* key, uint64_t def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer()) {
        int64_t s = v.get<int64_t>();
        if (s < 0) throw ConfigError(sub(path, key), "expected a non-negative integer");
        return static_cast<uint64_t>(s);
    }
    throw ConfigError(sub(path, key), "expected a non-negative integer");
}

double get_num_or(const json& obj, const std::string& path, const char* key, double def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(sub(path, key), "expected a number");
    return v.get<double>();
}

double get_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(sub(path, key), "missing required field");
    return get_num_or(obj, path, key, 0.0);
}

bool get_bool_or(const json& obj, const std::string& path, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(sub(path, key), "expected a boolean");
    return v.get<bool>();
}

template <typename Enum>
struct EnumName {
    Enum value;
    const char* name;
};

template <typename Enum, size_t N>
Enum parse_enum(const std::string& s, const EnumName<Enum> (&table)[N],
                const std::string& field) {
    for (const auto& e : table)
        if (s == e.name) return e.value;
    std::string valid;
    for (const auto& e : table) {
        if (!valid.empty()) valid += ", ";
        valid += e.name;
    }
    throw ConfigError(field, "invalid value '" + s + "' (expected one of: " + valid + ")");
}

template <typename Enum, size_t N>
const char* enum_name(Enum v, const EnumName<Enum> (&table)[N]) {
    for (const auto& e : table)
        if (v == e.value) return e.name;
    return "unknown";
}

constexpr EnumName<AlgorithmVariant> kKindNames[] = {
    {AlgorithmVariant::Gs, "gs"},
    {AlgorithmVariant::WeightedGs, "wgs"},
    {AlgorithmVariant::LiuTaghizadeh, "lt"},
    {AlgorithmVariant::DirectSearch, "ds"},
    {AlgorithmVariant::SimulatedAnnealing, "sa"},
    {AlgorithmVariant::Ospr, "ospr"},
    {AlgorithmVariant::AdaptiveOspr, "adaptive_ospr"},
};

constexpr EnumName<InitPhase> kInitPhaseNames[] = {
    {InitPhase::Auto, "auto"},
    {InitPhase::Random, "random"},
    {InitPhase::Flat, "flat"},
};

constexpr EnumName<PixelOrder> kPixelOrderNames[] = {
    {PixelOrder::UniformRandom, "uniform_random"},
    {PixelOrder::RasterSweep, "raster_sweep"},
};

constexpr EnumName<SearchInit> kSearchInitNames[] = {
    {SearchInit::QuantisedIfft, "quantised_ifft"},
    {SearchInit::RandomStates, "random_states"},
};

constexpr EnumName<MetricKind> kMetricKindNames[] = {
    {MetricKind::MSE, "mse"},
    {MetricKind::SSIM, "ssim"},
};

constexpr EnumName<SlmMode> kSlmModeNames[] = {
    {SlmMode::Phase, "phase"},
    {SlmMode::Amplitude, "amplitude"},
};

constexpr EnumName<Normalization> kNormalizationNames[] = {
    {Normalization::MaxToOne, "max_to_one"},
    {Normalization::UnitEnergy, "unit_energy"},
};

constexpr EnumName<Precision> kPrecisionNames[] = {
    {Precision::F32, "f32"},
    {Precision::F64, "f64"},
};

bool is_ifta(AlgorithmVariant v) {
    return v == AlgorithmVariant::Gs || v == AlgorithmVariant::WeightedGs ||
           v == AlgorithmVariant::LiuTaghizadeh;
}

bool is_search(AlgorithmVariant v) {
    return v == AlgorithmVariant::DirectSearch || v == AlgorithmVariant::SimulatedAnnealing;
}

bool is_timeavg(AlgorithmVariant v) {
    return v == AlgorithmVariant::Ospr || v == AlgorithmVariant::AdaptiveOspr;
}

void require_file(const std::string& field, const std::string& base_dir,
                  const std::string& path) {
    if (path.empty()) throw ConfigError(field, "missing required field");
    std::string full = resolve_config_path(base_dir, path);
    if (!fs::exists(full)) throw ConfigError(field, "file not found: " + full);
}

void require_file_if_set(const std::string& field, const std::string& base_dir,
                         const std::string& path) {
    if (!path.empty()) require_file(field, base_dir, path);
}

} // namespace

JobConfig parse_job_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "top level must be an object");
    check_keys(j, "", {"schema_version", "algorithm", "slm", "target", "propagation",
                       "precision", "seed", "io"});

    JobConfig c;
    c.schema_version = static_cast<int>(get_int(j, "", "schema_version"));

    {
        const json& a = get_obj(j, "", "algorithm");
        const std::string path = "algorithm";
        check_keys(a, path,
                   {"kind", "iterations", "weight_clamp_lo", "weight_clamp_hi",
                    "lt_initial_fraction", "init_phase", "max_evaluations", "pixel_order",
                    "sa_t0", "sa_decay", "search_init", "resync_every", "metric_kind",
                    "metric_phase_sensitive", "subframes", "feedback_gain"});
        AlgorithmSettings d;
        c.algorithm.kind = parse_enum(get_str(a, path, "kind"), kKindNames, "algorithm.kind");
        c.algorithm.iterations =
            static_cast<int>(get_int_or(a, path, "iterations", d.iterations));
        c.algorithm.weight_clamp_lo =
            get_num_or(a, path, "weight_clamp_lo", d.weight_clamp_lo);
        c.algorithm.weight_clamp_hi =
            get_num_or(a, path, "weight_clamp_hi", d.weight_clamp_hi);
        c.algorithm.lt_initial_fraction =
            get_num_or(a, path, "lt_initial_fraction", d.lt_initial_fraction);
        c.algorithm.init_phase =
            parse_enum(get_str_or(a, path, "init_phase", "auto"), kInitPhaseNames,
                       "algorithm.init_phase");
        c.algorithm.max_evaluations =
            get_int_or(a, path, "max_evaluations", d.max_evaluations);
        c.algorithm.pixel_order =
            parse_enum(get_str_or(a, path, "pixel_order", "uniform_random"), kPixelOrderNames,
                       "algorithm.pixel_order");
        c.algorithm.sa_t0 = get_num_or(a, path, "sa_t0", d.sa_t0);
        c.algorithm.sa_decay = get_num_or(a, path, "sa_decay", d.sa_decay);
        c.algorithm.search_init =
            parse_enum(get_str_or(a, path, "search_init", "quantised_ifft"), kSearchInitNames,
                       "algorithm.search_init");
        c.algorithm.resync_every = get_int_or(a, path, "resync_every", d.resync_every);
        c.algorithm.metric_kind = parse_enum(get_str_or(a, path, "metric_kind", "mse"),
                                             kMetricKindNames, "algorithm.metric_kind");
        c.algorithm.metric_phase_sensitive =
            get_bool_or(a, path, "metric_phase_sensitive", d.metric_phase_sensitive);
        c.algorithm.subframes = static_cast<int>(get_int_or(a, path, "subframes", d.subframes));
        c.algorithm.feedback_gain = get_num_or(a, path, "feedback_gain", d.feedback_gain);
    }

    {
        const json& s = get_obj(j, "", "slm");
        const std::string path = "slm";
        check_keys(s, path, {"mode", "levels", "full_circle", "min_arg", "max_arg", "min_amp",
                             "max_amp", "illumination"});
        SlmConfig d;
        c.slm.mode = parse_enum(get_str(s, path, "mode"), kSlmModeNames, "slm.mode");
        c.slm.levels = static_cast<int>(get_int(s, path, "levels"));
        c.slm.full_circle = get_bool_or(s, path, "full_circle", d.full_circle);
        c.slm.min_arg = get_num_or(s, path, "min_arg", d.min_arg);
        c.slm.max_arg = get_num_or(s, path, "max_arg", d.max_arg);
        c.slm.min_amp = get_num_or(s, path, "min_amp", d.min_amp);
        c.slm.max_amp = get_num_or(s, path, "max_amp", d.max_amp);
        c.slm.illumination_path = get_str_or(s, path, "illumination", "");
    }

    {
        const json& t = get_obj(j, "", "target");
        const std::string path = "target";
        check_keys(t, path, {"image", "normalization", "phase_image", "roi_mask", "freedoms"});
        c.target.image_path = get_str(t, path, "image");
        c.target.normalization = parse_enum(get_str(t, path, "normalization"),
                                            kNormalizationNames, "target.normalization");
        c.target.phase_image_path = get_str_or(t, path, "phase_image", "");
        c.target.roi_mask_path = get_str_or(t, path, "roi_mask", "");
        if (t.contains("freedoms")) {
            const json& f = get_obj(t, path, "freedoms");
            check_keys(f, "target.freedoms", {"amplitude_outside_roi", "phase", "scale"});
            Freedoms d;
            c.target.freedoms.amplitude_outside_roi =
                get_bool_or(f, "target.freedoms", "amplitude_outside_roi",
                            d.amplitude_outside_roi);
            c.target.freedoms.phase = get_bool_or(f, "target.freedoms", "phase", d.phase);
            c.target.freedoms.scale = get_bool_or(f, "target.freedoms", "scale", d.scale);
        }
    }

    if (j.contains("propagation")) {
        const json& p = get_obj(j, "", "propagation");
        const std::string path = "propagation";
        std::string kind = get_str(p, path, "kind");
        if (kind == "fourier") {
            check_keys(p, path, {"kind"});
            c.propagation.fresnel = false;
        } else if (kind == "fresnel") {
            check_keys(p, path,
                       {"kind", "wavelength", "distance", "pixel_pitch_x", "pixel_pitch_y"});
            c.propagation.fresnel = true;
            c.propagation.params.wavelength = get_num(p, path, "wavelength");
            c.propagation.params.distance = get_num(p, path, "distance");
            c.propagation.params.pixel_pitch_x = get_num(p, path, "pixel_pitch_x");
            c.propagation.params.pixel_pitch_y = get_num(p, path, "pixel_pitch_y");
        } else {
            throw ConfigError("propagation.kind",
                              "invalid value '" + kind + "' (expected one of: fourier, fresnel)");
        }
    }

    c.precision = parse_enum(get_str_or(j, "", "precision", "f32"), kPrecisionNames, "precision");
    c.seed = get_u64_or(j, "", "seed", 0);

    if (j.contains("io")) {
        const json& io = get_obj(j, "", "io");
        const std::string path = "io";
        check_keys(io, path, {"output_dir", "hologram_png", "field_dump", "replay_png",
                              "trace_csv", "plot"});
        IoConfig d;
        c.io.output_dir = get_str_or(io, path, "output_dir", d.output_dir);
        c.io.hologram_png = get_bool_or(io, path, "hologram_png", d.hologram_png);
        c.io.field_dump = get_bool_or(io, path, "field_dump", d.field_dump);
        c.io.replay_png = get_bool_or(io, path, "replay_png", d.replay_png);
        c.io.trace_csv = get_bool_or(io, path, "trace_csv", d.trace_csv);
        c.io.plot = get_bool_or(io, path, "plot", d.plot);
    }

    return c;
}

std::string serialize_job_config(const JobConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;

    json a;
    a["kind"] = enum_name(c.algorithm.kind, kKindNames);
    a["iterations"] = c.algorithm.iterations;
    a["weight_clamp_lo"] = c.algorithm.weight_clamp_lo;
    a["weight_clamp_hi"] = c.algorithm.weight_clamp_hi;
    a["lt_initial_fraction"] = c.algorithm.lt_initial_fraction;
    a["init_phase"] = enum_name(c.algorithm.init_phase, kInitPhaseNames);
    a["max_evaluations"] = c.algorithm.max_evaluations;
    a["pixel_order"] = enum_name(c.algorithm.pixel_order, kPixelOrderNames);
    a["sa_t0"] = c.algorithm.sa_t0;
    a["sa_decay"] = c.algorithm.sa_decay;
    a["search_init"] = enum_name(c.algorithm.search_init, kSearchInitNames);
    a["resync_every"] = c.algorithm.resync_every;
    a["metric_kind"] = enum_name(c.algorithm.metric_kind, kMetricKindNames);
    a["metric_phase_sensitive"] = c.algorithm.metric_phase_sensitive;
    a["subframes"] = c.algorithm.subframes;
    a["feedback_gain"] = c.algorithm.feedback_gain;
    j["algorithm"] = std::move(a);

    json s;
    s["mode"] = enum_name(c.slm.mode, kSlmModeNames);
    s["levels"] = c.slm.levels;
    s["full_circle"] = c.slm.full_circle;
    s["min_arg"] = c.slm.min_arg;
    s["max_arg"] = c.slm.max_arg;
    s["min_amp"] = c.slm.min_amp;
    s["max_amp"] = c.slm.max_amp;
    if (!c.slm.illumination_path.empty()) s["illumination"] = c.slm.illumination_path;
    j["slm"] = std::move(s);

    json t;
    t["image"] = c.target.image_path;
    t["normalization"] = enum_name(c.target.normalization, kNormalizationNames);
    if (!c.target.phase_image_path.empty()) t["phase_image"] = c.target.phase_image_path;
    if (!c.target.roi_mask_path.empty()) t["roi_mask"] = c.target.roi_mask_path;
    json f;
    f["amplitude_outside_roi"] = c.target.freedoms.amplitude_outside_roi;
    f["phase"] = c.target.freedoms.phase;
    f["scale"] = c.target.freedoms.scale;
    t["freedoms"] = std::move(f);
    j["target"] = std::move(t);

    json p;
    if (c.propagation.fresnel) {
        p["kind"] = "fresnel";
        p["wavelength"] = c.propagation.params.wavelength;
        p["distance"] = c.propagation.params.distance;
        p["pixel_pitch_x"] = c.propagation.params.pixel_pitch_x;
        p["pixel_pitch_y"] = c.propagation.params.pixel_pitch_y;
    } else {
        p["kind"] = "fourier";
    }
    j["propagation"] = std::move(p);

    j["precision"] = enum_name(c.precision, kPrecisionNames);
    j["seed"] = c.seed;

    json io;
    io["output_dir"] = c.io.output_dir;
    io["hologram_png"] = c.io.hologram_png;
    io["field_dump"] = c.io.field_dump;
    io["replay_png"] = c.io.replay_png;
    io["trace_csv"] = c.io.trace_csv;
    io["plot"] = c.io.plot;
    j["io"] = std::move(io);

    return j.dump(2) + "\n";
}

std::string resolve_config_path(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p.string();
    return (fs::path(base_dir) / p).string();
}

void validate_job_config(const JobConfig& c, const std::string& base_dir) {
    if (c.schema_version != 1)
        throw ConfigError("schema_version",
                          "unsupported schema version " + std::to_string(c.schema_version));

    const AlgorithmSettings& a = c.algorithm;
    if (is_ifta(a.kind)) {
        if (a.iterations < 1)
            throw ConfigError("algorithm.iterations", "must be >= 1");
        if (a.kind == AlgorithmVariant::WeightedGs) {
            if (!(a.weight_clamp_lo > 0))
                throw ConfigError("algorithm.weight_clamp_lo", "must be > 0");
            if (!(a.weight_clamp_hi >= a.weight_clamp_lo))
                throw ConfigError("algorithm.weight_clamp_hi", "must be >= weight_clamp_lo");
        }
        if (a.kind == AlgorithmVariant::LiuTaghizadeh &&
            !(a.lt_initial_fraction > 0 && a.lt_initial_fraction <= 1))
            throw ConfigError("algorithm.lt_initial_fraction", "must be in (0, 1]");
    } else if (is_search(a.kind)) {
        if (a.max_evaluations < 1)
            throw ConfigError("algorithm.max_evaluations", "must be >= 1");
        if (a.resync_every < 1)
            throw ConfigError("algorithm.resync_every", "must be >= 1");
        if (a.kind == AlgorithmVariant::SimulatedAnnealing) {
            if (!(a.sa_t0 > 0)) throw ConfigError("algorithm.sa_t0", "must be > 0");
            if (!(a.sa_decay > 0 && a.sa_decay < 1))
                throw ConfigError("algorithm.sa_decay", "must be in (0, 1)");
        } else if (a.sa_t0 != 0.0 || a.sa_decay != 0.0) {
            throw ConfigError("algorithm.sa_t0",
                              "annealing schedule is only valid for kind 'sa'");
        }
    } else {
        if (a.subframes < 1) throw ConfigError("algorithm.subframes", "must be >= 1");
        if (!(a.feedback_gain >= 0 && a.feedback_gain <= 1))
            throw ConfigError("algorithm.feedback_gain", "must be in [0, 1]");
        if (c.propagation.fresnel)
            throw ConfigError("propagation.kind",
                              "time-averaged algorithms support far-field propagation only");
    }

    if (c.slm.levels < 2) throw ConfigError("slm.levels", "must be >= 2");
    if (c.slm.mode == SlmMode::Phase && !c.slm.full_circle) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        if (!(c.slm.min_arg < c.slm.max_arg))
            throw ConfigError("slm.max_arg", "must be greater than min_arg");
        if (c.slm.max_arg - c.slm.min_arg > two_pi * (1 + 1e-12))
            throw ConfigError("slm.max_arg", "phase range must not exceed a full circle");
    }
    if (c.slm.mode == SlmMode::Amplitude &&
        !(c.slm.min_amp >= 0 && c.slm.min_amp < c.slm.max_amp))
        throw ConfigError("slm.max_amp", "requires 0 <= min_amp < max_amp");

    if (c.io.hologram_png && c.slm.levels > 256)
        throw ConfigError("io.hologram_png",
                          "hologram PNG export is lossless only for <= 256 levels; disable it "
                          "or reduce slm.levels");

    require_file("target.image", base_dir, c.target.image_path);
    require_file_if_set("target.phase_image", base_dir, c.target.phase_image_path);
    require_file_if_set("target.roi_mask", base_dir, c.target.roi_mask_path);
    require_file_if_set("slm.illumination", base_dir, c.slm.illumination_path);

    if (c.propagation.fresnel) {
        try {
            c.propagation.params.validate();
        } catch (const std::exception& e) {
            throw ConfigError("propagation", e.what());
        }
    }

    if (c.io.output_dir.empty()) throw ConfigError("io.output_dir", "must not be empty");
}

} // namespace hologen
