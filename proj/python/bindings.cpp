// Python bindings for the core operations: unitary transforms, the iterative
// and search algorithms, time-averaged generation, quantisation, and metrics.
// Arrays are numpy row-major with shape (height, width); complex fields are
// complex128, images float64.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <complex>
#include <optional>
#include <stdexcept>

#include "hologen/fft.hpp"
#include "hologen/ifta.hpp"
#include "hologen/metrics.hpp"
#include "hologen/ospr.hpp"
#include "hologen/quantise.hpp"
#include "hologen/search.hpp"
#include "hologen/target.hpp"

namespace py = pybind11;
using namespace hologen;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexField<double> to_field(const CArray& a, Domain domain) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D complex array");
    int ny = static_cast<int>(a.shape(0));
    int nx = static_cast<int>(a.shape(1));
    ComplexField<double> f(nx, ny, domain);
    std::copy(a.data(), a.data() + f.data.size(), f.data.begin());
    return f;
}

RealImage to_image(const RArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D real array");
    int h = static_cast<int>(a.shape(0));
    int w = static_cast<int>(a.shape(1));
    RealImage img(w, h);
    std::copy(a.data(), a.data() + img.data.size(), img.data.begin());
    return img;
}

py::array_t<std::complex<double>> from_field(const ComplexField<double>& f) {
    py::array_t<std::complex<double>> out({f.ny, f.nx});
    std::copy(f.data.begin(), f.data.end(), out.mutable_data());
    return out;
}

py::array_t<double> from_image(const RealImage& img) {
    py::array_t<double> out({img.height, img.width});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

SlmSpec slm_from_levels(int levels) {
    return levels == 2 ? SlmSpec::binary_phase() : SlmSpec::full_circle_phase(levels);
}

TargetSpec target_from(const RArray& amplitude, bool phase_freedom) {
    TargetSpec t;
    t.amplitude = to_image(amplitude);
    t.freedoms.phase = phase_freedom;
    return t;
}

MetricConfig metric_from(const py::object& mask, bool phase_sensitive, bool scale_free) {
    MetricConfig cfg;
    cfg.phase_sensitive = phase_sensitive;
    cfg.scale_free = scale_free;
    if (!mask.is_none()) {
        RArray m = mask.cast<RArray>();
        if (m.ndim() != 2) throw std::invalid_argument("mask must be a 2-D array");
        RegionMask rm(static_cast<int>(m.shape(1)), static_cast<int>(m.shape(0)));
        for (size_t i = 0; i < rm.data.size(); ++i) rm.data[i] = m.data()[i] != 0.0 ? 1 : 0;
        cfg.mask = std::move(rm);
    }
    return cfg;
}

py::dict report_dict(const RunReport<double>& rep) {
    py::dict d;
    d["algorithm"] = rep.algorithm;
    d["hologram"] = from_field(rep.hologram);
    d["replay"] = from_field(rep.replay);
    d["final_error"] = rep.final_error;
    d["evaluations"] = rep.evaluations;
    py::list trace;
    for (const auto& [it, v] : rep.trace.points) trace.append(py::make_tuple(it, v));
    d["trace"] = trace;
    return d;
}

py::dict run_ifta_py(IftaVariant variant, const RArray& target, int iterations, int levels,
                     uint64_t seed, bool phase_freedom, double clamp_lo, double clamp_hi,
                     double lt_fraction) {
    IftaConfig cfg;
    cfg.variant = variant;
    cfg.iterations = iterations;
    cfg.slm = slm_from_levels(levels);
    cfg.target = target_from(target, phase_freedom);
    cfg.seed = seed;
    cfg.weight_clamp_lo = clamp_lo;
    cfg.weight_clamp_hi = clamp_hi;
    cfg.lt_initial_fraction = lt_fraction;
    return report_dict(run_ifta<double>(cfg));
}

py::dict run_search_py(SearchVariant variant, const RArray& target, int64_t evaluations,
                       int levels, uint64_t seed, bool phase_freedom, double t0, double decay) {
    SearchConfig cfg;
    cfg.variant = variant;
    cfg.max_evaluations = evaluations;
    cfg.slm = slm_from_levels(levels);
    cfg.target = target_from(target, phase_freedom);
    cfg.seed = seed;
    cfg.sa_t0 = t0;
    cfg.sa_decay = decay;
    return report_dict(run_search<double>(cfg));
}

py::dict run_ospr_py(OsprVariant variant, const RArray& target, int subframes, int levels,
                     uint64_t seed, bool phase_freedom, double gain) {
    OsprConfig cfg;
    cfg.variant = variant;
    cfg.subframes = subframes;
    cfg.slm = slm_from_levels(levels);
    cfg.target = target_from(target, phase_freedom);
    cfg.seed = seed;
    cfg.feedback_gain = gain;
    OsprRun<double> run = run_ospr_variant<double>(cfg);
    py::dict d = report_dict(run.report);
    py::list frames;
    for (const auto& f : run.set.frames) frames.append(from_field(f));
    d["frames"] = frames;
    d["mean_intensity"] = from_image(run.set.mean_intensity);
    d["per_frame_mse"] = run.set.per_frame_mse;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Computer-generated holography core: unitary transforms, hologram "
              "generation algorithms, and image metrics.";

    m.def(
        "fft_forward",
        [](const CArray& a) { return from_field(fft_forward(to_field(a, Domain::Aperture))); },
        py::arg("field"),
        "Unitary forward transform (aperture plane to replay field).");

    m.def(
        "fft_inverse",
        [](const CArray& a) { return from_field(fft_inverse(to_field(a, Domain::Replay))); },
        py::arg("field"),
        "Unitary inverse transform (replay field to aperture plane).");

    m.def(
        "quantise",
        [](const CArray& a, int levels) {
            ComplexField<double> f = to_field(a, Domain::Aperture);
            Quantiser<double> q(slm_from_levels(levels), f.nx, f.ny);
            q.apply(f);
            return from_field(f);
        },
        py::arg("field"), py::arg("levels") = 256,
        "Project every pixel onto the nearest allowed modulator state "
        "(levels == 2 means binary phase {0, pi}, otherwise a full phase circle).");

    m.def(
        "gs",
        [](const RArray& target, int iterations, int levels, uint64_t seed, bool phase_freedom) {
            return run_ifta_py(IftaVariant::GS, target, iterations, levels, seed, phase_freedom,
                               0.1, 10.0, 0.1);
        },
        py::arg("target"), py::arg("iterations") = 25, py::arg("levels") = 256,
        py::arg("seed") = 0, py::arg("phase_freedom") = true,
        "Iterative transform algorithm with hard replay amplitude substitution.");

    m.def(
        "wgs",
        [](const RArray& target, int iterations, int levels, uint64_t seed, bool phase_freedom,
           double clamp_lo, double clamp_hi) {
            return run_ifta_py(IftaVariant::WeightedGS, target, iterations, levels, seed, phase_freedom,
                               clamp_lo, clamp_hi, 0.1);
        },
        py::arg("target"), py::arg("iterations") = 25, py::arg("levels") = 256,
        py::arg("seed") = 0, py::arg("phase_freedom") = true, py::arg("clamp_lo") = 0.1,
        py::arg("clamp_hi") = 10.0,
        "Weighted iterative transform algorithm with clamped per-pixel gains.");

    m.def(
        "lt",
        [](const RArray& target, int iterations, int levels, uint64_t seed, bool phase_freedom,
           double initial_fraction) {
            return run_ifta_py(IftaVariant::LiuTaghizadeh, target, iterations, levels, seed, phase_freedom,
                               0.1, 10.0, initial_fraction);
        },
        py::arg("target"), py::arg("iterations") = 25, py::arg("levels") = 256,
        py::arg("seed") = 0, py::arg("phase_freedom") = true,
        py::arg("initial_fraction") = 0.1,
        "Iterative transform algorithm with a growing active target region.");

    m.def(
        "direct_search",
        [](const RArray& target, int64_t evaluations, int levels, uint64_t seed,
           bool phase_freedom) {
            return run_search_py(SearchVariant::DirectSearch, target, evaluations, levels, seed,
                                 phase_freedom, 0.0, 0.0);
        },
        py::arg("target"), py::arg("evaluations") = 10000, py::arg("levels") = 2,
        py::arg("seed") = 0, py::arg("phase_freedom") = true,
        "Greedy single-pixel search with incremental replay updates.");

    m.def(
        "simulated_annealing",
        [](const RArray& target, int64_t evaluations, int levels, uint64_t seed,
           bool phase_freedom, double t0, double decay) {
            return run_search_py(SearchVariant::SimulatedAnnealing, target, evaluations, levels,
                                 seed, phase_freedom, t0, decay);
        },
        py::arg("target"), py::arg("evaluations") = 10000, py::arg("levels") = 2,
        py::arg("seed") = 0, py::arg("phase_freedom") = true, py::arg("t0") = 1e-3,
        py::arg("decay") = 0.9982,
        "Single-pixel search with a geometric temperature schedule.");

    m.def(
        "ospr",
        [](const RArray& target, int subframes, int levels, uint64_t seed, bool phase_freedom) {
            return run_ospr_py(OsprVariant::Ospr, target, subframes, levels, seed, phase_freedom,
                               1.0);
        },
        py::arg("target"), py::arg("subframes") = 24, py::arg("levels") = 2, py::arg("seed") = 0,
        py::arg("phase_freedom") = true,
        "One-step phase retrieval: independent subframes averaged in intensity.");

    m.def(
        "adaptive_ospr",
        [](const RArray& target, int subframes, int levels, uint64_t seed, bool phase_freedom,
           double gain) {
            return run_ospr_py(OsprVariant::AdaptiveOspr, target, subframes, levels, seed,
                               phase_freedom, gain);
        },
        py::arg("target"), py::arg("subframes") = 24, py::arg("levels") = 2, py::arg("seed") = 0,
        py::arg("phase_freedom") = true, py::arg("gain") = 1.0,
        "One-step phase retrieval with error feedback between subframes.");

    m.def(
        "mse",
        [](const RArray& target, const CArray& replay, const py::object& mask,
           bool phase_sensitive, bool scale_free) {
            return mse(to_image(target), to_field(replay, Domain::Replay),
                       metric_from(mask, phase_sensitive, scale_free));
        },
        py::arg("target"), py::arg("replay"), py::arg("mask") = py::none(),
        py::arg("phase_sensitive") = false, py::arg("scale_free") = false,
        "Mean squared error between a target image and a replay field.");

    m.def(
        "ssim",
        [](const RArray& target, const CArray& replay, const py::object& mask,
           bool phase_sensitive) {
            return ssim(to_image(target), to_field(replay, Domain::Replay),
                        metric_from(mask, phase_sensitive, false));
        },
        py::arg("target"), py::arg("replay"), py::arg("mask") = py::none(),
        py::arg("phase_sensitive") = false,
        "Structural similarity between a target image and a replay field.");

    m.attr("__version__") = "0.1.0";
}
