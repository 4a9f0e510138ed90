#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hologen/ifta.hpp"
#include "hologen/patterns.hpp"

using namespace hologen;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

IftaConfig base_config(RealImage amplitude, int iterations, uint64_t seed) {
    IftaConfig cfg;
    cfg.iterations = iterations;
    cfg.slm = SlmSpec::full_circle_phase(256);
    cfg.target.amplitude = std::move(amplitude);
    cfg.target.freedoms.phase = true;
    cfg.seed = seed;
    return cfg;
}

double spot_intensity_cv(const RunReport<double>& rep, const RealImage& raw_spots) {
    std::vector<double> vals;
    for (size_t i = 0; i < raw_spots.data.size(); ++i)
        if (raw_spots.data[i] > 0.0) vals.push_back(std::norm(rep.replay.data[i]));
    double mu = 0.0;
    for (double v : vals) mu += v;
    mu /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mu) * (v - mu);
    var /= static_cast<double>(vals.size());
    return std::sqrt(var) / mu;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST_CASE("expanding-region schedule") {
    auto f = lt_area_fractions(10, 0.1);
    REQUIRE(f.size() == 10);
    for (int k = 0; k < 10; ++k)
        CHECK(f[k] == doctest::Approx(0.1 * (k + 1)).epsilon(1e-12));
    CHECK(f.back() == 1.0);

    auto one = lt_area_fractions(1, 0.5);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 1.0);

    CHECK_THROWS_AS(lt_area_fractions(0, 0.5), std::invalid_argument);
}

TEST_CASE("an exactly representable target is a fixed point") {
    // Build a hologram already on the allowed state grid, declare its exact
    // replay (amplitude and phase) as the target with no phase freedom, and
    // run one iteration. The projection step must reproduce the hologram and
    // the error must be numerically zero.
    ComplexField<double> h(32, 32, Domain::Aperture);
    Rng rng(800);
    for (auto& z : h.data) z = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    SlmSpec slm = SlmSpec::full_circle_phase(256);
    h = quantise_field(h, slm);

    auto R = fft_forward(h);
    RealImage amp(32, 32), phase(32, 32);
    for (size_t i = 0; i < R.size(); ++i) {
        amp.data[i] = std::abs(R.data[i]);
        double turns = std::arg(R.data[i]) / kTwoPi;
        turns -= std::floor(turns);
        phase.data[i] = turns;
    }

    IftaConfig cfg;
    cfg.variant = IftaVariant::GS;
    cfg.iterations = 1;
    cfg.slm = slm;
    cfg.target.amplitude = amp;
    cfg.target.phase = phase;
    cfg.target.freedoms.phase = false;
    cfg.init_phase = InitPhase::Auto;
    auto rep = run_gs<double>(cfg);

    CHECK(rep.final_error < 1e-20);
    CHECK(rep.hologram.data == h.data);
}

TEST_CASE("projection iterations reduce the error") {
    RealImage target = patterns::checkerboard(64, 64, 8);
    normalize_image(target, Normalization::UnitEnergy);
    auto cfg = base_config(target, 25, 3);
    auto rep = run_gs<double>(cfg);

    REQUIRE(rep.trace.size() == 25);
    CHECK(rep.final_error < rep.trace.points.front().second);
    CHECK(rep.final_error == rep.trace.points.back().second);
    CHECK(rep.algorithm == "gs");
    CHECK(rep.evaluations == 0);
}

TEST_CASE("runs are bitwise deterministic") {
    RealImage target = patterns::smooth_blobs(32, 32);
    auto cfg = base_config(target, 10, 99);
    auto a = run_gs<double>(cfg);
    auto b = run_gs<double>(cfg);
    CHECK(a.hologram.data == b.hologram.data);
    CHECK(a.replay.data == b.replay.data);
    CHECK(a.final_error == b.final_error);
    for (size_t i = 0; i < a.trace.size(); ++i)
        CHECK(a.trace.points[i] == b.trace.points[i]);

    auto c = base_config(target, 10, 100);
    auto d = run_gs<double>(c);
    CHECK(d.hologram.data != a.hologram.data);

    // Flat initialization ignores the seed entirely.
    auto e = base_config(target, 5, 1);
    e.init_phase = InitPhase::Flat;
    auto f = base_config(target, 5, 2);
    f.init_phase = InitPhase::Flat;
    CHECK(run_gs<double>(e).hologram.data == run_gs<double>(f).hologram.data);
}

TEST_CASE("reported replay is the transform of the reported hologram") {
    RealImage target = patterns::letter_a(32, 32);
    normalize_image(target, Normalization::UnitEnergy);
    auto cfg = base_config(target, 8, 5);
    auto rep = run_gs<double>(cfg);
    auto R = fft_forward(rep.hologram);
    CHECK(rep.replay.data == R.data);

    // And the reported error is the metric evaluated on that replay.
    CHECK(rep.final_error == mse(cfg.target.amplitude, rep.replay));
}

TEST_CASE("final hologram satisfies the device constraint") {
    RealImage target = patterns::checkerboard(32, 32, 4);
    normalize_image(target, Normalization::UnitEnergy);
    auto cfg = base_config(target, 6, 17);
    cfg.slm = SlmSpec::binary_phase();
    auto rep = run_gs<double>(cfg);
    for (const auto& z : rep.hologram.data) {
        double d = std::min(std::abs(z - std::complex<double>(1, 0)),
                            std::abs(z - std::complex<double>(-1, 0)));
        CHECK(d < 1e-12);
    }
}

TEST_CASE("unit weight clamp reduces the weighted variant to the plain one") {
    RealImage target = patterns::smooth_blobs(32, 32);
    auto cfg = base_config(target, 12, 7);
    auto gs = run_gs<double>(cfg);

    auto wcfg = cfg;
    wcfg.variant = IftaVariant::WeightedGS;
    wcfg.weight_clamp_lo = 1.0;
    wcfg.weight_clamp_hi = 1.0;
    auto wgs = run_weighted_gs<double>(wcfg);

    CHECK(wgs.hologram.data == gs.hologram.data);
    CHECK(wgs.final_error == gs.final_error);
    CHECK(wgs.algorithm == "wgs");
}

TEST_CASE("full-area start reduces the expanding variant to the plain one") {
    RealImage target = patterns::letter_a(32, 32);
    normalize_image(target, Normalization::UnitEnergy);
    auto cfg = base_config(target, 12, 7);
    auto gs = run_gs<double>(cfg);

    auto lcfg = cfg;
    lcfg.variant = IftaVariant::LiuTaghizadeh;
    lcfg.lt_initial_fraction = 1.0;
    auto lt = run_liu_taghizadeh<double>(lcfg);

    CHECK(lt.hologram.data == gs.hologram.data);
    CHECK(lt.final_error == gs.final_error);
    CHECK(lt.algorithm == "lt");
}

TEST_CASE("feedback weighting evens out spot intensities") {
    // Unit-energy 4x4 spot array on a 256-level phase device, 50 iterations.
    // The weighted variant consistently lowers the coefficient of variation
    // of the spot intensities; across seeds 1..5 the plain/weighted medians
    // were 0.031/0.016 with a worst-case per-seed ratio of 1.2.
    RealImage raw = patterns::spot_array(64, 64, 4, 4);
    RealImage target = raw;
    normalize_image(target, Normalization::UnitEnergy);

    std::vector<double> cv_gs, cv_wgs;
    int wins = 0;
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        auto cfg = base_config(target, 50, seed);
        auto gs = run_gs<double>(cfg);
        auto wcfg = cfg;
        wcfg.variant = IftaVariant::WeightedGS;
        auto wgs = run_weighted_gs<double>(wcfg);
        cv_gs.push_back(spot_intensity_cv(gs, raw));
        cv_wgs.push_back(spot_intensity_cv(wgs, raw));
        wins += cv_wgs.back() < cv_gs.back();
    }
    CHECK(wins >= 4);
    CHECK(median(cv_wgs) < median(cv_gs));
}

TEST_CASE("expanding-region variant lands in the same error regime") {
    // The expanding schedule trades early enforcement for stability; on this
    // roi instance it ends within a small factor of the plain variant
    // (observed ratios 1.8..2.2 across seeds).
    RealImage amp(64, 64);
    RealImage letter = patterns::letter_a(32, 32);
    RegionMask roi(64, 64);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            amp.at(16 + x, 16 + y) = letter.at(x, y);
            roi.set(16 + x, 16 + y, true);
        }
    normalize_image(amp, Normalization::UnitEnergy);

    auto cfg = base_config(amp, 30, 2);
    cfg.target.roi = roi;
    cfg.target.freedoms.amplitude_outside_roi = true;
    auto gs = run_gs<double>(cfg);

    auto lcfg = cfg;
    lcfg.variant = IftaVariant::LiuTaghizadeh;
    lcfg.lt_initial_fraction = 0.1;
    auto lt = run_liu_taghizadeh<double>(lcfg);

    CHECK(lt.final_error > 0.0);
    CHECK(lt.final_error < 3.0 * gs.final_error);
    CHECK(std::isfinite(lt.final_error));

    // The masked metric drives the reported error.
    MetricConfig mcfg;
    mcfg.mask = roi;
    CHECK(gs.final_error == mse(cfg.target.amplitude, gs.replay, mcfg));
}

TEST_CASE("roi amplitude freedom changes the outcome") {
    RealImage amp(32, 32);
    RealImage cb = patterns::checkerboard(32, 32, 4);
    RegionMask roi(32, 32);
    for (int y = 8; y < 24; ++y)
        for (int x = 8; x < 24; ++x) {
            amp.at(x, y) = cb.at(x, y);
            roi.set(x, y, true);
        }
    normalize_image(amp, Normalization::UnitEnergy);

    auto strict = base_config(amp, 10, 21);
    strict.target.roi = roi;
    strict.target.freedoms.amplitude_outside_roi = false;
    auto rs = run_gs<double>(strict);

    auto loose = strict;
    loose.target.freedoms.amplitude_outside_roi = true;
    auto rl = run_gs<double>(loose);

    CHECK(rs.hologram.data != rl.hologram.data);
    // Freeing the outside amplitude cannot hurt the masked error here.
    CHECK(rl.final_error < rs.final_error);
}

TEST_CASE("profile accounts for the whole run") {
    RealImage target = patterns::checkerboard(32, 32, 4);
    normalize_image(target, Normalization::UnitEnergy);
    auto rep = run_gs<double>(base_config(target, 10, 1));
    CHECK(rep.profile.transform > 0.0);
    CHECK(rep.profile.constraint > 0.0);
    CHECK(rep.profile.metric > 0.0);
    CHECK(rep.profile.other >= 0.0);
    CHECK(rep.profile.total() == doctest::Approx(rep.seconds).epsilon(1e-9));
    CHECK(rep.seconds > 0.0);
}

TEST_CASE("float runs mirror double runs approximately") {
    RealImage target = patterns::smooth_blobs(32, 32);
    auto cfg = base_config(target, 10, 44);
    auto d = run_gs<double>(cfg);
    auto f = run_gs<float>(cfg);
    CHECK(f.final_error == doctest::Approx(d.final_error).epsilon(2e-2));
}

TEST_CASE("config validation") {
    RealImage target = patterns::checkerboard(16, 16, 2);
    auto cfg = base_config(target, 5, 1);

    auto bad = cfg;
    bad.iterations = 0;
    CHECK_THROWS_AS((void)run_gs<double>(bad), std::invalid_argument);

    bad = cfg;
    bad.weight_clamp_lo = 0.0;
    CHECK_THROWS_AS((void)run_gs<double>(bad), std::invalid_argument);

    bad = cfg;
    bad.weight_clamp_hi = 0.05;  // below lo
    CHECK_THROWS_AS((void)run_gs<double>(bad), std::invalid_argument);

    bad = cfg;
    bad.lt_initial_fraction = 0.0;
    CHECK_THROWS_AS((void)run_gs<double>(bad), std::invalid_argument);

    bad = cfg;
    bad.target.amplitude.data[3] = -0.5;
    CHECK_THROWS_AS((void)run_gs<double>(bad), std::invalid_argument);

    // Variant-specific entry points reject mismatched configs.
    CHECK_THROWS_AS((void)run_weighted_gs<double>(cfg), std::invalid_argument);
    auto wcfg = cfg;
    wcfg.variant = IftaVariant::WeightedGS;
    CHECK_THROWS_AS((void)run_gs<double>(wcfg), std::invalid_argument);
    CHECK_THROWS_AS((void)run_liu_taghizadeh<double>(cfg), std::invalid_argument);
}

TEST_CASE("near-field propagation plugs into the loop") {
    FresnelParams p;
    p.wavelength = 532e-9;
    p.distance = 0.15;
    p.pixel_pitch_x = 8e-6;
    p.pixel_pitch_y = 8e-6;
    auto prop = Propagator<double>::fresnel(32, 32, p);

    RealImage target = patterns::letter_a(32, 32);
    normalize_image(target, Normalization::UnitEnergy);
    auto cfg = base_config(target, 15, 9);
    auto rep = run_gs<double>(cfg, &prop);
    CHECK(rep.final_error < rep.trace.points.front().second);
    CHECK(rep.replay.data == prop.forward(rep.hologram).data);
}
