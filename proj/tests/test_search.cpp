#include <doctest.h>

#include <cmath>

#include "hologen/patterns.hpp"
#include "hologen/search.hpp"

using namespace hologen;

namespace {

ComplexField<double> random_states_field(const Quantiser<double>& quant, int nx, int ny,
                                         uint64_t seed, std::vector<int32_t>* levels_out) {
    ComplexField<double> f(nx, ny, Domain::Aperture);
    Rng rng = Rng(seed).fork(0);
    levels_out->resize(f.data.size());
    for (size_t i = 0; i < f.data.size(); ++i) {
        int k = static_cast<int>(rng.below(static_cast<uint32_t>(quant.level_count())));
        (*levels_out)[i] = k;
        f.data[i] = quant.state_value(i, k);
    }
    return f;
}

TargetSpec simple_target(int nx, int ny) {
    TargetSpec t;
    t.amplitude = patterns::checkerboard(nx, ny, 2);
    normalize_image(t.amplitude, Normalization::UnitEnergy);
    return t;
}

SearchConfig ds_config(int nx, int ny, int64_t evals, uint64_t seed) {
    SearchConfig cfg;
    cfg.variant = SearchVariant::DirectSearch;
    cfg.max_evaluations = evals;
    cfg.slm = SlmSpec::binary_phase();
    cfg.target = simple_target(nx, ny);
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("search config validation") {
    auto cfg = ds_config(8, 8, 10, 1);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.max_evaluations = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.sa_t0 = 0.5;  // schedule parameters are annealing-only
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.variant = SearchVariant::SimulatedAnnealing;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.sa_t0 = 0.1;
    bad.sa_decay = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.sa_decay = 0.99;
    CHECK_NOTHROW(bad.validate());

    bad = cfg;
    bad.resync_every = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trial error matches a full recomputation") {
    // Oracle: write the proposed value into a copy of the hologram, run a
    // full double-precision transform, and evaluate the public metric. The
    // streamed trial must agree to 1e-10 for every metric family.
    const int n = 8;
    SlmSpec slm = SlmSpec::full_circle_phase(4);
    Quantiser<double> quant(slm, n, n);

    TargetSpec tgt;
    tgt.amplitude = RealImage(n, n);
    RealImage phase(n, n);
    RegionMask mask(n, n);
    Rng trng(900);
    for (int i = 0; i < n * n; ++i) {
        tgt.amplitude.data[i] = trng.uniform(0.0, 1.0);
        phase.data[i] = trng.uniform01();
        mask.data[i] = trng.uniform01() < 0.6;
    }
    mask.data[5] = 1;
    tgt.phase = phase;

    FresnelParams fres;
    fres.wavelength = 532e-9;
    fres.distance = 0.2;
    fres.pixel_pitch_x = 8e-6;
    fres.pixel_pitch_y = 8e-6;

    std::vector<MetricConfig> metrics(5);
    metrics[1].scale_free = true;
    metrics[2].phase_sensitive = true;
    metrics[3].kind = MetricKind::SSIM;
    metrics[4].phase_sensitive = true;
    metrics[4].scale_free = true;

    RealImage phase_rad(n, n);
    for (int i = 0; i < n * n; ++i) phase_rad.data[i] = phase.data[i] * 6.283185307179586476925286766559;

    for (bool use_mask : {false, true}) {
        for (bool use_fresnel : {false, true}) {
            for (size_t mi = 0; mi < metrics.size(); ++mi) {
                MetricConfig mcfg = metrics[mi];
                if (use_mask) mcfg.mask = mask;

                std::vector<int32_t> lv;
                auto h = random_states_field(quant, n, n, 901, &lv);
                IncrementalReplayState<double> state(h, lv, quant, tgt, mcfg,
                                                     use_fresnel ? &fres : nullptr);

                auto dprop = use_fresnel ? Propagator<double>::fresnel(n, n, fres)
                                         : Propagator<double>::fourier();
                Rng prng(902 + mi);
                for (int trial = 0; trial < 20; ++trial) {
                    int x = static_cast<int>(prng.below(n));
                    int y = static_cast<int>(prng.below(n));
                    int k = static_cast<int>(prng.below(static_cast<uint32_t>(slm.levels)));
                    size_t i = static_cast<size_t>(y) * n + x;
                    auto v = quant.state_value(i, k);

                    double streamed = state.trial_error(x, y, v);

                    auto h2 = state.hologram();
                    h2.data[i] = v;
                    auto R = dprop.forward(h2);
                    double full = evaluate_metric(tgt.amplitude, R, mcfg, &phase_rad);
                    CHECK(std::abs(streamed - full) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("committing a trial keeps the cache exact") {
    const int n = 8;
    SlmSpec slm = SlmSpec::binary_phase();
    Quantiser<double> quant(slm, n, n);
    TargetSpec tgt = simple_target(n, n);

    std::vector<int32_t> lv;
    auto h = random_states_field(quant, n, n, 903, &lv);
    IncrementalReplayState<double> state(h, lv, quant, tgt, MetricConfig{});

    // Flip one pixel and compare the cache against a full transform.
    size_t i0 = 3 * n + 5;
    int flipped = 1 - state.level_at(5, 3);
    incremental_update(state, 5, 3, quant.state_value(i0, flipped));
    CHECK(state.level_at(5, 3) == flipped);
    CHECK(state.accepted() == 1);

    auto h2 = state.hologram();
    auto R = fft_forward(h2);
    auto cache = state.replay_f64();
    for (size_t i = 0; i < R.size(); ++i) CHECK(std::abs(R.data[i] - cache.data[i]) < 1e-10);

    // Re-writing the current value leaves the hologram and error unchanged.
    double before = state.cached_error();
    auto cur = state.hologram().data[i0];
    incremental_update(state, 5, 3, cur);
    CHECK(state.hologram().data[i0] == cur);
    CHECK(state.cached_error() == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("cache drift stays bounded over many updates") {
    const int n = 32;
    SlmSpec slm = SlmSpec::full_circle_phase(4);
    Quantiser<double> quant(slm, n, n);
    TargetSpec tgt = simple_target(n, n);

    std::vector<int32_t> lv;
    auto h = random_states_field(quant, n, n, 904, &lv);
    // Disable the resync cadence for the duration of the walk so the test
    // sees pure incremental drift.
    IncrementalReplayState<double> state(h, lv, quant, tgt, MetricConfig{}, nullptr, 1000000);

    Rng rng(905);
    for (int step = 0; step < 200; ++step) {
        int x = static_cast<int>(rng.below(n));
        int y = static_cast<int>(rng.below(n));
        int k = static_cast<int>(rng.below(4));
        state.update(x, y, quant.state_value(static_cast<size_t>(y) * n + x, k));
    }

    auto R = fft_forward(state.hologram());
    auto cache = state.replay_f64();
    double worst = 0.0;
    for (size_t i = 0; i < R.size(); ++i)
        worst = std::max(worst, std::abs(R.data[i] - cache.data[i]));
    CHECK(worst < 1e-8);

    // A resync must agree with the drifted error to the same bound.
    double drifted = state.cached_error();
    state.resync();
    CHECK(std::abs(state.cached_error() - drifted) < 1e-8);
}

TEST_CASE("float cache keeps double-precision bookkeeping") {
    const int n = 16;
    SlmSpec slm = SlmSpec::binary_phase();
    Quantiser<float> quant(slm, n, n);
    TargetSpec tgt = simple_target(n, n);

    std::vector<int32_t> lv(static_cast<size_t>(n) * n);
    ComplexField<float> h(n, n, Domain::Aperture);
    Rng rng(906);
    for (size_t i = 0; i < h.data.size(); ++i) {
        int k = static_cast<int>(rng.below(2));
        lv[i] = k;
        h.data[i] = quant.state_value(i, k);
    }
    IncrementalReplayState<float> state(h, lv, quant, tgt, MetricConfig{}, nullptr, 1000000);

    for (int step = 0; step < 100; ++step) {
        int x = static_cast<int>(rng.below(n));
        int y = static_cast<int>(rng.below(n));
        size_t i = static_cast<size_t>(y) * n + x;
        state.update(x, y, quant.state_value(i, 1 - state.level_at(x, y)));
    }
    auto R = fft_forward(state.hologram());
    auto cache = state.replay();
    double worst = 0.0;
    for (size_t i = 0; i < R.size(); ++i) {
        std::complex<double> a{R.data[i].real(), R.data[i].imag()};
        std::complex<double> b{cache.data[i].real(), cache.data[i].imag()};
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("incremental update rejects bad inputs") {
    const int n = 8;
    SlmSpec slm = SlmSpec::binary_phase();
    Quantiser<double> quant(slm, n, n);
    TargetSpec tgt = simple_target(n, n);
    std::vector<int32_t> lv;
    auto h = random_states_field(quant, n, n, 907, &lv);
    IncrementalReplayState<double> state(h, lv, quant, tgt, MetricConfig{});

    CHECK_THROWS_WITH_AS(state.update(0, 0, std::complex<double>(0.5, 0.5)),
                         "incremental_update: value is not an allowed state",
                         std::invalid_argument);
    CHECK_THROWS_AS(state.update(-1, 0, std::complex<double>(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(state.update(0, n, std::complex<double>(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS((void)state.trial_error(n, 0, std::complex<double>(1, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(state.commit(0, 0, std::complex<double>(1, 0), 7, 0.0),
                    std::invalid_argument);
}

TEST_CASE("a perfect start accepts nothing") {
    // Make the target the exact replay magnitude of the search's own starting
    // hologram; every candidate flip then strictly worsens the error and the
    // run must end exactly where it began.
    const int n = 16;
    SlmSpec slm = SlmSpec::binary_phase();
    Quantiser<double> quant(slm, n, n);
    const uint64_t seed = 908;

    std::vector<int32_t> lv;
    auto h0 = random_states_field(quant, n, n, seed, &lv);
    auto R0 = fft_forward(h0);

    SearchConfig cfg;
    cfg.variant = SearchVariant::DirectSearch;
    cfg.max_evaluations = 500;
    cfg.slm = slm;
    cfg.target.amplitude = RealImage(n, n);
    for (size_t i = 0; i < R0.size(); ++i) {
        // Same arithmetic as the metric's magnitude computation; std::abs can
        // differ by an ulp and would leave a nonzero initial error.
        double re = R0.data[i].real(), im = R0.data[i].imag();
        cfg.target.amplitude.data[i] = std::sqrt(re * re + im * im);
    }
    cfg.seed = seed;
    cfg.init = SearchInit::RandomStates;

    auto rep = run_direct_search<double>(cfg);
    CHECK(rep.accepted == 0);
    CHECK(rep.hologram.data == h0.data);
    CHECK(rep.trace.points.front().second == 0.0);
    for (const auto& pt : rep.trace.points) CHECK(pt.second == 0.0);
}

TEST_CASE("direct search only ever improves") {
    auto cfg = ds_config(16, 16, 2000, 7);
    cfg.record_decisions = true;
    auto rep = run_direct_search<double>(cfg);

    CHECK(rep.algorithm == "ds");
    CHECK(rep.evaluations == 2000);
    CHECK(rep.decisions.size() == 2000);
    int64_t accepted_decisions = 0;
    for (uint8_t d : rep.decisions) accepted_decisions += d;
    CHECK(accepted_decisions == rep.accepted);
    CHECK(rep.accepted > 0);

    // The error trace never rises, and each accepted step strictly lowers it.
    int64_t strict_drops = 0;
    for (size_t i = 1; i < rep.trace.points.size(); ++i) {
        CHECK(rep.trace.points[i].second <= rep.trace.points[i - 1].second);
        strict_drops += rep.trace.points[i].second < rep.trace.points[i - 1].second;
    }
    CHECK(strict_drops == rep.accepted);
    CHECK(rep.final_error < rep.trace.points.front().second);
}

TEST_CASE("freezing the temperature reproduces greedy decisions") {
    // With t0 = 1e-300 every uphill acceptance probability underflows to
    // zero, so the annealer must walk the exact greedy trajectory.
    auto ds_cfg = ds_config(16, 16, 2000, 11);
    ds_cfg.record_decisions = true;
    auto ds = run_direct_search<double>(ds_cfg);

    auto sa_cfg = ds_cfg;
    sa_cfg.variant = SearchVariant::SimulatedAnnealing;
    sa_cfg.sa_t0 = 1e-300;
    sa_cfg.sa_decay = 0.5;
    auto sa = run_simulated_annealing<double>(sa_cfg);

    CHECK(sa.decisions == ds.decisions);
    CHECK(sa.hologram.data == ds.hologram.data);
    CHECK(sa.accepted == ds.accepted);
    CHECK(sa.final_error == ds.final_error);
}

TEST_CASE("annealing accepts uphill moves while hot") {
    auto cfg = ds_config(16, 16, 2000, 13);
    cfg.variant = SearchVariant::SimulatedAnnealing;
    cfg.sa_t0 = 0.05;
    cfg.sa_decay = 0.999;
    cfg.record_decisions = true;
    auto rep = run_simulated_annealing<double>(cfg);
    CHECK(rep.algorithm == "sa");

    // The running error rises somewhere (an uphill accept), unlike greedy.
    bool rose = false;
    for (size_t i = 1; i < rep.trace.points.size(); ++i)
        rose = rose || rep.trace.points[i].second > rep.trace.points[i - 1].second;
    CHECK(rose);

    // The best-so-far trace never rises and the reported hologram realizes it.
    REQUIRE(rep.extra_traces.size() == 1);
    const auto& best = rep.extra_traces[0];
    CHECK(best.name == "best");
    for (size_t i = 1; i < best.points.size(); ++i)
        CHECK(best.points[i].second <= best.points[i - 1].second);
    CHECK(rep.final_error == doctest::Approx(best.points.back().second).epsilon(1e-9));
}

TEST_CASE("searches are deterministic and seed-sensitive") {
    auto cfg = ds_config(16, 16, 1000, 21);
    auto a = run_direct_search<double>(cfg);
    auto b = run_direct_search<double>(cfg);
    CHECK(a.hologram.data == b.hologram.data);
    CHECK(a.final_error == b.final_error);
    CHECK(a.accepted == b.accepted);

    cfg.seed = 22;
    auto c = run_direct_search<double>(cfg);
    CHECK(c.hologram.data != a.hologram.data);
}

TEST_CASE("pixel orders visit different proposals") {
    auto cfg = ds_config(16, 16, 1000, 23);
    auto uniform = run_direct_search<double>(cfg);
    cfg.pixel_order = PixelOrder::RasterSweep;
    auto raster1 = run_direct_search<double>(cfg);
    auto raster2 = run_direct_search<double>(cfg);
    CHECK(raster1.hologram.data == raster2.hologram.data);
    CHECK(raster1.hologram.data != uniform.hologram.data);
}

TEST_CASE("resync cadence does not change the outcome materially") {
    auto cfg = ds_config(16, 16, 1500, 29);
    cfg.resync_every = 1;
    auto every = run_direct_search<double>(cfg);
    cfg.resync_every = 1000000;
    auto never = run_direct_search<double>(cfg);
    CHECK(std::abs(every.final_error - never.final_error) < 1e-9);
    CHECK(every.accepted == never.accepted);
}

TEST_CASE("search entry points reject mismatched variants") {
    auto cfg = ds_config(8, 8, 10, 1);
    CHECK_THROWS_AS((void)run_simulated_annealing<double>(cfg), std::invalid_argument);
    cfg.variant = SearchVariant::SimulatedAnnealing;
    cfg.sa_t0 = 0.1;
    cfg.sa_decay = 0.9;
    CHECK_THROWS_AS((void)run_direct_search<double>(cfg), std::invalid_argument);
}

TEST_CASE("near-field search stays consistent with its propagator") {
    FresnelParams p;
    p.wavelength = 532e-9;
    p.distance = 0.25;
    p.pixel_pitch_x = 8e-6;
    p.pixel_pitch_y = 8e-6;

    auto cfg = ds_config(16, 16, 500, 31);
    auto rep = run_direct_search<double>(cfg, &p);
    auto prop = Propagator<double>::fresnel(16, 16, p);
    CHECK(rep.replay.data == prop.forward(rep.hologram).data);
    CHECK(rep.final_error == doctest::Approx(mse(cfg.target.amplitude, rep.replay)).epsilon(1e-12));
}
