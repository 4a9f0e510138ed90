#include <doctest.h>

#include <cmath>

#include "hologen/field.hpp"
#include "hologen/patterns.hpp"
#include "hologen/rng.hpp"
#include "hologen/target.hpp"

using namespace hologen;

TEST_CASE("complex field construction and indexing") {
    ComplexField<double> f(3, 2, Domain::Aperture);
    CHECK(f.size() == 6);
    CHECK(f.domain == Domain::Aperture);
    f.at(2, 1) = {1.0, -2.0};
    CHECK(f.data[5] == std::complex<double>(1.0, -2.0));

    CHECK_THROWS_AS(ComplexField<double>(0, 4, Domain::Aperture), std::invalid_argument);
    CHECK_THROWS_AS(ComplexField<float>(4, -1, Domain::Replay), std::invalid_argument);
    CHECK_THROWS_AS(RealImage(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(RegionMask(3, 0), std::invalid_argument);
}

TEST_CASE("region mask coverage") {
    RegionMask m(4, 4);
    CHECK(m.covered() == 0);
    m.set(1, 2, true);
    m.set(3, 3, true);
    CHECK(m.covered() == 2);
    CHECK(m.at(1, 2));
    CHECK_FALSE(m.at(0, 0));
    CHECK(RegionMask::full(5, 3).covered() == 15);
}

TEST_CASE("normalize_image max-to-one") {
    RealImage img(2, 2);
    img.data = {0.1, 0.5, 0.25, 0.0};
    normalize_image(img, Normalization::MaxToOne);
    CHECK(img.data[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(img.data[0] == doctest::Approx(0.2).epsilon(1e-15));

    RealImage black(3, 3);
    normalize_image(black, Normalization::MaxToOne);
    for (double v : black.data) CHECK(v == 0.0);
}

TEST_CASE("normalize_image unit energy") {
    // 2x2 image with two equal nonzero pixels: solving sum(v^2) = 4 puts each
    // nonzero pixel at sqrt(2).
    RealImage img(2, 2);
    img.data = {0.0, 1.0, 1.0, 0.0};
    normalize_image(img, Normalization::UnitEnergy);
    CHECK(img.data[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(img.data[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(img.data[0] == 0.0);
    CHECK(image_energy(img) == doctest::Approx(4.0).epsilon(1e-15));

    RealImage black(2, 2);
    CHECK_THROWS_AS(normalize_image(black, Normalization::UnitEnergy), std::invalid_argument);
}

TEST_CASE("rng determinism and stream independence") {
    Rng a(123), b(123);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

    // Forking must not disturb the parent stream.
    Rng c(7), d(7);
    c.next_u64();
    c.next_u64();
    Rng child = c.fork(3);
    d.next_u64();
    d.next_u64();
    for (int i = 0; i < 16; ++i) CHECK(c.next_u64() == d.next_u64());

    // Distinct fork streams differ from each other and the parent.
    Rng e(7);
    Rng f0 = e.fork(0), f1 = e.fork(1);
    CHECK(f0.next_u64() != f1.next_u64());
    (void)child;
}

TEST_CASE("rng bounded draws") {
    Rng r(99);
    for (int i = 0; i < 10000; ++i) {
        CHECK(r.below(7) < 7);
        double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng s(99);
    double v = s.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
}

TEST_CASE("seed_random_phase basics") {
    RealImage zeros(8, 8);
    Rng r1(1), r2(2);
    auto z1 = seed_random_phase<double>(zeros, r1);
    auto z2 = seed_random_phase<double>(zeros, r2);
    for (size_t i = 0; i < z1.size(); ++i) {
        CHECK(z1.data[i] == std::complex<double>(0, 0));
        CHECK(z2.data[i] == std::complex<double>(0, 0));
    }

    RealImage amp(16, 16, 0.5);
    amp.data[5] = 0.9;
    Rng ra(42), rb(42);
    auto fa = seed_random_phase<double>(amp, ra);
    auto fb = seed_random_phase<double>(amp, rb);
    CHECK(fa.data == fb.data);

    for (size_t i = 0; i < fa.size(); ++i)
        CHECK(std::abs(fa.data[i]) == doctest::Approx(amp.data[i]).epsilon(1e-14));
}

TEST_CASE("seed_random_phase phase histogram is uniform") {
    // 4096 draws into 8 angular bins; each bin expects 512 with binomial
    // sigma sqrt(4096*(1/8)*(7/8)) = 21.17, so the 5-sigma band is +/-105.83
    // (tests/oracles/derive_fixtures.py).
    RealImage amp(64, 64, 1.0);
    Rng rng(42);
    auto f = seed_random_phase<double>(amp, rng);
    constexpr double two_pi = 6.283185307179586476925286766559;
    int bins[8] = {0};
    for (const auto& z : f.data) {
        double theta = std::atan2(z.imag(), z.real());
        if (theta < 0) theta += two_pi;
        int b = static_cast<int>(theta / (two_pi / 8));
        if (b > 7) b = 7;
        ++bins[b];
    }
    for (int b = 0; b < 8; ++b) {
        CHECK(bins[b] > 512 - 106);
        CHECK(bins[b] < 512 + 106);
    }
}

TEST_CASE("require_finite rejects non-finite values") {
    ComplexField<double> f(2, 2, Domain::Aperture);
    f.data[3] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(require_finite(f, "test"), std::invalid_argument);

    RealImage img(2, 2);
    img.data[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(require_finite(img, "test"), std::invalid_argument);
}

TEST_CASE("test patterns") {
    RealImage cb = patterns::checkerboard(8, 8, 2);
    CHECK(cb.at(0, 0) == 0.0);
    CHECK(cb.at(2, 0) == 1.0);
    CHECK(cb.at(0, 2) == 1.0);
    CHECK(cb.at(2, 2) == 0.0);

    RealImage spots = patterns::spot_array(64, 64, 4, 4);
    size_t lit = 0;
    for (double v : spots.data) {
        CHECK((v == 0.0 || v == 1.0));
        lit += v == 1.0;
    }
    CHECK(lit == 16);
    CHECK(spots.at(8, 8) == 1.0);
    CHECK(spots.at(24, 40) == 1.0);

    RealImage a = patterns::letter_a(64, 64);
    CHECK(a.width == 64);
    CHECK(a.at(28, 4) == 1.0);
    CHECK(a.at(0, 0) == 0.0);
    size_t on = 0;
    for (double v : a.data) on += v == 1.0;
    CHECK(on > 64);
    CHECK(on < 64 * 64 / 2);

    RealImage blobs = patterns::smooth_blobs(64, 64);
    double mx = 0.0;
    for (double v : blobs.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        mx = std::max(mx, v);
    }
    CHECK(mx == 1.0);
}

TEST_CASE("field energy accumulates in double") {
    ComplexField<float> f(2, 1, Domain::Aperture);
    f.data = {{3.0f, 4.0f}, {0.0f, 1.0f}};
    CHECK(field_energy(f) == doctest::Approx(26.0).epsilon(1e-12));
}
