#pragma once

#include <cstdint>
#include <random>

#include "hologen/field.hpp"

namespace hologen {

namespace detail {
// splitmix64 finalizer; used to derive independent child seeds.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d4a2c62a2b3b9full;
    return z ^ (z >> 31);
}
} // namespace detail

// Deterministic PRNG wrapper. The engine (mt19937_64) and every bit mapping
// below are part of the reproducibility contract: a given seed produces the
// same stream on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Top 53 bits scaled into [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Multiply-shift mapping onto [0, n). Bias is at most n * 2^-64.
    uint32_t below(uint32_t n) {
        return static_cast<uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Independent child stream; forking does not disturb this stream.
    Rng fork(uint64_t stream) const {
        return Rng(detail::mix64(seed_ ^ detail::mix64(stream + 1)));
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

// Builds a field whose amplitude is `amp` and whose phase is uniform random
// in [0, 2*pi), drawn row-major. Zero-amplitude pixels still consume a draw,
// so the stream position depends only on the image size.
template <typename T>
ComplexField<T> seed_random_phase(const RealImage& amp, Rng& rng,
                                  Domain domain = Domain::Replay) {
    require_finite(amp, "seed_random_phase");
    ComplexField<T> out(amp.width, amp.height, domain);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (size_t i = 0; i < amp.data.size(); ++i) {
        double theta = two_pi * rng.uniform01();
        double a = amp.data[i];
        out.data[i] = std::complex<T>(static_cast<T>(a * std::cos(theta)),
                                      static_cast<T>(a * std::sin(theta)));
    }
    return out;
}

} // namespace hologen
