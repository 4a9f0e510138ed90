#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "hologen/field.hpp"

namespace hologen {

// Transform backend interface. Both directions are unitary: a forward
// transform followed by an inverse returns the input (up to rounding).
// forward:  F[u,v] = 1/sqrt(Nx*Ny) * sum_{x,y} f[x,y] exp(-2*pi*i*(ux/Nx + vy/Ny))
// inverse:  f[x,y] = 1/sqrt(Nx*Ny) * sum_{u,v} F[u,v] exp(+2*pi*i*(ux/Nx + vy/Ny))
// The zero-frequency term sits at index (0,0); use fftshift to centre it.
template <typename T>
class FftBackend {
public:
    virtual ~FftBackend() = default;
    virtual const char* name() const = 0;
    // in and out are nx*ny row-major arrays; in == out is allowed.
    virtual void forward(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) = 0;
    virtual void inverse(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) = 0;
    // Optional hook: prepare internal state for a size before timing it.
    virtual void warm(int nx, int ny) { (void)nx; (void)ny; }
};

// Direct O(N^4) evaluation of the definition above, always accumulating in
// double. Far too slow for real use; it exists as the independent reference
// the fast backend is checked against.
template <typename T>
class NaiveDftBackend : public FftBackend<T> {
public:
    const char* name() const override { return "naive-dft"; }

    void forward(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) override {
        run(nx, ny, in, out, -1.0);
    }
    void inverse(int nx, int ny, const std::complex<T>* in, std::complex<T>* out) override {
        run(nx, ny, in, out, +1.0);
    }

private:
    static void run(int nx, int ny, const std::complex<T>* in, std::complex<T>* out, double sign) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        std::vector<std::complex<double>> src(in, in + static_cast<size_t>(nx) * ny);
        std::vector<std::complex<double>> dst(static_cast<size_t>(nx) * ny);
        // Twiddle tables indexed by (u*x) mod nx and (v*y) mod ny keep the
        // angle arguments small and exact.
        std::vector<std::complex<double>> wx(nx), wy(ny);
        for (int k = 0; k < nx; ++k) {
            double a = sign * two_pi * k / nx;
            wx[k] = {std::cos(a), std::sin(a)};
        }
        for (int k = 0; k < ny; ++k) {
            double a = sign * two_pi * k / ny;
            wy[k] = {std::cos(a), std::sin(a)};
        }
        double norm = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
        for (int v = 0; v < ny; ++v) {
            for (int u = 0; u < nx; ++u) {
                std::complex<double> acc(0, 0);
                for (int y = 0; y < ny; ++y) {
                    std::complex<double> row = wy[static_cast<size_t>(v) * y % ny];
                    for (int x = 0; x < nx; ++x) {
                        acc += src[static_cast<size_t>(y) * nx + x] *
                               (wx[static_cast<size_t>(u) * x % nx] * row);
                    }
                }
                dst[static_cast<size_t>(v) * nx + u] = acc * norm;
            }
        }
        for (size_t i = 0; i < dst.size(); ++i)
            out[i] = std::complex<T>(static_cast<T>(dst[i].real()), static_cast<T>(dst[i].imag()));
    }
};

// Production backend (FFTW). Plans are cached per (nx, ny, direction) and
// reused; planning is serialized, execution is thread-safe. Thread count
// comes from HOLOGEN_THREADS (default 1).
template <typename T>
FftBackend<T>& default_fft_backend();

// Separate production backend instance with an explicit thread count, for
// callers (benchmarks) that must control parallelism regardless of the
// environment.
template <typename T>
std::unique_ptr<FftBackend<T>> make_fft_backend(int threads);

// Transforms an aperture-plane field to the replay plane. Validates that the
// input is finite and aperture-domain.
template <typename T>
ComplexField<T> fft_forward(const ComplexField<T>& f, FftBackend<T>* backend = nullptr) {
    if (f.domain != Domain::Aperture)
        throw std::invalid_argument("fft_forward: input must be aperture-domain");
    require_finite(f, "fft_forward");
    FftBackend<T>& b = backend ? *backend : default_fft_backend<T>();
    ComplexField<T> out(f.nx, f.ny, Domain::Replay);
    b.forward(f.nx, f.ny, f.data.data(), out.data.data());
    return out;
}

template <typename T>
ComplexField<T> fft_inverse(const ComplexField<T>& F, FftBackend<T>* backend = nullptr) {
    if (F.domain != Domain::Replay)
        throw std::invalid_argument("fft_inverse: input must be replay-domain");
    require_finite(F, "fft_inverse");
    FftBackend<T>& b = backend ? *backend : default_fft_backend<T>();
    ComplexField<T> out(F.nx, F.ny, Domain::Aperture);
    b.inverse(F.nx, F.ny, F.data.data(), out.data.data());
    return out;
}

// Cyclic shift moving the zero-frequency sample to the centre: index (0,0)
// lands at (ceil(nx/2), ceil(ny/2)). Applying it twice on even sizes is the
// identity; on odd sizes the inverse is ifftshift (floor convention), which
// this library does not need.
template <typename T>
ComplexField<T> fftshift(const ComplexField<T>& f) {
    ComplexField<T> out(f.nx, f.ny, f.domain);
    int sx = (f.nx + 1) / 2, sy = (f.ny + 1) / 2;
    for (int y = 0; y < f.ny; ++y) {
        int yy = (y + sy) % f.ny;
        for (int x = 0; x < f.nx; ++x)
            out.data[static_cast<size_t>(yy) * f.nx + (x + sx) % f.nx] =
                f.data[static_cast<size_t>(y) * f.nx + x];
    }
    return out;
}

} // namespace hologen
