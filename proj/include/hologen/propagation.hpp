#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hologen/fft.hpp"

namespace hologen {

// Near-field geometry. Wavelength and pitches are in metres; distance is the
// aperture-to-replay separation and must be non-zero (negative propagates
// backwards).
struct FresnelParams {
    double wavelength = 0;
    double distance = 0;
    double pixel_pitch_x = 0;
    double pixel_pitch_y = 0;

    void validate() const {
        if (!(wavelength > 0) || !std::isfinite(wavelength))
            throw std::invalid_argument("FresnelParams: wavelength must be positive");
        if (distance == 0 || !std::isfinite(distance))
            throw std::invalid_argument("FresnelParams: distance must be non-zero");
        if (!(pixel_pitch_x > 0) || !(pixel_pitch_y > 0) ||
            !std::isfinite(pixel_pitch_x) || !std::isfinite(pixel_pitch_y))
            throw std::invalid_argument("FresnelParams: pixel pitches must be positive");
    }

    bool operator==(const FresnelParams&) const = default;
};

// Quadratic phase factor Q[x,y] = exp(i*pi*((x-nx/2)^2*px^2 + (y-ny/2)^2*py^2)
// / (wavelength*distance)), centred on the pixel grid. |Q| = 1 everywhere.
template <typename T>
std::vector<std::complex<T>> make_fresnel_phase(int nx, int ny, const FresnelParams& p) {
    p.validate();
    std::vector<std::complex<T>> q(static_cast<size_t>(nx) * ny);
    const double pi = 3.1415926535897932384626433832795;
    double cx = nx / 2.0, cy = ny / 2.0;
    double scale = pi / (p.wavelength * p.distance);
    for (int y = 0; y < ny; ++y) {
        double dy = (y - cy) * p.pixel_pitch_y;
        double ty = dy * dy;
        for (int x = 0; x < nx; ++x) {
            double dx = (x - cx) * p.pixel_pitch_x;
            double phase = scale * (dx * dx + ty);
            q[static_cast<size_t>(y) * nx + x] =
                std::complex<T>(static_cast<T>(std::cos(phase)), static_cast<T>(std::sin(phase)));
        }
    }
    return q;
}

// Propagation between the aperture and replay planes. The default is the
// far-field (Fourier) transform; the Fresnel variant multiplies the aperture
// by a quadratic phase before the forward transform and removes it after the
// inverse, so both variants stay unitary and mutually inverse.
template <typename T>
class Propagator {
public:
    static Propagator fourier(FftBackend<T>* backend = nullptr) {
        Propagator p;
        p.backend_ = backend;
        return p;
    }

    static Propagator fresnel(int nx, int ny, const FresnelParams& params,
                              FftBackend<T>* backend = nullptr) {
        Propagator p;
        p.backend_ = backend;
        p.q_ = make_fresnel_phase<T>(nx, ny, params);
        p.qnx_ = nx;
        p.qny_ = ny;
        return p;
    }

    bool is_fresnel() const { return !q_.empty(); }

    ComplexField<T> forward(const ComplexField<T>& f) const {
        if (q_.empty()) return fft_forward(f, backend_);
        check_dims(f.nx, f.ny);
        ComplexField<T> tmp(f.nx, f.ny, Domain::Aperture);
        for (size_t i = 0; i < f.data.size(); ++i) tmp.data[i] = f.data[i] * q_[i];
        return fft_forward(tmp, backend_);
    }

    ComplexField<T> inverse(const ComplexField<T>& F) const {
        if (q_.empty()) return fft_inverse(F, backend_);
        check_dims(F.nx, F.ny);
        ComplexField<T> out = fft_inverse(F, backend_);
        for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= std::conj(q_[i]);
        return out;
    }

    // Multiplier applied to aperture pixel (x,y) before the transform. A
    // single-pixel aperture change of d alters every replay sample by
    // d * aperture_factor(x,y) * twiddle(u,v,x,y) / sqrt(nx*ny).
    std::complex<T> aperture_factor(int x, int y) const {
        if (q_.empty()) return std::complex<T>(1, 0);
        return q_[static_cast<size_t>(y) * qnx_ + x];
    }

    FftBackend<T>* backend() const { return backend_; }

private:
    void check_dims(int nx, int ny) const {
        if (nx != qnx_ || ny != qny_)
            throw std::invalid_argument("Propagator: field size does not match Fresnel phase");
    }

    FftBackend<T>* backend_ = nullptr;
    std::vector<std::complex<T>> q_;
    int qnx_ = 0, qny_ = 0;
};

// Convenience wrappers for one-off near-field propagation.
template <typename T>
ComplexField<T> fresnel_forward(const ComplexField<T>& f, const FresnelParams& p,
                                FftBackend<T>* backend = nullptr) {
    if (f.domain != Domain::Aperture)
        throw std::invalid_argument("fresnel_forward: input must be aperture-domain");
    return Propagator<T>::fresnel(f.nx, f.ny, p, backend).forward(f);
}

template <typename T>
ComplexField<T> fresnel_inverse(const ComplexField<T>& F, const FresnelParams& p,
                                FftBackend<T>* backend = nullptr) {
    if (F.domain != Domain::Replay)
        throw std::invalid_argument("fresnel_inverse: input must be replay-domain");
    return Propagator<T>::fresnel(F.nx, F.ny, p, backend).inverse(F);
}

} // namespace hologen
