#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hologen {

// Which plane a field lives in. The aperture plane holds the modulator
// pattern, the replay plane holds its far-field (or Fresnel) image.
enum class Domain { Aperture, Replay };

enum class Precision { F32, F64 };

inline const char* to_string(Precision p) {
    return p == Precision::F32 ? "f32" : "f64";
}

inline int scalar_bytes(Precision p) {
    return p == Precision::F32 ? 4 : 8;
}

// Dense row-major complex field. data[y * nx + x], x fastest.
template <typename T>
struct ComplexField {
    int nx = 0;
    int ny = 0;
    Domain domain = Domain::Aperture;
    std::vector<std::complex<T>> data;

    ComplexField() = default;
    ComplexField(int nx_, int ny_, Domain d)
        : nx(nx_), ny(ny_), domain(d) {
        if (nx_ <= 0 || ny_ <= 0)
            throw std::invalid_argument("ComplexField: dimensions must be positive");
        data.assign(static_cast<size_t>(nx_) * ny_, std::complex<T>(0, 0));
    }

    size_t size() const { return data.size(); }
    std::complex<T>& at(int x, int y) { return data[static_cast<size_t>(y) * nx + x]; }
    const std::complex<T>& at(int x, int y) const { return data[static_cast<size_t>(y) * nx + x]; }
};

// Real-valued image, row-major doubles. Values are finite and non-negative;
// the range depends on the normalization that produced it (max-to-one images
// stay in [0,1], unit-energy images may exceed 1).
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("RealImage: dimensions must be positive");
        data.assign(static_cast<size_t>(w) * h, fill);
    }

    size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Boolean region-of-interest mask with a cached population count.
struct RegionMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    RegionMask() = default;
    RegionMask(int w, int h, bool fill = false) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("RegionMask: dimensions must be positive");
        data.assign(static_cast<size_t>(w) * h, fill ? 1 : 0);
    }

    static RegionMask full(int w, int h) { return RegionMask(w, h, true); }

    bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }

    size_t covered() const {
        size_t n = 0;
        for (uint8_t v : data) n += (v != 0);
        return n;
    }
};

template <typename T>
inline bool all_finite(const ComplexField<T>& f) {
    for (const auto& z : f.data)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

inline bool all_finite(const RealImage& img) {
    for (double v : img.data)
        if (!std::isfinite(v)) return false;
    return true;
}

template <typename T>
inline void require_finite(const ComplexField<T>& f, const std::string& what) {
    if (!all_finite(f))
        throw std::invalid_argument(what + ": field contains non-finite values");
}

inline void require_finite(const RealImage& img, const std::string& what) {
    if (!all_finite(img))
        throw std::invalid_argument(what + ": image contains non-finite values");
}

// Total energy sum(|z|^2), accumulated sequentially in double.
template <typename T>
inline double field_energy(const ComplexField<T>& f) {
    double e = 0.0;
    for (const auto& z : f.data) {
        double re = z.real(), im = z.imag();
        e += re * re + im * im;
    }
    return e;
}

inline double image_energy(const RealImage& img) {
    double e = 0.0;
    for (double v : img.data) e += v * v;
    return e;
}

} // namespace hologen
