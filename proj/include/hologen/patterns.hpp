#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hologen/field.hpp"
#include "hologen/target.hpp"

namespace hologen {
namespace patterns {

// Binary checkerboard with square cells.
inline RealImage checkerboard(int width, int height, int cell = 8) {
    if (cell < 1) throw std::invalid_argument("checkerboard: cell must be >= 1");
    RealImage img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = ((x / cell + y / cell) & 1) ? 1.0 : 0.0;
    return img;
}

// Block capital letter from an 8x8 bitmap, nearest-neighbour scaled to the
// requested size. MSB of each row byte is the leftmost pixel.
inline RealImage letter_a(int width, int height) {
    static constexpr uint8_t rows[8] = {0x18, 0x3C, 0x66, 0x66, 0x7E, 0x66, 0x66, 0x00};
    RealImage img(width, height);
    for (int y = 0; y < height; ++y) {
        int by = static_cast<int>(static_cast<int64_t>(y) * 8 / height);
        for (int x = 0; x < width; ++x) {
            int bx = static_cast<int>(static_cast<int64_t>(x) * 8 / width);
            img.at(x, y) = (rows[by] >> (7 - bx)) & 1 ? 1.0 : 0.0;
        }
    }
    return img;
}

// Evenly spaced grid of single bright pixels.
inline RealImage spot_array(int width, int height, int spots_x = 4, int spots_y = 4) {
    if (spots_x < 1 || spots_y < 1 || spots_x > width || spots_y > height)
        throw std::invalid_argument("spot_array: spot counts must fit the image");
    RealImage img(width, height);
    for (int j = 0; j < spots_y; ++j) {
        int y = static_cast<int>((j + 0.5) * height / spots_y);
        for (int i = 0; i < spots_x; ++i) {
            int x = static_cast<int>((i + 0.5) * width / spots_x);
            img.at(x, y) = 1.0;
        }
    }
    return img;
}

// Deterministic smooth grey-level image (sum of fixed Gaussian blobs over a
// gentle gradient), peak-normalized. Stands in for a natural photograph.
inline RealImage smooth_blobs(int width, int height) {
    struct Blob {
        double cx, cy, sigma, amp;
    };
    static constexpr Blob blobs[] = {
        {0.30, 0.35, 0.16, 1.00},
        {0.68, 0.28, 0.10, 0.75},
        {0.62, 0.70, 0.20, 0.90},
        {0.22, 0.74, 0.08, 0.60},
    };
    RealImage img(width, height);
    for (int y = 0; y < height; ++y) {
        double fy = (y + 0.5) / height;
        for (int x = 0; x < width; ++x) {
            double fx = (x + 0.5) / width;
            double v = 0.08 + 0.10 * fx + 0.06 * fy;
            for (const Blob& b : blobs) {
                double dx = fx - b.cx, dy = fy - b.cy;
                v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
            }
            img.at(x, y) = v;
        }
    }
    normalize_image(img, Normalization::MaxToOne);
    return img;
}

} // namespace patterns
} // namespace hologen
