#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "jnoise/core.hpp"
#include "jnoise/dct.hpp"

namespace jnoise {

// Deterministic generator (splitmix64 core) with explicit formulas for the
// variates, so a seed reproduces the same stream on any platform/stdlib.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {  // Box-Muller
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    double laplacian(double rate) {  // inverse CDF
        const double u = uniform() - 0.5;
        return -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u) / rate;
    }

    /// Fork a statistically independent stream (for per-image seeding).
    static uint64_t derive_seed(uint64_t base, uint64_t index) {
        Rng r(base ^ (0xd1342543de82ef95ull * (index + 1)));
        return r.next_u64();
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Natural-image stand-in: a smooth low-pass field (wide DC spread, mild
// inter-block correlation) plus per-block AC texture with Laplacian
// coefficients whose scale decays with frequency. Integer-valued, [0, 255].
struct SynthParams {
    double base_lo = 48.0;
    double base_hi = 208.0;
    int control_spacing = 32;  // pixels between smooth-field control points
    double ac_sigma = 36.0;    // coefficient sigma at the lowest AC frequency
    double ac_decay = 1.25;    // sigma_u = ac_sigma / (r + c)^ac_decay
};

inline Plane synth_image(int width, int height, uint64_t seed, const SynthParams& p = {}) {
    if (width % kBlockDim != 0 || height % kBlockDim != 0)
        throw ShapeError("synth_image: dimensions must be multiples of 8");
    Rng rng(seed);

    // Smooth field via cosine-interpolated random control grid.
    const int sp = p.control_spacing;
    const int gx = width / sp + 2, gy = height / sp + 2;
    std::vector<double> grid(static_cast<size_t>(gx) * gy);
    for (double& g : grid) g = rng.uniform(p.base_lo, p.base_hi);
    auto smooth = [](double t) { return 0.5 - 0.5 * std::cos(std::numbers::pi * t); };

    Plane img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int cx = x / sp, cy = y / sp;
            const double tx = smooth(static_cast<double>(x % sp) / sp);
            const double ty = smooth(static_cast<double>(y % sp) / sp);
            const double g00 = grid[static_cast<size_t>(cy) * gx + cx];
            const double g01 = grid[static_cast<size_t>(cy) * gx + cx + 1];
            const double g10 = grid[static_cast<size_t>(cy + 1) * gx + cx];
            const double g11 = grid[static_cast<size_t>(cy + 1) * gx + cx + 1];
            img.at(y, x) = (g00 * (1 - tx) + g01 * tx) * (1 - ty) + (g10 * (1 - tx) + g11 * tx) * ty;
        }

    // Per-block spectral texture.
    std::array<double, kBlockArea> sigma{};
    for (int r = 0; r < kBlockDim; ++r)
        for (int c = 0; c < kBlockDim; ++c)
            if (r + c > 0)
                sigma[static_cast<size_t>(r) * kBlockDim + c] =
                    p.ac_sigma / std::pow(static_cast<double>(r + c), p.ac_decay);

    for (int br = 0; br < img.blocks_y(); ++br)
        for (int bc = 0; bc < img.blocks_x(); ++bc) {
            SpectrumBlock spec;
            for (size_t u = 1; u < kBlockArea; ++u)
                spec[u] = sigma[u] > 0.0 ? rng.laplacian(std::sqrt(2.0) / sigma[u]) : 0.0;
            const PixelBlock texture = inverse_dct(spec);
            for (int r = 0; r < kBlockDim; ++r)
                for (int c = 0; c < kBlockDim; ++c)
                    img.at(br * kBlockDim + r, bc * kBlockDim + c) += texture.at(r, c);
        }

    for (double& v : img.samples()) {
        v = static_cast<double>(round_to_int(v));
        v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
    }
    return img;
}

}  // namespace jnoise
