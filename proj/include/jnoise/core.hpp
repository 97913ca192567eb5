#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jnoise {

inline constexpr int kBlockDim = 8;
inline constexpr int kBlockArea = kBlockDim * kBlockDim;
inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a 64-bit digest, used for input fingerprints in run manifests.
inline uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Error taxonomy. The CLI maps these onto distinct exit codes.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Nearest-integer rounding, halves away from zero. This is the [.] operator
/// used by both lossy stages; it is odd (round(-v) == -round(v)) and satisfies
/// |v - round(v)| <= 0.5.
inline long long round_to_int(double v) {
    if (!std::isfinite(v)) throw DomainError("round_to_int: non-finite input");
    return std::llround(v);
}

/// Alternative tie-break (floor(v + 1/2)), kept only so tests can probe how
/// the noise identities react to the rounding convention.
inline long long round_half_up(double v) {
    if (!std::isfinite(v)) throw DomainError("round_half_up: non-finite input");
    return static_cast<long long>(std::floor(v + 0.5));
}

namespace detail {
struct PixelTag;
struct SpectrumTag;
}  // namespace detail

// One 8x8 block of samples, row-major. The tag keeps pixel-domain and
// DCT-domain blocks from mixing; index u = 8*r + c, u = 0 is DC.
template <typename Tag>
struct Block8 {
    std::array<double, kBlockArea> v{};

    double& at(int r, int c) { return v[static_cast<size_t>(r) * kBlockDim + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * kBlockDim + c]; }
    double& operator[](size_t u) { return v[u]; }
    double operator[](size_t u) const { return v[u]; }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

using PixelBlock = Block8<detail::PixelTag>;
using SpectrumBlock = Block8<detail::SpectrumTag>;

// A 2-D grid of real-valued samples, row-major. Used for both pixel planes
// and per-block spectral planes (same geometry, coefficient (r,c) of block
// (br,bc) lives at (8*br + r, 8*bc + c)).
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw ShapeError("Plane: dimensions must be positive");
        data_.assign(static_cast<size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }

    double& at(int row, int col) { return data_[static_cast<size_t>(row) * width_ + col]; }
    double at(int row, int col) const { return data_[static_cast<size_t>(row) * width_ + col]; }

    std::span<double> samples() { return data_; }
    std::span<const double> samples() const { return data_; }

    bool all_finite() const {
        for (double x : data_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    bool integer_valued(double tol = 0.0) const {
        for (double x : data_)
            if (std::abs(x - std::nearbyint(x)) > tol) return false;
        return true;
    }

    bool block_aligned() const {
        return width_ % kBlockDim == 0 && height_ % kBlockDim == 0;
    }

    int blocks_x() const { return width_ / kBlockDim; }
    int blocks_y() const { return height_ / kBlockDim; }
    int block_count() const { return blocks_x() * blocks_y(); }

    bool same_shape(const Plane& o) const { return width_ == o.width_ && height_ == o.height_; }

    friend bool operator==(const Plane& a, const Plane& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

inline void require_block_aligned(const Plane& p, const char* who) {
    if (!p.block_aligned())
        throw ShapeError(std::string(who) + ": plane dimensions must be multiples of 8, got " +
                         std::to_string(p.width()) + "x" + std::to_string(p.height()));
}

template <typename Tag>
Block8<Tag> extract_block(const Plane& p, int brow, int bcol) {
    Block8<Tag> b;
    for (int r = 0; r < kBlockDim; ++r)
        for (int c = 0; c < kBlockDim; ++c)
            b.at(r, c) = p.at(brow * kBlockDim + r, bcol * kBlockDim + c);
    return b;
}

template <typename Tag>
void insert_block(Plane& p, int brow, int bcol, const Block8<Tag>& b) {
    for (int r = 0; r < kBlockDim; ++r)
        for (int c = 0; c < kBlockDim; ++c)
            p.at(brow * kBlockDim + r, bcol * kBlockDim + c) = b.at(r, c);
}

/// Non-overlapping 8x8 tiling in row-major block order.
inline std::vector<PixelBlock> tile_blocks(const Plane& p) {
    require_block_aligned(p, "tile_blocks");
    std::vector<PixelBlock> out;
    out.reserve(static_cast<size_t>(p.block_count()));
    for (int br = 0; br < p.blocks_y(); ++br)
        for (int bc = 0; bc < p.blocks_x(); ++bc)
            out.push_back(extract_block<detail::PixelTag>(p, br, bc));
    return out;
}

/// Inverse of tile_blocks; reassembles exactly.
inline Plane untile_blocks(const std::vector<PixelBlock>& blocks, int width, int height) {
    if (width % kBlockDim != 0 || height % kBlockDim != 0)
        throw ShapeError("untile_blocks: dimensions must be multiples of 8");
    const int bx = width / kBlockDim, by = height / kBlockDim;
    if (blocks.size() != static_cast<size_t>(bx) * by)
        throw ShapeError("untile_blocks: block count does not match dimensions");
    Plane p(width, height);
    for (int br = 0; br < by; ++br)
        for (int bc = 0; bc < bx; ++bc)
            insert_block(p, br, bc, blocks[static_cast<size_t>(br) * bx + bc]);
    return p;
}

inline Plane plane_difference(const Plane& a, const Plane& b) {
    if (!a.same_shape(b)) throw ShapeError("plane_difference: shape mismatch");
    Plane out(a.width(), a.height());
    for (int r = 0; r < a.height(); ++r)
        for (int c = 0; c < a.width(); ++c)
            out.at(r, c) = a.at(r, c) - b.at(r, c);
    return out;
}

/// Elementwise nearest-integer rounding of a plane.
inline Plane round_plane(const Plane& p) {
    Plane out(p.width(), p.height());
    for (int r = 0; r < p.height(); ++r)
        for (int c = 0; c < p.width(); ++c)
            out.at(r, c) = static_cast<double>(round_to_int(p.at(r, c)));
    return out;
}

}  // namespace jnoise
