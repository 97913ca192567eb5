#pragma once

#include <cmath>
#include <numbers>

#include "jnoise/core.hpp"

namespace jnoise {

namespace detail {

// Orthonormal type-II DCT basis, A[k][n] = c_k cos(pi (2n+1) k / 16) with
// c_0 = sqrt(1/8), c_k = 1/2 otherwise. Rows are orthonormal, so the 2-D
// transform A X A^T preserves energy (Parseval) and A^T is the exact inverse.
inline const std::array<std::array<double, kBlockDim>, kBlockDim>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, kBlockDim>, kBlockDim> a{};
        for (int k = 0; k < kBlockDim; ++k) {
            const double ck = k == 0 ? std::sqrt(1.0 / kBlockDim) : std::sqrt(2.0 / kBlockDim);
            for (int n = 0; n < kBlockDim; ++n)
                a[k][n] = ck * std::cos(std::numbers::pi * (2 * n + 1) * k / (2.0 * kBlockDim));
        }
        return a;
    }();
    return basis;
}

// out = A . in . A^T when forward, A^T . in . A when inverse.
inline std::array<double, kBlockArea> dct_apply(const std::array<double, kBlockArea>& in,
                                                bool forward) {
    const auto& a = dct_basis();
    std::array<double, kBlockArea> tmp{}, out{};
    // rows: tmp = M . in  with M = A (forward) or A^T (inverse)
    for (int i = 0; i < kBlockDim; ++i)
        for (int j = 0; j < kBlockDim; ++j) {
            double s = 0.0;
            for (int k = 0; k < kBlockDim; ++k)
                s += (forward ? a[i][k] : a[k][i]) * in[static_cast<size_t>(k) * kBlockDim + j];
            tmp[static_cast<size_t>(i) * kBlockDim + j] = s;
        }
    // cols: out = tmp . M^T
    for (int i = 0; i < kBlockDim; ++i)
        for (int j = 0; j < kBlockDim; ++j) {
            double s = 0.0;
            for (int k = 0; k < kBlockDim; ++k)
                s += tmp[static_cast<size_t>(i) * kBlockDim + k] * (forward ? a[j][k] : a[k][j]);
            out[static_cast<size_t>(i) * kBlockDim + j] = s;
        }
    return out;
}

}  // namespace detail

/// 2-D orthonormal type-II DCT of one block. u = 0 is the DC coefficient.
inline SpectrumBlock forward_dct(const PixelBlock& block) {
    if (!block.all_finite()) throw DomainError("forward_dct: non-finite input");
    SpectrumBlock out;
    out.v = detail::dct_apply(block.v, true);
    return out;
}

/// Exact inverse of forward_dct (transpose of the unitary operator).
inline PixelBlock inverse_dct(const SpectrumBlock& block) {
    if (!block.all_finite()) throw DomainError("inverse_dct: non-finite input");
    PixelBlock out;
    out.v = detail::dct_apply(block.v, false);
    return out;
}

/// Blockwise forward DCT of an 8-aligned plane; output keeps the geometry
/// (coefficient (r,c) of block (br,bc) at plane position (8br+r, 8bc+c)).
inline Plane forward_dct_plane(const Plane& p) {
    require_block_aligned(p, "forward_dct_plane");
    Plane out(p.width(), p.height());
    for (int br = 0; br < p.blocks_y(); ++br)
        for (int bc = 0; bc < p.blocks_x(); ++bc)
            insert_block(out, br, bc, forward_dct(extract_block<detail::PixelTag>(p, br, bc)));
    return out;
}

inline Plane inverse_dct_plane(const Plane& p) {
    require_block_aligned(p, "inverse_dct_plane");
    Plane out(p.width(), p.height());
    for (int br = 0; br < p.blocks_y(); ++br)
        for (int bc = 0; bc < p.blocks_x(); ++bc)
            insert_block(out, br, bc, inverse_dct(extract_block<detail::SpectrumTag>(p, br, bc)));
    return out;
}

}  // namespace jnoise
