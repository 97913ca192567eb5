#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>

#include "jnoise/core.hpp"

namespace jnoise {

// 64 integer step sizes in row-major block order (index 0 is the DC step).
struct QuantTable {
    std::array<int, kBlockArea> steps{};

    QuantTable() { steps.fill(1); }
    explicit QuantTable(const std::array<int, kBlockArea>& s) : steps(s) { validate(); }

    void validate() const {
        for (int q : steps)
            if (q < 1) throw DomainError("QuantTable: steps must be positive integers");
    }

    static QuantTable uniform(int q) {
        if (q < 1) throw DomainError("QuantTable: steps must be positive integers");
        QuantTable t;
        t.steps.fill(q);
        return t;
    }

    int min_step() const { return *std::min_element(steps.begin(), steps.end()); }
    int max_step() const { return *std::max_element(steps.begin(), steps.end()); }
    bool has_unit_step() const { return min_step() == 1; }

    friend bool operator==(const QuantTable& a, const QuantTable& b) { return a.steps == b.steps; }
};

/// Hex digest of a table, used to label per-table detector thresholds.
inline std::string table_hash_hex(const QuantTable& t) {
    std::array<unsigned char, kBlockArea * 2> bytes{};
    for (size_t u = 0; u < kBlockArea; ++u) {
        bytes[2 * u] = static_cast<unsigned char>(t.steps[u] & 0xff);
        bytes[2 * u + 1] = static_cast<unsigned char>((t.steps[u] >> 8) & 0xff);
    }
    const uint64_t h = fnv1a64(bytes);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Quantize-dequantize one spectral block: Ytilde_u = round(Y_u/q_u) * q_u.
/// Returns (Ytilde, noise) with noise = Y - Ytilde, |noise_u| <= q_u/2.
inline std::pair<SpectrumBlock, SpectrumBlock> quantize_block(const SpectrumBlock& y,
                                                              const QuantTable& table) {
    std::pair<SpectrumBlock, SpectrumBlock> out;
    for (size_t u = 0; u < kBlockArea; ++u) {
        const double q = table.steps[u];
        const double deq = static_cast<double>(round_to_int(y[u] / q)) * q;
        out.first[u] = deq;
        out.second[u] = y[u] - deq;
    }
    return out;
}

/// Blockwise quantize-dequantize of a spectral plane.
inline std::pair<Plane, Plane> quantize_plane(const Plane& spectral, const QuantTable& table) {
    require_block_aligned(spectral, "quantize_plane");
    Plane deq(spectral.width(), spectral.height());
    Plane noise(spectral.width(), spectral.height());
    for (int br = 0; br < spectral.blocks_y(); ++br)
        for (int bc = 0; bc < spectral.blocks_x(); ++bc) {
            const auto y = extract_block<detail::SpectrumTag>(spectral, br, bc);
            auto [yt, n] = quantize_block(y, table);
            insert_block(deq, br, bc, yt);
            insert_block(noise, br, bc, n);
        }
    return {std::move(deq), std::move(noise)};
}

}  // namespace jnoise
