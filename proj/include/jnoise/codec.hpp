#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jnoise/core.hpp"
#include "jnoise/dct.hpp"
#include "jnoise/quant.hpp"

namespace jnoise {

struct CodecOptions {
    // Clamp decoded pixels to [0,255] after rounding. Off by default: clipping
    // invalidates the noise identities at saturated pixels.
    bool clip_pixels = false;
    // Subtract 128 before the DCT and add it back before rounding, as a JPEG
    // file codec would. The spectral planes then describe X - 128.
    bool level_shift = false;
};

// All intermediate signals of one compression cycle:
//   Y      spectral plane before quantization
//   Ytilde spectral plane after dequantization (integer multiples of q_u)
//   Xtilde real-valued decoded plane
//   Xnext  integer plane after rounding (input of the next cycle)
struct CycleRecord {
    Plane Y, Ytilde, Xtilde, Xnext;
    QuantTable table;
    CodecOptions options;
};

// The four noise planes of one cycle (Eqs. of the two lossy stages plus the
// two auxiliary differences):
//   quant_noise  y^(k)        = Y^(k) - Ytilde^(k)         (DCT domain)
//   round_noise  x^(k->k+1)   = Xtilde^(k) - X^(k+1)       (pixel domain)
//   aux_spatial  x^(k)        = X^(k) - Xtilde^(k)         (pixel domain)
//   aux_dct      y^(k->k+1)   = Ytilde^(k) - Y^(k+1)       (DCT domain)
struct NoiseSet {
    Plane quant_noise, round_noise, aux_spatial, aux_dct;
};

struct CompressionTrace {
    Plane source;
    std::vector<CycleRecord> cycles;
    std::vector<NoiseSet> noises;
};

namespace detail {

inline Plane shift_plane(const Plane& p, double offset) {
    Plane out(p.width(), p.height());
    for (int r = 0; r < p.height(); ++r)
        for (int c = 0; c < p.width(); ++c)
            out.at(r, c) = p.at(r, c) + offset;
    return out;
}

inline Plane spectral_of(const Plane& pixels, const CodecOptions& opt) {
    return forward_dct_plane(opt.level_shift ? shift_plane(pixels, -128.0) : pixels);
}

}  // namespace detail

/// One encode+decode pass: per block DCT -> quantize -> dequantize -> IDCT ->
/// integer rounding, with every intermediate plane kept.
inline CycleRecord encode_decode_cycle(const Plane& x, const QuantTable& table,
                                       const CodecOptions& opt = {}) {
    require_block_aligned(x, "encode_decode_cycle");
    if (!x.integer_valued())
        throw DomainError("encode_decode_cycle: input plane must be integer-valued");

    CycleRecord rec;
    rec.table = table;
    rec.options = opt;
    rec.Y = detail::spectral_of(x, opt);
    auto [deq, noise] = quantize_plane(rec.Y, table);
    rec.Ytilde = std::move(deq);
    (void)noise;  // recomputed exactly in extract_noises
    rec.Xtilde = inverse_dct_plane(rec.Ytilde);
    if (opt.level_shift) rec.Xtilde = detail::shift_plane(rec.Xtilde, 128.0);
    rec.Xnext = round_plane(rec.Xtilde);
    if (opt.clip_pixels) {
        for (int r = 0; r < rec.Xnext.height(); ++r)
            for (int c = 0; c < rec.Xnext.width(); ++c) {
                double& v = rec.Xnext.at(r, c);
                v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
            }
    }
    return rec;
}

// Recover the cycle's input plane from its stored spectral plane
// (X = IDCT(Y) [+128], re-rounded to kill the transform round-trip dust).
inline Plane reconstruct_input(const CycleRecord& rec) {
    Plane x = inverse_dct_plane(rec.Y);
    if (rec.options.level_shift) x = detail::shift_plane(x, 128.0);
    return round_plane(x);
}

/// The four noise planes of cycle k, each from its defining difference.
/// Y^(k+1) is the spectral plane of the cycle's rounded output, so the set is
/// fully determined by the record; the IDCT/DCT relations between the noises
/// are then theorems the validation suite checks, not construction rules.
inline NoiseSet extract_noises(const CycleRecord& rec, const Plane& input) {
    if (!rec.Y.same_shape(rec.Xnext) || !input.same_shape(rec.Xnext))
        throw ShapeError("extract_noises: inconsistent record");
    NoiseSet n;
    n.quant_noise = plane_difference(rec.Y, rec.Ytilde);
    n.round_noise = plane_difference(rec.Xtilde, rec.Xnext);
    n.aux_spatial = plane_difference(input, rec.Xtilde);
    n.aux_dct = plane_difference(rec.Ytilde, detail::spectral_of(rec.Xnext, rec.options));
    return n;
}

inline NoiseSet extract_noises(const CycleRecord& rec) {
    return extract_noises(rec, reconstruct_input(rec));
}

/// Chain K compression cycles from an integer source plane.
inline CompressionTrace run_cycles(const Plane& x0, const std::vector<QuantTable>& tables,
                                   const CodecOptions& opt = {}) {
    if (tables.empty()) throw ConfigError("run_cycles: need at least one quantization table");
    CompressionTrace trace;
    trace.source = x0;
    // reserve up front: `current` points into the vector across iterations
    trace.cycles.reserve(tables.size());
    trace.noises.reserve(tables.size());
    const Plane* current = &x0;
    for (const QuantTable& t : tables) {
        trace.cycles.push_back(encode_decode_cycle(*current, t, opt));
        trace.noises.push_back(extract_noises(trace.cycles.back(), *current));
        current = &trace.cycles.back().Xnext;
    }
    return trace;
}

enum class NoiseKind { Quantization, Rounding, AuxSpatial, AuxDct };

inline const Plane& noise_plane(const CompressionTrace& trace, NoiseKind kind, int cycle) {
    if (cycle < 0 || cycle >= static_cast<int>(trace.noises.size()))
        throw DomainError("noise_plane: cycle index out of range");
    const NoiseSet& n = trace.noises[static_cast<size_t>(cycle)];
    switch (kind) {
        case NoiseKind::Quantization: return n.quant_noise;
        case NoiseKind::Rounding: return n.round_noise;
        case NoiseKind::AuxSpatial: return n.aux_spatial;
        default: return n.aux_dct;
    }
}

struct IndexStats {
    std::array<double, kBlockArea> mean{};
    std::array<double, kBlockArea> variance{};  // unbiased (n-1)
    long long samples_per_index = 0;
};

/// Per-index sample mean and variance of one noise plane across all blocks.
/// The in-block index is m (pixel domain) or u (DCT domain), both row-major.
inline IndexStats per_index_stats(const CompressionTrace& trace, NoiseKind kind, int cycle) {
    const Plane& p = noise_plane(trace, kind, cycle);
    IndexStats s;
    s.samples_per_index = p.block_count();
    std::array<double, kBlockArea> sum{}, sumsq{};
    for (int br = 0; br < p.blocks_y(); ++br)
        for (int bc = 0; bc < p.blocks_x(); ++bc)
            for (int r = 0; r < kBlockDim; ++r)
                for (int c = 0; c < kBlockDim; ++c) {
                    const double v = p.at(br * kBlockDim + r, bc * kBlockDim + c);
                    sum[static_cast<size_t>(r) * kBlockDim + c] += v;
                    sumsq[static_cast<size_t>(r) * kBlockDim + c] += v * v;
                }
    const double n = static_cast<double>(s.samples_per_index);
    for (size_t i = 0; i < kBlockArea; ++i) {
        s.mean[i] = sum[i] / n;
        s.variance[i] = n > 1 ? (sumsq[i] - sum[i] * sum[i] / n) / (n - 1) : 0.0;
    }
    return s;
}

/// Structural checks on a stored trace; returns human-readable violations
/// (empty means intact). Covers dequantized-multiple consistency, the cycle
/// chaining, and the support bound of the rounding noise.
inline std::vector<std::string> trace_integrity_violations(const CompressionTrace& trace,
                                                           double tol = 1e-9) {
    std::vector<std::string> bad;
    if (trace.cycles.size() != trace.noises.size())
        bad.push_back("cycle/noise list length mismatch");
    for (size_t k = 0; k < trace.cycles.size(); ++k) {
        const CycleRecord& rec = trace.cycles[k];
        const std::string tag = "cycle " + std::to_string(k + 1);
        bool multiple_ok = true;
        for (int r = 0; r < rec.Ytilde.height() && multiple_ok; ++r)
            for (int c = 0; c < rec.Ytilde.width(); ++c) {
                const size_t u = static_cast<size_t>(r % kBlockDim) * kBlockDim + c % kBlockDim;
                const double q = rec.table.steps[u];
                const double v = rec.Ytilde.at(r, c);
                if (std::abs(v - std::round(v / q) * q) > tol) {
                    bad.push_back(tag + ": Ytilde not an integer multiple of its step");
                    multiple_ok = false;
                    break;
                }
            }
        if (!rec.Xnext.integer_valued())
            bad.push_back(tag + ": Xnext not integer-valued");
        const Plane& expected_input = k == 0 ? trace.source : trace.cycles[k - 1].Xnext;
        if (!(reconstruct_input(rec) == expected_input))
            bad.push_back(tag + ": input does not chain from previous cycle");
        if (k < trace.noises.size() && !rec.options.clip_pixels) {
            for (double v : trace.noises[k].round_noise.samples())
                if (std::abs(v) > 0.5 + tol) {
                    bad.push_back(tag + ": rounding noise exceeds 1/2 support");
                    break;
                }
        }
    }
    return bad;
}

}  // namespace jnoise
