#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "jnoise/dct.hpp"
#include "jnoise/quant.hpp"
#include "jnoise/stats.hpp"

namespace jnoise {

enum class Verdict { Single, IdenticalDouble, OutOfDomain };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Single: return "SINGLE";
        case Verdict::IdenticalDouble: return "IDENTICAL_DOUBLE";
        default: return "OUT_OF_DOMAIN";
    }
}

struct DetectorConfig {
    double threshold = 0.03;  // on the pooled rounding-noise variance

    void validate() const {
        if (!(threshold > 0.0) || !(threshold < 1.0 / 12.0))
            throw ConfigError("DetectorConfig: threshold must lie in (0, 1/12)");
    }
};

struct DetectionReport {
    double sigma2_all = 0.0;
    Verdict verdict = Verdict::OutOfDomain;
    int min_step = 0;
};

enum class CoeffKind {
    Dequantized,      // plane holds Ytilde (integer multiples of the steps)
    QuantizedIndices  // plane holds round(Y/q); multiplied out internally
};

namespace detail {

inline Plane dequantized_plane(const Plane& coeffs, const QuantTable& table, CoeffKind kind) {
    require_block_aligned(coeffs, "rounding_noise_stat");
    table.validate();
    Plane deq(coeffs.width(), coeffs.height());
    for (int r = 0; r < coeffs.height(); ++r)
        for (int c = 0; c < coeffs.width(); ++c) {
            const size_t u = static_cast<size_t>(r % kBlockDim) * kBlockDim + c % kBlockDim;
            const double q = table.steps[u];
            const double v = coeffs.at(r, c);
            if (kind == CoeffKind::QuantizedIndices) {
                if (std::abs(v - std::nearbyint(v)) > 1e-9)
                    throw IntegrityError("coefficient plane: indices must be integers");
                deq.at(r, c) = std::nearbyint(v) * q;
            } else {
                if (std::abs(v - std::round(v / q) * q) > 1e-6)
                    throw IntegrityError(
                        "coefficient plane: value is not an integer multiple of its step");
                deq.at(r, c) = v;
            }
        }
    return deq;
}

}  // namespace detail

/// Pooled rounding-noise variance of the image the coefficients decode to:
/// Xtilde = IDCT(Ytilde), x = Xtilde - [Xtilde], returns var(x) over all
/// pixels. Invariant under any integer level shift, so no -128 handling.
inline double rounding_noise_stat(const Plane& coeffs, const QuantTable& table,
                                  CoeffKind kind = CoeffKind::Dequantized) {
    const Plane xtilde = inverse_dct_plane(detail::dequantized_plane(coeffs, table, kind));
    std::vector<double> noise;
    noise.reserve(xtilde.size());
    for (double v : xtilde.samples())
        noise.push_back(v - static_cast<double>(round_to_int(v)));
    return sample_stats(noise).variance;
}

/// Algorithm-2 verdict. The statistic separates the classes only when the
/// table has a unit step (otherwise the second-cycle rounding noise is
/// inherited unchanged), so tables with min step > 1 yield OUT_OF_DOMAIN
/// with the raw statistic still reported.
inline DetectionReport detect(const Plane& coeffs, const QuantTable& table,
                              const DetectorConfig& cfg,
                              CoeffKind kind = CoeffKind::Dequantized) {
    cfg.validate();
    DetectionReport rep;
    rep.min_step = table.min_step();
    rep.sigma2_all = rounding_noise_stat(coeffs, table, kind);
    if (rep.min_step > 1)
        rep.verdict = Verdict::OutOfDomain;
    else
        rep.verdict = rep.sigma2_all > cfg.threshold ? Verdict::Single : Verdict::IdenticalDouble;
    return rep;
}

struct CalibrationResult {
    DetectorConfig config;
    double balanced_accuracy = 0.0;
};

/// Threshold maximizing balanced accuracy (mean of the two per-class rates)
/// over labeled statistic samples. A training set whose doubly-compressed
/// class does not sit below the singly-compressed one is rejected: that is
/// the signature of swapped labels.
inline CalibrationResult calibrate_threshold(std::span<const double> single_stats,
                                             std::span<const double> double_stats) {
    if (single_stats.empty() || double_stats.empty())
        throw ConfigError("calibrate_threshold: both classes must be present");

    const double mean_single = sample_stats(single_stats).mean;
    const double mean_double = sample_stats(double_stats).mean;
    if (!(mean_double < mean_single))
        throw ConfigError("calibrate_threshold: classes are inverted (labels swapped?)");

    std::vector<double> all(single_stats.begin(), single_stats.end());
    all.insert(all.end(), double_stats.begin(), double_stats.end());
    std::sort(all.begin(), all.end());

    auto balanced = [&](double t) {
        long long tp = 0, tn = 0;
        for (double s : double_stats)
            if (s <= t) ++tp;
        for (double s : single_stats)
            if (s > t) ++tn;
        return 0.5 * (static_cast<double>(tp) / static_cast<double>(double_stats.size()) +
                      static_cast<double>(tn) / static_cast<double>(single_stats.size()));
    };

    CalibrationResult best;
    best.balanced_accuracy = -1.0;
    for (size_t i = 0; i + 1 < all.size(); ++i) {
        const double t = 0.5 * (all[i] + all[i + 1]);
        if (!(t > 0.0) || !(t < 1.0 / 12.0)) continue;
        const double acc = balanced(t);
        if (acc > best.balanced_accuracy) {
            best.balanced_accuracy = acc;
            best.config.threshold = t;
        }
    }
    if (best.balanced_accuracy < 0.0)
        throw ConfigError("calibrate_threshold: no admissible threshold in (0, 1/12)");
    best.config.validate();
    return best;
}

}  // namespace jnoise
