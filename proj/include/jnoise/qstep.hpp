#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "jnoise/codec.hpp"
#include "jnoise/dct.hpp"

namespace jnoise {

// The probe statistic of the step estimator: S^var(q) is the mean squared
// second-cycle quantization noise of the image when re-quantized with a
// candidate step q. A local minimum appears at the true first-cycle step.
struct VarCurve {
    std::vector<double> s_var;       // s_var[i] belongs to q = i + 1
    std::vector<long long> n_per_q;  // samples entering each point
    std::vector<int> minima;         // interior local minima, q >= 3
    bool low_confidence = false;

    int q_max() const { return static_cast<int>(s_var.size()); }
    double at(int q) const {
        if (q < 1 || q > q_max()) throw DomainError("VarCurve: q out of range");
        return s_var[static_cast<size_t>(q - 1)];
    }
    bool is_minimum(int q) const {
        return std::find(minima.begin(), minima.end(), q) != minima.end();
    }
};

struct EstimatorConfig {
    int q_max = 64;
    double t_c = 0.20;   // S^var(2) gate separating steps 1 and 2
    double t_xi = 0.30;  // ceiling a genuine minimum must stay under
    bool exclude_zero = false;

    void validate() const {
        if (q_max < 2) throw ConfigError("EstimatorConfig: q_max must be >= 2");
        if (!(t_c > 0.0) || !(t_xi > 0.0))
            throw ConfigError("EstimatorConfig: thresholds must be positive");
    }
};

/// Interior local minima of the curve: q with s(q) < s(q-1) and s(q) < s(q+1),
/// searched over q >= 3 (q = 2 is handled by the estimator's T_c branch).
inline std::vector<int> local_minima(const std::vector<double>& s_var) {
    if (s_var.size() < 3) throw DomainError("local_minima: curve too short");
    std::vector<int> out;
    for (int q = 3; q + 1 <= static_cast<int>(s_var.size()); ++q) {
        const double s = s_var[static_cast<size_t>(q - 1)];
        if (s < s_var[static_cast<size_t>(q - 2)] && s < s_var[static_cast<size_t>(q)])
            out.push_back(q);
    }
    return out;
}

/// S^var(q) for q = 1..q_max at one coefficient index u, or pooled over all
/// indices when u < 0. exclude_zero drops samples whose dequantized value is
/// zero at the candidate step (they carry no lattice information).
inline VarCurve svar_curve(const Plane& image, int u, int q_max, bool exclude_zero = false) {
    require_block_aligned(image, "svar_curve");
    if (q_max < 2) throw DomainError("svar_curve: q_max must be >= 2");
    if (u >= kBlockArea) throw DomainError("svar_curve: coefficient index out of range");

    const Plane spectral = forward_dct_plane(image);
    std::vector<double> coeffs;
    coeffs.reserve(u < 0 ? spectral.size() : static_cast<size_t>(spectral.block_count()));
    for (int br = 0; br < spectral.blocks_y(); ++br)
        for (int bc = 0; bc < spectral.blocks_x(); ++bc)
            for (int r = 0; r < kBlockDim; ++r)
                for (int c = 0; c < kBlockDim; ++c) {
                    if (u >= 0 && r * kBlockDim + c != u) continue;
                    coeffs.push_back(spectral.at(br * kBlockDim + r, bc * kBlockDim + c));
                }

    VarCurve curve;
    curve.s_var.resize(static_cast<size_t>(q_max));
    curve.n_per_q.resize(static_cast<size_t>(q_max));
    for (int q = 1; q <= q_max; ++q) {
        double acc = 0.0;
        long long n = 0;
        for (double y : coeffs) {
            const double level = static_cast<double>(round_to_int(y / q));
            if (exclude_zero && level == 0.0) continue;
            const double noise = y - level * q;
            acc += noise * noise;
            ++n;
        }
        if (n == 0) throw DomainError("svar_curve: empty sample set at q=" + std::to_string(q));
        curve.s_var[static_cast<size_t>(q - 1)] = acc / static_cast<double>(n);
        curve.n_per_q[static_cast<size_t>(q - 1)] = n;
    }
    curve.minima = local_minima(curve.s_var);
    curve.low_confidence =
        *std::min_element(curve.n_per_q.begin(), curve.n_per_q.end()) < 256;
    return curve;
}

struct StepEstimate {
    int q = 1;
    bool low_confidence = false;
    VarCurve curve;
};

inline int decide_step(const VarCurve& curve, const EstimatorConfig& cfg) {
    // Largest under-threshold local minimum wins; otherwise the T_c branch
    // separates step 2 from step 1 (never compressed / unit table).
    for (auto it = curve.minima.rbegin(); it != curve.minima.rend(); ++it)
        if (curve.at(*it) < cfg.t_xi) return *it;
    return curve.at(2) < cfg.t_c ? 2 : 1;
}

/// Algorithm-1 step estimate at coefficient index u (u < 0 pools all indices).
inline StepEstimate estimate_step(const Plane& image, int u, const EstimatorConfig& cfg) {
    cfg.validate();
    StepEstimate est;
    est.curve = svar_curve(image, u, cfg.q_max, cfg.exclude_zero);
    est.q = decide_step(est.curve, cfg);
    est.low_confidence = est.curve.low_confidence;
    return est;
}

/// Naive sanity comparator: the global minimum of the curve over q >= 2,
/// no elimination, no thresholds. Algorithm 1 must never lose to this.
inline int estimate_step_global_min(const VarCurve& curve) {
    int best_q = 2;
    for (int q = 3; q <= curve.q_max(); ++q)
        if (curve.at(q) < curve.at(best_q)) best_q = q;
    return best_q;
}

enum class SvarMode { Pooled, PerFrequency };

struct TableEstimate {
    std::array<int, kBlockArea> steps{};
    bool low_confidence = false;
};

/// Per-frequency application of the estimator, or the pooled single estimate
/// broadcast to all 64 entries (the constant-table case).
inline TableEstimate estimate_table(const Plane& image, const EstimatorConfig& cfg,
                                    SvarMode mode = SvarMode::Pooled) {
    TableEstimate out;
    if (mode == SvarMode::Pooled) {
        const StepEstimate e = estimate_step(image, -1, cfg);
        out.steps.fill(e.q);
        out.low_confidence = e.low_confidence;
        return out;
    }
    for (int u = 0; u < kBlockArea; ++u) {
        const StepEstimate e = estimate_step(image, u, cfg);
        out.steps[static_cast<size_t>(u)] = e.q;
        out.low_confidence = out.low_confidence || e.low_confidence;
    }
    return out;
}

/// Grid-search calibration of (T_c, T_xi) maximizing training accuracy.
/// Accuracy ties break toward the thresholds farthest from any observed
/// statistic (max-margin), so the config stays robust off the training set.
/// The training set must contain both class 1 and class 2 (those are the
/// classes the T_c branch separates) and at least two distinct steps.
inline EstimatorConfig calibrate_thresholds(const std::vector<std::pair<Plane, int>>& training,
                                            int q_max = 64, bool exclude_zero = false) {
    bool has1 = false, has2 = false;
    int distinct = 0;
    std::vector<int> seen;
    for (const auto& [img, q] : training) {
        (void)img;
        if (q == 1) has1 = true;
        if (q == 2) has2 = true;
        if (std::find(seen.begin(), seen.end(), q) == seen.end()) {
            seen.push_back(q);
            ++distinct;
        }
    }
    if (distinct < 2 || !has1 || !has2)
        throw ConfigError("calibrate_thresholds: need >= 2 distinct true steps including 1 and 2");

    std::vector<std::pair<VarCurve, int>> curves;
    curves.reserve(training.size());
    std::vector<double> minima_stats, s2_stats;
    for (const auto& [img, q] : training) {
        curves.emplace_back(svar_curve(img, -1, q_max, exclude_zero), q);
        const VarCurve& c = curves.back().first;
        for (int m : c.minima) minima_stats.push_back(c.at(m));
        s2_stats.push_back(c.at(2));
    }
    const auto margin = [](double t, const std::vector<double>& values) {
        double m = std::numeric_limits<double>::infinity();
        for (double v : values) m = std::min(m, std::abs(t - v));
        return m;
    };

    EstimatorConfig best{q_max, 0.0, 0.0, exclude_zero};
    int best_hits = -1;
    double best_margin = -1.0;
    const double step = 0.01;
    for (double t_xi = 2 * step; t_xi <= 1.0 / 3.0 + 1e-12; t_xi += step) {
        for (double t_c = step; t_c < t_xi - step / 2; t_c += step) {
            EstimatorConfig cfg{q_max, t_c, t_xi, exclude_zero};
            int hits = 0;
            for (const auto& [curve, truth] : curves)
                if (decide_step(curve, cfg) == truth) ++hits;
            const double m = std::min(margin(t_xi, minima_stats), margin(t_c, s2_stats));
            if (hits > best_hits || (hits == best_hits && m > best_margin)) {
                best_hits = hits;
                best_margin = m;
                best = cfg;
            }
        }
    }
    if (best_hits < 0) throw ConfigError("calibrate_thresholds: degenerate grid");
    return best;
}

}  // namespace jnoise
