#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jnoise/quant.hpp"
#include "jnoise/stats.hpp"

namespace jnoise {

// ---------------------------------------------------------------------------
// Analytic noise models. A quantized law is the distribution of s = Y - [Y/q]q
// for a coefficient law Y; its density folds the source density onto
// [-q/2, q/2). Quantized laws with zero-mean sources are themselves zero-mean.
// ---------------------------------------------------------------------------

struct Uniform {
    double lo = -0.5, hi = 0.5;
};
struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};
struct Laplacian {
    double mean = 0.0;
    double rate = 1.0;  // pdf: rate/2 * exp(-rate |x - mean|)
};
struct QuantizedGaussian {
    double variance = 1.0;  // variance of the zero-mean Gaussian source
    int q = 1;
};
struct QuantizedLaplacian {
    double rate = 1.0;  // rate of the zero-mean Laplacian source
    int q = 1;
};

using CoeffLaw = std::variant<Gaussian, Laplacian>;

struct Folded {
    CoeffLaw source;
    int q = 1;
};

using NoiseDistribution =
    std::variant<Uniform, Gaussian, Laplacian, QuantizedGaussian, QuantizedLaplacian, Folded>;

/// lambda = sqrt(2 / sigma^2): the rate of a zero-mean Laplacian with the
/// given variance.
inline double laplacian_rate_from_variance(double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("laplacian_rate_from_variance: need sigma^2 > 0");
    return std::sqrt(2.0 / sigma2);
}

namespace detail {

inline double gaussian_pdf(double mean, double variance, double x) {
    const double d = x - mean;
    return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

inline double gaussian_cdf(double mean, double variance, double x) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

inline double laplacian_pdf(double mean, double rate, double x) {
    return 0.5 * rate * std::exp(-rate * std::abs(x - mean));
}

inline double laplacian_cdf(double mean, double rate, double x) {
    const double d = x - mean;
    return d < 0.0 ? 0.5 * std::exp(rate * d) : 1.0 - 0.5 * std::exp(-rate * d);
}

inline double law_pdf(const CoeffLaw& law, double x) {
    if (const auto* g = std::get_if<Gaussian>(&law)) return gaussian_pdf(g->mean, g->variance, x);
    const auto& l = std::get<Laplacian>(law);
    return laplacian_pdf(l.mean, l.rate, x);
}

inline double law_cdf(const CoeffLaw& law, double x) {
    if (const auto* g = std::get_if<Gaussian>(&law)) return gaussian_cdf(g->mean, g->variance, x);
    const auto& l = std::get<Laplacian>(law);
    return laplacian_cdf(l.mean, l.rate, x);
}

inline double law_mean(const CoeffLaw& law) {
    if (const auto* g = std::get_if<Gaussian>(&law)) return g->mean;
    return std::get<Laplacian>(law).mean;
}

// Radius beyond which the source tail mass is below ~1e-30 (12 sigma for a
// Gaussian, 70/lambda for the heavier Laplacian tail).
inline double law_tail_radius(const CoeffLaw& law) {
    if (const auto* g = std::get_if<Gaussian>(&law)) {
        if (!(g->variance > 0.0)) throw DomainError("folded source: need variance > 0");
        return 12.0 * std::sqrt(g->variance);
    }
    const auto& l = std::get<Laplacian>(law);
    if (!(l.rate > 0.0)) throw DomainError("folded source: need rate > 0");
    return 70.0 / l.rate;
}

inline void require_in_support(double s, int q, const char* who) {
    if (q < 1) throw DomainError(std::string(who) + ": need q >= 1");
    if (!(s >= -q / 2.0) || !(s < q / 2.0))
        throw DomainError(std::string(who) + ": s outside [-q/2, q/2)");
}

}  // namespace detail

/// Density of the quantization noise when the coefficient follows f_Y:
/// f_y(s) = sum_k f_Y(kq + s), s in [-q/2, q/2). The sum runs over the k
/// whose lattice point lies within the source's ~1e-30 tail radius.
inline double folded_pdf(const CoeffLaw& source, int q, double s) {
    detail::require_in_support(s, q, "folded_pdf");
    const double radius = detail::law_tail_radius(source);
    const double mu = detail::law_mean(source);
    const auto k_lo = static_cast<long long>(std::ceil((mu - radius - s) / q));
    const auto k_hi = static_cast<long long>(std::floor((mu + radius - s) / q));
    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k)
        acc += detail::law_pdf(source, static_cast<double>(k) * q + s);
    return acc;
}

/// Mass of the folded law on [a, b] within the support (exact CDF folding).
inline double folded_mass(const CoeffLaw& source, int q, double a, double b) {
    if (!(b > a)) return 0.0;
    const double radius = detail::law_tail_radius(source);
    const double mu = detail::law_mean(source);
    const auto k_lo = static_cast<long long>(std::ceil((mu - radius - b) / q));
    const auto k_hi = static_cast<long long>(std::floor((mu + radius - a) / q));
    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double off = static_cast<double>(k) * q;
        acc += detail::law_cdf(source, off + b) - detail::law_cdf(source, off + a);
    }
    return acc;
}

/// Closed cosine-series form of the quantized-Gaussian density:
/// f_z(s) = 1/q + (2/q) sum_{n>=1} exp(-2 pi^2 n^2 sigma^2 / q^2) cos(2 pi n s / q).
/// Terms decay like exp(-c n^2); the series is cut when the factor drops
/// below 1e-17 so the 1e-10 oracle comparisons hold over the whole grid.
inline double quantized_gaussian_pdf(double sigma2, int q, double s) {
    if (!(sigma2 > 0.0)) throw DomainError("quantized_gaussian_pdf: need sigma^2 > 0");
    detail::require_in_support(s, q, "quantized_gaussian_pdf");
    const double qq = static_cast<double>(q);
    const double decay = 2.0 * std::numbers::pi * std::numbers::pi * sigma2 / (qq * qq);
    double f = 1.0 / qq;
    for (long long n = 1;; ++n) {
        const double e = std::exp(-decay * static_cast<double>(n) * static_cast<double>(n));
        if (e < 1e-17) break;
        f += (2.0 / qq) * e * std::cos(2.0 * std::numbers::pi * n * s / qq);
    }
    // cancellation can leave -1e-16 where the true density vanishes
    return std::max(f, 0.0);
}

/// Mass of the quantized-Gaussian on [a, b], by exact term-wise integration
/// of the cosine series.
inline double quantized_gaussian_mass(double sigma2, int q, double a, double b) {
    if (!(sigma2 > 0.0)) throw DomainError("quantized_gaussian_mass: need sigma^2 > 0");
    if (!(b > a)) return 0.0;
    const double qq = static_cast<double>(q);
    const double decay = 2.0 * std::numbers::pi * std::numbers::pi * sigma2 / (qq * qq);
    double m = (b - a) / qq;
    for (long long n = 1;; ++n) {
        const double e = std::exp(-decay * static_cast<double>(n) * static_cast<double>(n));
        if (e < 1e-17) break;
        const double w = 2.0 * std::numbers::pi * n / qq;
        m += (e / (std::numbers::pi * n)) * (std::sin(w * b) - std::sin(w * a));
    }
    return std::max(m, 0.0);
}

/// Variance of the quantized-Gaussian law:
/// q^2/12 + (q^2/pi^2) sum_{n>=1} ((-1)^n / n^2) exp(-2 pi^2 n^2 sigma^2/q^2).
/// Every partial sum of the alternating series is <= 0, so the result never
/// exceeds q^2/12 (the uniform bound) at any truncation point.
inline double quantized_gaussian_variance(double sigma2, int q) {
    if (!(sigma2 > 0.0)) throw DomainError("quantized_gaussian_variance: need sigma^2 > 0");
    if (q < 1) throw DomainError("quantized_gaussian_variance: need q >= 1");
    const double qq = static_cast<double>(q);
    const double decay = 2.0 * std::numbers::pi * std::numbers::pi * sigma2 / (qq * qq);
    double series = 0.0;
    double sign = -1.0;
    for (long long n = 1;; ++n, sign = -sign) {
        const double nn = static_cast<double>(n);
        const double e = std::exp(-decay * nn * nn);
        if (e < 1e-17) break;
        series += sign * e / (nn * nn);
    }
    return qq * qq / 12.0 + qq * qq / (std::numbers::pi * std::numbers::pi) * series;
}

inline double pdf(const NoiseDistribution& dist, double s) {
    return std::visit(
        [s](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (!(d.hi > d.lo)) throw DomainError("Uniform: empty support");
                return (s >= d.lo && s < d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                if (!(d.variance > 0.0)) throw DomainError("Gaussian: need variance > 0");
                return detail::gaussian_pdf(d.mean, d.variance, s);
            } else if constexpr (std::is_same_v<T, Laplacian>) {
                if (!(d.rate > 0.0)) throw DomainError("Laplacian: need rate > 0");
                return detail::laplacian_pdf(d.mean, d.rate, s);
            } else if constexpr (std::is_same_v<T, QuantizedGaussian>) {
                return quantized_gaussian_pdf(d.variance, d.q, s);
            } else if constexpr (std::is_same_v<T, QuantizedLaplacian>) {
                if (!(d.rate > 0.0)) throw DomainError("QuantizedLaplacian: need rate > 0");
                return folded_pdf(Laplacian{0.0, d.rate}, d.q, s);
            } else {
                return folded_pdf(d.source, d.q, s);
            }
        },
        dist);
}

/// Probability mass of the model on [a, b].
inline double bin_mass(const NoiseDistribution& dist, double a, double b) {
    return std::visit(
        [a, b](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                const double lo = std::max(a, d.lo), hi = std::min(b, d.hi);
                return hi > lo ? (hi - lo) / (d.hi - d.lo) : 0.0;
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return detail::gaussian_cdf(d.mean, d.variance, b) -
                       detail::gaussian_cdf(d.mean, d.variance, a);
            } else if constexpr (std::is_same_v<T, Laplacian>) {
                return detail::laplacian_cdf(d.mean, d.rate, b) -
                       detail::laplacian_cdf(d.mean, d.rate, a);
            } else if constexpr (std::is_same_v<T, QuantizedGaussian>) {
                return quantized_gaussian_mass(d.variance, d.q,
                                               std::max(a, -d.q / 2.0), std::min(b, d.q / 2.0));
            } else if constexpr (std::is_same_v<T, QuantizedLaplacian>) {
                return folded_mass(Laplacian{0.0, d.rate}, d.q, std::max(a, -d.q / 2.0),
                                   std::min(b, d.q / 2.0));
            } else {
                return folded_mass(d.source, d.q, std::max(a, -d.q / 2.0), std::min(b, d.q / 2.0));
            }
        },
        dist);
}

// Support of the model as a half-open interval; unbounded laws report the
// +-6 sigma range that carries all testable mass.
inline std::pair<double, double> support(const NoiseDistribution& dist) {
    return std::visit(
        [](const auto& d) -> std::pair<double, double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return {d.lo, d.hi};
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                const double r = 6.0 * std::sqrt(d.variance);
                return {d.mean - r, d.mean + r};
            } else if constexpr (std::is_same_v<T, Laplacian>) {
                const double r = 30.0 / d.rate;
                return {d.mean - r, d.mean + r};
            } else {
                return {-d.q / 2.0, d.q / 2.0};
            }
        },
        dist);
}

namespace detail {

inline double moment_integral(const NoiseDistribution& dist, int power) {
    const auto [lo, hi] = support(dist);
    const auto f = [&](double s) {
        double w = 1.0;
        for (int i = 0; i < power; ++i) w *= s;
        // pdf() rejects s == q/2 for folded laws; the quadrature abscissae
        // stay strictly interior, but guard the endpoint anyway.
        const double x = s >= hi ? std::nextafter(hi, lo) : s;
        return w * pdf(dist, x);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-12);
}

}  // namespace detail

inline double mean(const NoiseDistribution& dist) {
    return std::visit(
        [&dist](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) return 0.5 * (d.lo + d.hi);
            else if constexpr (std::is_same_v<T, Gaussian>) return d.mean;
            else if constexpr (std::is_same_v<T, Laplacian>) return d.mean;
            else if constexpr (std::is_same_v<T, QuantizedGaussian>) return 0.0;
            else if constexpr (std::is_same_v<T, QuantizedLaplacian>) return 0.0;
            else return detail::moment_integral(dist, 1);
        },
        dist);
}

inline double variance(const NoiseDistribution& dist) {
    return std::visit(
        [&dist](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return (d.hi - d.lo) * (d.hi - d.lo) / 12.0;
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return d.variance;
            } else if constexpr (std::is_same_v<T, Laplacian>) {
                return 2.0 / (d.rate * d.rate);
            } else if constexpr (std::is_same_v<T, QuantizedGaussian>) {
                return quantized_gaussian_variance(d.variance, d.q);
            } else {
                const double m1 = mean(dist);
                return detail::moment_integral(dist, 2) - m1 * m1;
            }
        },
        dist);
}

// ---------------------------------------------------------------------------
// First-cycle models (DC uniform, AC quantized-Laplacian; rounding noise
// quantized-Gaussian with step 1) and the variance bounds they imply.
// ---------------------------------------------------------------------------

struct FirstCycleModels {
    std::array<NoiseDistribution, kBlockArea> quant;
    // sigma_DC / q_DC: how far the DC law is from the wide-signal regime where
    // the uniform model is trustworthy. Reported, never asserted.
    double dc_sigma_over_q = 0.0;
};

/// Quantization-noise models of the first cycle given the per-u coefficient
/// variances: u = 0 uniform on [-q/2, q/2), u >= 1 quantized-Laplacian with
/// rate sqrt(2/sigma_u^2).
inline FirstCycleModels first_cycle_models(const QuantTable& table,
                                           const std::array<double, kBlockArea>& coeff_variance) {
    table.validate();
    FirstCycleModels out;
    out.quant[0] = Uniform{-table.steps[0] / 2.0, table.steps[0] / 2.0};
    if (!(coeff_variance[0] > 0.0)) throw DomainError("first_cycle_models: need sigma^2 > 0");
    out.dc_sigma_over_q = std::sqrt(coeff_variance[0]) / table.steps[0];
    for (size_t u = 1; u < kBlockArea; ++u)
        out.quant[u] =
            QuantizedLaplacian{laplacian_rate_from_variance(coeff_variance[u]), table.steps[u]};
    return out;
}

/// Rounding-noise model of the first cycle: quantized-Gaussian with step 1
/// parameterized by the spatial auxiliary-noise variance.
inline NoiseDistribution first_cycle_rounding_model(double aux_variance) {
    if (!(aux_variance > 0.0)) throw DomainError("first_cycle_rounding_model: need sigma^2 > 0");
    return QuantizedGaussian{aux_variance, 1};
}

struct VarianceBounds {
    std::array<double, kBlockArea> quant{};  // q_u^2 / 12 per coefficient
    double rounding = 1.0 / 12.0;            // per pixel index
    double aux_spatial = 0.0;                // max_u q_u^2 / 12
    double aux_dct = 1.0 / 12.0;
};

inline VarianceBounds variance_bounds(const QuantTable& table) {
    table.validate();
    VarianceBounds b;
    for (size_t u = 0; u < kBlockArea; ++u) {
        const double q = table.steps[u];
        b.quant[u] = q * q / 12.0;
        b.aux_spatial = std::max(b.aux_spatial, b.quant[u]);
    }
    return b;
}

/// Distribution of the quantization noise one cycle after a step q_prev, when
/// quantizing with q_cur and the auxiliary DCT noise has the given variance:
/// step 1 -> quantized-Gaussian; divisible with q_cur >= 2 -> Gaussian;
/// otherwise the folded law of the coefficient distribution (supplied by the
/// caller; defaults to a zero-mean Gaussian with the auxiliary variance).
inline NoiseDistribution higher_cycle_model(int q_prev, int q_cur, double aux_variance,
                                            std::optional<CoeffLaw> coeff_law = std::nullopt) {
    if (q_prev < 1 || q_cur < 1) throw DomainError("higher_cycle_model: need steps >= 1");
    if (!(aux_variance > 0.0)) throw DomainError("higher_cycle_model: need aux variance > 0");
    if (q_cur == 1) return QuantizedGaussian{aux_variance, 1};
    if (q_prev % q_cur == 0) return Gaussian{0.0, aux_variance};
    return Folded{coeff_law.value_or(CoeffLaw{Gaussian{0.0, aux_variance}}), q_cur};
}

// ---------------------------------------------------------------------------
// Goodness of fit against a model.
// ---------------------------------------------------------------------------

struct FitReport {
    GofResult gof;
    double sample_variance = 0.0;
    double model_variance = 0.0;
    double variance_se = 0.0;  // standard error of the sample variance
    bool variance_pass = false;
    bool pass = false;
};

/// Chi-square fit of samples against the model (bins of width q/32 on the
/// model support, low-count tails merged) plus a sample-variance comparison
/// at 6 standard errors.
inline FitReport fit_test(std::span<const double> samples, const NoiseDistribution& model,
                          double alpha = 0.01) {
    if (samples.size() < 1000) throw DomainError("fit_test: need at least 1000 samples");
    FitReport rep;
    const auto [lo, hi] = support(model);
    rep.gof = chi_square_gof(
        samples, [&](double a, double b) { return bin_mass(model, a, b); }, lo, hi, 32, alpha);

    const SampleStats st = sample_stats(samples);
    rep.sample_variance = st.variance;
    rep.model_variance = variance(model);
    const double var_of_var =
        std::max(st.m4 - st.variance * st.variance, 0.0) / static_cast<double>(st.n);
    rep.variance_se = std::sqrt(var_of_var);
    rep.variance_pass = std::abs(rep.sample_variance - rep.model_variance) <=
                        6.0 * std::max(rep.variance_se, 1e-300);
    rep.pass = rep.gof.pass && rep.variance_pass;
    return rep;
}

}  // namespace jnoise
