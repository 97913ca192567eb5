#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "jnoise/core.hpp"

namespace jnoise {

struct SampleStats {
    long long n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double m4 = 0.0;        // central fourth moment
    double min = 0.0, max = 0.0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
    SampleStats s;
    s.n = static_cast<long long>(xs.size());
    if (xs.empty()) return s;
    double sum = 0.0;
    s.min = s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(s.n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    s.variance = s.n > 1 ? m2 / static_cast<double>(s.n - 1) : 0.0;
    s.m4 = m4 / static_cast<double>(s.n);
    return s;
}

inline double sample_variance(std::span<const double> xs) { return sample_stats(xs).variance; }

inline double chi_square_quantile(int dof, double prob) {
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(dist, prob);
}

inline double chi_square_sf(int dof, double stat) {
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double critical = 0.0;  // quantile at 1 - alpha
    int dof = 0;
    int bins_used = 0;
    long long n = 0;
    long long outside_support = 0;
    bool pass = false;
};

namespace detail {

// Merge adjacent histogram cells until every group's expected count reaches
// min_expected; a trailing short group is folded into its neighbor.
inline void merge_bins(std::vector<double>& observed, std::vector<double>& expected,
                       double min_expected) {
    std::vector<double> o, e;
    double co = 0.0, ce = 0.0;
    for (size_t i = 0; i < expected.size(); ++i) {
        co += observed[i];
        ce += expected[i];
        if (ce >= min_expected) {
            o.push_back(co);
            e.push_back(ce);
            co = ce = 0.0;
        }
    }
    if (ce > 0.0 || co > 0.0) {
        if (!e.empty()) {
            o.back() += co;
            e.back() += ce;
        } else {
            o.push_back(co);
            e.push_back(ce);
        }
    }
    observed = std::move(o);
    expected = std::move(e);
}

}  // namespace detail

/// Pearson chi-square goodness-of-fit of samples against a model given by its
/// bin-mass function over [lo, hi) split into nbins cells. Masses are
/// renormalized over the range; low-expectation cells are merged (>= 5).
inline GofResult chi_square_gof(std::span<const double> samples,
                                const std::function<double(double, double)>& model_bin_mass,
                                double lo, double hi, int nbins, double alpha) {
    if (nbins < 2) throw DomainError("chi_square_gof: need at least 2 bins");
    if (!(hi > lo)) throw DomainError("chi_square_gof: empty support");
    GofResult r;
    r.n = static_cast<long long>(samples.size());

    const double width = (hi - lo) / nbins;
    std::vector<double> observed(static_cast<size_t>(nbins), 0.0);
    long long inside = 0;
    for (double s : samples) {
        if (s < lo || s >= hi) {
            ++r.outside_support;
            continue;
        }
        int b = static_cast<int>((s - lo) / width);
        if (b >= nbins) b = nbins - 1;
        observed[static_cast<size_t>(b)] += 1.0;
        ++inside;
    }
    if (inside < 2) throw DomainError("chi_square_gof: no samples in support");

    std::vector<double> expected(static_cast<size_t>(nbins), 0.0);
    double total_mass = 0.0;
    for (int b = 0; b < nbins; ++b) {
        const double m = model_bin_mass(lo + b * width, lo + (b + 1) * width);
        expected[static_cast<size_t>(b)] = m;
        total_mass += m;
    }
    if (total_mass <= 0.0) throw DomainError("chi_square_gof: model has no mass on support");
    for (double& e : expected) e *= static_cast<double>(inside) / total_mass;

    detail::merge_bins(observed, expected, 5.0);
    r.bins_used = static_cast<int>(expected.size());
    r.dof = std::max(1, r.bins_used - 1);
    for (size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        r.statistic += d * d / expected[i];
    }
    r.p_value = chi_square_sf(r.dof, r.statistic);
    r.critical = chi_square_quantile(r.dof, 1.0 - alpha);
    r.pass = r.statistic <= r.critical;
    return r;
}

/// Two-sample chi-square homogeneity test on a shared binning of [lo, hi).
inline GofResult two_sample_chi_square(std::span<const double> a, std::span<const double> b,
                                       double lo, double hi, int nbins, double alpha) {
    if (a.empty() || b.empty()) throw DomainError("two_sample_chi_square: empty sample");
    const double width = (hi - lo) / nbins;
    std::vector<double> ca(static_cast<size_t>(nbins), 0.0), cb(ca);
    auto fill = [&](std::span<const double> xs, std::vector<double>& c) {
        long long used = 0;
        for (double s : xs) {
            if (s < lo || s >= hi) continue;
            int bin = static_cast<int>((s - lo) / width);
            if (bin >= nbins) bin = nbins - 1;
            c[static_cast<size_t>(bin)] += 1.0;
            ++used;
        }
        return used;
    };
    const double na = static_cast<double>(fill(a, ca));
    const double nb = static_cast<double>(fill(b, cb));
    if (na < 2 || nb < 2) throw DomainError("two_sample_chi_square: no samples in range");

    // Merge cells whose combined count is too small for the approximation.
    std::vector<double> ma, mb;
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < nbins; ++i) {
        sa += ca[static_cast<size_t>(i)];
        sb += cb[static_cast<size_t>(i)];
        if (sa + sb >= 10.0) {
            ma.push_back(sa);
            mb.push_back(sb);
            sa = sb = 0.0;
        }
    }
    if ((sa > 0.0 || sb > 0.0) && !ma.empty()) {
        ma.back() += sa;
        mb.back() += sb;
    }

    GofResult r;
    r.n = static_cast<long long>(na + nb);
    r.bins_used = static_cast<int>(ma.size());
    r.dof = std::max(1, r.bins_used - 1);
    for (size_t i = 0; i < ma.size(); ++i) {
        const double tot = ma[i] + mb[i];
        if (tot <= 0.0) continue;
        const double ea = na * tot / (na + nb);
        const double eb = nb * tot / (na + nb);
        if (ea > 0.0) r.statistic += (ma[i] - ea) * (ma[i] - ea) / ea;
        if (eb > 0.0) r.statistic += (mb[i] - eb) * (mb[i] - eb) / eb;
    }
    r.p_value = chi_square_sf(r.dof, r.statistic);
    r.critical = chi_square_quantile(r.dof, 1.0 - alpha);
    r.pass = r.statistic <= r.critical;
    return r;
}

}  // namespace jnoise
