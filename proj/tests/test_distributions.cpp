#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "jnoise/codec.hpp"
#include "jnoise/distributions.hpp"
#include "jnoise/synth.hpp"
#include "jnoise/validation.hpp"
#include "oracles.hpp"

using namespace jnoise;

namespace {

const std::vector<double> kSigma2Grid = {1e-4, 1e-3, 0.01, 0.02, 0.1, 0.5, 1.0, 4.0, 10.0};
const std::vector<int> kQGrid = {1, 2, 3, 4, 5, 6, 8, 11, 16};

std::vector<double> quantization_noise_draws(Rng& rng, double sigma, int q, size_t n) {
    std::vector<double> out(n);
    for (double& v : out) {
        const double y = rng.gaussian(0.0, sigma);
        v = y - static_cast<double>(round_to_int(y / q)) * q;
    }
    return out;
}

}  // namespace

TEST_CASE("quantized-Gaussian pdf matches the brute-force folded sum") {
    // Two independent derivations of the same density: the characteristic-
    // function cosine series vs direct folding of the Gaussian (Eq. form).
    for (double s2 : kSigma2Grid)
        for (int q : kQGrid)
            for (int i = 0; i < 33; ++i) {
                const double s = -q / 2.0 + q * (i / 33.0);
                const double series = quantized_gaussian_pdf(s2, q, s);
                const double folded = folded_pdf(Gaussian{0.0, s2}, q, s);
                REQUIRE_THAT(series, Catch::Matchers::WithinAbs(folded, 1e-10));
            }
}

TEST_CASE("quantized-Gaussian pdf is symmetric and nonnegative") {
    for (double s2 : {0.01, 0.1, 1.0})
        for (int q : {1, 3, 8})
            for (int i = 1; i < 16; ++i) {
                const double s = q * i / 33.0;
                CHECK_THAT(quantized_gaussian_pdf(s2, q, s),
                           Catch::Matchers::WithinAbs(quantized_gaussian_pdf(s2, q, -s), 1e-13));
                CHECK(quantized_gaussian_pdf(s2, q, s) >= 0.0);
            }
}

TEST_CASE("quantized-Gaussian pdf integrates to one") {
    for (double s2 : {1e-3, 0.02, 0.5})
        for (int q : {1, 2, 7}) {
            const double total = oracle::simpson(
                [&](double s) {
                    const double x = s >= q / 2.0 ? std::nextafter(q / 2.0, 0.0) : s;
                    return quantized_gaussian_pdf(s2, q, x);
                },
                -q / 2.0, q / 2.0, 1 << 12);
            CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));
        }
}

TEST_CASE("variance series matches quadrature of s^2 f(s)") {
    for (double s2 : kSigma2Grid)
        for (int q : kQGrid) {
            const double series = quantized_gaussian_variance(s2, q);
            const double quad = oracle::simpson(
                [&](double s) {
                    const double x = s >= q / 2.0 ? std::nextafter(q / 2.0, 0.0) : s;
                    return s * s * quantized_gaussian_pdf(s2, q, x);
                },
                -q / 2.0, q / 2.0, 1 << 13);
            REQUIRE_THAT(series, Catch::Matchers::WithinAbs(quad, 1e-8));
        }
}

TEST_CASE("variance never exceeds the uniform bound q^2/12") {
    for (double s2 : kSigma2Grid)
        for (int q : kQGrid)
            REQUIRE(quantized_gaussian_variance(s2, q) - q * q / 12.0 <= 1e-15);
}

TEST_CASE("variance is nondecreasing in sigma^2") {
    for (int q : {1, 4, 16}) {
        double prev = 0.0;
        for (double s2 = 1e-4; s2 < 20.0; s2 *= 1.6) {
            const double v = quantized_gaussian_variance(s2, q);
            CHECK(v >= prev - 1e-14);
            prev = v;
        }
    }
}

TEST_CASE("wide-signal limit attains the uniform variance") {
    for (int q : {1, 4, 16}) {
        const double s2 = 2.0 * q * q;
        CHECK_THAT(quantized_gaussian_variance(s2, q),
                   Catch::Matchers::WithinAbs(q * q / 12.0, 1e-12));
    }
}

TEST_CASE("narrow-signal limit: variance equals sigma^2 (Monte Carlo)") {
    Rng rng(401);
    const auto draws = quantization_noise_draws(rng, 0.1, 1, 1'000'000);
    const double mc = sample_variance(draws);
    CHECK_THAT(quantized_gaussian_variance(0.01, 1), Catch::Matchers::WithinRel(mc, 0.01));
    CHECK_THAT(quantized_gaussian_variance(0.01, 1), Catch::Matchers::WithinRel(0.01, 0.02));
}

TEST_CASE("folded pdf approaches 1/q for wide signals") {
    for (int q : {1, 2, 8}) {
        const double sigma = 5.0 * q;
        for (int i = 0; i < 17; ++i) {
            const double s = -q / 2.0 + q * (i / 17.0);
            CHECK_THAT(folded_pdf(Gaussian{0.0, sigma * sigma}, q, s),
                       Catch::Matchers::WithinAbs(1.0 / q, 1e-6));
        }
    }
}

TEST_CASE("folded pdf concentrates as the signal shrinks") {
    const double f0 = folded_pdf(Gaussian{0.0, 1e-6}, 1, 0.0);
    const double fq = folded_pdf(Gaussian{0.0, 1e-6}, 1, 0.25);
    CHECK(f0 > 100.0);
    CHECK(fq < 1e-12);
}

TEST_CASE("folded pdf matches a Monte-Carlo histogram") {
    Rng rng(402);
    const size_t n = 1'000'000;
    const auto draws = quantization_noise_draws(rng, 0.1, 1, n);
    const int bins = 16;
    std::vector<double> counts(bins, 0.0);
    for (double v : draws) {
        int b = static_cast<int>((v + 0.5) * bins);
        if (b == bins) b = bins - 1;
        counts[static_cast<size_t>(b)] += 1.0;
    }
    const NoiseDistribution model = QuantizedGaussian{0.01, 1};
    int substantive = 0;
    for (int b = 0; b < bins; ++b) {
        const double lo = -0.5 + static_cast<double>(b) / bins;
        const double hi = lo + 1.0 / bins;
        const double expected = bin_mass(model, lo, hi) * static_cast<double>(n);
        if (expected < 0.01 * static_cast<double>(n)) continue;  // sub-1% tail bins are all noise
        ++substantive;
        CHECK_THAT(counts[static_cast<size_t>(b)], Catch::Matchers::WithinRel(expected, 0.02));
    }
    CHECK(substantive >= 4);
}

TEST_CASE("support is enforced") {
    CHECK_THROWS_AS(quantized_gaussian_pdf(0.1, 4, 2.0), DomainError);
    CHECK_THROWS_AS(quantized_gaussian_pdf(0.1, 4, -2.5), DomainError);
    CHECK_THROWS_AS(folded_pdf(Gaussian{0.0, 1.0}, 2, 1.0), DomainError);
    CHECK_THROWS_AS(quantized_gaussian_pdf(-1.0, 4, 0.0), DomainError);
    CHECK_THROWS_AS(quantized_gaussian_variance(0.0, 4), DomainError);
    CHECK(quantized_gaussian_pdf(0.1, 4, -2.0) > 0.0);  // left edge is inside
}

TEST_CASE("quantized-Laplacian variance limits") {
    // Flat source (sigma >> q): uniform variance. Peaked source: far below it.
    const double flat_rate = laplacian_rate_from_variance(1000.0 * 1000.0);
    CHECK_THAT(variance(QuantizedLaplacian{flat_rate, 8}),
               Catch::Matchers::WithinRel(64.0 / 12.0, 0.01));
    const double peaked_rate = laplacian_rate_from_variance(0.25);
    CHECK(variance(QuantizedLaplacian{peaked_rate, 8}) < 0.2 * 64.0 / 12.0);
}

TEST_CASE("all densities integrate to one and have zero-mean quantized forms") {
    const std::vector<NoiseDistribution> dists = {
        Uniform{-2.0, 2.0},
        Gaussian{0.3, 0.7},
        Laplacian{-0.2, 2.0},
        QuantizedGaussian{0.05, 1},
        QuantizedLaplacian{0.9, 5},
        Folded{CoeffLaw{Laplacian{0.4, 1.3}}, 3},
    };
    for (const auto& d : dists) {
        const auto [lo, hi] = support(d);
        const double total = oracle::simpson(
            [&](double s) {
                const double x = s >= hi ? std::nextafter(hi, lo) : s;
                return pdf(d, x);
            },
            lo, hi, 1 << 13);
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
    CHECK(mean(QuantizedGaussian{0.05, 1}) == 0.0);
    CHECK(mean(QuantizedLaplacian{0.9, 5}) == 0.0);
}

TEST_CASE("lambda from variance follows the Laplacian relation") {
    CHECK_THAT(laplacian_rate_from_variance(2.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(variance(Laplacian{0.0, laplacian_rate_from_variance(5.5)}),
               Catch::Matchers::WithinAbs(5.5, 1e-12));
    CHECK_THROWS_AS(laplacian_rate_from_variance(0.0), DomainError);
}

TEST_CASE("first-cycle models: uniform DC, quantized-Laplacian AC") {
    QuantTable t = QuantTable::uniform(8);
    t.steps[0] = 12;
    std::array<double, kBlockArea> coeff_var{};
    coeff_var.fill(50.0 * 50.0);
    const FirstCycleModels models = first_cycle_models(t, coeff_var);

    const auto* dc = std::get_if<Uniform>(&models.quant[0]);
    REQUIRE(dc != nullptr);
    CHECK(dc->lo == -6.0);
    CHECK(dc->hi == 6.0);
    CHECK_THAT(variance(models.quant[0]), Catch::Matchers::WithinAbs(12.0, 1e-12));
    CHECK_THAT(models.dc_sigma_over_q, Catch::Matchers::WithinAbs(50.0 / 12.0, 1e-12));

    for (size_t u = 1; u < kBlockArea; ++u) {
        const auto* ql = std::get_if<QuantizedLaplacian>(&models.quant[u]);
        REQUIRE(ql != nullptr);
        CHECK(ql->q == 8);
        CHECK_THAT(ql->rate, Catch::Matchers::WithinAbs(std::sqrt(2.0 / 2500.0), 1e-12));
    }

    const NoiseDistribution rounding = first_cycle_rounding_model(0.05);
    const auto* qg = std::get_if<QuantizedGaussian>(&rounding);
    REQUIRE(qg != nullptr);
    CHECK(qg->variance == 0.05);
    CHECK(qg->q == 1);
}

TEST_CASE("variance bounds follow the table") {
    const VarianceBounds ones = variance_bounds(QuantTable::uniform(1));
    for (double b : ones.quant) CHECK_THAT(b, Catch::Matchers::WithinAbs(1.0 / 12.0, 1e-15));
    CHECK_THAT(ones.aux_spatial, Catch::Matchers::WithinAbs(1.0 / 12.0, 1e-15));
    CHECK(ones.rounding == 1.0 / 12.0);
    CHECK(ones.aux_dct == 1.0 / 12.0);

    QuantTable t = QuantTable::uniform(3);
    t.steps[17] = 16;
    const VarianceBounds b = variance_bounds(t);
    CHECK_THAT(b.quant[17], Catch::Matchers::WithinAbs(256.0 / 12.0, 1e-12));
    CHECK_THAT(b.aux_spatial, Catch::Matchers::WithinAbs(256.0 / 12.0, 1e-12));
}

TEST_CASE("higher-cycle model selects the proposition branch") {
    const auto g = higher_cycle_model(6, 3, 0.05);
    const auto* gauss = std::get_if<Gaussian>(&g);
    REQUIRE(gauss != nullptr);
    CHECK(gauss->mean == 0.0);
    CHECK(gauss->variance == 0.05);

    const auto qg = higher_cycle_model(6, 1, 0.05);
    const auto* quant = std::get_if<QuantizedGaussian>(&qg);
    REQUIRE(quant != nullptr);
    CHECK(quant->variance == 0.05);
    CHECK(quant->q == 1);

    const auto f = higher_cycle_model(6, 4, 0.05);
    const auto* folded = std::get_if<Folded>(&f);
    REQUIRE(folded != nullptr);
    CHECK(folded->q == 4);

    const auto fl = higher_cycle_model(6, 4, 0.05, CoeffLaw{Laplacian{0.0, 2.0}});
    CHECK(std::get_if<Laplacian>(&std::get<Folded>(fl).source) != nullptr);

    CHECK_THROWS_AS(higher_cycle_model(0, 1, 0.1), DomainError);
    CHECK_THROWS_AS(higher_cycle_model(4, 2, 0.0), DomainError);
}

TEST_CASE("fit_test accepts samples drawn from the model itself") {
    Rng rng(403);
    int passes = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        const auto draws = quantization_noise_draws(rng, 0.2, 1, 2000);
        if (fit_test(draws, QuantizedGaussian{0.04, 1}, 0.01).pass) ++passes;
    }
    CHECK(passes >= static_cast<int>(0.97 * trials));
}

TEST_CASE("fit_test rejects a uniform model for Gaussian samples") {
    Rng rng(404);
    std::vector<double> draws(5000);
    const double sigma = std::sqrt(1.0 / 12.0);
    for (double& v : draws) v = rng.gaussian(0.0, sigma);
    const FitReport rep = fit_test(draws, Uniform{-0.5, 0.5}, 0.01);
    CHECK_FALSE(rep.gof.pass);
}

TEST_CASE("fit_test accepts the Gaussian model for divisible second cycles") {
    // Coefficients at u in {0,4}x{0,4} sit on an exact 1/8 lattice for
    // integer inputs and are discrete rather than Gaussian; the continuum
    // indices fit cleanly.
    const Plane img = synth_image(256, 256, 405);
    const CompressionTrace trace =
        run_cycles(img, {QuantTable::uniform(4), QuantTable::uniform(2)});
    int ok = 0;
    for (int u = 0; u < kBlockArea; ++u) {
        const auto samples = samples_at_index(trace.noises[1].quant_noise, u);
        const double aux_var = sample_variance(samples_at_index(trace.noises[0].aux_dct, u));
        if (fit_test(samples, Gaussian{0.0, aux_var}, 0.01).gof.pass) ++ok;
    }
    CHECK(ok >= 56);
    CHECK(quant_noise_fits_image(trace, true, 0.01));
}

TEST_CASE("fit_test requires at least 1000 samples") {
    std::vector<double> few(999, 0.1);
    CHECK_THROWS_AS(fit_test(few, QuantizedGaussian{0.04, 1}, 0.01), DomainError);
}

TEST_CASE("fit reports serialize to CSV") {
    Rng rng(407);
    const auto draws = quantization_noise_draws(rng, 0.2, 1, 2000);
    const FitReport rep = fit_test(draws, QuantizedGaussian{0.04, 1}, 0.01);
    const auto path = std::filesystem::temp_directory_path() / "jnoise_fit_report.csv";
    write_fit_reports_csv(path, {{"qg_self", rep}});
    const auto rows = read_csv(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "qg_self");
    CHECK(csv_to_double(rows[1][1]) == rep.gof.statistic);
    CHECK(csv_to_double(rows[1][8]) == rep.model_variance);
}

TEST_CASE("fit_test reports the variance comparison") {
    Rng rng(406);
    const auto draws = quantization_noise_draws(rng, 0.2, 1, 20000);
    const FitReport rep = fit_test(draws, QuantizedGaussian{0.04, 1}, 0.01);
    CHECK(rep.variance_pass);
    CHECK_THAT(rep.model_variance,
               Catch::Matchers::WithinAbs(quantized_gaussian_variance(0.04, 1), 1e-15));
    // a model with the wrong variance scale trips the comparison
    const FitReport bad = fit_test(draws, QuantizedGaussian{0.0004, 1}, 0.01);
    CHECK_FALSE(bad.variance_pass);
}
