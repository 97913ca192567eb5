#include <catch2/catch_amalgamated.hpp>

#include "jnoise/stats.hpp"
#include "jnoise/synth.hpp"
#include "jnoise/validation.hpp"

using namespace jnoise;

TEST_CASE("generator is deterministic in the seed") {
    const Plane a = synth_image(64, 64, 801);
    const Plane b = synth_image(64, 64, 801);
    const Plane c = synth_image(64, 64, 802);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("samples are integers in [0, 255]") {
    const Plane img = synth_image(96, 64, 803);
    CHECK(img.integer_valued());
    for (double v : img.samples()) {
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
}

TEST_CASE("dimension validation") {
    CHECK_THROWS_AS(synth_image(60, 64, 1), ShapeError);
}

TEST_CASE("block DC spreads widely; AC scale decays with frequency") {
    const Plane img = synth_image(256, 256, 804);
    const Plane spec = forward_dct_plane(img);
    const auto dc = samples_at_index(spec, 0);
    CHECK(sample_stats(dc).variance > 100.0 * 100.0);

    const double low = sample_variance(samples_at_index(spec, 1));
    const double high = sample_variance(samples_at_index(spec, 63));
    CHECK(low > 4.0 * high);

    // A mid-band coefficient matches the requested Laplacian scale. The
    // lowest AC band would not: the smooth field leaks into it.
    SynthParams p;
    const double sigma_22 = p.ac_sigma / std::pow(4.0, p.ac_decay);
    const double mid = sample_variance(samples_at_index(spec, 18));
    const double rel = std::abs(mid / (sigma_22 * sigma_22) - 1.0);
    CHECK(rel < 0.35);
}

TEST_CASE("rng produces calibrated variates") {
    Rng rng(805);
    const int n = 100000;
    std::vector<double> g(n), l(n), u(n);
    for (int i = 0; i < n; ++i) {
        g[static_cast<size_t>(i)] = rng.gaussian();
        l[static_cast<size_t>(i)] = rng.laplacian(2.0);
        u[static_cast<size_t>(i)] = rng.uniform();
    }
    const SampleStats sg = sample_stats(g);
    CHECK_THAT(sg.mean, Catch::Matchers::WithinAbs(0.0, 0.02));
    CHECK_THAT(sg.variance, Catch::Matchers::WithinRel(1.0, 0.03));
    const SampleStats sl = sample_stats(l);
    CHECK_THAT(sl.mean, Catch::Matchers::WithinAbs(0.0, 0.02));
    CHECK_THAT(sl.variance, Catch::Matchers::WithinRel(2.0 / 4.0, 0.05));
    const SampleStats su = sample_stats(u);
    CHECK(su.min >= 0.0);
    CHECK(su.max < 1.0);
    CHECK_THAT(su.mean, Catch::Matchers::WithinAbs(0.5, 0.01));
    CHECK_THAT(su.variance, Catch::Matchers::WithinRel(1.0 / 12.0, 0.03));
}

TEST_CASE("derive_seed forks distinct streams") {
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));
    CHECK(Rng::derive_seed(1, 5) == Rng::derive_seed(1, 5));
}

TEST_CASE("corpus builder is seed-stable") {
    const auto a = make_corpus(3, 32, 32, 806);
    const auto b = make_corpus(3, 32, 32, 806);
    REQUIRE(a.size() == 3);
    for (size_t i = 0; i < 3; ++i) CHECK(a[i] == b[i]);
    CHECK_THROWS_AS(make_corpus(0, 32, 32, 1), ConfigError);
}
