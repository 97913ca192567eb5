#include <catch2/catch_amalgamated.hpp>

#include "jnoise/dct.hpp"
#include "jnoise/synth.hpp"
#include "oracles.hpp"

using namespace jnoise;

namespace {

PixelBlock random_block(Rng& rng, double lo = -128.0, double hi = 128.0) {
    PixelBlock b;
    for (auto& v : b.v) v = rng.uniform(lo, hi);
    return b;
}

}  // namespace

TEST_CASE("all-zero block transforms to all-zero spectrum") {
    const auto s = forward_dct(PixelBlock{});
    for (double v : s.v) CHECK(v == 0.0);
    const auto p = inverse_dct(SpectrumBlock{});
    for (double v : p.v) CHECK(v == 0.0);
}

TEST_CASE("constant block maps to a pure DC coefficient of 8c") {
    PixelBlock b;
    for (auto& v : b.v) v = 7.25;
    const auto s = forward_dct(b);
    CHECK_THAT(s[0], Catch::Matchers::WithinAbs(8.0 * 7.25, 1e-12));
    for (size_t u = 1; u < kBlockArea; ++u) CHECK_THAT(s[u], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("unit DC coefficient decodes to a constant 1/8 block") {
    SpectrumBlock s;
    s[0] = 1.0;
    const auto p = inverse_dct(s);
    for (double v : p.v) CHECK_THAT(v, Catch::Matchers::WithinAbs(0.125, 1e-12));
}

TEST_CASE("forward matches the double-sum reference transform") {
    Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        const PixelBlock b = random_block(rng);
        const auto got = forward_dct(b);
        const auto want = oracle::reference_dct_2d(b.v);
        for (size_t u = 0; u < kBlockArea; ++u)
            CHECK_THAT(got[u], Catch::Matchers::WithinAbs(want[u], 1e-9));
    }
}

TEST_CASE("inverse matches the double-sum reference transform") {
    Rng rng(102);
    for (int i = 0; i < 50; ++i) {
        SpectrumBlock s;
        for (auto& v : s.v) v = rng.uniform(-64.0, 64.0);
        const auto got = inverse_dct(s);
        const auto want = oracle::reference_idct_2d(s.v);
        for (size_t u = 0; u < kBlockArea; ++u)
            CHECK_THAT(got[u], Catch::Matchers::WithinAbs(want[u], 1e-9));
    }
}

TEST_CASE("round trips reproduce the input to 1e-9") {
    Rng rng(103);
    for (int i = 0; i < 1000; ++i) {
        const PixelBlock b = random_block(rng, -300.0, 300.0);
        const PixelBlock back = inverse_dct(forward_dct(b));
        for (size_t u = 0; u < kBlockArea; ++u)
            CHECK_THAT(back[u], Catch::Matchers::WithinAbs(b[u], 1e-9));
    }
    for (int i = 0; i < 200; ++i) {
        SpectrumBlock s;
        for (auto& v : s.v) v = rng.uniform(-300.0, 300.0);
        const SpectrumBlock back = forward_dct(inverse_dct(s));
        for (size_t u = 0; u < kBlockArea; ++u)
            CHECK_THAT(back[u], Catch::Matchers::WithinAbs(s[u], 1e-9));
    }
}

TEST_CASE("Parseval: the transform preserves energy") {
    Rng rng(104);
    for (int i = 0; i < 200; ++i) {
        const PixelBlock b = random_block(rng);
        const auto s = forward_dct(b);
        double ein = 0.0, eout = 0.0;
        for (size_t u = 0; u < kBlockArea; ++u) {
            ein += b[u] * b[u];
            eout += s[u] * s[u];
        }
        CHECK_THAT(eout, Catch::Matchers::WithinRel(ein, 1e-9));
    }
}

TEST_CASE("linearity of the transform") {
    Rng rng(105);
    for (int i = 0; i < 100; ++i) {
        const PixelBlock b1 = random_block(rng), b2 = random_block(rng);
        const double a = rng.uniform(-3.0, 3.0);
        PixelBlock combo;
        for (size_t u = 0; u < kBlockArea; ++u) combo[u] = a * b1[u] + b2[u];
        const auto lhs = forward_dct(combo);
        const auto s1 = forward_dct(b1);
        const auto s2 = forward_dct(b2);
        for (size_t u = 0; u < kBlockArea; ++u)
            CHECK_THAT(lhs[u], Catch::Matchers::WithinAbs(a * s1[u] + s2[u], 1e-9));
    }
}

TEST_CASE("non-finite blocks are rejected") {
    PixelBlock b;
    b[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward_dct(b), DomainError);
    SpectrumBlock s;
    s[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(inverse_dct(s), DomainError);
}

TEST_CASE("plane-level transforms agree with blockwise application") {
    Rng rng(106);
    Plane p(24, 16);
    for (auto& v : p.samples()) v = rng.uniform(0.0, 255.0);
    const Plane spec = forward_dct_plane(p);
    for (int br = 0; br < p.blocks_y(); ++br)
        for (int bc = 0; bc < p.blocks_x(); ++bc) {
            const auto direct = forward_dct(extract_block<detail::PixelTag>(p, br, bc));
            const auto stored = extract_block<detail::SpectrumTag>(spec, br, bc);
            for (size_t u = 0; u < kBlockArea; ++u) CHECK(direct[u] == stored[u]);
        }
    const Plane back = inverse_dct_plane(spec);
    for (size_t i = 0; i < p.size(); ++i)
        CHECK_THAT(back.samples()[i], Catch::Matchers::WithinAbs(p.samples()[i], 1e-9));
}
