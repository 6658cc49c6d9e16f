#include "doctest.h"

#include <cmath>
#include <vector>

#include "mlin/wavelets.hpp"

using namespace mlin;

TEST_CASE("daubechies filter: known p = 2 taps, sum and orthonormality") {
    auto h2 = daubechies_filter(2);
    REQUIRE(h2.size() == 4);
    // extremal-phase db2 constants
    CHECK(h2[0] == doctest::Approx(0.48296291314453414).epsilon(1e-10));
    CHECK(h2[1] == doctest::Approx(0.8365163037378079).epsilon(1e-10));
    CHECK(h2[2] == doctest::Approx(0.22414386804185735).epsilon(1e-10));
    CHECK(h2[3] == doctest::Approx(-0.12940952255092145).epsilon(1e-10));

    for (int p : {2, 3, 4, 6, 8, 11}) {
        auto h = daubechies_filter(p);
        REQUIRE(static_cast<int>(h.size()) == 2 * p);
        double sum = 0;
        for (double v : h) sum += v;
        CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        for (int t = 0; t <= p; ++t) {
            double acc = 0;
            for (std::size_t k = 0; k + 2 * t < h.size(); ++k) acc += h[k] * h[k + 2 * t];
            CHECK(acc == doctest::Approx(t == 0 ? 1.0 : 0.0).epsilon(1e-11));
        }
        // discrete vanishing moments of the wavelet filter; the tolerance
        // tracks the term magnitude (2p)^a that the cancellation fights
        for (int a = 0; a < p; ++a) {
            double acc = 0, mag = 0;
            for (std::size_t k = 0; k < h.size(); ++k) {
                const double term = ((k % 2) ? -1.0 : 1.0) * h[h.size() - 1 - k] *
                                    std::pow(static_cast<double>(k), a);
                acc += term;
                mag += std::abs(term);
            }
            CHECK(std::abs(acc) < 1e-10 * mag + 1e-11);
        }
    }
}

TEST_CASE("mother wavelets: moments vanish under the cascade quadrature") {
    for (int M : {1, 2, 3, 5}) {
        MotherWavelets w = build_daubechies(M);
        CHECK(w.C0 == doctest::Approx(2 * M + 1));
        for (int a = 0; a <= M; ++a) {
            const double mom = w.moment_quadrature('M', a);
            CAPTURE(M);
            CAPTURE(a);
            CHECK(std::abs(mom) <= 1e-6);
        }
        // father integrates to one exactly on the dyadic grid
        CHECK(w.moment_quadrature('F', 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mother wavelets: exact norms and orthonormality") {
    for (int M : {1, 2, 3, 5}) {
        MotherWavelets w = build_daubechies(M);
        CHECK(w.autocorrelation(0) == doctest::Approx(1.0).epsilon(1e-9));
        for (long c = 1; c <= 2 * M + 1; ++c)
            CHECK(std::abs(w.autocorrelation(c)) < 1e-9);

        // normalized atoms: unit self inner products, vanishing cross ones
        CHECK(w.exact_inner('F', 0, 0, 'F', 0, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(w.exact_inner('M', 0, 0, 'M', 0, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(w.exact_inner('M', 0, 0, 'M', 0, 1)) < 1e-9);
        CHECK(std::abs(w.exact_inner('F', 0, 0, 'M', 0, 0)) < 1e-9);
        CHECK(std::abs(w.exact_inner('M', 0, 0, 'M', 1, 3)) < 1e-9);
        CHECK(std::abs(w.exact_inner('F', 0, 2, 'M', 2, -1)) < 1e-9);
        CHECK(w.exact_inner('M', 2, 5, 'M', 2, 5) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("mother wavelets: quadrature inner products agree at desk tolerance") {
    for (int M : {1, 3}) {
        MotherWavelets w = build_daubechies(M);
        CAPTURE(M);
        CHECK(w.inner_quadrature('F', 0, 0, 'F', 0, 0) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(w.inner_quadrature('M', 0, 0, 'M', 0, 0) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(std::abs(w.inner_quadrature('M', 0, 0, 'M', 0, 1)) <= 1e-4);
        CHECK(std::abs(w.inner_quadrature('F', 0, 0, 'M', 0, 0)) <= 1e-4);
        CHECK(std::abs(w.inner_quadrature('M', 0, 0, 'M', 1, 2)) <= 1e-4);
    }
}

TEST_CASE("mother wavelets: supports and argument validation") {
    MotherWavelets w = build_daubechies(3);
    CHECK(w.eval('F', -0.25) == 0.0);
    CHECK(w.eval('M', w.C0 + 0.5) == 0.0);
    CHECK(w.eval('F', 1.0) != 0.0);
    CHECK_THROWS_AS(build_daubechies(0), std::invalid_argument);
    CHECK_THROWS_AS(build_daubechies(11), std::invalid_argument);
    CHECK_THROWS_AS(w.eval('X', 0.5), std::invalid_argument);
}

TEST_CASE("bump: support, overlap constant and the packing bound") {
    BumpProfile b = build_bump(1.0);
    CHECK(b.c_ov == 3);
    CHECK(b.eval(0.0) == doctest::Approx(1.0));
    CHECK(b.eval(1.0) == 0.0);
    CHECK(b.eval(-1.2) == 0.0);
    CHECK(b.eval(0.5) > 0.0);

    // translates by Z: at most pairwise overlap, sum bounded by c_ov
    for (double xi = -3.0; xi <= 3.0; xi += 1.0 / 512) {
        double sum = 0;
        int nonzero = 0;
        for (int k = -6; k <= 6; ++k) {
            const double v = b.eval(xi - k);
            if (v != 0.0) ++nonzero;
            sum += v;
        }
        CHECK(nonzero <= 2);
        CHECK(sum <= static_cast<double>(b.c_ov));
    }

    // level-2 dilates: sum_k |2^{lambda/2} omega(2^lambda xi - k)| <= 2^{lambda/2} c_ov
    const int lambda = 2;
    const double amp = std::pow(2.0, lambda * 0.5);
    for (double xi = -2.0; xi <= 2.0; xi += 1.0 / 512) {
        double sum = 0;
        for (int k = -12; k <= 12; ++k) sum += amp * b.eval(std::ldexp(xi, lambda) - k);
        CHECK(sum <= amp * b.c_ov + 1e-12);
    }

    CHECK_THROWS_AS(build_bump(0.0), std::invalid_argument);
}
