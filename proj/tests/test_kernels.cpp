#include "doctest.h"

#include <cmath>
#include <sstream>

#include "mlin/errors.hpp"
#include "mlin/kernels.hpp"
#include "mlin/rng.hpp"

using namespace mlin;

namespace {

SphereFunction cos_omega() {
    return SphereFunction::from_fn(2, 2.0, [](const double* u) { return u[0]; });
}

} // namespace

TEST_CASE("sphere quadrature: mean zero, norms, constructor guard") {
    SphereFunction s = cos_omega();
    CHECK(std::abs(s.mean()) <= 1e-10);
    // ||cos||_{L^2(S^1)} = sqrt(pi)
    CHECK(s.lq_norm() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));

    CHECK_THROWS_AS(SphereFunction::from_fn(2, 2.0, [](const double*) { return 1.0; }),
                    std::invalid_argument);

    SphereFunction odd3 = SphereFunction::from_fn(3, 2.0, [](const double* u) { return u[2]; });
    CHECK(std::abs(odd3.mean()) <= 1e-10);
}

TEST_CASE("kernel_eval: spec values, homogeneity, singularity") {
    SphereFunction zero = SphereFunction::from_fn(2, 2.0, [](const double*) { return 0.0; });
    const double y1[2] = {1.5, -0.3};
    CHECK(kernel_eval(zero, y1) == 0.0);

    SphereFunction s = cos_omega();
    const double y2[2] = {2.0, 0.0};
    CHECK(kernel_eval(s, y2) == doctest::Approx(0.25).epsilon(1e-9));

    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        double y[2] = {rng.normal(), rng.normal()};
        if (y[0] == 0 && y[1] == 0) continue;
        double y2x[2] = {2 * y[0], 2 * y[1]};
        CHECK(kernel_eval(s, y2x) ==
              doctest::Approx(0.25 * kernel_eval(s, y)).epsilon(1e-9));
    }

    const double origin[2] = {0.0, 0.0};
    CHECK_THROWS_AS(kernel_eval(s, origin), singular_point_error);
}

TEST_CASE("fourier integral round trip") {
    TorusGrid g{2, 8.0, 64};
    Rng rng(9);
    GridFunction f(g);
    for (auto& v : f.values()) v = rng.cnormal();
    GridFunction back = inverse_fourier_integral(fourier_integral(f));
    double err = 0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    CHECK(err < 1e-10);
}

TEST_CASE("dyadic pieces: zero kernel, annulus mass, dilation identities") {
    SphereFunction zero = SphereFunction::from_fn(2, 2.0, [](const double*) { return 0.0; });
    TorusGrid g{2, 8.0, 512};
    RoughKernel zk(zero, g);
    CHECK(l2_counting(zk.dyadic_piece(0, 3).physical) == 0.0);

    RoughKernel kern(cos_omega(), g);
    // >= 1 - 1e-6 of the transform mass of K^0_mu inside [2^{mu-2}, 2^{mu+2}]
    for (int mu = 2; mu <= 4; ++mu)
        CHECK(kern.annulus_mass_fraction(mu) >= 1.0 - 1e-6);

    // gamma-rescaling: K^1_mu-hat at lattice node 2 xi equals K^0_mu-hat at xi
    const int mu = 3;
    RoughKernel::Piece p0 = kern.dyadic_piece(0, mu);
    RoughKernel::Piece p1 = kern.dyadic_piece(1, mu);
    double ref = 0, err = 0;
    const int G = g.points;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const long si = i - G / 2, sj = j - G / 2;
            if (std::abs(2 * si) >= G / 2 || std::abs(2 * sj) >= G / 2) continue;
            const std::size_t idx0 = static_cast<std::size_t>(i) * G + j;
            const std::size_t idx1 =
                static_cast<std::size_t>(2 * si + G / 2) * G + (2 * sj + G / 2);
            // K^1_mu-hat(xi) = K^0_mu-hat(xi/2), evaluated where both live
            // on lattice nodes: p1.transform[2 xi] vs p0.transform[xi]
            err = std::max(err, std::abs(p1.transform[idx1] - p0.transform[idx0]));
            ref = std::max(ref, std::abs(p0.transform[idx0]));
        }
    }
    CHECK(err <= 1e-6 * ref);

    // physical-side rescaling K^1_mu(y) = 2^{mn} K^0_mu(2y) at even nodes
    double perr = 0, pref = 0;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const long si = i - G / 2, sj = j - G / 2;
            if (std::abs(2 * si) >= G / 2 || std::abs(2 * sj) >= G / 2) continue;
            // y node of index pair (i,j) doubled lands on index (2 si + G/2)
            const std::size_t at_y = static_cast<std::size_t>(i) * G + j;
            const std::size_t at_2y =
                static_cast<std::size_t>(2 * si + G / 2) * G + (2 * sj + G / 2);
            perr = std::max(perr,
                            std::abs(p1.physical[at_y] - 4.0 * p0.physical[at_2y]));
            pref = std::max(pref, 4.0 * std::abs(p0.physical[at_2y]));
        }
    }
    CHECK(perr <= 1e-6 * pref);
}

TEST_CASE("assemble_kmu: single gamma equals the piece; transform superposes") {
    RoughKernel kern(cos_omega(), TorusGrid{2, 8.0, 256});
    const int mu = 2;
    RoughKernel::Assembled one = kern.assemble_kmu(mu, 0, 0);
    RoughKernel::Piece p = kern.dyadic_piece(0, mu);
    double err = 0;
    for (std::size_t i = 0; i < p.transform.size(); ++i)
        err = std::max(err, std::abs(one.transform[i] - p.transform[i]));
    CHECK(err == 0.0);

    RoughKernel::Assembled span = kern.assemble_kmu(mu, -2, 1);
    GridFunction expect(span.transform.grid());
    for (int gamma = -2; gamma <= 1; ++gamma) expect += kern.dyadic_piece(gamma, mu).transform;
    double serr = 0;
    for (std::size_t i = 0; i < expect.size(); ++i)
        serr = std::max(serr, std::abs(span.transform[i] - expect[i]));
    CHECK(serr == 0.0);
    CHECK(span.boundary_mass > 0.0);

    // adjacent scales overlap at most pairwise: sup |K_mu-hat| stays within
    // (1 + overlap) of one piece
    double sup_one = 0, sup_all = 0;
    for (std::size_t i = 0; i < p.transform.size(); ++i) {
        sup_one = std::max(sup_one, std::abs(p.transform[i]));
        sup_all = std::max(sup_all, std::abs(span.transform[i]));
    }
    CHECK(sup_all <= 3.0 * sup_one);
}

TEST_CASE("rough_coeffs: zero kernel gives an empty table") {
    SphereFunction zero = SphereFunction::from_fn(2, 2.0, [](const double*) { return 0.0; });
    RoughKernel zk(zero, TorusGrid{2, 8.0, 512});
    MotherWavelets w = build_daubechies(2);
    CHECK(zk.rough_coeffs(3, 0, w).empty());
}

TEST_CASE("hormander symbols: slice invariance, support, coefficients") {
    MotherWavelets w = build_daubechies(2);
    HormanderSymbol env = HormanderSymbol::make(HormanderSymbol::Kind::Envelope, 2, 1, 2.0, 4.0);

    // sigma == 1 (envelope with s = 0) gives gamma-independent slices
    HormanderSymbol flat = HormanderSymbol::make(HormanderSymbol::Kind::Envelope, 2, 1, 0.0, 4.0);
    SampleGrid sg = SampleGrid::centered(2, 5, 2.1);
    SampledSymbol s0 = flat.slice(0, sg), s3 = flat.slice(3, sg);
    double derr = 0;
    for (std::size_t i = 0; i < s0.values.size(); ++i)
        derr = std::max(derr, std::abs(s0.values[i] - s3.values[i]));
    CHECK(derr == 0.0);

    // slice support is exactly the window annulus
    SampledSymbol sl = env.slice(1, SampleGrid::centered(2, 5, 3.0));
    std::vector<long> idx(sl.grid.lo.begin(), sl.grid.lo.end());
    for (std::size_t flat_i = 0; flat_i < sl.values.size(); ++flat_i) {
        const double x = sl.grid.coord(idx[0]), y = sl.grid.coord(idx[1]);
        const double r = std::sqrt(x * x + y * y);
        if (r < 0.5 || r > 2.0) CHECK(std::abs(sl.values[flat_i]) == 0.0);
        for (int a = 1; a >= 0; --a) {
            if (++idx[a] < sl.grid.hi[a]) break;
            idx[a] = sl.grid.lo[a];
        }
    }

    // oscillating symbol: |sigma| = 1 inside the truncation radius
    HormanderSymbol osc =
        HormanderSymbol::make(HormanderSymbol::Kind::Oscillating, 2, 1, 2.0, 4.0);
    const double xi[2] = {1.0, -2.0};
    CHECK(std::abs(osc.eval(xi)) == doctest::Approx(1.0).epsilon(1e-12));

    // per-gamma tables exist and are finite
    std::vector<int> gammas{-1, 0, 1};
    auto tables = env.slice_coeffs(gammas, 2, w, 5);
    CHECK(tables.size() == 3);
    for (auto& [gamma, t] : tables) CHECK(t.max_abs() > 0.0);
}
