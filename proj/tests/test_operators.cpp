#include "doctest.h"

#include <cmath>
#include <memory>

#include "mlin/errors.hpp"
#include "mlin/operators.hpp"
#include "mlin/rng.hpp"

using namespace mlin;

namespace {

GridFunction random_fn(const TorusGrid& g, Rng& rng) {
    GridFunction f(g);
    for (auto& v : f.values()) v = rng.cnormal();
    return f;
}

// trig-sum oracle: evaluates the multiplier sum without any FFT
GridFunction brute_apply(const DenseSymbol& sigma, std::span<const GridFunction> fs) {
    const TorusGrid& g = sigma.grid;
    const int G = g.points, m = sigma.m;
    std::vector<GridFunction> hats;
    for (const auto& f : fs) hats.push_back(dft(f));
    GridFunction out(g);
    const double scale = std::pow(static_cast<double>(G), -0.5 * m);
    for (int i = 0; i < G; ++i) {
        const double x = g.node(i);
        cplx acc{0, 0};
        std::vector<int> idx(m, 0);
        for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
            cplx term = sigma.values[flat];
            double xsum = 0;
            for (int j = 0; j < m; ++j) {
                term *= hats[j][static_cast<std::size_t>(idx[j])];
                xsum += g.freq(idx[j]);
            }
            acc += term * std::exp(cplx{0, 2 * M_PI * x * xsum});
            for (int a = m - 1; a >= 0; --a) {
                if (++idx[a] < G) break;
                idx[a] = 0;
            }
        }
        out[i] = scale * acc;
    }
    return out;
}

double rel_l2(const GridFunction& a, const GridFunction& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

} // namespace

TEST_CASE("apply_dense: identity and pointwise-product reductions") {
    TorusGrid g{1, 4.0, 32};
    Rng rng(1);
    GridFunction f = random_fn(g, rng), h = random_fn(g, rng);

    DenseSymbol one1 = DenseSymbol::from_fn(g, 1, [](const double*) { return cplx{1, 0}; });
    GridFunction idf = apply_dense(one1, std::vector<GridFunction>{f});
    CHECK(rel_l2(idf, f) < 1e-12);

    DenseSymbol one2 = DenseSymbol::from_fn(g, 2, [](const double*) { return cplx{1, 0}; });
    GridFunction prod = apply_dense(one2, std::vector<GridFunction>{f, h});
    GridFunction want(g);
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = f[i] * h[i];
    CHECK(rel_l2(prod, want) < 1e-12);
}

TEST_CASE("apply_dense matches the trig-sum oracle on a random symbol") {
    TorusGrid g{1, 4.0, 32};
    Rng rng(5);
    DenseSymbol sigma = DenseSymbol::from_fn(g, 2, [&](const double*) { return rng.cnormal(); });
    GridFunction f = random_fn(g, rng), h = random_fn(g, rng);
    std::vector<GridFunction> fs{f, h};
    GridFunction fast = apply_dense(sigma, fs);
    GridFunction slow = brute_apply(sigma, fs);
    CHECK(rel_l2(fast, slow) < 1e-10);
}

TEST_CASE("apply_dense is linear in each slot") {
    TorusGrid g{1, 4.0, 32};
    Rng rng(7);
    DenseSymbol sigma = DenseSymbol::from_fn(g, 2, [&](const double*) { return rng.cnormal(); });
    GridFunction f1 = random_fn(g, rng), f2 = random_fn(g, rng), h = random_fn(g, rng);
    const cplx a = rng.cnormal(), b = rng.cnormal();
    GridFunction combo(g);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f1[i] + b * f2[i];
    GridFunction lhs = apply_dense(sigma, std::vector<GridFunction>{combo, h});
    GridFunction r1 = apply_dense(sigma, std::vector<GridFunction>{f1, h});
    GridFunction r2 = apply_dense(sigma, std::vector<GridFunction>{f2, h});
    GridFunction rhs(g);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * r1[i] + b * r2[i];
    CHECK(rel_l2(lhs, rhs) < 1e-12);
}

TEST_CASE("apply_dense budget guards") {
    TorusGrid big{1, 4.0, 512};
    CHECK_THROWS_AS(DenseSymbol::from_fn(big, 2, [](const double*) { return cplx{1, 0}; }),
                    resource_error);
    TorusGrid g{1, 4.0, 16};
    CHECK_THROWS_AS(DenseSymbol::from_fn(g, 4, [](const double*) { return cplx{1, 0}; }),
                    std::invalid_argument);
}

TEST_CASE("atom_project: pass-through, annihilation and the Bessel bound") {
    TorusGrid g{1, 16.0, 256};
    AtomFamily fam = AtomFamily::bump(build_bump(1.0));
    Rng rng(11);

    // fhat concentrated at the atom peak node: projection leaves f unchanged
    GridFunction hat(g);
    hat[g.store_of_freq(0)] = cplx{2, 1};
    GridFunction f = idft(hat);
    const int k0[] = {0};
    GridFunction pf = atom_project(f, fam, 0, k0);
    CHECK(rel_l2(pf, f) < 1e-12);

    // far-away atom annihilates
    const int kfar[] = {120};
    GridFunction zero = atom_project(f, fam, 0, kfar);
    CHECK(l2_norm(zero) < 1e-12);

    // sum_k ||L_k f||^2 <= c_ov 2^{lambda n} ||f||^2
    const int lambda = 1;
    GridFunction r = random_fn(g, rng);
    double acc = 0;
    for (int k = -40; k <= 40; ++k) {
        const int kb[] = {k};
        const double nrm = l2_norm(atom_project(r, fam, lambda, kb));
        acc += nrm * nrm;
    }
    const double bound = fam.bump_profile().c_ov * std::ldexp(1.0, lambda) * std::pow(l2_norm(r), 2);
    CHECK(acc <= bound * (1 + 1e-12));

    TorusGrid tiny{1, 1.0, 8};
    GridFunction ft(tiny);
    CHECK_THROWS_AS(atom_project(ft, fam, 3, k0), resolution_error);
}

TEST_CASE("apply_atomsum: one atom, empty set, dense-oracle agreement") {
    TorusGrid g{1, 32.0, 128};  // dxi = 1/32 resolves lambda = 2 atoms
    AtomFamily fam = AtomFamily::bump(build_bump(1.0));
    Rng rng(23);
    GridFunction f = random_fn(g, rng), h = random_fn(g, rng);
    std::vector<GridFunction> fs{f, h};

    AtomSymbol single;
    single.family = fam;
    single.lambda = 2;
    single.n = 1;
    single.m = 2;
    single.coeffs = {{LatticePoint{{3, -5}}, cplx{1, 0}}};
    GridFunction one = apply_atomsum(single, fs);
    const int k1[] = {3}, k2[] = {-5};
    GridFunction p1 = atom_project(f, fam, 2, k1);
    GridFunction p2 = atom_project(h, fam, 2, k2);
    GridFunction want(g);
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = p1[i] * p2[i];
    CHECK(rel_l2(one, want) < 1e-12);

    AtomSymbol empty = single;
    empty.coeffs.clear();
    CHECK(l2_norm(apply_atomsum(empty, fs)) == 0.0);

    // random U with |U| = 20 at lambda = 2: atom sum vs dense evaluation
    AtomSymbol sigma = empty;
    for (int i = 0; i < 20; ++i) {
        LatticePoint p{{static_cast<int>(rng.uniform_int(-4, 3)),
                        static_cast<int>(rng.uniform_int(-4, 3))}};
        sigma.coeffs.push_back({p, rng.cnormal()});
    }
    GridFunction viaatoms = apply_atomsum(sigma, fs);
    GridFunction viadense = apply_dense(densify(sigma, g), fs);
    CHECK(rel_l2(viaatoms, viadense) <= 1e-8);
}

TEST_CASE("AtomMultiplierOperator agrees with apply_atomsum and has exact gradients") {
    TorusGrid g{1, 16.0, 128};
    AtomFamily fam = AtomFamily::bump(build_bump(0.5));
    Rng rng(31);
    AtomSymbol sigma;
    sigma.family = fam;
    sigma.lambda = 0;
    sigma.n = 1;
    sigma.m = 2;
    for (int i = 0; i < 12; ++i) {
        LatticePoint p{{static_cast<int>(rng.uniform_int(-3, 3)),
                        static_cast<int>(rng.uniform_int(-3, 3))}};
        sigma.coeffs.push_back({p, cplx{rng.rademacher(), 0}});
    }
    AtomMultiplierOperator op(sigma, g);
    GridFunction f = random_fn(g, rng), h = random_fn(g, rng);
    std::vector<GridFunction> fs{f, h};
    CHECK(rel_l2(op.apply(fs), apply_atomsum(sigma, fs)) < 1e-10);

    // directional-derivative check of the adjoint gradient, away from zeros
    GridFunction u = op.apply(fs);
    const double p = 1.0;  // smooth test functional sum |u|^2 dx... use p=2
    (void)p;
    const double dx = g.dx();
    GridFunction v(g);
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = dx * 2.0 * u[i];  // d/du of |u|^2 dx
    GridFunction grad = op.adjoint_gradient(0, fs, v);
    Rng rng2(77);
    GridFunction dir = random_fn(g, rng2);
    const double eps = 1e-6;
    auto phi = [&](double t) {
        std::vector<GridFunction> mod = fs;
        for (std::size_t i = 0; i < mod[0].size(); ++i) mod[0][i] += t * dir[i];
        GridFunction uu = op.apply(mod);
        double acc = 0;
        for (const auto& val : uu.values()) acc += std::norm(val);
        return acc * dx;
    };
    const double fd = (phi(eps) - phi(-eps)) / (2 * eps);
    double an = 0;
    for (std::size_t i = 0; i < grad.size(); ++i)
        an += grad[i].real() * dir[i].real() + grad[i].imag() * dir[i].imag();
    CHECK(fd == doctest::Approx(an).epsilon(1e-6));
}

TEST_CASE("frequency_restrict: band membership and the counting bound") {
    TorusGrid g{1, 8.0, 128};
    Rng rng(41);
    const double C0 = 1.0;

    // fhat supported inside the band [C0, 2^5]: unchanged
    GridFunction hat(g);
    hat[g.store_of_freq(16)] = cplx{1, 0};   // xi = 2
    hat[g.store_of_freq(-24)] = cplx{0, 1};  // xi = -3
    GridFunction f = idft(hat);
    GridFunction cut = frequency_restrict(f, 0, 0, 2, C0);
    CHECK(rel_l2(cut, f) < 1e-12);

    // empty band
    GridFunction none = frequency_restrict(f, 0, -20, 2, C0);
    CHECK(l2_norm(none) < 1e-14);

    // counting bound: sum_gamma ||f^{lambda,gamma,mu}||^2 <= (mu+lambda+5)||f||^2
    for (int rep = 0; rep < 5; ++rep) {
        const int lambda = rep % 3, mu = 4 + rep;
        GridFunction r = random_fn(g, rng);
        double acc = 0;
        for (int gamma = -20; gamma <= 20; ++gamma) {
            const double nrm = l2_norm(frequency_restrict(r, lambda, gamma, mu, C0));
            acc += nrm * nrm;
        }
        const double total = std::pow(l2_norm(r), 2);
        CHECK(acc <= (mu + lambda + 5) * total * (1 + 1e-12));
    }
}

TEST_CASE("LP window: partition of unity, slice support, reassembly") {
    LPWindow win = build_lp_window(2, 1);
    Rng rng(53);
    for (int i = 0; i < 200; ++i) {
        const double r = std::pow(2.0, -8 + 16 * rng.uniform());
        double acc = 0;
        for (int gamma = -14; gamma <= 14; ++gamma) acc += win.radial(r * std::ldexp(1.0, -gamma));
        CHECK(std::abs(acc - 1.0) <= 1e-10);
    }
    CHECK(win.radial(0.49) == 0.0);
    CHECK(win.radial(2.01) == 0.0);
    CHECK(win.radial(1.0) > 0.0);

    TorusGrid g{1, 8.0, 128};
    GridFunction f = random_fn(g, rng);
    // kill the zero mode, then slices over a covering gamma range reassemble f
    GridFunction hat = dft(f);
    hat[g.store_of_freq(0)] = cplx{0, 0};
    f = idft(hat);
    GridFunction sum(g);
    for (int gamma = -8; gamma <= 6; ++gamma) sum += lp_slice(f, win, gamma);
    CHECK(rel_l2(sum, f) < 1e-10);
}
