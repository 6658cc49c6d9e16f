#include "mlin/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mlin {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// Solve A x = b by Gaussian elimination with partial pivoting (small dense
// systems only: cascade integer values and the autocorrelation fixed point).
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-14) throw std::runtime_error("singular refinement system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

using cd = std::complex<double>;

cd poly_eval(const std::vector<cd>& coef, cd z) {
    cd acc{0, 0};
    for (std::size_t i = coef.size(); i-- > 0;) acc = acc * z + coef[i];
    return acc;
}

// Durand-Kerner with Newton polish; coef[i] multiplies z^i, leading nonzero.
std::vector<cd> poly_roots(std::vector<cd> coef) {
    const std::size_t deg = coef.size() - 1;
    if (deg == 0) return {};
    const cd lead = coef.back();
    for (auto& c : coef) c /= lead;
    std::vector<cd> z(deg);
    cd w{0.4, 0.9};
    cd p{1, 0};
    for (std::size_t i = 0; i < deg; ++i) {
        p *= w;
        z[i] = p;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0;
        for (std::size_t i = 0; i < deg; ++i) {
            cd num = poly_eval(coef, z[i]);
            cd den{1, 0};
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) den *= (z[i] - z[j]);
            cd d = num / den;
            z[i] -= d;
            shift = std::max(shift, std::abs(d));
        }
        if (shift < 1e-15) break;
    }
    // Newton polish against the original polynomial
    std::vector<cd> dcoef(deg);
    for (std::size_t i = 1; i <= deg; ++i) dcoef[i - 1] = coef[i] * static_cast<double>(i);
    for (auto& r : z) {
        for (int it = 0; it < 8; ++it) {
            cd f = poly_eval(coef, r), df = poly_eval(dcoef, r);
            if (std::abs(df) < 1e-30) break;
            r -= f / df;
        }
    }
    return z;
}

} // namespace

std::vector<double> daubechies_filter(int p) {
    if (p < 1 || p > 16) throw std::invalid_argument("daubechies_filter: order out of range");
    if (p == 1) return {kSqrt2 / 2, kSqrt2 / 2};  // Haar

    // binomial half-band polynomial P(y) = sum C(p-1+k, k) y^k
    std::vector<cd> P(p);
    double c = 1.0;
    for (int k = 0; k < p; ++k) {
        P[k] = cd{c, 0};
        c *= static_cast<double>(p + k) / (k + 1);
    }
    std::vector<cd> yroots = poly_roots(P);

    // map each y-root to the z-root inside the unit circle:
    // y = (2 - z - 1/z)/4  =>  z^2 - (2 - 4y) z + 1 = 0
    std::vector<cd> zroots;
    for (cd y : yroots) {
        cd w = cd{2, 0} - 4.0 * y;
        cd s = std::sqrt(w * w - 4.0);
        cd z1 = (w + s) / 2.0, z2 = (w - s) / 2.0;
        zroots.push_back(std::abs(z1) < std::abs(z2) ? z1 : z2);
    }

    // m0(z) = ((1+z)/2)^p * prod (z - z_i) / (1 - z_i); taps = sqrt(2) coeffs
    std::vector<cd> m0{cd{1, 0}};
    for (int i = 0; i < p; ++i) {
        std::vector<cd> nxt(m0.size() + 1, cd{0, 0});
        for (std::size_t k = 0; k < m0.size(); ++k) {
            nxt[k] += m0[k] * 0.5;
            nxt[k + 1] += m0[k] * 0.5;
        }
        m0 = std::move(nxt);
    }
    cd norm{1, 0};
    for (cd zr : zroots) {
        std::vector<cd> nxt(m0.size() + 1, cd{0, 0});
        for (std::size_t k = 0; k < m0.size(); ++k) {
            nxt[k] += m0[k] * (-zr);
            nxt[k + 1] += m0[k];
        }
        m0 = std::move(nxt);
        norm *= (cd{1, 0} - zr);
    }
    std::vector<double> hcoef(m0.size());
    for (std::size_t k = 0; k < m0.size(); ++k) hcoef[k] = kSqrt2 * (m0[k] / norm).real();
    // the |z| < 1 factor ordering lands on the time-reversed filter; flip to
    // the standard extremal-phase convention (energy at the leading taps)
    double front = 0, back = 0;
    for (std::size_t k = 0; k < hcoef.size() / 2; ++k) {
        front += hcoef[k] * hcoef[k];
        back += hcoef[hcoef.size() - 1 - k] * hcoef[hcoef.size() - 1 - k];
    }
    if (front < back) std::reverse(hcoef.begin(), hcoef.end());
    return hcoef;
}

MotherWavelets build_daubechies(int M, int cascade_log2) {
    if (M < 1 || M > 10) throw std::invalid_argument("build_daubechies: M must be in 1..10");
    if (cascade_log2 < 4 || cascade_log2 > 20)
        throw std::invalid_argument("build_daubechies: cascade resolution out of range");

    const int p = M + 1;
    MotherWavelets w;
    w.M = M;
    w.J = cascade_log2;
    w.C0 = 2 * M + 1;
    w.h = daubechies_filter(p);
    w.g.resize(2 * p);
    for (int k = 0; k < 2 * p; ++k)
        w.g[k] = ((k % 2) ? -1.0 : 1.0) * w.h[2 * p - 1 - k];

    const int support = 2 * p - 1;  // both functions live on [0, support]

    // phi at the integers: eigenvector of M[a][b] = sqrt(2) h_{2a-b} for
    // eigenvalue 1, normalized to sum 1 (partition of unity)
    const int s = support - 1;  // interior integer nodes 1..support-1
    std::vector<std::vector<double>> A(s, std::vector<double>(s, 0.0));
    std::vector<double> rhs(s, 0.0);
    for (int a = 1; a <= s; ++a)
        for (int b = 1; b <= s; ++b) {
            const int k = 2 * a - b;
            double v = (k >= 0 && k < 2 * p) ? kSqrt2 * w.h[k] : 0.0;
            A[a - 1][b - 1] = v - (a == b ? 1.0 : 0.0);
        }
    for (int b = 0; b < s; ++b) A[s - 1][b] = 1.0;
    rhs[s - 1] = 1.0;
    std::vector<double> vint = solve_dense(std::move(A), std::move(rhs));

    // cascade: refine level by level, values stay exact on dyadic nodes
    std::vector<double> cur(support + 1, 0.0);
    for (int a = 1; a <= s; ++a) cur[a] = vint[a - 1];
    for (int level = 1; level <= w.J; ++level) {
        const long step = 1L << level;
        std::vector<double> nxt(static_cast<std::size_t>(support) * step + 1, 0.0);
        const long prev_step = step / 2;
        for (long i = 0; i < static_cast<long>(nxt.size()); ++i) {
            // phi(i 2^-level) = sqrt(2) sum_k h_k phi(i 2^-(level-1) - k)
            double acc = 0.0;
            for (int k = 0; k < 2 * p; ++k) {
                const long idx = i - k * prev_step;
                if (idx >= 0 && idx <= support * prev_step) acc += w.h[k] * cur[idx];
            }
            nxt[i] = kSqrt2 * acc;
        }
        cur = std::move(nxt);
    }
    w.father_ = std::move(cur);

    const long fine = 1L << w.J;
    w.mother_.assign(w.father_.size(), 0.0);
    for (long i = 0; i < static_cast<long>(w.mother_.size()); ++i) {
        // psi(i 2^-J) = sqrt(2) sum_k g_k phi(i 2^-(J-1) - k)
        double acc = 0.0;
        for (int k = 0; k < 2 * p; ++k) {
            const long idx = 2 * i - k * fine;
            if (idx >= 0 && idx < static_cast<long>(w.father_.size())) acc += w.g[k] * w.father_[idx];
        }
        w.mother_[i] = kSqrt2 * acc;
    }

    // exact autocorrelation a(c) = <phi, phi(.-c)> from the transfer-operator
    // fixed point a(c) = sum_d r(d) a(2c+d), r(d) = sum_k h_k h_{k+d},
    // normalized by sum_c a(c) = (int phi)^2 = 1
    const int amax = support;
    const int asz = 2 * amax + 1;
    std::vector<double> r(2 * (2 * p - 1) + 1, 0.0);
    for (int d = -(2 * p - 1); d <= 2 * p - 1; ++d) {
        double acc = 0;
        for (int k = 0; k < 2 * p; ++k) {
            const int k2 = k + d;
            if (k2 >= 0 && k2 < 2 * p) acc += w.h[k] * w.h[k2];
        }
        r[d + 2 * p - 1] = acc;
    }
    std::vector<std::vector<double>> T(asz, std::vector<double>(asz, 0.0));
    std::vector<double> trhs(asz, 0.0);
    for (int c = -amax; c <= amax; ++c) {
        for (int d = -(2 * p - 1); d <= 2 * p - 1; ++d) {
            const int tgt = 2 * c + d;
            if (tgt >= -amax && tgt <= amax) T[c + amax][tgt + amax] += r[d + 2 * p - 1];
        }
        T[c + amax][c + amax] -= 1.0;
    }
    for (int b = 0; b < asz; ++b) T[asz - 1][b] = 1.0;
    trhs[asz - 1] = 1.0;
    w.acorr_ = solve_dense(std::move(T), std::move(trhs));

    return w;
}

const std::vector<double>& MotherWavelets::table(char letter) const {
    if (letter == 'F') return father_;
    if (letter == 'M') return mother_;
    throw std::invalid_argument("MotherWavelets: letter must be F or M");
}

double MotherWavelets::eval(char letter, double x) const {
    if (x <= 0.0 || x >= C0) return 0.0;
    const std::vector<double>& tab = table(letter);
    const double t = std::ldexp(x, J);
    const double rt = std::round(t);
    if (std::abs(t - rt) < 1e-9) {
        const long i = static_cast<long>(rt);
        if (i < 0 || i >= static_cast<long>(tab.size())) return 0.0;
        return tab[i];
    }
    const long i = static_cast<long>(std::floor(t));
    if (i < 0 || i + 1 >= static_cast<long>(tab.size())) return 0.0;
    const double fr = t - i;
    return tab[i] * (1.0 - fr) + tab[i + 1] * fr;
}

double MotherWavelets::autocorrelation(long c) const {
    const long amax = 2 * M + 1;
    if (c < -amax || c > amax) return 0.0;
    return acorr_[c + amax];
}

double MotherWavelets::exact_inner(char la, int lam_a, long ka, char lb, int lam_b, long kb) const {
    // expand both atoms in the phi basis at the common finer scale + 1 and
    // contract against the exact autocorrelation
    const int fine = std::max(lam_a, lam_b) + 1;
    auto expand = [&](char letter, int lam, long k) {
        std::map<long, double> coef{{k, 1.0}};
        bool first = true;
        for (int lev = lam; lev < fine; ++lev) {
            const std::vector<double>& f = (first && letter == 'M') ? g : h;
            first = false;
            std::map<long, double> nxt;
            for (const auto& [kk, v] : coef)
                for (std::size_t t = 0; t < f.size(); ++t) nxt[2 * kk + static_cast<long>(t)] += v * f[t];
            coef = std::move(nxt);
        }
        if (first && letter == 'M')
            throw std::invalid_argument("exact_inner: expansion requires one refinement step");
        return coef;
    };
    auto ca = expand(la, lam_a, ka);
    auto cb = expand(lb, lam_b, kb);
    double acc = 0.0;
    for (const auto& [k1, v1] : ca)
        for (const auto& [k2, v2] : cb) acc += v1 * v2 * autocorrelation(k2 - k1);
    return acc;
}

double MotherWavelets::moment_quadrature(char letter, int alpha) const {
    const std::vector<double>& tab = table(letter);
    const double hstep = std::ldexp(1.0, -J);
    double acc = 0.0;
    for (long i = 0; i < static_cast<long>(tab.size()); ++i)
        acc += std::pow(i * hstep, alpha) * tab[i];
    return acc * hstep;
}

double MotherWavelets::inner_quadrature(char la, int lam_a, long ka, char lb, int lam_b, long kb) const {
    // common dyadic grid: resolution 2^-(J + lam_min) keeps both atoms on
    // exact table nodes
    const int lam_min = std::min(lam_a, lam_b);
    const int Jx = J + lam_min;
    const double hstep = std::ldexp(1.0, -Jx);
    // support of atom: 2^lam x - k in [0, C0]  =>  x in [k, k + C0] 2^-lam
    const double lo = std::max(std::ldexp(static_cast<double>(ka), -lam_a),
                               std::ldexp(static_cast<double>(kb), -lam_b));
    const double hi = std::min(std::ldexp(static_cast<double>(ka) + C0, -lam_a),
                               std::ldexp(static_cast<double>(kb) + C0, -lam_b));
    if (hi <= lo) return 0.0;
    const long ilo = static_cast<long>(std::ceil(lo / hstep));
    const long ihi = static_cast<long>(std::floor(hi / hstep));
    const double na = std::ldexp(1.0, lam_a), nb = std::ldexp(1.0, lam_b);
    const double wa = std::sqrt(na), wb = std::sqrt(nb);
    double acc = 0.0;
    for (long i = ilo; i <= ihi; ++i) {
        const double x = i * hstep;
        acc += wa * eval(la, na * x - ka) * wb * eval(lb, nb * x - kb);
    }
    return acc * hstep;
}

double BumpProfile::eval(double x) const {
    const double t = x / rho;
    const double d = 1.0 - t * t;
    if (d <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / d);
}

BumpProfile build_bump(double rho, int resolution_log2) {
    if (rho <= 0) throw std::invalid_argument("build_bump: rho must be positive");
    BumpProfile b;
    b.rho = rho;
    b.c_ov = static_cast<int>(std::ceil(2 * rho)) + 1;
    b.resolution_log2 = resolution_log2;
    const long half = static_cast<long>(std::ceil(std::ldexp(rho, resolution_log2)));
    b.samples.resize(2 * half + 1);
    for (long i = -half; i <= half; ++i)
        b.samples[i + half] = b.eval(std::ldexp(static_cast<double>(i), -resolution_log2));
    return b;
}

AtomFamily AtomFamily::bump(BumpProfile profile) {
    AtomFamily f;
    f.bump_ = std::move(profile);
    return f;
}

AtomFamily AtomFamily::wavelet(std::shared_ptr<const MotherWavelets> w) {
    if (!w) throw std::invalid_argument("AtomFamily: null wavelet");
    AtomFamily f;
    f.wavelet_ = std::move(w);
    return f;
}

const BumpProfile& AtomFamily::bump_profile() const {
    if (is_wavelet()) throw std::logic_error("AtomFamily: not a bump family");
    return bump_;
}

const MotherWavelets& AtomFamily::mother() const {
    if (!is_wavelet()) throw std::logic_error("AtomFamily: not a wavelet family");
    return *wavelet_;
}

double AtomFamily::axis_eval(char letter, double t) const {
    if (is_wavelet()) return wavelet_->eval(letter, t);
    return bump_.eval(t);
}

double AtomFamily::support_lo() const { return is_wavelet() ? 0.0 : -bump_.rho; }
double AtomFamily::support_hi() const { return is_wavelet() ? wavelet_->C0 : bump_.rho; }

} // namespace mlin
