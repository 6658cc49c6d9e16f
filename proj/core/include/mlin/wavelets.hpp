#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mlin {

/// Smooth compactly supported mother bump exp(1 - 1/(1 - (x/rho)^2)) on
/// |x| < rho, identically zero outside.  Translates by Z overlap at most
/// c_ov = ceil(2 rho) + 1 deep.
struct BumpProfile {
    double rho = 1.0;
    int c_ov = 3;
    int resolution_log2 = 12;
    std::vector<double> samples;  // values at idx * 2^-J, idx in [-rho, rho] * 2^J

    double eval(double x) const;
    double support_lo() const { return -rho; }
    double support_hi() const { return rho; }
};

BumpProfile build_bump(double rho, int resolution_log2 = 12);

/// Daubechies filter pair with p = M+1 vanishing moments, 2p taps, computed
/// by spectral factorization of the binomial half-band polynomial
/// (extremal-phase convention).
std::vector<double> daubechies_filter(int p);

/// Orthonormal scaling/wavelet pair of vanishing-moment order M
/// (int x^a psi_M dx = 0 for 0 <= a <= M), both supported in [0, 2M+1],
/// sampled on the dyadic grid 2^-J by the cascade algorithm.
class MotherWavelets {
public:
    int M = 0;
    int J = 12;        // cascade resolution
    double C0 = 0;     // realized support radius, = 2M+1
    std::vector<double> h, g;

    /// psi_F / psi_M at x: exact table value at dyadic points of the cascade
    /// grid, linear interpolation otherwise, exactly zero outside [0, C0].
    double eval(char letter, double x) const;

    const std::vector<double>& table(char letter) const;

    /// <phi, phi(.-c)> computed exactly from the refinement relation
    /// (transfer-operator fixed point); independent of the sample tables.
    double autocorrelation(long c) const;

    /// Exact inner product of two normalized 1-D atoms
    /// 2^{lam/2} psi_letter(2^lam x - k); evaluates filter-bank expansions
    /// against the exact autocorrelation, so errors are pure rounding.
    double exact_inner(char la, int lam_a, long ka, char lb, int lam_b, long kb) const;

    /// Midpoint-rule integral of x^alpha psi_letter(x) on the cascade grid.
    double moment_quadrature(char letter, int alpha) const;

    /// Midpoint-rule inner product of two atoms on a common dyadic grid.
    double inner_quadrature(char la, int lam_a, long ka, char lb, int lam_b, long kb) const;

private:
    friend MotherWavelets build_daubechies(int M, int cascade_log2);
    std::vector<double> father_, mother_;  // samples at idx * 2^-J, idx in [0, (2M+1) 2^J]
    std::vector<double> acorr_;            // a(c), c in [-(2M+1), 2M+1]
};

MotherWavelets build_daubechies(int M, int cascade_log2 = 12);

/// Atom family selector shared by the symbol and operator layers: either the
/// bump family (one profile, no letters) or a Daubechies product family
/// (per-axis letters from {F, M}).
class AtomFamily {
public:
    AtomFamily() = default;  // unit bump
    static AtomFamily bump(BumpProfile profile);
    static AtomFamily wavelet(std::shared_ptr<const MotherWavelets> w);

    bool is_wavelet() const { return wavelet_ != nullptr; }
    const BumpProfile& bump_profile() const;
    const MotherWavelets& mother() const;

    /// One axis factor psi_g(t) or omega(t) in the mother variable.
    double axis_eval(char letter, double t) const;
    double support_lo() const;
    double support_hi() const;

private:
    BumpProfile bump_;
    std::shared_ptr<const MotherWavelets> wavelet_;
};

} // namespace mlin
