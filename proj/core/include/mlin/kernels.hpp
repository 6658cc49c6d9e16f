#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlin/analysis.hpp"
#include "mlin/grid.hpp"
#include "mlin/operators.hpp"

namespace mlin {

/// Quadrature representation of Omega on S^{mn-1} with mean-zero invariant
/// (checked to 1e-10 at construction).  mn = 2: trapezoid on uniform angles;
/// mn = 3: product angles with sin weighting.
struct SphereFunction {
    int mn = 2;
    double q = 2;
    int res_polar = 0, res_azimuthal = 0;    // product-angle dims (mn = 3)
    std::vector<std::vector<double>> nodes;  // unit vectors
    std::vector<double> weights;
    std::vector<double> values;
    std::vector<double> angles;  // mn = 2: theta per node; mn = 3: (theta, phi) pairs

    static SphereFunction from_fn(int mn, double q,
                                  const std::function<double(const double*)>& fn,
                                  int resolution = 0);
    double mean() const;
    double lq_norm() const;
    /// Omega at a unit direction, interpolated between quadrature nodes.
    double eval_dir(std::span<const double> unit) const;
};

/// K(y) = Omega(y/|y|) / |y|^{mn}; throws singular_point_error at the origin.
double kernel_eval(const SphereFunction& omega, std::span<const double> y);

/// Riemann-sum continuum Fourier transform dx^n sum f e^{-2pi i x xi} and its
/// inverse; round trip is exact.
GridFunction fourier_integral(const GridFunction& f);
GridFunction inverse_fourier_integral(const GridFunction& fhat);

/// Dyadic machinery for the truncated kernel K^0 = Phi_hat(y) K(y) on an
/// mn-dimensional torus.  Pieces are built frequency-side:
/// K^gamma_mu_hat(xi) = Phi_hat(2^{-(mu+gamma)} xi) K^gamma_hat(xi).
class RoughKernel {
public:
    RoughKernel(SphereFunction omega, TorusGrid base /* n = mn */);

    const SphereFunction& omega() const { return omega_; }
    const TorusGrid& grid() const { return grid_; }
    const GridFunction& k0() const { return k0_; }
    const GridFunction& k0_hat() const { return k0_hat_; }

    struct Piece {
        GridFunction physical;
        GridFunction transform;
    };
    /// K^gamma_mu; gamma rescales the kernel truncation, mu the mollifier.
    Piece dyadic_piece(int gamma, int mu) const;

    struct Assembled {
        GridFunction physical;
        GridFunction transform;
        double boundary_mass;  // relative L2 mass of the two edge-gamma terms
    };
    /// K_mu = sum over gamma in [gamma_lo, gamma_hi] of K^gamma_mu.
    Assembled assemble_kmu(int mu, int gamma_lo, int gamma_hi) const;

    /// Fraction of the L2 mass of K^0_mu-hat inside 2^{mu-2} <= |xi| <= 2^{mu+2}.
    double annulus_mass_fraction(int mu) const;

    /// Wavelet coefficients of K^0_mu-hat for lambda <= lambda_max, restricted
    /// to the k-box that can meet its support annulus.
    CoefficientTable rough_coeffs(int mu, int lambda_max, const MotherWavelets& mother) const;

private:
    GridFunction windowed_hat(int mu) const;  // K^0_mu-hat on the lattice

    SphereFunction omega_;
    TorusGrid grid_;
    LPWindow window_;
    GridFunction k0_, k0_hat_;
};

/// Multiplier of Hormander type: closed-form or sampled sigma with its
/// Sobolev parameters and Littlewood-Paley slices.
class HormanderSymbol {
public:
    enum class Kind { Oscillating, Envelope, Sampled };

    /// kind "oscillating": prod_j (1+|xi_j|^2)^{i t_j / 2} smoothly truncated;
    /// kind "envelope": (1+|xi|^2)^{-s/2}.
    static HormanderSymbol make(Kind kind, int m, int n, double s, double q);
    static HormanderSymbol from_samples(SampledSymbol data, int m, int n, double s, double q);
    static Kind kind_of(const std::string& name);

    int m() const { return m_; }
    int n() const { return n_; }
    double s() const { return s_; }
    double q() const { return q_; }

    cplx eval(std::span<const double> xi) const;

    /// sigma_gamma(xi) = sigma(2^gamma xi) Phi_hat(xi) on an analysis grid.
    SampledSymbol slice(int gamma, const SampleGrid& grid) const;
    /// Same slice on a torus grid (for sobolev_norm).
    GridFunction slice_torus(int gamma, const TorusGrid& g) const;
    /// Per-gamma wavelet coefficient tables of the slices.
    std::map<int, CoefficientTable> slice_coeffs(std::span<const int> gammas, int lambda_max,
                                                 const MotherWavelets& mother,
                                                 int spacing_log2) const;

    const LPWindow& window() const { return window_; }

private:
    Kind kind_ = Kind::Envelope;
    int m_ = 2, n_ = 1;
    double s_ = 1, q_ = 2;
    std::vector<double> osc_t_;   // oscillation exponents per argument
    double osc_cut_ = 64.0;      // smooth truncation radius
    SampledSymbol data_;          // Kind::Sampled
    LPWindow window_;
};

} // namespace mlin
