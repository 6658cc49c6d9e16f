#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mlin/grid.hpp"
#include "mlin/lattice.hpp"
#include "mlin/wavelets.hpp"

namespace mlin {

/// m-linear symbol sampled on the product frequency lattice of one grid;
/// values are row-major over the mn axes (argument 1 axes first), each axis
/// ascending in signed frequency.
struct DenseSymbol {
    TorusGrid grid;
    int m = 1;
    std::vector<cplx> values;

    std::size_t size() const;
    double max_abs() const;
    static DenseSymbol from_fn(const TorusGrid& g, int m,
                               const std::function<cplx(const double*)>& fn);
};

/// Enforces the dense-evaluation size budget (desk scale: G <= 256 for m = 2,
/// G <= 64 for m = 3 at n = 1; m >= 4 always rejected).
void check_dense_budget(const TorusGrid& g, int m);

/// T_sigma(f_1..f_m)(x) = G^{-mn/2} sum_xi sigma(xi) prod fhat_j(xi_j)
/// e^{2pi i x . sum xi_j} on the grid; m = 1 with sigma == 1 is the identity.
GridFunction apply_dense(const DenseSymbol& sigma, std::span<const GridFunction> fs);

/// L^{lambda,gamma}_k f = (omega^lambda_k(./2^gamma) fhat)^vee.  k is one
/// block (n coordinates); letters has one letter per coordinate for wavelet
/// families and is ignored for bumps.
GridFunction atom_project(const GridFunction& f, const AtomFamily& family, int lambda,
                          std::span<const int> k, const std::string& letters = "",
                          int gamma = 0);

/// sigma^lambda = sum_{k in U} b_k omega^lambda_k as a coefficient list over
/// lattice points, with the generating family.
struct AtomSymbol {
    AtomFamily family;
    int lambda = 0;
    int n = 1, m = 2;
    std::string letters;  // mn letters for wavelet families, empty for bump
    std::vector<std::pair<LatticePoint, cplx>> coeffs;

    void validate() const;
    AtomSymbol scaled(double t) const;
};

/// Samples the atom symbol on the product lattice (oracle bridge to
/// apply_dense).
DenseSymbol densify(const AtomSymbol& sigma, const TorusGrid& g);

/// sum_k b_k prod_j atom_project(f_j, lambda, k_j); the definitional path,
/// with per-block projection caching.
GridFunction apply_atomsum(const AtomSymbol& sigma, std::span<const GridFunction> fs);

/// Sharp frequency cut C0 sqrt(n) 2^{gamma-lambda} <= |xi| <= 2^{gamma+mu+3}.
GridFunction frequency_restrict(const GridFunction& f, int lambda, int gamma, int mu,
                                double C0);

/// Radial Littlewood-Paley profile supported in 1/2 <= |xi| <= 2 whose
/// dyadic dilates sum to 1 away from the origin (telescoped smooth cutoff,
/// so the partition identity is exact up to rounding).
struct LPWindow {
    int m = 1, n = 1;
    double radial(double r) const;
    double eval(const double* xi) const;  // mn coordinates
    static double theta(double r);        // smooth, 1 for r <= 1, 0 for r >= 2
};

LPWindow build_lp_window(int m, int n);

/// Frequency piece of f at scale 2^gamma: (Phi_hat(xi / 2^gamma) fhat)^vee.
GridFunction lp_slice(const GridFunction& f, const LPWindow& win, int gamma);

/// Operator handle used by the norm estimator.  Implementations must be
/// immutable and safe for concurrent use.
class MultilinearOperator {
public:
    virtual ~MultilinearOperator() = default;
    virtual int arity() const = 0;
    virtual const TorusGrid& grid() const = 0;
    virtual GridFunction apply(std::span<const GridFunction> fs) const = 0;

    /// Gradient of Re<v, T(f)> with respect to conj(f_j) for the linear-in-
    /// f_j map with the other arguments frozen; v is physical-side.
    virtual GridFunction adjoint_gradient(int j, std::span<const GridFunction> fs,
                                          const GridFunction& v) const = 0;

    /// Optional deterministic warm starts (e.g. pure modes for multipliers).
    virtual std::vector<std::vector<GridFunction>> initializers() const { return {}; }
};

/// Dense-symbol multiplier with exact adjoint gradients; m = 1 exposes its
/// pure-mode maximizer as an initializer.
class DenseMultiplierOperator : public MultilinearOperator {
public:
    DenseMultiplierOperator(DenseSymbol sigma);
    int arity() const override { return sigma_.m; }
    const TorusGrid& grid() const override { return sigma_.grid; }
    GridFunction apply(std::span<const GridFunction> fs) const override;
    GridFunction adjoint_gradient(int j, std::span<const GridFunction> fs,
                                  const GridFunction& v) const override;
    std::vector<std::vector<GridFunction>> initializers() const override;

private:
    DenseSymbol sigma_;
};

/// Atom-sum multiplier evaluated over the support cells of its atoms only;
/// cost scales with |U| * (nodes per atom)^m instead of G^{mn}.
class AtomMultiplierOperator : public MultilinearOperator {
public:
    AtomMultiplierOperator(AtomSymbol sigma, const TorusGrid& g);
    int arity() const override { return sigma_.m; }
    const TorusGrid& grid() const override { return grid_; }
    GridFunction apply(std::span<const GridFunction> fs) const override;
    GridFunction adjoint_gradient(int j, std::span<const GridFunction> fs,
                                  const GridFunction& v) const override;
    const AtomSymbol& symbol() const { return sigma_; }

private:
    // per-axis banded mask: window of lattice stores plus atom values
    struct Mask {
        int start = 0;             // first storage index of the window
        std::vector<double> vals;  // atom factor at each window node
    };
    Mask axis_mask(int block_coord, int axis_in_block) const;

    AtomSymbol sigma_;
    TorusGrid grid_;
    // per coefficient, per argument: mask of the k_j block (n = 1 only keeps
    // one axis; general n stores the product windows per axis)
    std::vector<std::vector<std::vector<Mask>>> masks_;  // [coeff][arg][axis]
};

} // namespace mlin
