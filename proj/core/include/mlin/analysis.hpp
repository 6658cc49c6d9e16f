#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mlin/grid.hpp"
#include "mlin/lattice.hpp"
#include "mlin/wavelets.hpp"

namespace mlin {

/// Uniform origin-aligned sampling grid on a product box with power-of-two
/// spacing h = 2^-spacing_log2; node idx has coordinate idx * h.  The dyadic
/// alignment keeps atom evaluation on exact cascade-table nodes.
struct SampleGrid {
    int dim = 1;
    int spacing_log2 = 3;
    std::vector<long> lo, hi;  // per-axis node index ranges [lo, hi)

    double h() const { return std::ldexp(1.0, -spacing_log2); }
    std::size_t axis_count(int a) const { return static_cast<std::size_t>(hi[a] - lo[a]); }
    std::size_t size() const;
    double coord(long idx) const { return std::ldexp(static_cast<double>(idx), -spacing_log2); }
    void validate() const;

    /// Smallest centered grid covering [-extent, extent]^dim.
    static SampleGrid centered(int dim, int spacing_log2, double extent);
};

struct SampledSymbol {
    SampleGrid grid;
    std::vector<cplx> values;  // row-major, axis index offset from lo

    static SampledSymbol zeros(const SampleGrid& g);
    static SampledSymbol from_fn(const SampleGrid& g,
                                 const std::function<cplx(const double*)>& fn);
    cplx& at(const long* idx);

    double max_abs() const;
    double l2_riemann() const;  // sqrt(sum |v|^2 h^dim)
};

/// One (lambda, letters) block of wavelet coefficients over a k-box.
struct LevelSlice {
    int lambda = 0;
    std::string letters;        // dim letters from {F, M}
    std::vector<long> klo, khi; // per-axis box [klo, khi)
    std::vector<cplx> coeff;    // row-major

    std::size_t size() const;
    cplx at(const long* k) const;  // zero outside the box
};

/// Finitely supported coefficient map (lambda, letters, k) -> b, stored as
/// dense per-level blocks.
struct CoefficientTable {
    int dim = 1;
    std::vector<LevelSlice> slices;

    cplx lookup(int lambda, const std::string& letters, const long* k) const;
    /// (l_inf, l_q) over every letter combination and k at this level.
    std::pair<double, double> level_norms(int lambda, double q) const;
    double max_abs() const;
    bool empty() const;
};

/// All mn-letter combinations for a level: every word for lambda = 0, the
/// all-F word excluded for lambda >= 1.
std::vector<std::string> letter_words(int dim, int lambda);

/// Sampled normalized atom 2^{lambda dim / 2} Psi_letters(2^lambda xi - k) on
/// the grid; exact zeros outside the support box.  letters is empty for the
/// bump family.  Requires grid spacing <= 2^-lambda / 8.
SampledSymbol eval_atom(const AtomFamily& family, int lambda, const std::string& letters,
                        const LatticePoint& k, const SampleGrid& grid);

/// Wavelet coefficients b = int F Psi by midpoint quadrature for all levels
/// lambda <= lambda_max and every atom whose support meets the grid box.
CoefficientTable analyze(const SampledSymbol& F, const MotherWavelets& mother,
                         int lambda_max, int lambda_min = 0);

/// Sum of b * atoms evaluated on the grid (adjoint of the analysis passes).
SampledSymbol synthesize(const CoefficientTable& table, const MotherWavelets& mother,
                         const SampleGrid& grid);

/// Level norms of a table (thin wrapper named after the operation).
inline std::pair<double, double> coeff_norms(const CoefficientTable& t, int lambda, double q) {
    return t.level_norms(lambda, q);
}

/// L^q norm of (I - Laplacian)^{s/2} F for a periodic grid sample.
double sobolev_norm(const GridFunction& F, double s, double q);

} // namespace mlin
