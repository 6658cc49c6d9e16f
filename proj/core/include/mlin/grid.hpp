#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "mlin/rng.hpp"

namespace mlin {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2)^n with matched frequency lattice.
/// Physical nodes x_i = L(i/G - 1/2); frequency nodes xi_j = j/L for
/// j = -G/2 .. G/2-1 (stored ascending, storage index j + G/2).
struct TorusGrid {
    int n = 1;          // spatial dimension per function argument
    double period = 1;  // L
    int points = 0;     // G per axis, even

    bool operator==(const TorusGrid&) const = default;

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < n; ++a) s *= static_cast<std::size_t>(points);
        return s;
    }
    double dx() const { return period / points; }
    double dxi() const { return 1.0 / period; }
    double node(int i) const { return period * (static_cast<double>(i) / points - 0.5); }
    double freq(int store) const { return static_cast<double>(store - points / 2) / period; }
    long signed_freq(int store) const { return store - points / 2; }
    int store_of_freq(long j) const { return static_cast<int>(j) + points / 2; }

    void validate() const;
};

/// Complex samples over a TorusGrid, row-major over the n axes.  Whether the
/// samples are a physical- or frequency-side view is contextual; dft/idft
/// map between the two.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const TorusGrid& g) : grid_(g), values_(g.size(), cplx{0, 0}) {
        grid_.validate();
    }
    GridFunction(const TorusGrid& g, std::vector<cplx> values);

    const TorusGrid& grid() const { return grid_; }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Sample fn at the physical nodes; fn receives the n coordinates.
    static GridFunction from_fn(const TorusGrid& g,
                                const std::function<cplx(const double*)>& fn);

    /// Complex Gaussian samples, then rescaled to unit L^2 Riemann norm.
    static GridFunction random_unit(const TorusGrid& g, Rng& rng);

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator*=(cplx s);

private:
    TorusGrid grid_;
    std::vector<cplx> values_;
};

/// Unitary discrete Fourier transform matching the e^{-2pi i <x,xi>} kernel;
/// idft(dft(f)) == f to rounding and the vector 2-norm is preserved exactly.
GridFunction dft(const GridFunction& f);
GridFunction idft(const GridFunction& fhat);

/// (sum |f|^p dx^n)^{1/p} Riemann quasinorm, valid for any p > 0.
double quasinorm(const GridFunction& f, double p);

/// Riemann L^2 norm (= quasinorm(f, 2)).
double l2_norm(const GridFunction& f);

/// Plain vector 2-norm (counting measure), used by the unitarity checks.
double l2_counting(const GridFunction& f);

/// Iterate multi-indices idx in [0,G)^n in row-major order.
/// fn(idx, flat) is called for every node.
void for_each_node(int n, int G, const std::function<void(const int*, std::size_t)>& fn);

} // namespace mlin
