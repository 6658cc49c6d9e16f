#include "mlin/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mlin/errors.hpp"

namespace mlin {

namespace {

void check_inputs(const TorusGrid& g, int m, std::span<const GridFunction> fs) {
    if (static_cast<int>(fs.size()) != m)
        throw std::invalid_argument("operator arity does not match input count");
    for (const auto& f : fs)
        if (!(f.grid() == g)) throw std::invalid_argument("operator inputs must share one grid");
}

} // namespace

std::size_t DenseSymbol::size() const {
    std::size_t s = 1;
    for (int a = 0; a < m * grid.n; ++a) s *= static_cast<std::size_t>(grid.points);
    return s;
}

double DenseSymbol::max_abs() const {
    double r = 0;
    for (const auto& v : values) r = std::max(r, std::abs(v));
    return r;
}

void check_dense_budget(const TorusGrid& g, int m) {
    if (m < 1) throw std::invalid_argument("multiplier: m must be >= 1");
    if (m >= 4) throw std::invalid_argument("multiplier: m >= 4 is outside the certified range");
    const int G = g.points;
    if (m == 2 && G > 256) throw resource_error("dense budget: G <= 256 for m = 2");
    if (m == 3 && (G > 64 || g.n > 1)) throw resource_error("dense budget: G <= 64 and n = 1 for m = 3");
    if (m == 2 && g.n == 2 && G > 64) throw resource_error("dense budget: G <= 64 for m = 2, n = 2");
}

DenseSymbol DenseSymbol::from_fn(const TorusGrid& g, int m,
                                 const std::function<cplx(const double*)>& fn) {
    g.validate();
    check_dense_budget(g, m);
    DenseSymbol s{g, m, {}};
    s.values.resize(s.size());
    const int axes = m * g.n;
    const int G = g.points;
    double xi[8];
    std::vector<int> idx(axes, 0);
    for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
        for (int a = 0; a < axes; ++a) xi[a] = g.freq(idx[a]);
        s.values[flat] = fn(xi);
        for (int a = axes - 1; a >= 0; --a) {
            if (++idx[a] < G) break;
            idx[a] = 0;
        }
    }
    return s;
}

GridFunction apply_dense(const DenseSymbol& sigma, std::span<const GridFunction> fs) {
    const TorusGrid& g = sigma.grid;
    check_dense_budget(g, sigma.m);
    check_inputs(g, sigma.m, fs);
    const int G = g.points, n = g.n, m = sigma.m;
    const int axes = m * n;

    std::vector<GridFunction> hats;
    hats.reserve(m);
    for (const auto& f : fs) hats.push_back(dft(f));

    GridFunction acc(g);  // frequency accumulator over the output lattice
    std::vector<int> idx(axes, 0);
    for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
        const cplx sv = sigma.values[flat];
        if (sv != cplx{0, 0}) {
            cplx prod = sv;
            for (int j = 0; j < m; ++j) {
                std::size_t fi = 0;
                for (int a = 0; a < n; ++a)
                    fi = fi * G + static_cast<std::size_t>(idx[j * n + a]);
                prod *= hats[j][fi];
            }
            // aliased output frequency per spatial axis
            std::size_t out = 0;
            for (int a = 0; a < n; ++a) {
                long ssum = 0;
                for (int j = 0; j < m; ++j) ssum += g.signed_freq(idx[j * n + a]);
                long store = ((ssum + G / 2) % G + G) % G;
                out = out * G + static_cast<std::size_t>(store);
            }
            acc[out] += prod;
        }
        for (int a = axes - 1; a >= 0; --a) {
            if (++idx[a] < G) break;
            idx[a] = 0;
        }
    }

    // T = G^{-mn/2} * sum_h acc[h] e^{2pi i x xi_h} = G^{n(1-m)/2} idft(acc)
    GridFunction out = idft(acc);
    out *= cplx{std::pow(static_cast<double>(G), 0.5 * n * (1 - m)), 0};
    return out;
}

GridFunction atom_project(const GridFunction& f, const AtomFamily& family, int lambda,
                          std::span<const int> k, const std::string& letters, int gamma) {
    const TorusGrid& g = f.grid();
    if (static_cast<int>(k.size()) != g.n)
        throw std::invalid_argument("atom_project: block size must equal n");
    if (family.is_wavelet() && static_cast<int>(letters.size()) != g.n)
        throw std::invalid_argument("atom_project: need one letter per axis");
    // dilated atom support width ~ 2^{gamma-lambda}; want >= 8 lattice nodes
    if (g.dxi() > std::ldexp(1.0, gamma - lambda) / 8.0)
        throw resolution_error("atom_project: frequency grid does not resolve the atom");

    GridFunction hat = dft(f);
    const double scale = std::ldexp(1.0, lambda);
    const double dil = std::ldexp(1.0, -gamma);
    const double amp = std::pow(scale, 0.5 * g.n);
    for_each_node(g.n, g.points, [&](const int* idx, std::size_t flat) {
        double w = amp;
        for (int a = 0; a < g.n && w != 0.0; ++a) {
            const char letter = family.is_wavelet() ? letters[a] : 'F';
            w *= family.axis_eval(letter, scale * (g.freq(idx[a]) * dil) - k[a]);
        }
        hat[flat] *= w;
    });
    return idft(hat);
}

void AtomSymbol::validate() const {
    if (m < 1 || m > 3) throw std::invalid_argument("AtomSymbol: m must be in 1..3");
    if (n < 1 || n > 2) throw std::invalid_argument("AtomSymbol: n must be in 1..2");
    if (lambda < 0) throw std::invalid_argument("AtomSymbol: lambda must be >= 0");
    if (family.is_wavelet() && static_cast<int>(letters.size()) != m * n)
        throw std::invalid_argument("AtomSymbol: need m*n letters");
    for (const auto& [p, b] : coeffs)
        if (static_cast<int>(p.coords.size()) != m * n)
            throw std::invalid_argument("AtomSymbol: coefficient point has wrong shape");
}

AtomSymbol AtomSymbol::scaled(double t) const {
    AtomSymbol s = *this;
    for (auto& [p, b] : s.coeffs) b *= t;
    return s;
}

DenseSymbol densify(const AtomSymbol& sigma, const TorusGrid& g) {
    sigma.validate();
    check_dense_budget(g, sigma.m);
    if (g.dxi() > std::ldexp(1.0, -sigma.lambda) / 8.0)
        throw resolution_error("densify: frequency grid does not resolve the atoms");
    DenseSymbol out{g, sigma.m, {}};
    out.values.assign(out.size(), cplx{0, 0});
    const int axes = sigma.m * g.n;
    const int G = g.points;
    const double scale = std::ldexp(1.0, sigma.lambda);
    const double amp = std::sqrt(scale);

    for (const auto& [p, b] : sigma.coeffs) {
        // support window per axis
        std::vector<int> lo(axes), hi(axes);
        bool empty = false;
        for (int a = 0; a < axes; ++a) {
            const double xlo = (p.coords[a] + sigma.family.support_lo()) / scale;
            const double xhi = (p.coords[a] + sigma.family.support_hi()) / scale;
            lo[a] = std::max(0L, static_cast<long>(std::ceil(xlo * g.period)) + G / 2);
            hi[a] = std::min(static_cast<long>(G) - 1,
                             static_cast<long>(std::floor(xhi * g.period)) + G / 2);
            if (hi[a] < lo[a]) {
                empty = true;
                break;
            }
        }
        if (empty) continue;
        std::vector<int> idx(lo);
        while (true) {
            double w = 1;
            for (int a = 0; a < axes && w != 0.0; ++a) {
                const char letter = sigma.family.is_wavelet() ? sigma.letters[a] : 'F';
                w *= amp * sigma.family.axis_eval(letter, scale * g.freq(idx[a]) - p.coords[a]);
            }
            if (w != 0.0) {
                std::size_t flat = 0;
                for (int a = 0; a < axes; ++a) flat = flat * G + static_cast<std::size_t>(idx[a]);
                out.values[flat] += b * w;
            }
            int a = axes - 1;
            for (; a >= 0; --a) {
                if (++idx[a] <= hi[a]) break;
                idx[a] = lo[a];
            }
            if (a < 0) break;
        }
    }
    return out;
}

GridFunction apply_atomsum(const AtomSymbol& sigma, std::span<const GridFunction> fs) {
    sigma.validate();
    const TorusGrid& g = fs.empty() ? TorusGrid{} : fs[0].grid();
    check_inputs(g, sigma.m, fs);
    const int n = g.n;

    // cache the projections: distinct (argument, block) pairs only
    std::vector<std::map<std::vector<int>, GridFunction>> cache(sigma.m);
    auto project = [&](int j, const std::vector<int>& block) -> const GridFunction& {
        auto it = cache[j].find(block);
        if (it != cache[j].end()) return it->second;
        const std::string letters =
            sigma.family.is_wavelet() ? sigma.letters.substr(j * n, n) : std::string{};
        GridFunction proj = atom_project(fs[j], sigma.family, sigma.lambda,
                                         std::span<const int>(block.data(), block.size()),
                                         letters, 0);
        return cache[j].emplace(block, std::move(proj)).first->second;
    };

    GridFunction out(g);
    for (const auto& [p, b] : sigma.coeffs) {
        std::vector<const GridFunction*> parts(sigma.m);
        for (int j = 0; j < sigma.m; ++j) {
            std::vector<int> block(p.coords.begin() + j * n, p.coords.begin() + (j + 1) * n);
            parts[j] = &project(j, block);
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            cplx prod = b;
            for (int j = 0; j < sigma.m; ++j) prod *= (*parts[j])[i];
            out[i] += prod;
        }
    }
    return out;
}

GridFunction frequency_restrict(const GridFunction& f, int lambda, int gamma, int mu,
                                double C0) {
    const TorusGrid& g = f.grid();
    const double lo = C0 * std::sqrt(static_cast<double>(g.n)) * std::ldexp(1.0, gamma - lambda);
    const double hi = std::ldexp(1.0, gamma + mu + 3);
    GridFunction hat = dft(f);
    for_each_node(g.n, g.points, [&](const int* idx, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < g.n; ++a) {
            const double xi = g.freq(idx[a]);
            r2 += xi * xi;
        }
        const double r = std::sqrt(r2);
        if (!(r >= lo && r <= hi)) hat[flat] = cplx{0, 0};
    });
    return idft(hat);
}

double LPWindow::theta(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double t = 2.0 - r;  // in (0,1)
    const double bt = std::exp(-1.0 / t);
    const double bu = std::exp(-1.0 / (1.0 - t));
    return bt / (bt + bu);
}

double LPWindow::radial(double r) const { return theta(r) - theta(2.0 * r); }

double LPWindow::eval(const double* xi) const {
    double r2 = 0;
    for (int a = 0; a < m * n; ++a) r2 += xi[a] * xi[a];
    return radial(std::sqrt(r2));
}

LPWindow build_lp_window(int m, int n) {
    if (m < 1 || m > 3 || n < 1 || n > 2)
        throw std::invalid_argument("build_lp_window: m in 1..3 and n in 1..2");
    return LPWindow{m, n};
}

GridFunction lp_slice(const GridFunction& f, const LPWindow& win, int gamma) {
    const TorusGrid& g = f.grid();
    GridFunction hat = dft(f);
    const double dil = std::ldexp(1.0, -gamma);
    for_each_node(g.n, g.points, [&](const int* idx, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < g.n; ++a) {
            const double xi = g.freq(idx[a]) * dil;
            r2 += xi * xi;
        }
        hat[flat] *= win.radial(std::sqrt(r2));
    });
    return idft(hat);
}

DenseMultiplierOperator::DenseMultiplierOperator(DenseSymbol sigma) : sigma_(std::move(sigma)) {
    check_dense_budget(sigma_.grid, sigma_.m);
}

GridFunction DenseMultiplierOperator::apply(std::span<const GridFunction> fs) const {
    return apply_dense(sigma_, fs);
}

GridFunction DenseMultiplierOperator::adjoint_gradient(int j, std::span<const GridFunction> fs,
                                                       const GridFunction& v) const {
    const TorusGrid& g = sigma_.grid;
    check_inputs(g, sigma_.m, fs);
    const int G = g.points, n = g.n, m = sigma_.m;
    const int axes = m * n;

    std::vector<GridFunction> hats;
    hats.reserve(m);
    for (const auto& f : fs) hats.push_back(dft(f));
    GridFunction vhat = dft(v);

    GridFunction W(g);
    const double cs = std::pow(static_cast<double>(G), 0.5 * n * (1 - m));
    std::vector<int> idx(axes, 0);
    for (std::size_t flat = 0; flat < sigma_.values.size(); ++flat) {
        const cplx sv = sigma_.values[flat];
        if (sv != cplx{0, 0}) {
            cplx prod = sv;
            for (int jj = 0; jj < m; ++jj) {
                if (jj == j) continue;
                std::size_t fi = 0;
                for (int a = 0; a < n; ++a)
                    fi = fi * G + static_cast<std::size_t>(idx[jj * n + a]);
                prod *= hats[jj][fi];
            }
            std::size_t out = 0, ji = 0;
            for (int a = 0; a < n; ++a) {
                long ssum = 0;
                for (int jj = 0; jj < m; ++jj) ssum += g.signed_freq(idx[jj * n + a]);
                long store = ((ssum + G / 2) % G + G) % G;
                out = out * G + static_cast<std::size_t>(store);
                ji = ji * G + static_cast<std::size_t>(idx[j * n + a]);
            }
            W[ji] += prod * std::conj(vhat[out]);
        }
        for (int a = axes - 1; a >= 0; --a) {
            if (++idx[a] < G) break;
            idx[a] = 0;
        }
    }
    W *= cplx{cs, 0};
    for (auto& w : W.values()) w = std::conj(w);
    return idft(W);
}

std::vector<std::vector<GridFunction>> DenseMultiplierOperator::initializers() const {
    if (sigma_.m != 1) return {};
    // pure mode at the largest |sigma| is the exact maximizer for m = 1
    std::size_t best = 0;
    double besta = -1;
    for (std::size_t i = 0; i < sigma_.values.size(); ++i) {
        const double a = std::abs(sigma_.values[i]);
        if (a > besta) {
            besta = a;
            best = i;
        }
    }
    GridFunction hat(sigma_.grid);
    hat[best] = cplx{1, 0};
    std::vector<GridFunction> tup;
    tup.push_back(idft(hat));
    std::vector<std::vector<GridFunction>> out;
    out.push_back(std::move(tup));
    return out;
}

AtomMultiplierOperator::Mask AtomMultiplierOperator::axis_mask(int block_coord,
                                                               int /*axis_in_block*/) const {
    const TorusGrid& g = grid_;
    const int G = g.points;
    const double scale = std::ldexp(1.0, sigma_.lambda);
    const double amp = std::sqrt(scale);
    const double xlo = (block_coord + sigma_.family.support_lo()) / scale;
    const double xhi = (block_coord + sigma_.family.support_hi()) / scale;
    const long slo = static_cast<long>(std::ceil(xlo * g.period)) + G / 2;
    const long shi = static_cast<long>(std::floor(xhi * g.period)) + G / 2;
    if (slo < 0 || shi >= G)
        throw resource_error("atom support exceeds the frequency extent of the grid");
    Mask m;
    m.start = static_cast<int>(slo);
    m.vals.resize(static_cast<std::size_t>(shi - slo + 1));
    for (long s = slo; s <= shi; ++s)
        m.vals[static_cast<std::size_t>(s - slo)] =
            amp * sigma_.family.axis_eval('F', scale * g.freq(static_cast<int>(s)) - block_coord);
    return m;
}

AtomMultiplierOperator::AtomMultiplierOperator(AtomSymbol sigma, const TorusGrid& g)
    : sigma_(std::move(sigma)), grid_(g) {
    sigma_.validate();
    grid_.validate();
    if (sigma_.family.is_wavelet())
        throw std::invalid_argument("AtomMultiplierOperator: bump families only; use the usual "
                                    "apply paths for wavelet atoms");
    if (grid_.dxi() > std::ldexp(1.0, -sigma_.lambda) / 8.0)
        throw resolution_error("AtomMultiplierOperator: grid does not resolve the atoms");
    const int n = grid_.n;
    masks_.resize(sigma_.coeffs.size());
    for (std::size_t c = 0; c < sigma_.coeffs.size(); ++c) {
        masks_[c].resize(sigma_.m);
        for (int j = 0; j < sigma_.m; ++j) {
            masks_[c][j].resize(n);
            for (int a = 0; a < n; ++a)
                masks_[c][j][a] = axis_mask(sigma_.coeffs[c].first.coords[j * n + a], a);
        }
    }
}

namespace {

// convolution of premultiplied window vectors; the output of the multiplier
// only depends on frequency sums, so windows can be collapsed pairwise,
// turning the w^m cell loop into O(m w^2)
std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() + b.size() - 1, cplx{0, 0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cplx ai = a[i];
        if (ai == cplx{0, 0}) continue;
        for (std::size_t k = 0; k < b.size(); ++k) out[i + k] += ai * b[k];
    }
    return out;
}

} // namespace

GridFunction AtomMultiplierOperator::apply(std::span<const GridFunction> fs) const {
    check_inputs(grid_, sigma_.m, fs);
    const int G = grid_.points, n = grid_.n, m = sigma_.m;
    if (n != 1) throw std::invalid_argument("AtomMultiplierOperator: n = 1 only");

    std::vector<GridFunction> hats;
    hats.reserve(m);
    for (const auto& f : fs) hats.push_back(dft(f));

    GridFunction acc(grid_);
    for (std::size_t c = 0; c < sigma_.coeffs.size(); ++c) {
        std::vector<cplx> conv{sigma_.coeffs[c].second};
        long start_sum = 0;
        for (int j = 0; j < m; ++j) {
            const Mask& mk = masks_[c][j][0];
            std::vector<cplx> win(mk.vals.size());
            for (std::size_t t = 0; t < mk.vals.size(); ++t)
                win[t] = mk.vals[t] * hats[j][static_cast<std::size_t>(mk.start) + t];
            conv = convolve(conv, win);
            start_sum += mk.start;
        }
        // store-sum S maps to the aliased output store (S - (m-1) G/2) mod G
        for (std::size_t t = 0; t < conv.size(); ++t) {
            if (conv[t] == cplx{0, 0}) continue;
            const long store =
                ((start_sum + static_cast<long>(t) - static_cast<long>(m - 1) * (G / 2)) % G +
                 G) % G;
            acc[static_cast<std::size_t>(store)] += conv[t];
        }
    }
    GridFunction out = idft(acc);
    out *= cplx{std::pow(static_cast<double>(G), 0.5 * (1 - m)), 0};
    return out;
}

GridFunction AtomMultiplierOperator::adjoint_gradient(int j, std::span<const GridFunction> fs,
                                                      const GridFunction& v) const {
    check_inputs(grid_, sigma_.m, fs);
    const int G = grid_.points, m = sigma_.m;
    if (grid_.n != 1) throw std::invalid_argument("AtomMultiplierOperator: n = 1 only");

    std::vector<GridFunction> hats;
    hats.reserve(m);
    for (const auto& f : fs) hats.push_back(dft(f));
    GridFunction vhat = dft(v);

    GridFunction W(grid_);
    for (std::size_t c = 0; c < sigma_.coeffs.size(); ++c) {
        // collapse every window except slot j, then pair against vhat
        std::vector<cplx> conv{sigma_.coeffs[c].second};
        long start_sum = 0;
        for (int jj = 0; jj < m; ++jj) {
            if (jj == j) continue;
            const Mask& mk = masks_[c][jj][0];
            std::vector<cplx> win(mk.vals.size());
            for (std::size_t t = 0; t < mk.vals.size(); ++t)
                win[t] = mk.vals[t] * hats[jj][static_cast<std::size_t>(mk.start) + t];
            conv = convolve(conv, win);
            start_sum += mk.start;
        }
        const Mask& mj = masks_[c][j][0];
        for (std::size_t s = 0; s < mj.vals.size(); ++s) {
            if (mj.vals[s] == 0.0) continue;
            cplx acc{0, 0};
            const long base = start_sum + mj.start + static_cast<long>(s) -
                              static_cast<long>(m - 1) * (G / 2);
            for (std::size_t t = 0; t < conv.size(); ++t) {
                const long store = ((base + static_cast<long>(t)) % G + G) % G;
                acc += conv[t] * std::conj(vhat[static_cast<std::size_t>(store)]);
            }
            W[static_cast<std::size_t>(mj.start) + s] += mj.vals[s] * acc;
        }
    }
    W *= cplx{std::pow(static_cast<double>(G), 0.5 * (1 - m)), 0};
    for (auto& w : W.values()) w = std::conj(w);
    return idft(W);
}

} // namespace mlin
