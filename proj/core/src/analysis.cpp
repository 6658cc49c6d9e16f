#include "mlin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlin/errors.hpp"

namespace mlin {

void SampleGrid::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("SampleGrid: dim must be in 1..3");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
        throw std::invalid_argument("SampleGrid: axis bounds do not match dim");
    for (int a = 0; a < dim; ++a)
        if (hi[a] <= lo[a]) throw std::invalid_argument("SampleGrid: empty axis range");
}

std::size_t SampleGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= axis_count(a);
    return s;
}

SampleGrid SampleGrid::centered(int dim, int spacing_log2, double extent) {
    SampleGrid g;
    g.dim = dim;
    g.spacing_log2 = spacing_log2;
    const long r = static_cast<long>(std::ceil(std::ldexp(extent, spacing_log2)));
    g.lo.assign(dim, -r);
    g.hi.assign(dim, r + 1);
    g.validate();
    return g;
}

SampledSymbol SampledSymbol::zeros(const SampleGrid& g) {
    g.validate();
    return SampledSymbol{g, std::vector<cplx>(g.size(), cplx{0, 0})};
}

SampledSymbol SampledSymbol::from_fn(const SampleGrid& g,
                                     const std::function<cplx(const double*)>& fn) {
    SampledSymbol s = zeros(g);
    std::vector<long> idx(g.lo.begin(), g.lo.end());
    double x[4];
    for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
        for (int a = 0; a < g.dim; ++a) x[a] = g.coord(idx[a]);
        s.values[flat] = fn(x);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.hi[a]) break;
            idx[a] = g.lo[a];
        }
    }
    return s;
}

cplx& SampledSymbol::at(const long* idx) {
    std::size_t flat = 0;
    for (int a = 0; a < grid.dim; ++a)
        flat = flat * grid.axis_count(a) + static_cast<std::size_t>(idx[a] - grid.lo[a]);
    return values[flat];
}

double SampledSymbol::max_abs() const {
    double m = 0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double SampledSymbol::l2_riemann() const {
    double acc = 0;
    for (const auto& v : values) acc += std::norm(v);
    double meas = 1;
    for (int a = 0; a < grid.dim; ++a) meas *= grid.h();
    return std::sqrt(acc * meas);
}

std::size_t LevelSlice::size() const {
    std::size_t s = 1;
    for (std::size_t a = 0; a < klo.size(); ++a) s *= static_cast<std::size_t>(khi[a] - klo[a]);
    return s;
}

cplx LevelSlice::at(const long* k) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < klo.size(); ++a) {
        if (k[a] < klo[a] || k[a] >= khi[a]) return {0, 0};
        flat = flat * static_cast<std::size_t>(khi[a] - klo[a]) +
               static_cast<std::size_t>(k[a] - klo[a]);
    }
    return coeff[flat];
}

cplx CoefficientTable::lookup(int lambda, const std::string& letters, const long* k) const {
    for (const auto& s : slices)
        if (s.lambda == lambda && s.letters == letters) return s.at(k);
    return {0, 0};
}

std::pair<double, double> CoefficientTable::level_norms(int lambda, double q) const {
    if (q <= 0) throw std::invalid_argument("level_norms: q must be positive");
    double linf = 0, lq = 0;
    for (const auto& s : slices) {
        if (s.lambda != lambda) continue;
        for (const auto& v : s.coeff) {
            const double a = std::abs(v);
            linf = std::max(linf, a);
            lq += std::pow(a, q);
        }
    }
    return {linf, std::pow(lq, 1.0 / q)};
}

double CoefficientTable::max_abs() const {
    double m = 0;
    for (const auto& s : slices)
        for (const auto& v : s.coeff) m = std::max(m, std::abs(v));
    return m;
}

bool CoefficientTable::empty() const {
    for (const auto& s : slices)
        for (const auto& v : s.coeff)
            if (v != cplx{0, 0}) return false;
    return true;
}

std::vector<std::string> letter_words(int dim, int lambda) {
    std::vector<std::string> words;
    const int total = 1 << dim;
    for (int mask = 0; mask < total; ++mask) {
        std::string w(dim, 'F');
        for (int a = 0; a < dim; ++a)
            if (mask & (1 << a)) w[a] = 'M';
        if (lambda >= 1 && w.find('M') == std::string::npos) continue;
        words.push_back(std::move(w));
    }
    std::sort(words.begin(), words.end());
    return words;
}

namespace {

// Banded per-axis atom samples: for each k in [klo, khi) the nonzero sample
// index window [start, start+len) and the weights 2^{lam/2} psi(2^lam xi - k).
struct BandedWeights {
    long klo = 0, khi = 0;
    std::vector<std::size_t> start, len;
    std::vector<std::vector<double>> w;
};

BandedWeights axis_weights(const AtomFamily& family, char letter, int lambda,
                           const SampleGrid& grid, int axis) {
    if (grid.spacing_log2 < lambda + 3)
        throw resolution_error("atom of level " + std::to_string(lambda) +
                               " needs grid spacing <= 2^-(lambda+3)");
    BandedWeights bw;
    const double scale = std::ldexp(1.0, lambda);
    const double xlo = grid.coord(grid.lo[axis]);
    const double xhi = grid.coord(grid.hi[axis] - 1);
    const double slo = family.support_lo(), shi = family.support_hi();
    // nonempty overlap: k + slo < 2^lam * xhi and k + shi > 2^lam * xlo
    bw.klo = static_cast<long>(std::ceil(scale * xlo - shi));
    bw.khi = static_cast<long>(std::floor(scale * xhi - slo)) + 1;
    if (bw.khi < bw.klo) bw.khi = bw.klo;
    const double amp = std::sqrt(scale);
    const std::size_t count = grid.axis_count(axis);
    for (long k = bw.klo; k < bw.khi; ++k) {
        // sample window: xi with 2^lam xi - k inside (slo, shi)
        const double a = (k + slo) / scale, b = (k + shi) / scale;
        long ia = static_cast<long>(std::ceil(a / grid.h())) - grid.lo[axis];
        long ib = static_cast<long>(std::floor(b / grid.h())) - grid.lo[axis];
        ia = std::max(ia, 0L);
        ib = std::min(ib, static_cast<long>(count) - 1);
        if (ib < ia) {
            bw.start.push_back(0);
            bw.len.push_back(0);
            bw.w.emplace_back();
            continue;
        }
        std::vector<double> vals(static_cast<std::size_t>(ib - ia + 1));
        for (long i = ia; i <= ib; ++i) {
            const double xi = grid.coord(grid.lo[axis] + i);
            vals[static_cast<std::size_t>(i - ia)] = amp * family.axis_eval(letter, scale * xi - k);
        }
        bw.start.push_back(static_cast<std::size_t>(ia));
        bw.len.push_back(vals.size());
        bw.w.push_back(std::move(vals));
    }
    return bw;
}

// out[d][k][r] = sum_a w[k][a] in[d][a][r]
void contract_axis(const std::vector<cplx>& in, std::size_t D0, std::size_t A, std::size_t R,
                   const BandedWeights& bw, std::vector<cplx>& out) {
    const std::size_t K = static_cast<std::size_t>(bw.khi - bw.klo);
    out.assign(D0 * K * R, cplx{0, 0});
    for (std::size_t d = 0; d < D0; ++d) {
        const cplx* src = in.data() + d * A * R;
        for (std::size_t k = 0; k < K; ++k) {
            cplx* dst = out.data() + (d * K + k) * R;
            const std::size_t a0 = bw.start[k], n = bw.len[k];
            for (std::size_t t = 0; t < n; ++t) {
                const double wv = bw.w[k][t];
                if (wv == 0.0) continue;
                const cplx* row = src + (a0 + t) * R;
                for (std::size_t r = 0; r < R; ++r) dst[r] += wv * row[r];
            }
        }
    }
}

// adjoint: out[d][a][r] += sum_k w[k][a] in[d][k][r]
void expand_axis(const std::vector<cplx>& in, std::size_t D0, std::size_t A, std::size_t R,
                 const BandedWeights& bw, std::vector<cplx>& out) {
    const std::size_t K = static_cast<std::size_t>(bw.khi - bw.klo);
    out.assign(D0 * A * R, cplx{0, 0});
    for (std::size_t d = 0; d < D0; ++d) {
        cplx* dst = out.data() + d * A * R;
        for (std::size_t k = 0; k < K; ++k) {
            const cplx* src = in.data() + (d * K + k) * R;
            const std::size_t a0 = bw.start[k], n = bw.len[k];
            for (std::size_t t = 0; t < n; ++t) {
                const double wv = bw.w[k][t];
                if (wv == 0.0) continue;
                cplx* row = dst + (a0 + t) * R;
                for (std::size_t r = 0; r < R; ++r) row[r] += wv * src[r];
            }
        }
    }
}

} // namespace

SampledSymbol eval_atom(const AtomFamily& family, int lambda, const std::string& letters,
                        const LatticePoint& k, const SampleGrid& grid) {
    grid.validate();
    if (lambda < 0) throw std::invalid_argument("eval_atom: lambda must be >= 0");
    if (grid.spacing_log2 < lambda + 3)
        throw resolution_error("eval_atom: grid spacing must be <= 2^-lambda / 8");
    if (family.is_wavelet() && static_cast<int>(letters.size()) != grid.dim)
        throw std::invalid_argument("eval_atom: need one letter per axis");
    if (static_cast<int>(k.coords.size()) != grid.dim)
        throw std::invalid_argument("eval_atom: position has wrong dimension");

    SampledSymbol out = SampledSymbol::zeros(grid);
    const double scale = std::ldexp(1.0, lambda);
    const double amp = std::sqrt(scale);

    // per-axis support windows
    std::vector<long> ilo(grid.dim), ihi(grid.dim);
    for (int a = 0; a < grid.dim; ++a) {
        const double xa = (k.coords[a] + family.support_lo()) / scale;
        const double xb = (k.coords[a] + family.support_hi()) / scale;
        ilo[a] = std::max(grid.lo[a], static_cast<long>(std::ceil(xa / grid.h())));
        ihi[a] = std::min(grid.hi[a] - 1, static_cast<long>(std::floor(xb / grid.h())));
        if (ihi[a] < ilo[a]) return out;
    }

    std::vector<long> idx(ilo);
    while (true) {
        double v = 1.0;
        for (int a = 0; a < grid.dim; ++a) {
            const char letter = family.is_wavelet() ? letters[a] : 'F';
            v *= amp * family.axis_eval(letter, scale * grid.coord(idx[a]) - k.coords[a]);
            if (v == 0.0) break;
        }
        out.at(idx.data()) = cplx{v, 0};
        int a = grid.dim - 1;
        for (; a >= 0; --a) {
            if (++idx[a] <= ihi[a]) break;
            idx[a] = ilo[a];
        }
        if (a < 0) break;
    }
    return out;
}

CoefficientTable analyze(const SampledSymbol& F, const MotherWavelets& mother,
                         int lambda_max, int lambda_min) {
    F.grid.validate();
    if (lambda_max < lambda_min || lambda_min < 0)
        throw std::invalid_argument("analyze: bad level range");
    if (F.grid.spacing_log2 < lambda_max + 3)
        throw resolution_error("analyze: grid spacing must be <= 2^-lambda_max / 8");

    const int dim = F.grid.dim;
    AtomFamily family = AtomFamily::wavelet(std::make_shared<MotherWavelets>(mother));
    CoefficientTable table;
    table.dim = dim;

    double hpow = 1;
    for (int a = 0; a < dim; ++a) hpow *= F.grid.h();

    for (int lambda = lambda_min; lambda <= lambda_max; ++lambda) {
        // weight tables per axis and letter are letter-dependent only through
        // psi, so build each once per level
        std::vector<BandedWeights> wF(dim), wM(dim);
        for (int a = 0; a < dim; ++a) {
            wF[a] = axis_weights(family, 'F', lambda, F.grid, a);
            wM[a] = axis_weights(family, 'M', lambda, F.grid, a);
        }
        for (const auto& word : letter_words(dim, lambda)) {
            LevelSlice slice;
            slice.lambda = lambda;
            slice.letters = word;
            std::vector<cplx> cur = F.values;
            std::size_t D0 = 1;
            std::size_t R = F.grid.size();
            for (int a = 0; a < dim; ++a) {
                const BandedWeights& bw = (word[a] == 'F') ? wF[a] : wM[a];
                const std::size_t A = F.grid.axis_count(a);
                R /= A;
                std::vector<cplx> next;
                contract_axis(cur, D0, A, R, bw, next);
                cur = std::move(next);
                D0 *= static_cast<std::size_t>(bw.khi - bw.klo);
                slice.klo.push_back(bw.klo);
                slice.khi.push_back(bw.khi);
            }
            for (auto& v : cur) v *= hpow;
            slice.coeff = std::move(cur);
            table.slices.push_back(std::move(slice));
        }
    }
    return table;
}

SampledSymbol synthesize(const CoefficientTable& table, const MotherWavelets& mother,
                         const SampleGrid& grid) {
    grid.validate();
    if (table.dim != grid.dim) throw std::invalid_argument("synthesize: dimension mismatch");
    AtomFamily family = AtomFamily::wavelet(std::make_shared<MotherWavelets>(mother));
    SampledSymbol out = SampledSymbol::zeros(grid);

    for (const auto& slice : table.slices) {
        if (grid.spacing_log2 < slice.lambda + 3)
            throw resolution_error("synthesize: grid spacing must be <= 2^-lambda / 8");
        // the slice was produced against some grid; rebuild weights against
        // this one and make sure the k boxes line up
        std::vector<BandedWeights> bws(grid.dim);
        for (int a = 0; a < grid.dim; ++a) {
            bws[a] = axis_weights(family, slice.letters[a], slice.lambda, grid, a);
            if (bws[a].klo > slice.klo[a] || bws[a].khi < slice.khi[a])
                throw resolution_error("synthesize: grid does not cover the slice support");
        }
        // embed the slice coefficients into the weight-table k boxes
        std::size_t full = 1;
        for (int a = 0; a < grid.dim; ++a)
            full *= static_cast<std::size_t>(bws[a].khi - bws[a].klo);
        std::vector<cplx> cur(full, cplx{0, 0});
        {
            std::vector<long> k(slice.klo);
            std::size_t cnt = slice.size();
            for (std::size_t flat = 0; flat < cnt; ++flat) {
                std::size_t dst = 0;
                for (int a = 0; a < grid.dim; ++a)
                    dst = dst * static_cast<std::size_t>(bws[a].khi - bws[a].klo) +
                          static_cast<std::size_t>(k[a] - bws[a].klo);
                cur[dst] = slice.coeff[flat];
                for (int a = grid.dim - 1; a >= 0; --a) {
                    if (++k[a] < slice.khi[a]) break;
                    k[a] = slice.klo[a];
                }
            }
        }
        // expand axes in reverse order: [K0..K_{d-1}] -> [A0..A_{d-1}]
        std::size_t D0 = 1;
        for (int a = 0; a < grid.dim - 1; ++a)
            D0 *= static_cast<std::size_t>(bws[a].khi - bws[a].klo);
        std::size_t R = 1;
        for (int a = grid.dim - 1; a >= 0; --a) {
            const std::size_t K = static_cast<std::size_t>(bws[a].khi - bws[a].klo);
            const std::size_t A = grid.axis_count(a);
            std::vector<cplx> next;
            expand_axis(cur, D0, A, R, bws[a], next);
            cur = std::move(next);
            R *= A;
            if (a > 0) D0 /= static_cast<std::size_t>(bws[a - 1].khi - bws[a - 1].klo);
            (void)K;
        }
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += cur[i];
    }
    return out;
}

double sobolev_norm(const GridFunction& F, double s, double q) {
    if (s < 0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
    if (q <= 1 || !(q < 1e12)) throw std::invalid_argument("sobolev_norm: need 1 < q < inf");
    GridFunction hat = dft(F);
    const TorusGrid& g = F.grid();
    std::vector<int> idx(g.n, 0);
    for_each_node(g.n, g.points, [&](const int* id, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < g.n; ++a) {
            const double xi = g.freq(id[a]);
            r2 += xi * xi;
        }
        hat[flat] *= std::pow(1.0 + r2, s / 2);
    });
    (void)idx;
    return quasinorm(idft(hat), q);
}

} // namespace mlin
