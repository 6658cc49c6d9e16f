#include "mlin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlin/errors.hpp"

namespace mlin {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

SphereFunction SphereFunction::from_fn(int mn, double q,
                                       const std::function<double(const double*)>& fn,
                                       int resolution) {
    if (mn != 2 && mn != 3) throw std::invalid_argument("SphereFunction: mn must be 2 or 3");
    if (q <= 1) throw std::invalid_argument("SphereFunction: q must exceed 1");
    SphereFunction s;
    s.mn = mn;
    s.q = q;
    if (mn == 2) {
        const int Q = resolution > 0 ? resolution : 2048;
        for (int i = 0; i < Q; ++i) {
            const double th = kTwoPi * i / Q;
            const double u[2] = {std::cos(th), std::sin(th)};
            s.nodes.push_back({u[0], u[1]});
            s.angles.push_back(th);
            s.weights.push_back(kTwoPi / Q);
            s.values.push_back(fn(u));
        }
    } else {
        const int P = resolution > 0 ? resolution : 64;      // polar
        const int A = resolution > 0 ? 2 * resolution : 128; // azimuthal
        s.res_polar = P;
        s.res_azimuthal = A;
        for (int i = 0; i < P; ++i) {
            const double th = M_PI * (i + 0.5) / P;
            for (int j = 0; j < A; ++j) {
                const double ph = kTwoPi * j / A;
                const double u[3] = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                     std::cos(th)};
                s.nodes.push_back({u[0], u[1], u[2]});
                s.angles.push_back(th);
                s.angles.push_back(ph);
                s.weights.push_back(std::sin(th) * (M_PI / P) * (kTwoPi / A));
                s.values.push_back(fn(u));
            }
        }
    }
    if (std::abs(s.mean()) > 1e-10)
        throw std::invalid_argument("SphereFunction: quadrature mean exceeds 1e-10");
    return s;
}

double SphereFunction::mean() const {
    double acc = 0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
    return acc;
}

double SphereFunction::lq_norm() const {
    double acc = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        acc += weights[i] * std::pow(std::abs(values[i]), q);
    return std::pow(acc, 1.0 / q);
}

double SphereFunction::eval_dir(std::span<const double> unit) const {
    if (static_cast<int>(unit.size()) != mn)
        throw std::invalid_argument("SphereFunction: direction has wrong dimension");
    if (mn == 2) {
        double th = std::atan2(unit[1], unit[0]);
        if (th < 0) th += kTwoPi;
        const std::size_t Q = values.size();
        const double pos = th / kTwoPi * Q;
        const std::size_t i0 = static_cast<std::size_t>(pos) % Q;
        const std::size_t i1 = (i0 + 1) % Q;
        const double fr = pos - std::floor(pos);
        return values[i0] * (1 - fr) + values[i1] * fr;
    }
    // mn = 3: nearest product-angle node
    const double th = std::acos(std::clamp(unit[2], -1.0, 1.0));
    double ph = std::atan2(unit[1], unit[0]);
    if (ph < 0) ph += kTwoPi;
    const std::size_t P = static_cast<std::size_t>(res_polar);
    const std::size_t A = static_cast<std::size_t>(res_azimuthal);
    std::size_t i = std::min<std::size_t>(P - 1, static_cast<std::size_t>(th / M_PI * P));
    std::size_t j = static_cast<std::size_t>(ph / kTwoPi * A + 0.5) % A;
    return values[i * A + j];
}

double kernel_eval(const SphereFunction& omega, std::span<const double> y) {
    double r2 = 0;
    for (double v : y) r2 += v * v;
    if (r2 == 0.0) throw singular_point_error("kernel is singular at the origin");
    const double r = std::sqrt(r2);
    std::vector<double> unit(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) unit[i] = y[i] / r;
    return omega.eval_dir(unit) / std::pow(r, omega.mn);
}

GridFunction fourier_integral(const GridFunction& f) {
    GridFunction hat = dft(f);
    double scale = 1;
    for (int a = 0; a < f.grid().n; ++a)
        scale *= f.grid().dx() * std::sqrt(static_cast<double>(f.grid().points));
    hat *= cplx{scale, 0};
    return hat;
}

GridFunction inverse_fourier_integral(const GridFunction& fhat) {
    GridFunction f = idft(fhat);
    double scale = 1;
    for (int a = 0; a < fhat.grid().n; ++a)
        scale *= fhat.grid().dxi() * std::sqrt(static_cast<double>(fhat.grid().points));
    f *= cplx{scale, 0};
    return f;
}

RoughKernel::RoughKernel(SphereFunction omega, TorusGrid base)
    : omega_(std::move(omega)), grid_(base) {
    grid_.validate();
    if (grid_.n != omega_.mn)
        throw std::invalid_argument("RoughKernel: grid dimension must equal mn");
    if (grid_.period < 4.5)
        throw std::invalid_argument("RoughKernel: torus must cover the K^0 support |y| <= 2");
    window_ = LPWindow{1, grid_.n};

    k0_ = GridFunction::from_fn(grid_, [&](const double* y) {
        double r2 = 0;
        for (int a = 0; a < grid_.n; ++a) r2 += y[a] * y[a];
        if (r2 == 0.0) return cplx{0, 0};
        const double w = window_.radial(std::sqrt(r2));
        if (w == 0.0) return cplx{0, 0};
        return cplx{w * kernel_eval(omega_, std::span<const double>(y, grid_.n)), 0};
    });
    k0_hat_ = fourier_integral(k0_);
}

GridFunction RoughKernel::windowed_hat(int mu) const {
    GridFunction out = k0_hat_;
    const double dil = std::ldexp(1.0, -mu);
    for_each_node(grid_.n, grid_.points, [&](const int* idx, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < grid_.n; ++a) {
            const double xi = grid_.freq(idx[a]);
            r2 += xi * xi;
        }
        out[flat] *= window_.radial(std::sqrt(r2) * dil);
    });
    return out;
}

RoughKernel::Piece RoughKernel::dyadic_piece(int gamma, int mu) const {
    // resolution guards: the truncation lives at scale 2^{-gamma}, the
    // mollified transform at 2^{mu+gamma}
    if (grid_.dx() > std::ldexp(1.0, -gamma) / 8.0)
        throw resolution_error("dyadic_piece: grid does not resolve scale 2^-gamma");
    const double ximax = grid_.dxi() * grid_.points / 2.0;
    if (std::ldexp(1.0, mu + gamma + 1) > ximax)
        throw resolution_error("dyadic_piece: frequency lattice does not reach 2^{mu+gamma+1}");

    // K^gamma sampled directly, then its transform windowed at 2^{mu+gamma}
    GridFunction kg = GridFunction::from_fn(grid_, [&](const double* y) {
        double r2 = 0;
        for (int a = 0; a < grid_.n; ++a) r2 += y[a] * y[a];
        if (r2 == 0.0) return cplx{0, 0};
        const double w = window_.radial(std::ldexp(std::sqrt(r2), gamma));
        if (w == 0.0) return cplx{0, 0};
        return cplx{w * kernel_eval(omega_, std::span<const double>(y, grid_.n)), 0};
    });
    GridFunction hat = fourier_integral(kg);
    const double dil = std::ldexp(1.0, -(mu + gamma));
    for_each_node(grid_.n, grid_.points, [&](const int* idx, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < grid_.n; ++a) {
            const double xi = grid_.freq(idx[a]);
            r2 += xi * xi;
        }
        hat[flat] *= window_.radial(std::sqrt(r2) * dil);
    });
    return Piece{inverse_fourier_integral(hat), std::move(hat)};
}

RoughKernel::Assembled RoughKernel::assemble_kmu(int mu, int gamma_lo, int gamma_hi) const {
    if (gamma_hi < gamma_lo) throw std::invalid_argument("assemble_kmu: empty gamma range");
    Assembled out{GridFunction(grid_), GridFunction(grid_), 0.0};
    double edge = 0, total = 0;
    for (int gamma = gamma_lo; gamma <= gamma_hi; ++gamma) {
        Piece p = dyadic_piece(gamma, mu);
        const double mass = l2_counting(p.transform);
        total += mass * mass;
        if (gamma == gamma_lo || gamma == gamma_hi) edge += mass * mass;
        out.physical += p.physical;
        out.transform += p.transform;
    }
    out.boundary_mass = total > 0 ? edge / total : 0.0;
    return out;
}

double RoughKernel::annulus_mass_fraction(int mu) const {
    GridFunction hat = windowed_hat(mu);
    const double lo = std::ldexp(1.0, mu - 2), hi = std::ldexp(1.0, mu + 2);
    double inside = 0, total = 0;
    for_each_node(grid_.n, grid_.points, [&](const int* idx, std::size_t flat) {
        double r2 = 0;
        for (int a = 0; a < grid_.n; ++a) {
            const double xi = grid_.freq(idx[a]);
            r2 += xi * xi;
        }
        const double r = std::sqrt(r2);
        const double mass = std::norm(hat[flat]);
        total += mass;
        if (r >= lo && r <= hi) inside += mass;
    });
    return total > 0 ? inside / total : 1.0;
}

CoefficientTable RoughKernel::rough_coeffs(int mu, int lambda_max,
                                           const MotherWavelets& mother) const {
    const double L = grid_.period;
    const double lg = std::log2(L);
    if (std::abs(lg - std::round(lg)) > 1e-12)
        throw std::invalid_argument("rough_coeffs: torus period must be a power of two");
    const int spacing = static_cast<int>(std::round(lg));
    if (spacing < lambda_max + 3)
        throw resolution_error("rough_coeffs: lattice spacing does not resolve lambda_max");
    const double ximax = grid_.dxi() * grid_.points / 2.0;
    if (std::ldexp(1.0, mu + 1) > ximax)
        throw resolution_error("rough_coeffs: lattice does not reach the 2^{mu+1} annulus");

    GridFunction hat = windowed_hat(mu);

    // crop to the support annulus (|xi| <= 2^{mu+1}) plus one atom radius
    const double pad = mother.C0 * std::sqrt(static_cast<double>(grid_.n)) + 1;
    const double extent = std::ldexp(1.0, mu + 1) + pad;
    const long half = std::min<long>(grid_.points / 2,
                                     static_cast<long>(std::ceil(extent * L)));
    SampleGrid sg;
    sg.dim = grid_.n;
    sg.spacing_log2 = spacing;
    sg.lo.assign(grid_.n, -half);
    sg.hi.assign(grid_.n, half + 1);

    SampledSymbol F = SampledSymbol::zeros(sg);
    const int G = grid_.points;
    std::vector<long> kidx(grid_.n);
    for_each_node(grid_.n, G, [&](const int* idx, std::size_t flat) {
        bool in = true;
        for (int a = 0; a < grid_.n; ++a) {
            const long s = idx[a] - G / 2;
            if (s < -half || s > half) {
                in = false;
                break;
            }
            kidx[a] = s;
        }
        if (in) F.at(kidx.data()) = hat[flat];
    });
    return analyze(F, mother, lambda_max);
}

HormanderSymbol::Kind HormanderSymbol::kind_of(const std::string& name) {
    if (name == "oscillating") return Kind::Oscillating;
    if (name == "envelope") return Kind::Envelope;
    if (name == "sampled") return Kind::Sampled;
    throw std::invalid_argument("unknown hormander symbol kind: " + name);
}

HormanderSymbol HormanderSymbol::make(Kind kind, int m, int n, double s, double q) {
    if (kind == Kind::Sampled)
        throw std::invalid_argument("HormanderSymbol: sampled symbols need from_samples");
    if (m < 1 || m > 3 || n < 1 || n > 2)
        throw std::invalid_argument("HormanderSymbol: m in 1..3 and n in 1..2");
    HormanderSymbol h;
    h.kind_ = kind;
    h.m_ = m;
    h.n_ = n;
    h.s_ = s;
    h.q_ = q;
    h.window_ = build_lp_window(m, n);
    for (int j = 0; j < m; ++j) h.osc_t_.push_back(1.0 + 0.5 * j);
    return h;
}

HormanderSymbol HormanderSymbol::from_samples(SampledSymbol data, int m, int n, double s,
                                              double q) {
    HormanderSymbol h = make(Kind::Envelope, m, n, s, q);
    h.kind_ = Kind::Sampled;
    h.data_ = std::move(data);
    if (h.data_.grid.dim != m * n)
        throw std::invalid_argument("HormanderSymbol: sample grid dimension must be mn");
    return h;
}

cplx HormanderSymbol::eval(std::span<const double> xi) const {
    if (static_cast<int>(xi.size()) != m_ * n_)
        throw std::invalid_argument("HormanderSymbol: argument has wrong dimension");
    switch (kind_) {
        case Kind::Envelope: {
            double r2 = 0;
            for (double v : xi) r2 += v * v;
            return {std::pow(1.0 + r2, -s_ / 2), 0};
        }
        case Kind::Oscillating: {
            double r2 = 0;
            for (double v : xi) r2 += v * v;
            const double cut = LPWindow::theta(std::sqrt(r2) / osc_cut_);
            if (cut == 0.0) return {0, 0};
            cplx acc{cut, 0};
            for (int j = 0; j < m_; ++j) {
                double b2 = 0;
                for (int a = 0; a < n_; ++a) b2 += xi[j * n_ + a] * xi[j * n_ + a];
                acc *= std::exp(cplx{0, 0.5 * osc_t_[j] * std::log1p(b2)});
            }
            return acc;
        }
        case Kind::Sampled: {
            // nearest-node lookup; samples are expected to oversample slices
            std::vector<long> idx(data_.grid.dim);
            for (int a = 0; a < data_.grid.dim; ++a) {
                const long i = static_cast<long>(std::llround(xi[a] / data_.grid.h()));
                if (i < data_.grid.lo[a] || i >= data_.grid.hi[a]) return {0, 0};
                idx[a] = i;
            }
            return const_cast<SampledSymbol&>(data_).at(idx.data());
        }
    }
    return {0, 0};
}

SampledSymbol HormanderSymbol::slice(int gamma, const SampleGrid& grid) const {
    const double dil = std::ldexp(1.0, gamma);
    return SampledSymbol::from_fn(grid, [&](const double* xi) {
        double r2 = 0;
        for (int a = 0; a < m_ * n_; ++a) r2 += xi[a] * xi[a];
        const double w = window_.radial(std::sqrt(r2));
        if (w == 0.0) return cplx{0, 0};
        double scaled[8];
        for (int a = 0; a < m_ * n_; ++a) scaled[a] = dil * xi[a];
        return eval(std::span<const double>(scaled, m_ * n_)) * w;
    });
}

GridFunction HormanderSymbol::slice_torus(int gamma, const TorusGrid& g) const {
    if (g.n != m_ * n_) throw std::invalid_argument("slice_torus: grid dimension must be mn");
    const double dil = std::ldexp(1.0, gamma);
    return GridFunction::from_fn(g, [&](const double* xi) {
        double r2 = 0;
        for (int a = 0; a < g.n; ++a) r2 += xi[a] * xi[a];
        const double w = window_.radial(std::sqrt(r2));
        if (w == 0.0) return cplx{0, 0};
        double scaled[8];
        for (int a = 0; a < g.n; ++a) scaled[a] = dil * xi[a];
        return eval(std::span<const double>(scaled, g.n)) * w;
    });
}

std::map<int, CoefficientTable> HormanderSymbol::slice_coeffs(std::span<const int> gammas,
                                                              int lambda_max,
                                                              const MotherWavelets& mother,
                                                              int spacing_log2) const {
    // slices vanish outside |xi| <= 2 exactly, so the sample box only needs
    // the support plus a node of padding
    const double extent = 2.0 + 2.0 * std::ldexp(1.0, -spacing_log2);
    SampleGrid grid = SampleGrid::centered(m_ * n_, spacing_log2, extent);
    std::map<int, CoefficientTable> out;
    for (int gamma : gammas) out.emplace(gamma, analyze(slice(gamma, grid), mother, lambda_max));
    return out;
}

} // namespace mlin
