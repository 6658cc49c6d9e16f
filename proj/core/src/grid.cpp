#include "mlin/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "mlin/fft.hpp"

namespace mlin {

void TorusGrid::validate() const {
    if (n < 1 || n > 3) throw std::invalid_argument("TorusGrid: n must be in 1..3");
    if (period <= 0) throw std::invalid_argument("TorusGrid: period must be positive");
    if (points <= 0 || points % 2 != 0) throw std::invalid_argument("TorusGrid: points must be positive and even");
}

GridFunction::GridFunction(const TorusGrid& g, std::vector<cplx> values)
    : grid_(g), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size())
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

void for_each_node(int n, int G, const std::function<void(const int*, std::size_t)>& fn) {
    int idx[4] = {0, 0, 0, 0};
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(G);
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(idx, flat);
        for (int a = n - 1; a >= 0; --a) {
            if (++idx[a] < G) break;
            idx[a] = 0;
        }
    }
}

GridFunction GridFunction::from_fn(const TorusGrid& g,
                                   const std::function<cplx(const double*)>& fn) {
    GridFunction out(g);
    double x[4];
    for_each_node(g.n, g.points, [&](const int* idx, std::size_t flat) {
        for (int a = 0; a < g.n; ++a) x[a] = g.node(idx[a]);
        out.values()[flat] = fn(x);
    });
    return out;
}

GridFunction GridFunction::random_unit(const TorusGrid& g, Rng& rng) {
    GridFunction out(g);
    for (auto& v : out.values()) v = rng.cnormal();
    double nrm = l2_norm(out);
    if (nrm > 0) out *= cplx{1.0 / nrm, 0};
    return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("GridFunction: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

namespace {

// Shared by dft/idft: reorder between signed-ascending frequency storage and
// the standard DFT index order, and apply the e^{i pi j} phase coming from
// the half-period origin offset of the physical nodes.
void transform(const GridFunction& in, GridFunction& out, int sign) {
    const TorusGrid& g = in.grid();
    const int G = g.points;
    const int half = G / 2;
    const double halfsign = (half % 2 == 0) ? 1.0 : -1.0;
    std::vector<cplx> buf(in.size());
    std::vector<int> shape(g.n, G);

    if (sign < 0) {
        // physical (std order) -> FFT -> phased, shifted frequency storage
        buf = in.values();
        fft_nd(buf.data(), shape, -1);
        for_each_node(g.n, G, [&](const int* idx, std::size_t flat) {
            std::size_t src = 0;
            double phase = 1.0;
            for (int a = 0; a < g.n; ++a) {
                src = src * G + static_cast<std::size_t>((idx[a] + half) % G);
                phase *= (idx[a] % 2 == 0) ? halfsign : -halfsign;
            }
            out.values()[flat] = buf[src] * phase;
        });
    } else {
        // phased, shifted frequency storage -> inverse FFT -> physical
        for_each_node(g.n, G, [&](const int* idx, std::size_t flat) {
            std::size_t dst = 0;
            double phase = 1.0;
            for (int a = 0; a < g.n; ++a) {
                dst = dst * G + static_cast<std::size_t>((idx[a] + half) % G);
                phase *= (idx[a] % 2 == 0) ? halfsign : -halfsign;
            }
            buf[dst] = in.values()[flat] * phase;
        });
        fft_nd(buf.data(), shape, +1);
        out.values() = std::move(buf);
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
    for (auto& v : out.values()) v *= scale;
}

} // namespace

GridFunction dft(const GridFunction& f) {
    GridFunction out(f.grid());
    transform(f, out, -1);
    return out;
}

GridFunction idft(const GridFunction& fhat) {
    GridFunction out(fhat.grid());
    transform(fhat, out, +1);
    return out;
}

double quasinorm(const GridFunction& f, double p) {
    if (p <= 0) throw std::invalid_argument("quasinorm: p must be positive");
    const double dx = f.grid().dx();
    double meas = 1.0;
    for (int a = 0; a < f.grid().n; ++a) meas *= dx;
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * meas, 1.0 / p);
}

double l2_norm(const GridFunction& f) {
    const double dx = f.grid().dx();
    double meas = 1.0;
    for (int a = 0; a < f.grid().n; ++a) meas *= dx;
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::norm(v);
    return std::sqrt(acc * meas);
}

double l2_counting(const GridFunction& f) {
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::norm(v);
    return std::sqrt(acc);
}

} // namespace mlin
