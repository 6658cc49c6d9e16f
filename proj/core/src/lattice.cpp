#include "mlin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlin {

namespace {

void check_axes(std::span<const int> axes, int m) {
    for (int a : axes) {
        if (a < 1 || a > m) throw std::invalid_argument("axis index out of range 1..m");
    }
    std::vector<int> s(axes.begin(), axes.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw std::invalid_argument("axis indices must be distinct");
}

std::vector<int> complement_axes(std::span<const int> axes, int m) {
    std::vector<bool> used(m + 1, false);
    for (int a : axes) used[a] = true;
    std::vector<int> rest;
    for (int a = 1; a <= m; ++a)
        if (!used[a]) rest.push_back(a);
    return rest;
}

std::vector<int> restrict_coords(const LatticePoint& p, int n, std::span<const int> axes) {
    std::vector<int> out;
    out.reserve(axes.size() * n);
    for (int a : axes)
        for (int c = 0; c < n; ++c) out.push_back(p.coords[(a - 1) * n + c]);
    return out;
}

} // namespace

LatticeSet::LatticeSet(int n, int m) : n_(n), m_(m) {
    if (n < 1 || m < 1) throw std::invalid_argument("LatticeSet: n and m must be >= 1");
}

LatticeSet::LatticeSet(int n, int m, std::vector<LatticePoint> pts) : LatticeSet(n, m) {
    for (const auto& p : pts) {
        if (static_cast<int>(p.coords.size()) != n * m)
            throw std::invalid_argument("LatticeSet: point has wrong block shape");
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    points_ = std::move(pts);
}

bool LatticeSet::contains(const LatticePoint& p) const {
    return std::binary_search(points_.begin(), points_.end(), p);
}

void LatticeSet::insert(LatticePoint p) {
    if (static_cast<int>(p.coords.size()) != n_ * m_)
        throw std::invalid_argument("LatticeSet: point has wrong block shape");
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) points_.insert(it, std::move(p));
}

std::span<const int> LatticeSet::block(const LatticePoint& p, int axis) const {
    return {p.coords.data() + (axis - 1) * n_, static_cast<std::size_t>(n_)};
}

LatticeSet project_keep(const LatticeSet& U, std::span<const int> kept_axes) {
    check_axes(kept_axes, U.m());
    if (kept_axes.empty()) throw std::invalid_argument("project: must keep at least one axis");
    std::vector<int> axes(kept_axes.begin(), kept_axes.end());
    std::sort(axes.begin(), axes.end());
    std::vector<LatticePoint> out;
    out.reserve(U.size());
    for (const auto& p : U.points()) out.push_back({restrict_coords(p, U.n(), axes)});
    return LatticeSet(U.n(), static_cast<int>(axes.size()), std::move(out));
}

LatticeSet project_drop(const LatticeSet& U, std::span<const int> dropped_axes) {
    check_axes(dropped_axes, U.m());
    return project_keep(U, complement_axes(dropped_axes, U.m()));
}

LatticeSet column(const LatticeSet& U, const BlockAssignment& fixed) {
    std::vector<int> fixed_axes;
    for (const auto& [axis, blk] : fixed) {
        if (axis < 1 || axis > U.m()) throw std::invalid_argument("column: axis out of range");
        if (static_cast<int>(blk.size()) != U.n())
            throw std::invalid_argument("column: fixed block has wrong length");
        fixed_axes.push_back(axis);
    }
    if (static_cast<int>(fixed.size()) >= U.m())
        throw std::invalid_argument("column: at least one axis must remain free");
    std::vector<int> free_axes = complement_axes(fixed_axes, U.m());

    std::vector<LatticePoint> out;
    for (const auto& p : U.points()) {
        bool match = true;
        for (const auto& [axis, blk] : fixed) {
            auto b = U.block(p, axis);
            if (!std::equal(b.begin(), b.end(), blk.begin())) {
                match = false;
                break;
            }
        }
        if (match) out.push_back({restrict_coords(p, U.n(), free_axes)});
    }
    return LatticeSet(U.n(), static_cast<int>(free_axes.size()), std::move(out));
}

namespace {

void enumerate_columns(const LatticeSet& U, BlockAssignment& fixed,
                       std::span<const int> order, std::vector<LatticePoint>& out) {
    if (order.empty()) {
        // all axes fixed, emit the matching points (exactly one since U is
        // duplicate-free and every axis is pinned)
        for (const auto& p : U.points()) {
            bool match = true;
            for (const auto& [axis, blk] : fixed) {
                auto b = U.block(p, axis);
                if (!std::equal(b.begin(), b.end(), blk.begin())) {
                    match = false;
                    break;
                }
            }
            if (match) out.push_back(p);
        }
        return;
    }
    const int axis = order.back();
    // distinct values of this axis among points matching the current fixing
    std::vector<std::vector<int>> vals;
    for (const auto& p : U.points()) {
        bool match = true;
        for (const auto& [a, blk] : fixed) {
            auto b = U.block(p, a);
            if (!std::equal(b.begin(), b.end(), blk.begin())) {
                match = false;
                break;
            }
        }
        if (match) {
            auto b = U.block(p, axis);
            vals.emplace_back(b.begin(), b.end());
        }
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (auto& v : vals) {
        fixed[axis] = v;
        enumerate_columns(U, fixed, order.first(order.size() - 1), out);
        fixed.erase(axis);
    }
}

} // namespace

std::vector<LatticePoint> nested_enumeration(const LatticeSet& U,
                                             std::span<const int> axis_order) {
    check_axes(axis_order, U.m());
    std::vector<LatticePoint> out;
    out.reserve(U.size());
    std::vector<int> comp = complement_axes(axis_order, U.m());
    if (comp.empty()) {
        BlockAssignment fixed;
        enumerate_columns(U, fixed, axis_order, out);
        return out;
    }
    LatticeSet proj = project_keep(U, comp);
    for (const auto& kc : proj.points()) {
        BlockAssignment fixed;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            fixed[comp[i]] = std::vector<int>(kc.coords.begin() + i * U.n(),
                                              kc.coords.begin() + (i + 1) * U.n());
        }
        enumerate_columns(U, fixed, axis_order, out);
    }
    return out;
}

bool exceeds_threshold(std::size_t size, double t) {
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) return static_cast<double>(size) > r;
    return static_cast<double>(size) > t;
}

ColumnSplit split_columns(const LatticeSet& U, long N) {
    if (U.m() < 2) throw std::invalid_argument("split_columns: requires m >= 2");
    if (N < static_cast<long>(U.size()))
        throw std::invalid_argument("split_columns: N must be at least |U|");
    if (N < 1) throw std::invalid_argument("split_columns: N must be positive");

    const int n = U.n(), m = U.m();
    ColumnSplit out;
    out.budget = N;
    out.thresholds.resize(m - 1);
    for (int j = 1; j <= m - 1; ++j)
        out.thresholds[j - 1] = std::pow(static_cast<double>(N), static_cast<double>(j) / m);

    std::vector<LatticePoint> remainder(U.points().begin(), U.points().end());
    for (int j = 1; j <= m - 1; ++j) {
        const double Nj = out.thresholds[j - 1];
        // group the remainder by the complement key (k_{j+1},..,k_m); the
        // column over the first j axes is determined by that key
        std::map<std::vector<int>, std::size_t> colsize;
        for (const auto& p : remainder) {
            std::vector<int> key(p.coords.begin() + j * n, p.coords.end());
            ++colsize[key];
        }
        std::vector<LatticePoint> taken, rest;
        for (auto& p : remainder) {
            std::vector<int> key(p.coords.begin() + j * n, p.coords.end());
            if (exceeds_threshold(colsize[key], Nj))
                taken.push_back(std::move(p));
            else
                rest.push_back(std::move(p));
        }
        out.parts.emplace_back(n, m, std::move(taken));
        remainder = std::move(rest);
    }
    out.parts.emplace_back(n, m, std::move(remainder));
    return out;
}

LevelSetPartition level_sets(const CoeffMap& b, int n, int m, double A, double q,
                             std::optional<int> r_max) {
    if (A <= 0) throw std::invalid_argument("level_sets: reference height must be positive");
    if (q <= 0) throw std::invalid_argument("level_sets: q must be positive");
    if (r_max && *r_max < 1) throw std::invalid_argument("level_sets: r_max must be >= 1");

    LevelSetPartition out;
    out.reference = A;
    out.q = q;
    out.r_max = r_max;

    double lq_acc = 0.0;
    for (const auto& [p, v] : b) {
        if (static_cast<int>(p.coords.size()) != n * m)
            throw std::invalid_argument("level_sets: point has wrong block shape");
        const double a = std::abs(v);
        if (a > A) throw std::invalid_argument("level_sets: coefficient exceeds the reference height");
        lq_acc += std::pow(a, q);
    }
    const double Bq = std::pow(lq_acc, 1.0 / q);

    std::map<int, std::vector<LatticePoint>> buckets;
    for (const auto& [p, v] : b) {
        const double a = std::abs(v);
        int r;
        if (a == 0.0) {
            if (!r_max) continue;  // zero coefficients live in no dyadic band
            r = *r_max;
        } else {
            r = std::max(1, static_cast<int>(std::ceil(std::log2(A / a))));
            while (!(a > std::ldexp(A, -r))) ++r;
            while (r > 1 && a > std::ldexp(A, -(r - 1))) --r;
            if (r_max && r > *r_max) r = *r_max;
        }
        buckets[r].push_back(p);
    }
    for (auto& [r, pts] : buckets) out.classes.emplace(r, LatticeSet(n, m, std::move(pts)));

    for (const auto& [r, pts] : out.classes) {
        if (r_max) {
            out.bounds[r] = std::pow(2.0, static_cast<double>(r) * q);
        } else {
            out.bounds[r] = std::pow(Bq / std::ldexp(A, -r), q);
        }
    }
    return out;
}

double block_norm(const LatticePoint& p, int n, int axis) {
    double acc = 0;
    for (int c = 0; c < n; ++c) {
        const double x = p.coords[(axis - 1) * n + c];
        acc += x * x;
    }
    return std::sqrt(acc);
}

double point_norm(const LatticePoint& p) {
    double acc = 0;
    for (int x : p.coords) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

namespace {

bool ordered_blocks(const LatticeSet& probe, const LatticePoint& p, int n, int m) {
    for (int a = 1; a < m; ++a) {
        const double ba = block_norm(p, n, a), bb = block_norm(p, n, a + 1);
        if (ba > bb) continue;
        if (ba < bb) return false;
        auto blk_a = probe.block(p, a), blk_b = probe.block(p, a + 1);
        if (std::lexicographical_compare(blk_a.begin(), blk_a.end(), blk_b.begin(), blk_b.end()))
            return false;  // tie resolved by descending lexicographic blocks
    }
    return true;
}

template <class Pred>
LatticeSet collect_box(const ShellSpec& spec, int box_radius, Pred&& pred) {
    if (spec.c0 < 1) throw std::invalid_argument("shell: c0 must be >= 1");
    if (spec.l < 1 || spec.l > spec.m) throw std::invalid_argument("shell: l out of range");
    const double outer = std::pow(2.0, spec.scale + spec.c0);
    if (static_cast<double>(box_radius) < outer)
        throw std::invalid_argument("shell: bounding box does not cover the outer ring");

    const int dims = spec.n * spec.m;
    const long side = 2L * box_radius + 1;
    LatticeSet probe(spec.n, spec.m);
    std::vector<LatticePoint> found;
    std::vector<int> idx(dims, -box_radius);
    while (true) {
        LatticePoint p{idx};
        if (pred(probe, p)) found.push_back(p);
        int a = dims - 1;
        for (; a >= 0; --a) {
            if (++idx[a] <= box_radius) break;
            idx[a] = -box_radius;
        }
        if (a < 0) break;
    }
    (void)side;
    return LatticeSet(spec.n, spec.m, std::move(found));
}

} // namespace

LatticeSet shell_members(const ShellSpec& spec, int box_radius) {
    const double inner = std::pow(2.0, spec.scale - spec.c0);
    const double outer = std::pow(2.0, spec.scale + spec.c0);
    return collect_box(spec, box_radius, [&](const LatticeSet& probe, const LatticePoint& p) {
        const double r = point_norm(p);
        if (r < inner || r > outer) return false;
        for (int a = 1; a <= spec.m; ++a) {
            const double bn = block_norm(p, spec.n, a);
            if (a <= spec.l ? !(bn >= spec.M) : !(bn < spec.M)) return false;
        }
        if (spec.ordered && !ordered_blocks(probe, p, spec.n, spec.m)) return false;
        return true;
    });
}

LatticeSet ordered_shell(const ShellSpec& spec, int box_radius) {
    const double inner = std::pow(2.0, spec.scale - spec.c0);
    const double outer = std::pow(2.0, spec.scale + spec.c0);
    return collect_box(spec, box_radius, [&](const LatticeSet& probe, const LatticePoint& p) {
        const double r = point_norm(p);
        if (r < inner || r > outer) return false;
        return ordered_blocks(probe, p, spec.n, spec.m);
    });
}

} // namespace mlin
