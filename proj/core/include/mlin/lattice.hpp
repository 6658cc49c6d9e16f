#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace mlin {

/// Point of (Z^n)^m stored as flattened blocks; block j (0-based) occupies
/// coords[j*n .. (j+1)*n).  Comparison is lexicographic on the flattened
/// coordinates, which fixes the library-wide iteration order.
struct LatticePoint {
    std::vector<int> coords;
    auto operator<=>(const LatticePoint&) const = default;
};

/// Finite duplicate-free subset of (Z^n)^m, kept sorted.
class LatticeSet {
public:
    LatticeSet() = default;
    LatticeSet(int n, int m);
    /// Sorts, deduplicates, and validates block shape.
    LatticeSet(int n, int m, std::vector<LatticePoint> pts);

    int n() const { return n_; }
    int m() const { return m_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const std::vector<LatticePoint>& points() const { return points_; }
    bool contains(const LatticePoint& p) const;
    void insert(LatticePoint p);

    std::span<const int> block(const LatticePoint& p, int axis) const;  // axis 1-based

    bool operator==(const LatticeSet&) const = default;

private:
    int n_ = 1;
    int m_ = 1;
    std::vector<LatticePoint> points_;
};

/// P_{j1..jl}: image of U under keeping the given axes (1-based, returned in
/// ascending axis order).  Keeping every axis is the identity.
LatticeSet project_keep(const LatticeSet& U, std::span<const int> kept_axes);

/// P_{*j1..jl}: image of U under dropping the given axes.
LatticeSet project_drop(const LatticeSet& U, std::span<const int> dropped_axes);

/// Partial assignment of blocks: axis (1-based) -> block value of length n.
using BlockAssignment = std::map<int, std::vector<int>>;

/// Col over the free axes: coordinates (ascending free-axis order) of the
/// points of U that agree with `fixed` on the fixed axes.  Empty result when
/// nothing matches.  At least one axis must remain free.
LatticeSet column(const LatticeSet& U, const BlockAssignment& fixed);

/// Enumerates U through the nested column sums: outer loop over the
/// projection onto the complement of axis_order, then one nested column loop
/// per axis of axis_order (last axis outermost).  Every point is produced
/// exactly once; axis_order holds distinct 1-based axes.
std::vector<LatticePoint> nested_enumeration(const LatticeSet& U,
                                             std::span<const int> axis_order);

/// Result of the m-way column split.  parts[j-1] = U^j; thresholds[j-1] =
/// N_j = N^{j/m}.  Certificates: |P_{*1..j} U^j| < N/N_j for j < m, and every
/// column of U^j over the last m-j+1.. axes has size <= N_{j-1} for j >= 2.
struct ColumnSplit {
    std::vector<LatticeSet> parts;
    std::vector<double> thresholds;
    long budget = 0;  // N
};

/// Sequential peeling: at step j the remainder's columns over the first j
/// axes (complement fixed) of size exceeding N_j move into U^j; U^m is the
/// final remainder.  Column sizes are evaluated within the current remainder.
ColumnSplit split_columns(const LatticeSet& U, long N);

/// true when an integer column size exceeds the real threshold t, with a
/// guard against float boundaries: thresholds within 1e-9 of an integer are
/// treated as that integer and the comparison stays strict.
bool exceeds_threshold(std::size_t size, double t);

using CoeffMap = std::map<LatticePoint, std::complex<double>>;

/// Dyadic magnitude classes of a coefficient map.  Uncapped: class r holds
/// exactly the points with A 2^{-r} < |b| <= A 2^{-r+1} (zero coefficients
/// belong to no class).  Capped: classes 1..r_max-1 as above and class r_max
/// absorbs everything with |b| <= 2^{-r_max+1} A.
struct LevelSetPartition {
    std::map<int, LatticeSet> classes;
    std::map<int, double> bounds;  // certified cardinality bound per class
    double reference = 0;          // A
    double q = 0;
    std::optional<int> r_max;
};

LevelSetPartition level_sets(const CoeffMap& b, int n, int m, double A, double q,
                             std::optional<int> r_max = std::nullopt);

/// Annular shell with l "large" blocks: |k| within [2^{scale-c0}, 2^{scale+c0}]
/// and |k_1|,..,|k_l| >= M > |k_{l+1}|,..,|k_m|.  The ordered variant also
/// requires |k_1| >= ... >= |k_m| with ties broken by descending
/// lexicographic block order.
struct ShellSpec {
    int n = 1;
    int m = 2;
    int scale = 0;   // mu + lambda
    double c0 = 1;   // ring constant, >= 1
    double M = 1;    // block size threshold
    int l = 1;       // number of large blocks, 1..m
    bool ordered = false;
};

/// All members inside the centered box of the given coordinate radius; the
/// box must cover the outer ring radius 2^{scale+c0}.
LatticeSet shell_members(const ShellSpec& spec, int box_radius);

/// Ring-and-order part of the predicate only (no block-size condition);
/// the union of the l = 1..m splits of an ordered shell equals this set
/// whenever the inner ring radius forces |k_1| >= M.
LatticeSet ordered_shell(const ShellSpec& spec, int box_radius);

double block_norm(const LatticePoint& p, int n, int axis);  // axis 1-based
double point_norm(const LatticePoint& p);

} // namespace mlin
