#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "mlin/lattice.hpp"
#include "mlin/rng.hpp"

using namespace mlin;

namespace {

LatticeSet make_set(int n, int m, std::vector<std::vector<int>> pts) {
    std::vector<LatticePoint> v;
    for (auto& p : pts) v.push_back({std::move(p)});
    return LatticeSet(n, m, std::move(v));
}

LatticeSet random_set(Rng& rng, int n, int m, int count, int radius) {
    std::vector<LatticePoint> pts;
    for (int i = 0; i < count; ++i) {
        LatticePoint p;
        for (int a = 0; a < n * m; ++a)
            p.coords.push_back(static_cast<int>(rng.uniform_int(-radius, radius)));
        pts.push_back(std::move(p));
    }
    return LatticeSet(n, m, std::move(pts));
}

// brute-force column size: points of S agreeing with p on axes j+1..m
std::size_t brute_column_size(const LatticeSet& S, const LatticePoint& p, int j) {
    const int n = S.n(), m = S.m();
    std::size_t cnt = 0;
    for (const auto& q : S.points()) {
        bool same = true;
        for (int a = j * n; a < m * n; ++a)
            if (q.coords[a] != p.coords[a]) {
                same = false;
                break;
            }
        if (same) ++cnt;
    }
    return cnt;
}

} // namespace

TEST_CASE("project: spec examples") {
    LatticeSet U = make_set(1, 2, {{0, 0}, {1, 0}, {0, 1}});
    const int drop1[] = {1};
    LatticeSet p = project_drop(U, drop1);
    CHECK(p.size() == 2);
    CHECK(p.contains({{0}}));
    CHECK(p.contains({{1}}));

    const int keep_all[] = {1, 2};
    CHECK(project_keep(U, keep_all) == U);

    LatticeSet empty(1, 2);
    CHECK(project_drop(empty, drop1).empty());

    const int bad[] = {3};
    CHECK_THROWS_AS(project_keep(U, bad), std::invalid_argument);
}

TEST_CASE("column: spec examples") {
    LatticeSet U = make_set(1, 2, {{0, 0}, {1, 0}, {0, 1}});
    BlockAssignment fix{{2, {0}}};
    LatticeSet col = column(U, fix);
    CHECK(col.size() == 2);
    CHECK(col.contains({{0}}));
    CHECK(col.contains({{1}}));

    BlockAssignment miss{{2, {9}}};
    CHECK(column(U, miss).empty());

    LatticeSet V = make_set(1, 2, {{0, 5}, {1, 5}});
    BlockAssignment fix5{{2, {5}}};
    LatticeSet col5 = column(V, fix5);
    CHECK(col5.size() == 2);
    CHECK(col5.contains({{0}}));
    CHECK(col5.contains({{1}}));
}

TEST_CASE("nested enumeration is a multiset identity") {
    LatticeSet U = make_set(1, 2, {{0, 0}, {1, 0}, {0, 1}});
    const int ord1[] = {1};
    auto seq = nested_enumeration(U, ord1);
    REQUIRE(seq.size() == 3);
    std::sort(seq.begin(), seq.end());
    CHECK(std::equal(seq.begin(), seq.end(), U.points().begin()));

    Rng rng(42);
    LatticeSet R = random_set(rng, 1, 3, 50, 4);
    for (std::vector<int> ord : {std::vector<int>{1, 2}, {2}, {3, 1}, {1, 2, 3}}) {
        auto s = nested_enumeration(R, ord);
        REQUIRE(s.size() == R.size());
        std::sort(s.begin(), s.end());
        CHECK(std::equal(s.begin(), s.end(), R.points().begin()));
    }

    LatticeSet empty(1, 3);
    const int ord12[] = {1, 2};
    CHECK(nested_enumeration(empty, ord12).empty());
}

TEST_CASE("split_columns: spec examples") {
    LatticeSet U = make_set(1, 2, {{0, 0}, {1, 0}, {0, 1}});
    ColumnSplit cs = split_columns(U, 3);
    REQUIRE(cs.parts.size() == 2);
    CHECK(cs.thresholds[0] == doctest::Approx(std::sqrt(3.0)));
    CHECK(cs.parts[0].size() == 2);
    CHECK(cs.parts[0].contains({{0, 0}}));
    CHECK(cs.parts[0].contains({{1, 0}}));
    CHECK(cs.parts[1].size() == 1);
    CHECK(cs.parts[1].contains({{0, 1}}));

    LatticeSet empty(1, 2);
    ColumnSplit ce = split_columns(empty, 1);
    CHECK(ce.parts[0].empty());
    CHECK(ce.parts[1].empty());

    LatticeSet single = make_set(1, 3, {{0, 0, 0}});
    ColumnSplit c1 = split_columns(single, 1);
    CHECK(c1.thresholds[0] == doctest::Approx(1.0));
    CHECK(c1.thresholds[1] == doctest::Approx(1.0));
    CHECK(c1.parts[0].empty());
    CHECK(c1.parts[1].empty());
    CHECK(c1.parts[2].size() == 1);

    CHECK_THROWS_AS(split_columns(U, 2), std::invalid_argument);
    LatticeSet m1 = make_set(1, 1, {{0}});
    CHECK_THROWS_AS(split_columns(m1, 5), std::invalid_argument);
}

TEST_CASE("split_columns certificates hold on random sets") {
    Rng rng(2024);
    for (int rep = 0; rep < 60; ++rep) {
        const int m = 2 + static_cast<int>(rng.uniform_int(0, 1));
        const int count = 1 + static_cast<int>(rng.uniform_int(0, 120));
        const int radius = 1 + static_cast<int>(rng.uniform_int(0, 5));
        LatticeSet U = random_set(rng, 1, m, count, radius);
        const long N = static_cast<long>(U.size()) + rng.uniform_int(0, 3);
        if (N == 0) continue;
        ColumnSplit cs = split_columns(U, N);

        // partition exactness
        std::vector<LatticePoint> all;
        std::size_t total = 0;
        for (const auto& part : cs.parts) {
            total += part.size();
            for (const auto& p : part.points()) all.push_back(p);
        }
        CHECK(total == U.size());
        LatticeSet reassembled(U.n(), U.m(), std::move(all));
        CHECK(reassembled == U);

        // (cardp): |P_{*1..j} U^j| < N / N_j for 1 <= j <= m-1
        for (int j = 1; j <= m - 1; ++j) {
            std::vector<int> dropped;
            for (int a = 1; a <= j; ++a) dropped.push_back(a);
            if (cs.parts[j - 1].empty()) continue;
            const double lhs = static_cast<double>(project_drop(cs.parts[j - 1], dropped).size());
            CHECK(lhs < static_cast<double>(N) / cs.thresholds[j - 1] + 1e-9);
        }
        // (cardc): columns of U^j over the first j-1 axes have size <= N_{j-1}
        for (int j = 2; j <= m; ++j) {
            const LatticeSet& part = cs.parts[j - 1];
            for (const auto& p : part.points()) {
                const std::size_t cz = brute_column_size(part, p, j - 1);
                CHECK(static_cast<double>(cz) <= cs.thresholds[j - 2] + 1e-9);
            }
        }
    }
}

TEST_CASE("level_sets: spec examples") {
    auto mk = [](int x) { return LatticePoint{{x, 0}}; };
    CoeffMap b{{mk(0), {1.0, 0}}, {mk(1), {0.6, 0}}, {mk(2), {0.4, 0}}};
    LevelSetPartition ls = level_sets(b, 1, 2, 1.0, 2.0);
    REQUIRE(ls.classes.count(1) == 1);
    REQUIRE(ls.classes.count(2) == 1);
    CHECK(ls.classes.at(1).size() == 2);
    CHECK(ls.classes.at(2).size() == 1);
    CHECK(ls.classes.at(1).contains(mk(0)));
    CHECK(ls.classes.at(1).contains(mk(1)));
    CHECK(ls.classes.at(2).contains(mk(2)));
    // |class 1| = 2 <= (||b||_2 / 2^{-1})^2 = 1.52 * 4
    CHECK(ls.bounds.at(1) == doctest::Approx(6.08));
    CHECK(static_cast<double>(ls.classes.at(1).size()) <= ls.bounds.at(1));

    CoeffMap zeros{{mk(0), {0, 0}}, {mk(1), {0, 0}}};
    LevelSetPartition cap = level_sets(zeros, 1, 2, 1.0, 2.0, 3);
    REQUIRE(cap.classes.count(3) == 1);
    CHECK(cap.classes.at(3).size() == 2);

    CoeffMap one{{mk(0), {1.0, 0}}};
    LevelSetPartition top = level_sets(one, 1, 2, 1.0, 2.0);
    REQUIRE(top.classes.count(1) == 1);
    CHECK(top.classes.at(1).size() == 1);

    CoeffMap toobig{{mk(0), {2.0, 0}}};
    CHECK_THROWS_AS(level_sets(toobig, 1, 2, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("level_sets: dyadic bands and bounds on random data") {
    Rng rng(5);
    CoeffMap b;
    for (int i = 0; i < 200; ++i) {
        LatticePoint p{{i, 0}};
        b[p] = rng.cnormal() * rng.uniform();
    }
    double A = 0;
    for (auto& [p, v] : b) A = std::max(A, std::abs(v));
    const double q = 1.5;
    LevelSetPartition ls = level_sets(b, 1, 2, A, q);
    std::size_t covered = 0;
    for (const auto& [r, cls] : ls.classes) {
        for (const auto& p : cls.points()) {
            const double a = std::abs(b.at(p));
            CHECK(a > std::ldexp(A, -r));
            CHECK(a <= std::ldexp(A, -(r - 1)));
        }
        CHECK(static_cast<double>(cls.size()) <= ls.bounds.at(r) * (1 + 1e-12));
        covered += cls.size();
    }
    CHECK(covered == b.size());  // no zero coefficients in this draw

    // capped variant: bands against the l^q norm, bound 2^{rq}
    double lq = 0;
    for (auto& [p, v] : b) lq += std::pow(std::abs(v), q);
    const double B = std::pow(lq, 1.0 / q);
    LevelSetPartition cap = level_sets(b, 1, 2, B, q, 4);
    covered = 0;
    for (const auto& [r, cls] : cap.classes) {
        CHECK(r <= 4);
        if (r < 4) CHECK(static_cast<double>(cls.size()) <= cap.bounds.at(r) * (1 + 1e-12));
        covered += cls.size();
    }
    CHECK(covered == b.size());
}

TEST_CASE("shell membership: spec examples") {
    ShellSpec s;
    s.n = 1;
    s.m = 2;
    s.scale = 3;
    s.c0 = 2;
    s.M = 2.2;  // 2 C0 sqrt(n) with C0 = 1.1
    s.l = 1;
    LatticeSet mem = shell_members(s, 40);
    CHECK(mem.contains({{8, 1}}));

    // the origin is in no shell once the inner radius is positive
    for (int l = 1; l <= 2; ++l) {
        ShellSpec t = s;
        t.l = l;
        CHECK(!shell_members(t, 40).contains({{0, 0}}));
    }
}

TEST_CASE("ordered shell is covered by its l-splits") {
    ShellSpec s;
    s.n = 1;
    s.m = 2;
    s.scale = 3;
    s.c0 = 1;
    s.M = 2.2;
    s.ordered = true;
    // inner radius 4 forces |k_1| >= 4/sqrt(2) > M, so every ordered member
    // has at least one large block
    LatticeSet full = ordered_shell(s, 32);
    CHECK(!full.empty());
    std::vector<LatticePoint> merged;
    std::size_t total = 0;
    for (int l = 1; l <= 2; ++l) {
        ShellSpec t = s;
        t.l = l;
        LatticeSet part = shell_members(t, 32);
        total += part.size();
        for (const auto& p : part.points()) merged.push_back(p);
    }
    CHECK(total == full.size());  // disjoint
    LatticeSet u(1, 2, std::move(merged));
    CHECK(u == full);  // cover
}

TEST_CASE("shell: box must cover the outer ring") {
    ShellSpec s;
    s.n = 1;
    s.m = 2;
    s.scale = 4;
    s.c0 = 1;
    s.M = 1;
    s.l = 1;
    CHECK_THROWS_AS(shell_members(s, 8), std::invalid_argument);
}
