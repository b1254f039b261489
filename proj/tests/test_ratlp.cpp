#include <doctest.h>

#include <random>

#include "joinbound/bounds.hpp"
#include "joinbound/ratlp.hpp"
#include "testutil.hpp"

using namespace joinbound;

TEST_CASE("single variable, single bound") {
    RationalLP lp;
    int x = lp.add_variable("x");
    lp.set_objective(x, 1);
    lp.add_constraint({{x, Rat(1)}}, LpRel::Le, 1);
    LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == 1);
    CHECK(sol.assignment[x] == 1);
}

TEST_CASE("triangle vertex packing solves to exactly 3/2") {
    RationalLP lp;
    int x = lp.add_variable("x"), y = lp.add_variable("y"), z = lp.add_variable("z");
    for (int v : {x, y, z})
        lp.set_objective(v, 1);
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, LpRel::Le, 1);
    lp.add_constraint({{y, Rat(1)}, {z, Rat(1)}}, LpRel::Le, 1);
    lp.add_constraint({{z, Rat(1)}, {x, Rat(1)}}, LpRel::Le, 1);
    LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Rat(3, 2));
}

TEST_CASE("no upper constraint is unbounded") {
    RationalLP lp;
    int x = lp.add_variable("x");
    lp.set_objective(x, 1);
    CHECK(lp_solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("contradictory constraints are infeasible") {
    RationalLP lp;
    int x = lp.add_variable("x");
    lp.set_objective(x, 1);
    lp.add_constraint({{x, Rat(1)}}, LpRel::Ge, 2);
    lp.add_constraint({{x, Rat(1)}}, LpRel::Le, 1);
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("equality constraints and free variables") {
    RationalLP lp(LpSense::Minimize);
    int x = lp.add_variable("x", /*nonnegative=*/false);
    int y = lp.add_variable("y");
    lp.set_objective(x, 1);
    lp.set_objective(y, 1);
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, LpRel::Eq, 2);
    lp.add_constraint({{x, Rat(1)}}, LpRel::Ge, -3);
    LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == 2);
}

TEST_CASE("minimization with negative optimum through a free variable") {
    RationalLP lp(LpSense::Minimize);
    int x = lp.add_variable("x", false);
    lp.set_objective(x, 1);
    lp.add_constraint({{x, Rat(1)}}, LpRel::Ge, Rat(-7, 2));
    LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == Rat(-7, 2));
}

TEST_CASE("objective value is invariant under positive row scaling") {
    RationalLP a, b;
    for (RationalLP* lp : {&a, &b}) {
        int x = lp->add_variable("x"), y = lp->add_variable("y");
        lp->set_objective(x, 1);
        lp->set_objective(y, 2);
    }
    a.add_constraint({{0, Rat(2)}, {1, Rat(3)}}, LpRel::Le, 6);
    a.add_constraint({{0, Rat(1)}, {1, Rat(-1)}}, LpRel::Le, 1);
    b.add_constraint({{0, Rat(2, 7)}, {1, Rat(3, 7)}}, LpRel::Le, Rat(6, 7));
    b.add_constraint({{0, Rat(5)}, {1, Rat(-5)}}, LpRel::Le, 5);
    LpSolution sa = lp_solve(a), sb = lp_solve(b);
    REQUIRE(sa.status == LpStatus::Optimal);
    REQUIRE(sb.status == LpStatus::Optimal);
    CHECK(sa.value == sb.value);
}

TEST_CASE("dual pair: triangle packing vs edge cover, both 3/2") {
    RationalLP packing;
    {
        int x = packing.add_variable("x"), y = packing.add_variable("y"),
            z = packing.add_variable("z");
        for (int v : {x, y, z})
            packing.set_objective(v, 1);
        packing.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, LpRel::Le, 1);
        packing.add_constraint({{y, Rat(1)}, {z, Rat(1)}}, LpRel::Le, 1);
        packing.add_constraint({{z, Rat(1)}, {x, Rat(1)}}, LpRel::Le, 1);
    }
    RationalLP cover(LpSense::Minimize);
    {
        int r = cover.add_variable("R"), s = cover.add_variable("S"), t = cover.add_variable("T");
        for (int v : {r, s, t})
            cover.set_objective(v, 1);
        cover.add_constraint({{r, Rat(1)}, {t, Rat(1)}}, LpRel::Ge, 1); // x
        cover.add_constraint({{r, Rat(1)}, {s, Rat(1)}}, LpRel::Ge, 1); // y
        cover.add_constraint({{s, Rat(1)}, {t, Rat(1)}}, LpRel::Ge, 1); // z
    }
    CHECK(dual_value_check(packing, cover));
    CHECK(lp_solve(packing).value == Rat(3, 2));
}

TEST_CASE("single relation query: packing and cover both 1") {
    Schema schema({"x", "y"}, {{"R", {"x", "y"}}});
    Query q = make_query(schema, {"R"});
    CHECK(vertex_packing_bound(schema, q).value == 1);
    CHECK(edge_cover_bound(schema, q).value == 1);
}

TEST_CASE("random hypergraph packing/cover duality plus pivot bound") {
    std::mt19937 rng(20160626);
    for (int trial = 0; trial < 60; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng);
        BoundReport p = vertex_packing_bound(inst.schema, inst.query);
        BoundReport c = edge_cover_bound(inst.schema, inst.query);
        CHECK(p.value == c.value);
        CHECK(check_certificate(inst.schema, {}, inst.query, p));
        CHECK(check_certificate(inst.schema, {}, inst.query, c));
    }
}

namespace {

// Gaussian elimination over exact rationals; nullopt when singular.
std::optional<std::vector<Rat>> solve_linear(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && sgn(a[pivot][col]) == 0)
            ++pivot;
        if (pivot == n)
            return std::nullopt;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(a[r][col]) == 0)
                continue;
            Rat f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rat> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = b[i] / a[i][i];
    return x;
}

} // namespace

TEST_CASE("simplex optimum matches brute-force vertex enumeration") {
    // Independent oracle: on a box-bounded polytope the maximum sits on
    // a vertex, and every vertex is the solution of n tight rows.
    std::mt19937 rng(314159);
    std::uniform_int_distribution<int> nv(1, 3), nc(1, 4), coef(-3, 3), rhs(0, 6), obj(-4, 4);
    const Rat box(5);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = nv(rng);
        const int m = nc(rng);
        std::vector<std::vector<Rat>> rows;   // a·x <= b, includes box and sign rows
        std::vector<Rat> rhs_v;
        RationalLP lp;
        std::vector<Rat> costs;
        for (int v = 0; v < n; ++v) {
            lp.add_variable("x" + std::to_string(v));
            costs.push_back(Rat(obj(rng)));
            lp.set_objective(v, costs.back());
        }
        for (int c = 0; c < m; ++c) {
            std::vector<Rat> row(n);
            std::vector<std::pair<int, Rat>> terms;
            for (int v = 0; v < n; ++v) {
                row[v] = Rat(coef(rng));
                terms.emplace_back(v, row[v]);
            }
            Rat r(rhs(rng));
            lp.add_constraint(std::move(terms), LpRel::Le, r);
            rows.push_back(std::move(row));
            rhs_v.push_back(std::move(r));
        }
        for (int v = 0; v < n; ++v) {
            lp.add_constraint({{v, Rat(1)}}, LpRel::Le, box);
            std::vector<Rat> up(n), down(n);
            up[v] = 1;
            down[v] = -1;
            rows.push_back(up);
            rhs_v.push_back(box);
            rows.push_back(down);
            rhs_v.push_back(Rat(0)); // -x <= 0
        }

        // Oracle: max objective over all feasible vertices.
        const int total = static_cast<int>(rows.size());
        std::vector<int> pick(n);
        std::optional<Rat> best;
        std::vector<int> stack;
        auto recurse = [&](auto&& self, int from) -> void {
            if (static_cast<int>(stack.size()) == n) {
                std::vector<std::vector<Rat>> a;
                std::vector<Rat> b;
                for (int i : stack) {
                    a.push_back(rows[i]);
                    b.push_back(rhs_v[i]);
                }
                auto x = solve_linear(std::move(a), std::move(b));
                if (!x)
                    return;
                for (int i = 0; i < total; ++i) {
                    Rat lhs(0);
                    for (int v = 0; v < n; ++v)
                        lhs += rows[i][v] * (*x)[v];
                    if (lhs > rhs_v[i])
                        return;
                }
                Rat value(0);
                for (int v = 0; v < n; ++v)
                    value += costs[v] * (*x)[v];
                if (!best || value > *best)
                    best = value;
                return;
            }
            for (int i = from; i < total; ++i) {
                stack.push_back(i);
                self(self, i + 1);
                stack.pop_back();
            }
        };
        recurse(recurse, 0);

        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::Optimal); // origin feasible, box bounded
        REQUIRE(best.has_value());
        CHECK(sol.value == *best);
    }
}

TEST_CASE("optimal assignments satisfy every constraint exactly") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> nv(1, 5), nc(1, 6), coef(-3, 3), rhs(0, 8);
    for (int trial = 0; trial < 120; ++trial) {
        RationalLP lp;
        int n = nv(rng);
        for (int v = 0; v < n; ++v) {
            lp.add_variable("v" + std::to_string(v));
            lp.set_objective(v, coef(rng));
        }
        int m = nc(rng);
        for (int c = 0; c < m; ++c) {
            std::vector<std::pair<int, Rat>> terms;
            for (int v = 0; v < n; ++v)
                terms.emplace_back(v, Rat(coef(rng)));
            lp.add_constraint(std::move(terms), c % 2 == 0 ? LpRel::Le : LpRel::Ge, Rat(rhs(rng)));
        }
        LpSolution sol = lp_solve(lp);
        if (sol.status == LpStatus::Optimal) {
            CHECK(lp_assignment_feasible(lp, sol.assignment));
            // Bland's termination bound: pivots < C(n+m, m) in the
            // standard-form dimensions (slacks + artificials included).
            long cols = n + 2 * m, rows = m;
            BigInt limit = binomial(cols + rows, rows);
            CHECK(BigInt(sol.pivots) <= limit);
        }
    }
}

TEST_CASE("redundant equalities are dropped after phase 1") {
    RationalLP lp;
    int x = lp.add_variable("x"), y = lp.add_variable("y");
    lp.set_objective(x, 1);
    lp.set_objective(y, 1);
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, LpRel::Eq, 1);
    lp.add_constraint({{x, Rat(1)}, {y, Rat(1)}}, LpRel::Eq, 1); // duplicate row
    lp.add_constraint({{x, Rat(2)}, {y, Rat(2)}}, LpRel::Eq, 2); // scaled duplicate
    LpSolution sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == 1);

    // Inconsistent scaled copy: infeasible.
    RationalLP bad;
    int u = bad.add_variable("u"), v = bad.add_variable("v");
    bad.set_objective(u, 1);
    bad.add_constraint({{u, Rat(1)}, {v, Rat(1)}}, LpRel::Eq, 1);
    bad.add_constraint({{u, Rat(2)}, {v, Rat(2)}}, LpRel::Eq, 3);
    CHECK(lp_solve(bad).status == LpStatus::Infeasible);

    // Constant rows: vacuous ones are dropped, contradictions reject.
    RationalLP constant;
    int w = constant.add_variable("w");
    constant.set_objective(w, -1);
    constant.add_constraint({}, LpRel::Le, 5);
    constant.add_constraint({{w, Rat(0)}}, LpRel::Ge, -1);
    CHECK(lp_solve(constant).status == LpStatus::Optimal);
    constant.add_constraint({}, LpRel::Ge, 1);
    CHECK(lp_solve(constant).status == LpStatus::Infeasible);
}

TEST_CASE("rational parsing keeps canonical form") {
    CHECK(rat_from_string("6/4") == Rat(3, 2));
    CHECK(rat_from_string("-2/4") == Rat(-1, 2));
    CHECK(rat_to_string(rat_from_string("6/4")) == "3/2");
    CHECK(rat_from_string("7") == 7);
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
}

TEST_CASE("LP text dump renders rationals as p/q") {
    RationalLP lp;
    int x = lp.add_variable("x");
    lp.set_objective(x, Rat(3, 2));
    lp.add_constraint({{x, Rat(1, 3)}}, LpRel::Le, Rat(5, 7));
    std::string text = lp.to_text();
    CHECK(text.find("3/2*x") != std::string::npos);
    CHECK(text.find("1/3*x <= 5/7") != std::string::npos);
}
