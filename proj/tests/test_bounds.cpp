#include <doctest.h>

#include <random>

#include "joinbound/bounds.hpp"
#include "joinbound/errors.hpp"
#include "joinbound/evaluator.hpp"
#include "testutil.hpp"

using namespace joinbound;

namespace {

std::vector<FunctionalDependency> path_key_fds(const Schema& s) {
    return {s.make_fd({"y"}, "x"), s.make_fd({"y"}, "z")};
}

} // namespace

TEST_CASE("named instances: triangle and path") {
    Schema tri = jbtest::triangle_schema();
    Query tq = make_query(tri, {"R", "S", "T"});
    CHECK(vertex_packing_bound(tri, tq).value == Rat(3, 2));
    CHECK(edge_cover_bound(tri, tq).value == Rat(3, 2));
    CHECK(polymatroid_bound(tri, {}, tq).value == Rat(3, 2));
    CHECK(coloring_bound(tri, {}, tq).value == Rat(3, 2));

    Schema path = jbtest::path_schema();
    Query pq = make_query(path, {"R", "S"});
    CHECK(vertex_packing_bound(path, pq).value == 2);
    CHECK(polymatroid_bound(path, path_key_fds(path), pq).value == 1);
    CHECK(coloring_bound(path, path_key_fds(path), pq).value == 1);
}

TEST_CASE("triangle cover certificate assigns 1/2 per edge") {
    Schema tri = jbtest::triangle_schema();
    Query q = make_query(tri, {"R", "S", "T"});
    BoundReport rep = edge_cover_bound(tri, q);
    REQUIRE(rep.certificate.size() == 3);
    for (const auto& [rel, w] : rep.certificate)
        CHECK(w == Rat(1, 2));
}

TEST_CASE("Loomis-Whitney d=3 cover: 3/2 with w = 1/2") {
    Schema lw({"x1", "x2", "x3"},
              {{"R1", {"x2", "x3"}}, {"R2", {"x1", "x3"}}, {"R3", {"x1", "x2"}}});
    Query q = make_query(lw, {"R1", "R2", "R3"});
    BoundReport rep = edge_cover_bound(lw, q);
    CHECK(rep.value == Rat(3, 2));
    for (const auto& [rel, w] : rep.certificate)
        CHECK(w == Rat(1, 2));
}

TEST_CASE("polymatroid without fds equals vertex packing on random hypergraphs") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng);
        BoundReport pack = vertex_packing_bound(inst.schema, inst.query);
        BoundReport poly = polymatroid_bound(inst.schema, {}, inst.query);
        CHECK(pack.value == poly.value);
        CHECK(check_certificate(inst.schema, {}, inst.query, poly));
    }
}

TEST_CASE("coloring <= polymatroid, and fds only tighten both") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 5, 4);
        auto fds = jbtest::random_fds(rng, inst.schema, 3);
        BoundReport poly = polymatroid_bound(inst.schema, fds, inst.query);
        BoundReport col = coloring_bound(inst.schema, fds, inst.query);
        CHECK(col.value <= poly.value);
        CHECK(check_certificate(inst.schema, fds, inst.query, poly));
        CHECK(check_certificate(inst.schema, fds, inst.query, col));
        // Adding one more fd never increases either bound.
        auto more = fds;
        auto extra = jbtest::random_fds(rng, inst.schema, 1);
        more.push_back(extra.empty() ? FunctionalDependency{attr_bit(0), 0} : extra[0]);
        std::sort(more.begin(), more.end());
        more.erase(std::unique(more.begin(), more.end()), more.end());
        CHECK(polymatroid_bound(inst.schema, more, inst.query).value <= poly.value);
        CHECK(coloring_bound(inst.schema, more, inst.query).value <= col.value);
    }
}

TEST_CASE("elemental LP equals the full all-pairs formulation") {
    // Independent oracle for the polymatroid bound: emit v_∅ = 0, full
    // monotonicity, and submodularity over all subset pairs, then
    // compare optima.
    auto full_lp_value = [](const Schema& schema, const std::vector<FunctionalDependency>& fds,
                            const Query& q) {
        std::vector<int> xs = attr_ids(q.vars);
        int n = static_cast<int>(xs.size());
        const AttrSet full = (AttrSet{1} << n) - 1;
        RationalLP lp;
        std::vector<int> var_of(full + 1);
        for (AttrSet y = 0; y <= full; ++y)
            var_of[y] = lp.add_variable("v" + std::to_string(y), false);
        lp.add_constraint({{var_of[0], Rat(1)}}, LpRel::Eq, 0);
        for (AttrSet y = 0; y <= full; ++y) {
            for (int i = 0; i < n; ++i)
                if (!((y >> i) & 1u))
                    lp.add_constraint({{var_of[y | (AttrSet{1} << i)], Rat(1)},
                                       {var_of[y], Rat(-1)}},
                                      LpRel::Ge, 0);
            if (y == full)
                break;
        }
        for (AttrSet y = 0; y <= full; ++y) {
            for (AttrSet z = y;; ++z) {
                if (z > full)
                    break;
                lp.add_constraint({{var_of[y], Rat(1)},
                                   {var_of[z], Rat(1)},
                                   {var_of[y | z], Rat(-1)},
                                   {var_of[y & z], Rat(-1)}},
                                  LpRel::Ge, 0);
                if (z == full)
                    break;
            }
            if (y == full)
                break;
        }
        auto local = [&](AttrSet global) {
            AttrSet m = 0;
            for (int i = 0; i < n; ++i)
                if (attr_in(global, xs[i]))
                    m |= AttrSet{1} << i;
            return m;
        };
        for (int r : q.joins)
            lp.add_constraint({{var_of[local(schema.relation_attrs(r))], Rat(1)}}, LpRel::Le, 1);
        for (const auto& fd : fds) {
            AttrSet scope = fd.lhs | attr_bit(fd.rhs);
            if (!subset_of(scope, q.vars))
                continue;
            if (local(scope) == local(fd.lhs))
                continue;
            lp.add_constraint({{var_of[local(scope)], Rat(1)}, {var_of[local(fd.lhs)], Rat(-1)}},
                              LpRel::Eq, 0);
        }
        lp.set_objective(var_of[local(q.free)], 1);
        LpSolution sol = lp_solve(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        return sol.value;
    };

    std::mt19937 rng(73);
    for (int trial = 0; trial < 12; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 4, 3);
        auto fds = jbtest::random_fds(rng, inst.schema, 3);
        CHECK(polymatroid_bound(inst.schema, fds, inst.query).value ==
              full_lp_value(inst.schema, fds, inst.query));
    }
    Schema path = jbtest::path_schema();
    Query pq = make_query(path, {"R", "S"});
    CHECK(full_lp_value(path, path_key_fds(path), pq) == 1);
}

TEST_CASE("budgeted polymatroid: hand-derived triangle value") {
    // Budgets (1, 1, 1/2): twice the objective is at most the budget
    // sum (5/2), and the additive point (1/4, 3/4, 1/4) attains 5/4.
    Schema tri = jbtest::triangle_schema();
    Query q = make_query(tri, {"R", "S", "T"});
    std::map<int, Rat> budgets = {{0, Rat(1)}, {1, Rat(1)}, {2, Rat(1, 2u)}};
    BoundReport rep = polymatroid_bound(tri, {}, q, budgets);
    CHECK(rep.value == Rat(5, 4));
    CHECK(check_certificate(tri, {}, q, rep, budgets));
}

TEST_CASE("budget monotonicity and all-zero budgets") {
    Schema tri = jbtest::triangle_schema();
    Query q = make_query(tri, {"R", "S", "T"});
    std::map<int, Rat> zero = {{0, Rat(0)}, {1, Rat(0)}, {2, Rat(0)}};
    CHECK(polymatroid_bound(tri, {}, q, zero).value == 0);

    std::mt19937 rng(51);
    std::uniform_int_distribution<int> num(0, 4);
    for (int trial = 0; trial < 15; ++trial) {
        std::map<int, Rat> budgets;
        for (int r = 0; r < 3; ++r)
            budgets[r] = Rat(num(rng), 2u);
        Rat base = polymatroid_bound(tri, {}, q, budgets).value;
        std::map<int, Rat> raised = budgets;
        raised[trial % 3] += Rat(1, 2u);
        CHECK(polymatroid_bound(tri, {}, q, raised).value >= base);
    }
}

TEST_CASE("budgeted polymatroid scales the triangle bound") {
    Schema tri = jbtest::triangle_schema();
    Query q = make_query(tri, {"R", "S", "T"});
    // Budgets all 2: the bound doubles by cone scaling.
    std::map<int, Rat> two = {{0, Rat(2)}, {1, Rat(2)}, {2, Rat(2)}};
    BoundReport rep = polymatroid_bound(tri, {}, q, two);
    CHECK(rep.method == BoundMethod::PolymatroidBudgeted);
    CHECK(rep.value == 3);
}

TEST_CASE("projected objective: bag-style bound on a conjunctive query") {
    // Q = exists z . R(x,y), S(y,z): the free objective v_{xy} <= 2,
    // and with the key fd y -> z the whole join collapses to v_{xy}.
    Schema path = jbtest::path_schema();
    Query q = make_query(path, {"R", "S"}, std::vector<std::string>{"x", "y"});
    CHECK(polymatroid_bound(path, {}, q).value == 1);
    // Free objective of the full variable set matches the natural bound.
    Query natural = make_query(path, {"R", "S"});
    CHECK(polymatroid_bound(path, {}, natural).value == 2);
}

TEST_CASE("literal corollary LP (no zero/monotone closure) is unbounded on the path") {
    // Submodularity plus relation budgets alone, over free variables:
    // a modular direction with w_y -> -inf escapes.
    Schema path = jbtest::path_schema();
    int n = 3;
    RationalLP lp(LpSense::Maximize);
    std::vector<int> var_of(1 << n);
    for (AttrSet y = 0; y < (1u << n); ++y)
        var_of[y] = lp.add_variable("v" + std::to_string(y), /*nonnegative=*/false);
    // x=bit0, y=bit1, z=bit2; relations {x,y} and {y,z}.
    for (AttrSet y = 0; y < (1u << n); ++y)
        for (AttrSet z = y; z < (1u << n); ++z)
            lp.add_constraint({{var_of[y | z], Rat(1)},
                               {var_of[y & z], Rat(1)},
                               {var_of[y], Rat(-1)},
                               {var_of[z], Rat(-1)}},
                              LpRel::Le, 0);
    lp.add_constraint({{var_of[0b011], Rat(1)}}, LpRel::Le, 1);
    lp.add_constraint({{var_of[0b110], Rat(1)}}, LpRel::Le, 1);
    lp.set_objective(var_of[0b111], 1);
    CHECK(lp_solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("coloring oracle validates the LP on small instances") {
    Schema tri = jbtest::triangle_schema();
    Query tq = make_query(tri, {"R", "S", "T"});
    CHECK(coloring_bound_oracle(tri, {}, tq, 3) == Rat(3, 2));

    Schema path = jbtest::path_schema();
    Query pq = make_query(path, {"R", "S"});
    CHECK(coloring_bound_oracle(path, path_key_fds(path), pq, 2) == 1);

    Schema single({"x"}, {{"R", {"x"}}});
    Query sq = make_query(single, {"R"});
    CHECK(coloring_bound_oracle(single, {}, sq, 1) == 1);
    CHECK(coloring_bound(single, {}, sq).value == 1);

    // LP >= oracle on random small instances; equality when the LP
    // optimum has small integral support.
    std::mt19937 rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 4, 3);
        auto fds = jbtest::random_fds(rng, inst.schema, 2);
        Rat lp = coloring_bound(inst.schema, fds, inst.query).value;
        Rat oracle = coloring_bound_oracle(inst.schema, fds, inst.query, 4);
        CHECK(lp >= oracle);
    }
}

TEST_CASE("empty-lhs fd makes classes containing its rhs inadmissible") {
    Schema path = jbtest::path_schema();
    Query q = make_query(path, {"R", "S"});
    std::vector<FunctionalDependency> fds = {{0, path.attr_id("x")}};
    BoundReport rep = coloring_bound(path, fds, q);
    for (const auto& [label, w] : rep.certificate)
        CHECK(label.find('x') == std::string::npos);
    // Every admissible class avoids x, so all of them load S(y,z).
    CHECK(rep.value == 1);
    CHECK(polymatroid_bound(path, fds, q).value == 1);
}

TEST_CASE("weighted product bound") {
    Schema tri = jbtest::triangle_schema();
    Query q = make_query(tri, {"R", "S", "T"});
    Database db = empty_database(tri);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (auto* t : {&db.tables[0], &db.tables[1], &db.tables[2]})
                t->add_row({std::to_string(a), std::to_string(b)});
    for (auto& t : db.tables)
        t.normalize();
    std::map<int, Rat> half = {{0, Rat(1, 2)}, {1, Rat(1, 2)}, {2, Rat(1, 2)}};
    CHECK(weighted_product_bound(tri, q, db, half, 27));
    CHECK_FALSE(weighted_product_bound(tri, q, db, half, 28));
    CHECK(weighted_product_bound(tri, q, db, half, 0));

    // Empty relation: join must be 0.
    Database empty_db = empty_database(tri);
    std::map<int, Rat> ones = {{0, Rat(1)}, {1, Rat(1)}, {2, Rat(1)}};
    CHECK(weighted_product_bound(tri, q, empty_db, ones, 0));
    CHECK_FALSE(weighted_product_bound(tri, q, empty_db, ones, 1));

    // Infeasible cover rejected.
    std::map<int, Rat> bad = {{0, Rat(1, 4)}, {1, Rat(1, 4)}, {2, Rat(1, 4)}};
    CHECK_THROWS_AS(weighted_product_bound(tri, q, db, bad, 1), std::invalid_argument);
}

TEST_CASE("lattice cap is enforced") {
    std::vector<std::string> attrs;
    for (int i = 0; i < 14; ++i)
        attrs.push_back("a" + std::to_string(i));
    Schema s(attrs, {{"R", attrs}});
    Query q = make_query(s, {"R"});
    CHECK_THROWS_AS(polymatroid_bound(s, {}, q), CapError);
    CHECK_THROWS_AS(coloring_bound(s, {}, q), CapError);
}
