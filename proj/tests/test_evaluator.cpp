#include <doctest.h>

#include <random>

#include "joinbound/errors.hpp"
#include "joinbound/evaluator.hpp"
#include "joinbound/synth.hpp"
#include "testutil.hpp"

using namespace joinbound;

TEST_CASE("baseline join: two relations") {
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    Database db = empty_database(s);
    db.tables[0].add_row({"a", "b"});
    db.tables[1].add_row({"b", "c"});
    for (auto& t : db.tables)
        t.normalize();
    Table j = join_baseline(s, q, db);
    REQUIRE(j.size() == 1);
    CHECK(j.rows[0] == std::vector<std::string>{"a", "b", "c"});

    // Disjoint y-values: empty join.
    db.tables[1].rows[0][0] = "nope";
    Table j2 = join_baseline(s, q, db);
    CHECK(j2.rows.empty());
}

TEST_CASE("candidate values") {
    Schema s({"x", "y", "z"}, {{"R", {"x", "y"}}, {"S", {"x", "z"}}});
    Query q = make_query(s, {"R", "S"});
    Database db = empty_database(s);
    db.tables[0].add_row({"a", "1"});
    db.tables[0].add_row({"b", "1"});
    db.tables[1].add_row({"b", "7"});
    db.tables[1].add_row({"c", "7"});
    for (auto& t : db.tables)
        t.normalize();
    CHECK(candidate_values(s, q, db, s.attr_id("x")) == std::vector<std::string>{"b"});
    CHECK(candidate_values(s, q, db, s.attr_id("y")) == std::vector<std::string>{"1"});

    Query r_only = make_query(s, {"R"});
    CHECK_THROWS_AS(candidate_values(s, r_only, db, s.attr_id("z")), std::invalid_argument);
}

TEST_CASE("quotient database masks and dedupes") {
    Schema s = jbtest::path_schema();
    Database db = empty_database(s);
    db.tables[0].add_row({"a", "b"});
    db.tables[0].add_row({"a", "c"});
    db.tables[1].add_row({"b", "1"});
    for (auto& t : db.tables)
        t.normalize();

    AttrSet cy = attr_bit(s.attr_id("y"));
    Database masked = quotient_database(s, db, cy);
    REQUIRE(masked.tables[0].size() == 1); // rows differing only on y collapse
    CHECK(masked.tables[0].rows[0] ==
          std::vector<std::string>{"a", placeholder_value(s, s.attr_id("y"))});

    CHECK(quotient_database(s, db, 0).tables[0] == db.tables[0]);

    // The quotient satisfies every fd the database satisfies, plus the
    // constant fds on the masked attributes.
    std::vector<FunctionalDependency> fds = {s.make_fd({"x"}, "y")};
    Database db2 = empty_database(s);
    db2.tables[0].add_row({"a", "b"});
    db2.tables[0].add_row({"c", "d"});
    db2.tables[1].add_row({"b", "1"});
    for (auto& t : db2.tables)
        t.normalize();
    REQUIRE(check_all_fds(s, db2, fds));
    Database masked2 = quotient_database(s, db2, cy);
    CHECK(check_all_fds(s, masked2, fds));
    CHECK(check_fd(s, masked2, FunctionalDependency{0, s.attr_id("y")}));
}

TEST_CASE("extend_component on a keyed chain") {
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    std::vector<FunctionalDependency> fds = {s.make_fd({"y"}, "x")};
    Database db = empty_database(s);
    db.tables[0].add_row({"a", "1"});
    db.tables[0].add_row({"b", "2"});
    db.tables[1].add_row({"1", "p"});
    db.tables[1].add_row({"2", "q"});
    for (auto& t : db.tables)
        t.normalize();

    // C = {x, y}, spanned by {y}; x is chased through the index.
    AttrSet c = attr_bit(s.attr_id("x")) | attr_bit(s.attr_id("y"));
    std::vector<AttrSet> scopes = {fds[0].lhs | attr_bit(fds[0].rhs)};
    FdIndex index(s, q, db, fds, scopes);

    JoinRow partial = {placeholder_value(s, 0), placeholder_value(s, 1), "p"};
    auto t1 = extend_component(s, q, db, partial, c, {s.attr_id("y")}, {"1"}, index);
    REQUIRE(t1.has_value());
    CHECK(*t1 == JoinRow{"a", "1", "p"});

    // Value combination absent from the tables: nothing.
    auto t2 = extend_component(s, q, db, partial, c, {s.attr_id("y")}, {"2"}, index);
    CHECK_FALSE(t2.has_value());

    // Spanning set = C itself reduces to membership filtering.
    auto t3 = extend_component(s, q, db, partial, c, {s.attr_id("x"), s.attr_id("y")},
                               {"a", "1"}, index);
    REQUIRE(t3.has_value());
    auto t4 = extend_component(s, q, db, partial, c, {s.attr_id("x"), s.attr_id("y")},
                               {"b", "1"}, index);
    CHECK_FALSE(t4.has_value());
}

TEST_CASE("join_components equals baseline on the worked instances") {
    // Empty fds degenerate to attribute-at-a-time extension.
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    Database db = empty_database(s);
    for (int i = 0; i < 4; ++i) {
        db.tables[0].add_row({"a" + std::to_string(i % 2), "b" + std::to_string(i)});
        db.tables[1].add_row({"b" + std::to_string(i), "c" + std::to_string(i % 3)});
    }
    for (auto& t : db.tables)
        t.normalize();
    CHECK(join_components(s, {}, q, db) == join_baseline(s, q, db));

    // Cyclic fds make one component spanned by a single attribute.
    Schema tri = jbtest::triangle_schema();
    Query tq = make_query(tri, {"R", "S", "T"});
    std::vector<FunctionalDependency> cyc = {tri.make_fd({"x"}, "y"), tri.make_fd({"y"}, "z"),
                                             tri.make_fd({"z"}, "x")};
    Database cdb = empty_database(tri);
    for (int i = 0; i < 5; ++i) {
        std::string a = std::to_string(i), b = std::to_string((i * 2) % 5),
                    c = std::to_string((i * 3) % 5);
        cdb.tables[0].add_row({"x" + a, "y" + b});
        cdb.tables[1].add_row({"y" + b, "z" + c});
        cdb.tables[2].add_row({"x" + a, "z" + c});
    }
    for (auto& t : cdb.tables)
        t.normalize();
    REQUIRE(check_all_fds(tri, cdb, cyc));
    EvalStats stats;
    Table jc = join_components(tri, cyc, tq, cdb, {}, &stats);
    CHECK(jc == join_baseline(tri, tq, cdb));
    CHECK(jc.size() == 5);
    // Single component spanned by one attribute: K is at most |D|.
    REQUIRE(stats.layers.size() == 1);
    CHECK(stats.layers[0].span_size == 1);
    CHECK(stats.layers[0].k_size <= static_cast<std::int64_t>(cdb.max_table_size()));
}

TEST_CASE("join_components base case: empty table means empty join") {
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    Database db = empty_database(s);
    db.tables[0].add_row({"a", "b"});
    db.tables[0].normalize();
    CHECK(join_components(s, {}, q, db).rows.empty());
    CHECK(join_baseline(s, q, db).rows.empty());
}

TEST_CASE("join_components equals baseline on randomized fd-satisfying instances") {
    std::mt19937 rng(2016);
    for (int trial = 0; trial < 60; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 5, 4);
        auto fds = jbtest::random_fds(rng, inst.schema, 4);
        Database db = jbtest::random_database(rng, inst.schema, fds, 20, 3);
        REQUIRE(check_all_fds(inst.schema, db, fds));
        Table base = join_baseline(inst.schema, inst.query, db);
        Table comp = join_components(inst.schema, fds, inst.query, db);
        CHECK(base == comp);
    }
}

TEST_CASE("parallel extension equals the serial reference") {
    std::mt19937 rng(2017);
    EvalOptions par;
    par.parallel = true;
    for (int trial = 0; trial < 25; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 5, 4);
        auto fds = jbtest::random_fds(rng, inst.schema, 3);
        Database db = jbtest::random_database(rng, inst.schema, fds, 25, 3);
        Table serial = join_components(inst.schema, fds, inst.query, db);
        Table parallel = join_components(inst.schema, fds, inst.query, db, par);
        CHECK(serial == parallel);
    }
}

TEST_CASE("extension counter is bounded by |Q(D/C)| * |D|^m per layer") {
    Schema s = jbtest::triangle_schema();
    Query q = make_query(s, {"R", "S", "T"});
    std::map<int, Rat> packing;
    for (int a : attr_ids(q.vars))
        packing[a] = Rat(1, 2u);
    for (long n : {4L, 9L, 16L, 25L}) {
        Database db = product_database(s, q, packing, n);
        EvalStats stats;
        Table out = join_components(s, {}, q, db, {}, &stats);
        std::int64_t d = static_cast<std::int64_t>(db.max_table_size());
        for (const auto& layer : stats.layers) {
            CHECK(layer.attempts <= layer.partial_rows * layer.k_size);
            // Width of each fd-free layer is 1: K fits within |D|^1.
            CHECK(layer.span_size == 1);
            CHECK(layer.k_size <= d);
        }
        // Every result row was produced by some attempt.
        CHECK(stats.total_attempts >= static_cast<std::int64_t>(out.size()));
    }
}

TEST_CASE("pruned enumeration scales linearly on keyed paths") {
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    std::vector<FunctionalDependency> fds = {s.make_fd({"y"}, "x"), s.make_fd({"y"}, "z")};
    std::vector<std::int64_t> attempts;
    for (long n : {100L, 200L, 400L}) {
        Database db = empty_database(s);
        for (long i = 0; i < n; ++i) {
            db.tables[0].add_row({"x" + std::to_string(i), "y" + std::to_string(i)});
            db.tables[1].add_row({"y" + std::to_string(i), "z" + std::to_string(i)});
        }
        for (auto& t : db.tables)
            t.normalize();
        EvalStats stats;
        Table out = join_components(s, fds, q, db, {}, &stats);
        CHECK(out.size() == static_cast<std::size_t>(n));
        attempts.push_back(stats.total_attempts);
    }
    // Doubling |D| should roughly double the work, not quadruple it.
    CHECK(attempts[1] <= attempts[0] * 3);
    CHECK(attempts[2] <= attempts[1] * 3);
}

TEST_CASE("project_set and project_bag_count") {
    Table t(attr_bit(0) | attr_bit(2));
    t.add_row({"a", "1"});
    t.add_row({"a", "2"});
    t.add_row({"b", "1"});
    t.normalize();

    Table all = project_set(t, t.attrs);
    CHECK(all == t);

    Table px = project_set(t, attr_bit(0));
    CHECK(px.size() == 2);

    Table empty(attr_bit(0) | attr_bit(2));
    CHECK(project_set(empty, attr_bit(0)).rows.empty());

    BagProjection bag = project_bag_count(t, attr_bit(0));
    CHECK(bag.total == 3);
    REQUIRE(bag.multiplicities.size() == 2);
    CHECK(bag.multiplicities[0].second == 2); // (a) twice
    CHECK(bag.multiplicities[1].second == 1);

    BagProjection full = project_bag_count(t, t.attrs);
    CHECK(full.total == 3);
    for (const auto& [row, m] : full.multiplicities)
        CHECK(m == 1);
}

TEST_CASE("bag totals equal the pre-projection size on random instances") {
    std::mt19937 rng(2018);
    for (int trial = 0; trial < 40; ++trial) {
        jbtest::RandomInstance inst = jbtest::random_hypergraph(rng, 4, 3);
        Database db = jbtest::random_database(rng, inst.schema, {}, 10, 3);
        Table j = join_baseline(inst.schema, inst.query, db);
        std::uniform_int_distribution<AttrSet> sub(0, inst.query.vars);
        AttrSet free = sub(rng) & inst.query.vars;
        CHECK(project_bag_count(j, free).total == static_cast<std::int64_t>(j.size()));
    }
}

TEST_CASE("empty-lhs fds: constant columns chase from the empty key") {
    Schema s = jbtest::path_schema();
    Query q = make_query(s, {"R", "S"});
    std::vector<FunctionalDependency> fds = {{0, s.attr_id("x")}}; // ∅ -> x
    Database db = empty_database(s);
    db.tables[0].add_row({"c", "1"});
    db.tables[0].add_row({"c", "2"});
    db.tables[1].add_row({"1", "p"});
    db.tables[1].add_row({"2", "q"});
    for (auto& t : db.tables)
        t.normalize();
    REQUIRE(check_all_fds(s, db, fds));
    Table base = join_baseline(s, q, db);
    CHECK(base.size() == 2);
    CHECK(join_components(s, fds, q, db) == base);

    // Two relations, both x-constant but with different constants:
    // each satisfies ∅ -> x, the join is empty.
    Schema s2({"x", "y"}, {{"R", {"x", "y"}}, {"T", {"x"}}});
    Query q2 = make_query(s2, {"R", "T"});
    Database db2 = empty_database(s2);
    db2.tables[0].add_row({"c", "1"});
    db2.tables[1].add_row({"d"});
    for (auto& t : db2.tables)
        t.normalize();
    std::vector<FunctionalDependency> fds2 = {{0, s2.attr_id("x")}};
    REQUIRE(check_all_fds(s2, db2, fds2));
    CHECK(join_baseline(s2, q2, db2).rows.empty());
    CHECK(join_components(s2, fds2, q2, db2).rows.empty());
}

TEST_CASE("unwitnessed fds do not break completeness") {
    // fd y -> x is declared but no relation contains both attributes:
    // it holds vacuously on every database, so the join may contain
    // multiple x values per y and the evaluator must keep them.
    Schema s({"x", "y"}, {{"R", {"x"}}, {"S", {"y"}}});
    Query q = make_query(s, {"R", "S"});
    std::vector<FunctionalDependency> fds = {s.make_fd({"y"}, "x")};
    Database db = empty_database(s);
    db.tables[0].add_row({"a"});
    db.tables[0].add_row({"b"});
    db.tables[1].add_row({"0"});
    for (auto& t : db.tables)
        t.normalize();
    REQUIRE(check_all_fds(s, db, fds));
    Table base = join_baseline(s, q, db);
    CHECK(base.size() == 2);
    CHECK(join_components(s, fds, q, db) == base);
}
