// Compares the serial and OpenMP paths of the minimal-component join
// (and the baseline join) on synthesized worst-case databases of
// growing size. Wall-clock only; correctness is covered by the tests.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "joinbound/bounds.hpp"
#include "joinbound/evaluator.hpp"
#include "joinbound/synth.hpp"

using namespace joinbound;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

int main() {
    Schema schema({"x", "y", "z"}, {{"R", {"x", "y"}}, {"S", {"y", "z"}}, {"T", {"z", "x"}}});
    Query q = make_query(schema, {"R", "S", "T"});
    std::vector<FunctionalDependency> no_fds;

    std::map<int, Rat> packing;
    for (int a : attr_ids(q.vars))
        packing[a] = Rat(1, 2u);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("%8s %10s %12s %14s %14s %10s\n", "N", "|R|", "|Q(D)|", "baseline_ms",
                "components_ms", "parallel_ms");

    for (long n : {64L, 256L, 576L, 1024L, 1600L}) {
        Database db = product_database(schema, q, packing, n);
        Table b, cs, cp;
        double t_base = time_ms([&] { b = join_baseline(schema, q, db); });
        EvalOptions serial;
        double t_serial = time_ms([&] { cs = join_components(schema, no_fds, q, db, serial); });
        EvalOptions parallel;
        parallel.parallel = true;
        double t_par = time_ms([&] { cp = join_components(schema, no_fds, q, db, parallel); });
        if (!(b == cs) || !(b == cp)) {
            std::printf("MISMATCH at N=%ld\n", n);
            return 1;
        }
        std::printf("%8ld %10zu %12zu %14.2f %14.2f %10.2f\n", n, db.tables[0].size(), b.size(),
                    t_base, t_serial, t_par);
    }

    // A keyed instance where the fd machinery actually prunes: path
    // query with y a key for both endpoints.
    {
        Schema pschema({"x", "y", "z"}, {{"R", {"x", "y"}}, {"S", {"y", "z"}}});
        Query pq = make_query(pschema, {"R", "S"});
        std::vector<FunctionalDependency> fds = {pschema.make_fd({"y"}, "x"),
                                                 pschema.make_fd({"y"}, "z")};
        std::printf("\npath with key fds (|R| = |S| = N):\n");
        std::printf("%8s %12s %14s %14s %10s\n", "N", "|Q(D)|", "baseline_ms", "components_ms",
                    "parallel_ms");
        for (long n : {2000L, 8000L, 32000L}) {
            Database db = empty_database(pschema);
            for (long i = 0; i < n; ++i) {
                db.tables[0].add_row({"x" + std::to_string(i), "y" + std::to_string(i)});
                db.tables[1].add_row({"y" + std::to_string(i), "z" + std::to_string(i)});
            }
            for (auto& t : db.tables)
                t.normalize();
            Table b, cs, cp;
            double t_base = time_ms([&] { b = join_baseline(pschema, pq, db); });
            EvalOptions serial;
            double t_serial = time_ms([&] { cs = join_components(pschema, fds, pq, db, serial); });
            EvalOptions parallel;
            parallel.parallel = true;
            double t_par = time_ms([&] { cp = join_components(pschema, fds, pq, db, parallel); });
            if (!(b == cs) || !(b == cp)) {
                std::printf("MISMATCH at N=%ld\n", n);
                return 1;
            }
            std::printf("%8ld %12zu %14.2f %14.2f %10.2f\n", n, b.size(), t_base, t_serial, t_par);
        }
    }
    return 0;
}
