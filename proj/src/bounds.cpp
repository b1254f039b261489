#include "joinbound/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "joinbound/constants.hpp"
#include "joinbound/errors.hpp"

namespace joinbound {

std::string bound_method_name(BoundMethod m) {
    switch (m) {
    case BoundMethod::AgmCover: return "agm_cover";
    case BoundMethod::VertexPacking: return "vertex_packing";
    case BoundMethod::Polymatroid: return "polymatroid";
    case BoundMethod::PolymatroidBudgeted: return "polymatroid_budgeted";
    case BoundMethod::Coloring: return "coloring";
    }
    return "?";
}

namespace {

void require_natural(const Query& q) {
    if (!q.is_natural())
        throw std::invalid_argument("this bound is defined for natural join queries only");
}

void require_optimal(const LpSolution& sol, const char* what) {
    if (sol.status != LpStatus::Optimal)
        throw std::logic_error(std::string(what) + " LP did not solve to optimality");
}

} // namespace

BoundReport vertex_packing_bound(const Schema& schema, const Query& q) {
    require_natural(q);
    std::vector<int> xs = attr_ids(q.vars);
    RationalLP lp(LpSense::Maximize);
    std::map<int, int> var_of;
    for (int a : xs) {
        var_of[a] = lp.add_variable(schema.attr_name(a));
        lp.set_objective(var_of[a], 1);
    }
    for (int r : q.joins) {
        std::vector<std::pair<int, Rat>> terms;
        for (int a : attr_ids(schema.relation_attrs(r)))
            terms.emplace_back(var_of[a], 1);
        lp.add_constraint(std::move(terms), LpRel::Le, 1);
    }
    LpSolution sol = lp_solve(lp);
    require_optimal(sol, "vertex packing");
    BoundReport rep{BoundMethod::VertexPacking, sol.value, {}};
    for (int a : xs)
        rep.certificate.emplace_back(schema.attr_name(a), sol.assignment[var_of[a]]);
    return rep;
}

BoundReport edge_cover_bound(const Schema& schema, const Query& q) {
    require_natural(q);
    RationalLP lp(LpSense::Minimize);
    std::map<int, int> var_of;
    for (int r : q.joins) {
        var_of[r] = lp.add_variable(schema.relation_name(r));
        lp.set_objective(var_of[r], 1);
    }
    for (int a : attr_ids(q.vars)) {
        std::vector<std::pair<int, Rat>> terms;
        for (int r : q.joins)
            if (attr_in(schema.relation_attrs(r), a))
                terms.emplace_back(var_of[r], 1);
        lp.add_constraint(std::move(terms), LpRel::Ge, 1);
    }
    LpSolution sol = lp_solve(lp);
    require_optimal(sol, "edge cover");
    // Strong duality against the packing program.
    assert(sol.value == vertex_packing_bound(schema, q).value);
    BoundReport rep{BoundMethod::AgmCover, sol.value, {}};
    for (int r : q.joins)
        rep.certificate.emplace_back(schema.relation_name(r), sol.assignment[var_of[r]]);
    return rep;
}

namespace {

// Lattice LP context: X = attributes of the joined relations, variables
// v_Y for nonempty Y ⊆ X; v_∅ is the constant 0.
struct LatticeLp {
    std::vector<int> xs;          // attribute ids, ascending
    int n = 0;
    RationalLP lp{LpSense::Maximize};
    std::vector<int> var_of;      // local mask -> lp variable (-1 for ∅)

    // Bit position of attribute id within the local lattice.
    std::map<int, int> local_bit;

    AttrSet to_local(AttrSet global) const {
        AttrSet m = 0;
        for (int i = 0; i < n; ++i)
            if (attr_in(global, xs[i]))
                m |= AttrSet{1} << i;
        return m;
    }
};

LatticeLp make_lattice(const Schema& schema, const Query& q) {
    LatticeLp ctx;
    ctx.xs = attr_ids(q.vars);
    ctx.n = static_cast<int>(ctx.xs.size());
    if (ctx.n > kMaxLatticeAttrs)
        throw CapError("query joins " + std::to_string(ctx.n) +
                       " attributes; the subset-lattice cap is " +
                       std::to_string(kMaxLatticeAttrs));
    for (int i = 0; i < ctx.n; ++i)
        ctx.local_bit[ctx.xs[i]] = i;
    const AttrSet full = (AttrSet{1} << ctx.n) - 1;
    ctx.var_of.assign(full + 1, -1);
    for (AttrSet y = 1; y <= full; ++y) {
        std::string label = "v{";
        bool first = true;
        for (int i = 0; i < ctx.n; ++i)
            if ((y >> i) & 1u) {
                if (!first)
                    label += ",";
                first = false;
                label += schema.attr_name(ctx.xs[i]);
            }
        label += "}";
        ctx.var_of[y] = ctx.lp.add_variable(std::move(label));
    }
    return ctx;
}

// Adds Σ coeff_Y · v_Y {rel} rhs, treating v_∅ as 0.
void add_lattice_constraint(LatticeLp& ctx, std::vector<std::pair<AttrSet, Rat>> terms, LpRel rel,
                            Rat rhs) {
    std::vector<std::pair<int, Rat>> vars;
    for (auto& [mask, c] : terms)
        if (mask != 0)
            vars.emplace_back(ctx.var_of[mask], std::move(c));
    ctx.lp.add_constraint(std::move(vars), rel, std::move(rhs));
}

std::string subset_label(const Schema& schema, const LatticeLp& ctx, AttrSet local) {
    AttrSet global = 0;
    for (int i = 0; i < ctx.n; ++i)
        if ((local >> i) & 1u)
            global |= attr_bit(ctx.xs[i]);
    return schema.set_label(global);
}

} // namespace

BoundReport polymatroid_bound(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                              const Query& q, const std::optional<std::map<int, Rat>>& budgets) {
    LatticeLp ctx = make_lattice(schema, q);
    const AttrSet full = (AttrSet{1} << ctx.n) - 1;

    // Elemental submodularity: v_{K∪x} + v_{K∪y} ≥ v_{K∪{x,y}} + v_K.
    for (int i = 0; i < ctx.n; ++i) {
        for (int j = i + 1; j < ctx.n; ++j) {
            AttrSet rest = full & ~(AttrSet{1} << i) & ~(AttrSet{1} << j);
            for (AttrSet k = rest;; k = (k - 1) & rest) {
                AttrSet ki = k | (AttrSet{1} << i);
                AttrSet kj = k | (AttrSet{1} << j);
                add_lattice_constraint(ctx,
                                       {{ki, 1}, {kj, 1}, {ki | kj, -1}, {k, -1}},
                                       LpRel::Ge, 0);
                if (k == 0)
                    break;
            }
        }
    }
    // Top monotonicity v_{X−x} ≤ v_X; with elemental submodularity this
    // generates monotonicity on the whole lattice.
    for (int i = 0; i < ctx.n; ++i)
        add_lattice_constraint(ctx, {{full, 1}, {full & ~(AttrSet{1} << i), -1}}, LpRel::Ge, 0);

    // Per-relation budgets (log-scale sizes; default 1).
    for (int r : q.joins) {
        Rat budget(1);
        if (budgets) {
            auto it = budgets->find(r);
            if (it != budgets->end()) {
                if (sgn(it->second) < 0)
                    throw std::invalid_argument("negative budget for relation '" +
                                                schema.relation_name(r) + "'");
                budget = it->second;
            }
        }
        add_lattice_constraint(ctx, {{ctx.to_local(schema.relation_attrs(r)), 1}}, LpRel::Le,
                               budget);
    }

    // FD equalities v_{Z∪{z}} = v_Z for fds inside the lattice.
    for (const auto& fd : fds) {
        AttrSet scope = fd.lhs | attr_bit(fd.rhs);
        if (!subset_of(scope, q.vars))
            continue;
        AttrSet z = ctx.to_local(fd.lhs);
        AttrSet zz = ctx.to_local(scope);
        if (z == zz)
            continue;
        add_lattice_constraint(ctx, {{zz, 1}, {z, -1}}, LpRel::Eq, 0);
    }

    AttrSet obj = ctx.to_local(q.free);
    if (obj != 0)
        ctx.lp.set_objective(ctx.var_of[obj], 1);

    LpSolution sol = lp_solve(ctx.lp);
    require_optimal(sol, "polymatroid");
    BoundReport rep{budgets ? BoundMethod::PolymatroidBudgeted : BoundMethod::Polymatroid,
                    sol.value,
                    {}};
    rep.certificate.emplace_back(schema.set_label(0), Rat(0));
    for (AttrSet y = 1; y <= full; ++y)
        rep.certificate.emplace_back(subset_label(schema, ctx, y), sol.assignment[ctx.var_of[y]]);
    return rep;
}

namespace {

bool class_admissible(AttrSet cls, const std::vector<FunctionalDependency>& fds, AttrSet lattice) {
    for (const auto& fd : fds) {
        if (!subset_of(fd.lhs | attr_bit(fd.rhs), lattice))
            continue;
        if (attr_in(cls, fd.rhs) && (cls & fd.lhs) == 0)
            return false;
    }
    return true;
}

} // namespace

BoundReport coloring_bound(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                           const Query& q) {
    require_natural(q);
    int n = attr_count(q.vars);
    if (n > kMaxLatticeAttrs)
        throw CapError("query joins " + std::to_string(n) + " attributes; the color-class cap is " +
                       std::to_string(kMaxLatticeAttrs));
    std::vector<int> xs = attr_ids(q.vars);

    RationalLP lp(LpSense::Maximize);
    std::vector<AttrSet> classes; // global masks, one per LP variable
    for (AttrSet local = 1; local < (AttrSet{1} << n); ++local) {
        AttrSet cls = 0;
        for (int i = 0; i < n; ++i)
            if ((local >> i) & 1u)
                cls |= attr_bit(xs[i]);
        if (!class_admissible(cls, fds, q.vars))
            continue;
        int v = lp.add_variable(schema.set_label(cls));
        lp.set_objective(v, 1);
        classes.push_back(cls);
    }
    for (int r : q.joins) {
        std::vector<std::pair<int, Rat>> terms;
        for (int v = 0; v < static_cast<int>(classes.size()); ++v)
            if ((classes[v] & schema.relation_attrs(r)) != 0)
                terms.emplace_back(v, 1);
        lp.add_constraint(std::move(terms), LpRel::Le, 1);
    }
    LpSolution sol = lp_solve(lp);
    require_optimal(sol, "coloring");
    BoundReport rep{BoundMethod::Coloring, sol.value, {}};
    for (int v = 0; v < static_cast<int>(classes.size()); ++v)
        if (sgn(sol.assignment[v]) != 0)
            rep.certificate.emplace_back(schema.set_label(classes[v]), sol.assignment[v]);
    return rep;
}

Rat coloring_bound_oracle(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                          const Query& q, int max_colors) {
    require_natural(q);
    std::vector<int> xs = attr_ids(q.vars);
    int n = static_cast<int>(xs.size());
    if (n > 4 || max_colors > 4)
        throw CapError("coloring oracle is exhaustive; limited to 4 attributes and 4 colors");

    // Enumerate all assignments of color subsets (2^max_colors options
    // per attribute); f(x) is a bitmask over colors.
    std::vector<int> assign(n, 0);
    const int opts = 1 << max_colors;
    Rat best(0);
    while (true) {
        bool ok = true;
        for (const auto& fd : fds) {
            if (!subset_of(fd.lhs | attr_bit(fd.rhs), q.vars))
                continue;
            int lhs_colors = 0;
            for (int i = 0; i < n; ++i)
                if (attr_in(fd.lhs, xs[i]))
                    lhs_colors |= assign[i];
            int rhs_colors = 0;
            for (int i = 0; i < n; ++i)
                if (xs[i] == fd.rhs)
                    rhs_colors = assign[i];
            if ((rhs_colors & ~lhs_colors) != 0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            int total = 0;
            for (int i = 0; i < n; ++i)
                total |= assign[i];
            int denom = 0;
            for (int r : q.joins) {
                int seen = 0;
                for (int i = 0; i < n; ++i)
                    if (attr_in(schema.relation_attrs(r), xs[i]))
                        seen |= assign[i];
                denom = std::max(denom, std::popcount(static_cast<unsigned>(seen)));
            }
            if (denom > 0) {
                Rat ratio(std::popcount(static_cast<unsigned>(total)), denom);
                ratio.canonicalize();
                best = std::max(best, ratio);
            }
        }
        int i = n - 1;
        while (i >= 0 && ++assign[i] == opts) {
            assign[i] = 0;
            --i;
        }
        if (i < 0)
            break;
    }
    return best;
}

bool weighted_product_bound(const Schema& schema, const Query& q, const Database& db,
                            const std::map<int, Rat>& cover, std::int64_t join_size) {
    // Feasibility of the cover, exactly.
    for (int a : attr_ids(q.vars)) {
        Rat total(0);
        for (int r : q.joins) {
            if (!attr_in(schema.relation_attrs(r), a))
                continue;
            auto it = cover.find(r);
            if (it != cover.end())
                total += it->second;
        }
        if (total < 1)
            throw std::invalid_argument("infeasible edge cover: attribute '" +
                                        schema.attr_name(a) + "' is covered by " +
                                        rat_to_string(total));
    }
    for (const auto& [r, w] : cover)
        if (sgn(w) < 0)
            throw std::invalid_argument("negative cover weight");

    if (join_size <= 0)
        return true;
    double lhs = std::log2(static_cast<double>(join_size));
    double rhs = 0;
    for (int r : q.joins) {
        auto it = cover.find(r);
        if (it == cover.end() || sgn(it->second) == 0)
            continue;
        std::size_t sz = db.tables[r].size();
        if (sz == 0)
            return false; // rhs product is zero but join_size > 0
        rhs += rat_to_double(it->second) * std::log2(static_cast<double>(sz));
    }
    return lhs <= rhs + kEntropyTol * std::max(1.0, std::abs(rhs));
}

bool check_certificate(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                       const Query& q, const BoundReport& report,
                       const std::optional<std::map<int, Rat>>& budgets) {
    std::map<std::string, Rat> cert(report.certificate.begin(), report.certificate.end());
    auto value_of = [&](const std::string& label) {
        auto it = cert.find(label);
        return it == cert.end() ? Rat(0) : it->second;
    };

    Rat resubstituted(0);
    switch (report.method) {
    case BoundMethod::VertexPacking: {
        for (int a : attr_ids(q.vars))
            resubstituted += value_of(schema.attr_name(a));
        for (int r : q.joins) {
            Rat row(0);
            for (int a : attr_ids(schema.relation_attrs(r)))
                row += value_of(schema.attr_name(a));
            if (row > 1)
                return false;
        }
        break;
    }
    case BoundMethod::AgmCover: {
        for (int r : q.joins)
            resubstituted += value_of(schema.relation_name(r));
        for (int a : attr_ids(q.vars)) {
            Rat col(0);
            for (int r : q.joins)
                if (attr_in(schema.relation_attrs(r), a))
                    col += value_of(schema.relation_name(r));
            if (col < 1)
                return false;
        }
        break;
    }
    case BoundMethod::Polymatroid:
    case BoundMethod::PolymatroidBudgeted: {
        std::vector<int> xs = attr_ids(q.vars);
        int n = static_cast<int>(xs.size());
        auto v = [&](AttrSet local) {
            AttrSet global = 0;
            for (int i = 0; i < n; ++i)
                if ((local >> i) & 1u)
                    global |= attr_bit(xs[i]);
            return value_of(schema.set_label(global));
        };
        const AttrSet full = (AttrSet{1} << n) - 1;
        if (sgn(v(0)) != 0)
            return false;
        // Full monotonicity and all elemental submodularity, as the
        // mathematical contract demands (the LP emits a generating
        // subset; the certificate must satisfy everything).
        for (AttrSet y = 0; y <= full; ++y) {
            for (int i = 0; i < n; ++i) {
                if ((y >> i) & 1u)
                    continue;
                if (v(y) > v(y | (AttrSet{1} << i)))
                    return false;
                for (int j = i + 1; j < n; ++j) {
                    if ((y >> j) & 1u)
                        continue;
                    AttrSet yi = y | (AttrSet{1} << i), yj = y | (AttrSet{1} << j);
                    if (v(yi) + v(yj) < v(yi | yj) + v(y))
                        return false;
                }
            }
            if (y == full)
                break;
        }
        for (int r : q.joins) {
            Rat budget(1);
            if (budgets) {
                auto it = budgets->find(r);
                if (it != budgets->end())
                    budget = it->second;
            }
            AttrSet local = 0;
            for (int i = 0; i < n; ++i)
                if (attr_in(schema.relation_attrs(r), xs[i]))
                    local |= AttrSet{1} << i;
            if (v(local) > budget)
                return false;
        }
        for (const auto& fd : fds) {
            AttrSet scope = fd.lhs | attr_bit(fd.rhs);
            if (!subset_of(scope, q.vars))
                continue;
            AttrSet z = 0, zz = 0;
            for (int i = 0; i < n; ++i) {
                if (attr_in(fd.lhs, xs[i]))
                    z |= AttrSet{1} << i;
                if (attr_in(scope, xs[i]))
                    zz |= AttrSet{1} << i;
            }
            if (v(z) != v(zz))
                return false;
        }
        AttrSet obj = 0;
        for (int i = 0; i < n; ++i)
            if (attr_in(q.free, xs[i]))
                obj |= AttrSet{1} << i;
        resubstituted = v(obj);
        break;
    }
    case BoundMethod::Coloring: {
        // Certificate lists supported classes only; validate
        // admissibility and per-relation load.
        for (const auto& [label, w] : report.certificate) {
            if (sgn(w) < 0)
                return false;
            resubstituted += w;
        }
        for (int r : q.joins) {
            Rat row(0);
            for (const auto& [label, w] : report.certificate) {
                // Reparse "{a,b}" labels against the schema.
                AttrSet cls = 0;
                std::string inner = label.substr(1, label.size() - 2);
                std::size_t start = 0;
                while (start < inner.size()) {
                    std::size_t comma = inner.find(',', start);
                    std::string tok = inner.substr(start, comma == std::string::npos
                                                              ? std::string::npos
                                                              : comma - start);
                    int id = schema.attr_id(tok);
                    if (id < 0)
                        return false;
                    cls |= attr_bit(id);
                    if (comma == std::string::npos)
                        break;
                    start = comma + 1;
                }
                if (!class_admissible(cls, fds, q.vars))
                    return false;
                if ((cls & schema.relation_attrs(r)) != 0)
                    row += w;
            }
            if (row > 1)
                return false;
        }
        break;
    }
    }
    return resubstituted == report.value;
}

} // namespace joinbound
