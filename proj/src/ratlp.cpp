#include "joinbound/ratlp.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace joinbound {

int RationalLP::add_variable(std::string name, bool nonnegative) {
    names_.push_back(std::move(name));
    nonneg_.push_back(nonnegative);
    return static_cast<int>(names_.size()) - 1;
}

void RationalLP::set_objective(int var, Rat coeff) {
    if (var < 0 || var >= variable_count())
        throw std::out_of_range("objective references undeclared variable");
    objective_.emplace_back(var, std::move(coeff));
}

void RationalLP::add_constraint(std::vector<std::pair<int, Rat>> terms, LpRel rel, Rat rhs) {
    for (const auto& [v, c] : terms)
        if (v < 0 || v >= variable_count())
            throw std::out_of_range("constraint references undeclared variable");
    constraints_.push_back({std::move(terms), rel, std::move(rhs)});
}

std::string RationalLP::to_text() const {
    auto term_str = [&](const std::vector<std::pair<int, Rat>>& terms) {
        std::string s;
        bool first = true;
        for (const auto& [v, c] : terms) {
            if (!first)
                s += " + ";
            first = false;
            s += rat_to_string(c) + "*" + names_[v];
        }
        return s.empty() ? std::string("0") : s;
    };
    std::string out = sense_ == LpSense::Maximize ? "maximize " : "minimize ";
    out += term_str(objective_) + "\n";
    for (const auto& c : constraints_) {
        out += term_str(c.terms);
        out += c.rel == LpRel::Le ? " <= " : (c.rel == LpRel::Eq ? " = " : " >= ");
        out += rat_to_string(c.rhs) + "\n";
    }
    return out;
}

namespace {

// Dense simplex tableau over exact rationals. Columns are structural
// (declared variables, free ones split), then slack/surplus, then
// artificial; the rhs column is kept separately.
class Tableau {
public:
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    std::vector<int> basis;   // basic column per row
    std::vector<Rat> cost1;   // phase-1 reduced costs (c - z)
    std::vector<Rat> cost2;   // phase-2 reduced costs
    Rat value1;               // phase-1 objective value (<= 0, feasible iff 0)
    long pivots = 0;

    int rows() const { return static_cast<int>(a.size()); }
    int cols() const { return a.empty() ? 0 : static_cast<int>(a[0].size()); }

    void pivot(int pr, int pc) {
        ++pivots;
        std::vector<Rat>& prow = a[pr];
        const Rat piv = prow[pc];
        assert(sgn(piv) != 0);
        std::vector<int> nz;
        nz.reserve(prow.size());
        for (int j = 0; j < cols(); ++j) {
            if (sgn(prow[j]) != 0) {
                prow[j] /= piv;
                nz.push_back(j);
            }
        }
        b[pr] /= piv;
        Rat t;
        auto eliminate = [&](std::vector<Rat>& row, Rat* rhs) {
            const Rat f = row[pc];
            if (sgn(f) == 0)
                return;
            for (int j : nz) {
                t = prow[j];
                t *= f;
                row[j] -= t;
            }
            if (rhs) {
                t = b[pr];
                t *= f;
                *rhs -= t;
            }
        };
        for (int r = 0; r < rows(); ++r)
            if (r != pr)
                eliminate(a[r], &b[r]);
        eliminate(cost1, &value1);
        Rat dummy;
        eliminate(cost2, &dummy);
        basis[pr] = pc;
    }

    // Bland: entering = lowest-index eligible column; leaving = the
    // min-ratio row whose basic column index is lowest.
    // Returns {-1,...} at optimality, {-2, col} when unbounded.
    std::pair<int, int> choose_pivot(const std::vector<Rat>& cost, int max_enter_col) {
        int pc = -1;
        for (int j = 0; j < max_enter_col; ++j) {
            if (sgn(cost[j]) > 0) {
                pc = j;
                break;
            }
        }
        if (pc < 0)
            return {-1, -1};
        int pr = -1;
        Rat best;
        Rat ratio;
        for (int r = 0; r < rows(); ++r) {
            if (sgn(a[r][pc]) <= 0)
                continue;
            ratio = b[r] / a[r][pc];
            if (pr < 0 || ratio < best || (ratio == best && basis[r] < basis[pr])) {
                best = ratio;
                pr = r;
            }
        }
        if (pr < 0)
            return {-2, pc};
        return {pr, pc};
    }
};

} // namespace

LpSolution lp_solve(const RationalLP& lp) {
    // Column layout for declared variables.
    const int nvars = lp.variable_count();
    std::vector<int> pos_col(nvars), neg_col(nvars, -1);
    int nstruct = 0;
    for (int v = 0; v < nvars; ++v) {
        pos_col[v] = nstruct++;
        if (!lp.is_nonnegative(v))
            neg_col[v] = nstruct++;
    }

    // Normalized rows: dense coefficient vector, relation, rhs >= 0.
    struct Row {
        std::vector<Rat> coeff;
        LpRel rel;
        Rat rhs;
    };
    std::vector<Row> rows;
    for (const auto& c : lp.constraints()) {
        Row row;
        row.coeff.assign(static_cast<std::size_t>(nstruct), Rat(0));
        for (const auto& [v, coef] : c.terms) {
            row.coeff[pos_col[v]] += coef;
            if (neg_col[v] >= 0)
                row.coeff[neg_col[v]] -= coef;
        }
        row.rel = c.rel;
        row.rhs = c.rhs;
        if (std::all_of(row.coeff.begin(), row.coeff.end(),
                        [](const Rat& x) { return sgn(x) == 0; })) {
            // Constant row: either vacuous or immediately infeasible.
            bool ok = (c.rel == LpRel::Le && sgn(c.rhs) >= 0) ||
                      (c.rel == LpRel::Eq && sgn(c.rhs) == 0) ||
                      (c.rel == LpRel::Ge && sgn(c.rhs) <= 0);
            if (!ok)
                return {LpStatus::Infeasible, Rat(0), {}, 0};
            continue;
        }
        if (sgn(row.rhs) < 0) {
            for (Rat& x : row.coeff)
                x = -x;
            row.rhs = -row.rhs;
            row.rel = row.rel == LpRel::Le ? LpRel::Ge : (row.rel == LpRel::Ge ? LpRel::Le : LpRel::Eq);
        }
        rows.push_back(std::move(row));
    }

    const int m = static_cast<int>(rows.size());
    int nslack = 0, nart = 0;
    for (const Row& r : rows) {
        if (r.rel != LpRel::Eq)
            ++nslack;
        if (r.rel != LpRel::Le)
            ++nart;
    }
    const int ncols = nstruct + nslack + nart;
    const int art_begin = nstruct + nslack;

    Tableau t;
    t.a.assign(static_cast<std::size_t>(m), std::vector<Rat>(static_cast<std::size_t>(ncols), Rat(0)));
    t.b.resize(static_cast<std::size_t>(m));
    t.basis.assign(static_cast<std::size_t>(m), -1);
    t.cost1.assign(static_cast<std::size_t>(ncols), Rat(0));
    t.cost2.assign(static_cast<std::size_t>(ncols), Rat(0));
    t.value1 = 0;

    int slack_at = nstruct, art_at = art_begin;
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < nstruct; ++j)
            t.a[r][j] = rows[r].coeff[j];
        t.b[r] = rows[r].rhs;
        switch (rows[r].rel) {
        case LpRel::Le:
            t.a[r][slack_at] = 1;
            t.basis[r] = slack_at++;
            break;
        case LpRel::Ge:
            t.a[r][slack_at++] = -1;
            t.a[r][art_at] = 1;
            t.basis[r] = art_at++;
            break;
        case LpRel::Eq:
            t.a[r][art_at] = 1;
            t.basis[r] = art_at++;
            break;
        }
    }

    // Phase-2 reduced costs start as the raw objective (initial basic
    // columns all have zero objective coefficient).
    const Rat obj_sign = lp.sense() == LpSense::Maximize ? Rat(1) : Rat(-1);
    for (const auto& [v, coef] : lp.objective()) {
        t.cost2[pos_col[v]] += obj_sign * coef;
        if (neg_col[v] >= 0)
            t.cost2[neg_col[v]] -= obj_sign * coef;
    }

    LpSolution sol;

    // Phase 1: maximize -(sum of artificials). The value cell carries
    // the negated objective, textbook style, so feasible means it ends
    // at exactly 0 and infeasible leaves it positive.
    if (nart > 0) {
        for (int r = 0; r < m; ++r) {
            if (t.basis[r] >= art_begin) {
                for (int j = 0; j < ncols; ++j)
                    if (j != t.basis[r])
                        t.cost1[j] += t.a[r][j];
                t.value1 += t.b[r];
            }
        }
        while (true) {
            auto [pr, pc] = t.choose_pivot(t.cost1, art_begin);
            if (pr == -1)
                break;
            if (pr == -2) {
                // Phase-1 objective is bounded above by 0; cannot happen.
                assert(false);
                break;
            }
            t.pivot(pr, pc);
        }
        if (sgn(t.value1) > 0) {
            sol.status = LpStatus::Infeasible;
            sol.pivots = t.pivots;
            return sol;
        }
        // Drive leftover artificials out of the (degenerate) basis.
        for (int r = 0; r < m; ++r) {
            if (t.basis[r] < art_begin)
                continue;
            int pc = -1;
            for (int j = 0; j < art_begin; ++j)
                if (sgn(t.a[r][j]) != 0) {
                    pc = j;
                    break;
                }
            if (pc >= 0)
                t.pivot(r, pc);
        }
        // Any row still basic in an artificial is redundant (all-zero on
        // real columns); drop it.
        for (int r = m - 1; r >= 0; --r) {
            if (t.basis[r] >= art_begin) {
                assert(sgn(t.b[r]) == 0);
                t.a.erase(t.a.begin() + r);
                t.b.erase(t.b.begin() + r);
                t.basis.erase(t.basis.begin() + r);
            }
        }
        // Artificial columns are dead from here on.
        for (auto& row : t.a)
            row.resize(static_cast<std::size_t>(art_begin));
        t.cost1.resize(static_cast<std::size_t>(art_begin));
        t.cost2.resize(static_cast<std::size_t>(art_begin));
    }

    // Phase 2.
    while (true) {
        auto [pr, pc] = t.choose_pivot(t.cost2, static_cast<int>(t.cost2.size()));
        if (pr == -1)
            break;
        if (pr == -2) {
            sol.status = LpStatus::Unbounded;
            sol.pivots = t.pivots;
            return sol;
        }
        t.pivot(pr, pc);
    }

    // Read out structural values and recompute the objective exactly.
    std::vector<Rat> colval(static_cast<std::size_t>(nstruct), Rat(0));
    for (int r = 0; r < t.rows(); ++r)
        if (t.basis[r] < nstruct)
            colval[t.basis[r]] = t.b[r];
    sol.assignment.resize(static_cast<std::size_t>(nvars));
    for (int v = 0; v < nvars; ++v) {
        sol.assignment[v] = colval[pos_col[v]];
        if (neg_col[v] >= 0)
            sol.assignment[v] -= colval[neg_col[v]];
    }
    sol.value = 0;
    for (const auto& [v, coef] : lp.objective())
        sol.value += coef * sol.assignment[v];
    sol.status = LpStatus::Optimal;
    sol.pivots = t.pivots;
    assert(lp_assignment_feasible(lp, sol.assignment));
    return sol;
}

bool lp_assignment_feasible(const RationalLP& lp, const std::vector<Rat>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(lp.variable_count()))
        return false;
    for (int v = 0; v < lp.variable_count(); ++v)
        if (lp.is_nonnegative(v) && sgn(assignment[v]) < 0)
            return false;
    for (const auto& c : lp.constraints()) {
        Rat lhs(0);
        for (const auto& [v, coef] : c.terms)
            lhs += coef * assignment[v];
        int c3 = cmp(lhs, c.rhs);
        if ((c.rel == LpRel::Le && c3 > 0) || (c.rel == LpRel::Eq && c3 != 0) ||
            (c.rel == LpRel::Ge && c3 < 0))
            return false;
    }
    return true;
}

bool dual_value_check(const RationalLP& primal, const RationalLP& dual) {
    LpSolution p = lp_solve(primal);
    LpSolution d = lp_solve(dual);
    return p.status == LpStatus::Optimal && d.status == LpStatus::Optimal && p.value == d.value;
}

} // namespace joinbound
