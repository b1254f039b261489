#pragma once

#include <string>
#include <utility>
#include <vector>

#include "joinbound/rational.hpp"

namespace joinbound {

enum class LpSense { Maximize, Minimize };
enum class LpRel { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// An exact-arithmetic LP. Variables are nonnegative by default; free
// variables are split into nonnegative differences inside the solver.
class RationalLP {
public:
    explicit RationalLP(LpSense sense = LpSense::Maximize) : sense_(sense) {}

    int add_variable(std::string name, bool nonnegative = true);
    void set_objective(int var, Rat coeff);
    void add_constraint(std::vector<std::pair<int, Rat>> terms, LpRel rel, Rat rhs);

    int variable_count() const { return static_cast<int>(names_.size()); }
    const std::string& variable_name(int v) const { return names_[v]; }
    LpSense sense() const { return sense_; }

    // One constraint per line, rationals as "p/q". Debug aid, not a
    // stability contract.
    std::string to_text() const;

    struct Constraint {
        std::vector<std::pair<int, Rat>> terms;
        LpRel rel;
        Rat rhs;
    };

    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<std::pair<int, Rat>>& objective() const { return objective_; }
    bool is_nonnegative(int v) const { return nonneg_[v]; }

private:
    LpSense sense_;
    std::vector<std::string> names_;
    std::vector<bool> nonneg_;
    std::vector<std::pair<int, Rat>> objective_;
    std::vector<Constraint> constraints_;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rat value;                   // exact optimum when Optimal
    std::vector<Rat> assignment; // per declared variable, when Optimal
    long pivots = 0;
};

// Two-phase simplex with Bland's pivoting rule (terminates on all
// inputs). The Optimal assignment satisfies every constraint exactly.
LpSolution lp_solve(const RationalLP& lp);

// Exact re-substitution check of an assignment against all constraints.
bool lp_assignment_feasible(const RationalLP& lp, const std::vector<Rat>& assignment);

// True iff both programs are Optimal with exactly equal values.
bool dual_value_check(const RationalLP& primal, const RationalLP& dual);

} // namespace joinbound
