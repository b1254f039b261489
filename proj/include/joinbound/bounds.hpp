#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "joinbound/ratlp.hpp"
#include "joinbound/relational.hpp"

namespace joinbound {

enum class BoundMethod {
    AgmCover,
    VertexPacking,
    Polymatroid,
    PolymatroidBudgeted,
    Coloring,
};

std::string bound_method_name(BoundMethod m);

// The certificate maps method-specific labels (attribute, relation
// name, or "{x,y}" subset label) to exact weights; unlisted entries
// are zero.
struct BoundReport {
    BoundMethod method;
    Rat value;
    std::vector<std::pair<std::string, Rat>> certificate;
};

// max Σ v_x subject to Σ_{x∈V(R)} v_x ≤ 1 per joined relation, v ≥ 0.
BoundReport vertex_packing_bound(const Schema& schema, const Query& q);

// min Σ w_R subject to Σ_{R∋x} w_R ≥ 1 per x ∈ V(Q), w ≥ 0. Equals the
// packing value exactly (strong duality, asserted).
BoundReport edge_cover_bound(const Schema& schema, const Query& q);

// max v_{free(q)} over the subset lattice of the joined attributes,
// subject to the Shannon inequalities (v_∅ = 0, monotonicity, elemental
// submodularity), per-relation budgets (default 1), and fd equalities.
BoundReport polymatroid_bound(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                              const Query& q,
                              const std::optional<std::map<int, Rat>>& budgets = std::nullopt);

// max Σ_S w_S over admissible color classes S (every fd Y↦x with x ∈ S
// has S∩Y ≠ ∅), subject to Σ_{S∩V(R)≠∅} w_S ≤ 1 per joined relation.
BoundReport coloring_bound(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                           const Query& q);

// Brute-force maximum of the coloring ratio over all colorings with at
// most max_colors colors; exhaustive, |V(Q)| ≤ 4 and max_colors ≤ 4.
Rat coloring_bound_oracle(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                          const Query& q, int max_colors);

// joinSize ≤ ∏_R |R(D)|^{w_R} checked in the log domain with 1e-9
// relative tolerance. The cover must be feasible (verified exactly).
bool weighted_product_bound(const Schema& schema, const Query& q, const Database& db,
                            const std::map<int, Rat>& cover, std::int64_t join_size);

// Exact re-substitution of a report's certificate into its LP.
bool check_certificate(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                       const Query& q, const BoundReport& report,
                       const std::optional<std::map<int, Rat>>& budgets = std::nullopt);

} // namespace joinbound
