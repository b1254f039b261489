#pragma once

#include <map>
#include <string>
#include <vector>

#include "joinbound/entropy.hpp"
#include "joinbound/gf.hpp"
#include "joinbound/rational.hpp"
#include "joinbound/relational.hpp"

namespace joinbound {

// ---------------------------------------------------------------------------
// Construction specs
// ---------------------------------------------------------------------------

// Finite-set coloring: attribute -> sorted distinct color tokens.
struct Coloring {
    std::map<int, std::vector<std::string>> assign;

    std::vector<std::string> colors_of(AttrSet y) const; // union, sorted
};

// f satisfies Y↦x iff f(x) ⊆ f(Y).
bool coloring_satisfies(const Coloring& f, const FunctionalDependency& fd);

// Subspace family where V_Y is the subspace SUM (vector space coloring).
struct VectorSpaceColoring {
    int prime = 2;
    int dim = 0;
    std::map<int, GfMatrix> subspaces; // attr -> basis rows (rref)

    GfMatrix span_of(AttrSet y) const; // Σ_{x∈Y} V_x; ∅ -> zero space
    bool satisfies(const FunctionalDependency& fd) const; // V_x ⊆ V_Y
};

// Subspace family where V_Y is the INTERSECTION (vector space system).
struct VectorSpaceSystem {
    int prime = 2;
    int dim = 0;
    std::map<int, GfMatrix> subspaces;

    GfMatrix intersection_of(AttrSet y) const; // ∩_{x∈Y} V_x; ∅ -> full space
    bool satisfies(const FunctionalDependency& fd) const; // V_x ⊇ V_Y
};

// §5.3 instantiation: the permutation group of the k-row matrix A_k
// built from a rational base distribution.
struct GroupConstructionSpec {
    Distribution base;
    long k = 0;

    void validate() const; // k positive, k·p_r integral for every row
};

// Closed-form sizes and the construction's own predicted ratio.
struct SynthPrediction {
    std::vector<std::pair<int, BigInt>> table_sizes; // relation id -> |R(D)|
    BigInt join_size;                                // predicted |Q(D)|
    double predicted_alpha = 0;                      // ratio the db witnesses
};

// ---------------------------------------------------------------------------
// Generators. Each rejects fd-violating inputs (ConstructionError) and
// refuses to materialize beyond row_limit (CapError). Table sizes match
// the prediction exactly; the evaluated join is >= the predicted join
// size, with equality on product databases.
// ---------------------------------------------------------------------------

Database product_database(const Schema& schema, const Query& q,
                          const std::map<int, Rat>& packing, long n_value,
                          std::int64_t row_limit = kDefaultRowLimit);
SynthPrediction predict_product(const Schema& schema, const Query& q,
                                const std::map<int, Rat>& packing, long n_value);

Database coloring_database(const Schema& schema, const Query& q, const Coloring& f,
                           const std::vector<FunctionalDependency>& fds,
                           const std::vector<std::string>& values,
                           std::int64_t row_limit = kDefaultRowLimit);
SynthPrediction predict_coloring(const Schema& schema, const Query& q, const Coloring& f,
                                 std::size_t value_count);

// Annihilator system: V_x ↦ V_x^⊥; sums become intersections and fd
// satisfaction carries over.
VectorSpaceSystem dualize_coloring(const VectorSpaceColoring& vc);

Database vs_system_database(const Schema& schema, const Query& q, const VectorSpaceSystem& sys,
                            const std::vector<FunctionalDependency>& fds,
                            std::int64_t row_limit = kDefaultRowLimit);
SynthPrediction predict_vspace(const Schema& schema, const Query& q,
                               const VectorSpaceSystem& sys);

Database permutation_database(const Schema& schema, const Query& q,
                              const GroupConstructionSpec& spec,
                              const std::vector<FunctionalDependency>& fds,
                              std::int64_t row_limit = kDefaultRowLimit);
SynthPrediction predict_permutation(const Schema& schema, const Query& q,
                                    const GroupConstructionSpec& spec);

// k! / ∏_r (k·p_r)! over the distinct rows of A_k[Y]: the number of
// left cosets of the stabilizer G^k_Y.
BigInt coset_count(const GroupConstructionSpec& spec, AttrSet y);

// |G^k_Y| = ∏_r (k·p_r)!.
BigInt stabilizer_order(const GroupConstructionSpec& spec, AttrSet y);

// (1/k)·log2(coset_count); converges to ent(base)_Y as k grows.
double normalized_log_coset_count(const GroupConstructionSpec& spec, AttrSet y);

} // namespace joinbound
