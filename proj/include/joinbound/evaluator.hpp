#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "joinbound/fdtools.hpp"
#include "joinbound/relational.hpp"

namespace joinbound {

// A row over V(Q), aligned with attr_ids(q.vars). Masked positions hold
// the "⟨attr⟩" placeholder.
using JoinRow = std::vector<std::string>;

std::string placeholder_value(const Schema& schema, int attr_id);

struct EvalOptions {
    bool parallel = false; // OpenMP extension loop; serial is the reference
};

struct LayerStats {
    AttrSet component = 0;
    std::int64_t partial_rows = 0; // |Q(D/C)| driving the layer
    std::int64_t k_size = 0;       // unpruned |K|: product of candidate sets over S
    std::int64_t attempts = 0;     // actual extensions tried, <= partial_rows * k_size
    int span_size = 0;
};

struct EvalStats {
    std::vector<LayerStats> layers;
    std::int64_t total_attempts = 0;
};

// Exact natural join by backtracking over relations ordered by size,
// with hash indexes on shared attributes. Correctness oracle for
// join_components.
Table join_baseline(const Schema& schema, const Query& q, const Database& db);

// V_x = ∩ π_x(R(D)) over joined relations containing x.
std::vector<std::string> candidate_values(const Schema& schema, const Query& q,
                                          const Database& db, int attr);

// D/C: attributes in c masked to placeholders, tables deduplicated.
Database quotient_database(const Schema& schema, const Database& db, AttrSet c);

// Lookup structure for fd-driven row extension: for each fd, the
// smallest relation containing it maps lhs values to the unique rhs
// value. Only well-defined when the database satisfies the fd.
class FdIndex {
public:
    struct Entry {
        FunctionalDependency fd;
        int relation = -1;
        std::unordered_map<std::string, std::string> lookup;
    };

    // `witness_scopes[i]` is the attribute scope that must be inside a
    // relation for fds[i] to be chaseable (the original lhs ∪ rhs when
    // fds have been rewritten by earlier layers).
    FdIndex(const Schema& schema, const Query& q, const Database& db,
            const std::vector<FunctionalDependency>& fds,
            const std::vector<AttrSet>& witness_scopes);

    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

// Chases the fds of `index` from (s off C) ∪ spanning assignment, then
// filters by membership of every joined relation. Returns the unique
// compatible row or nothing.
std::optional<JoinRow> extend_component(const Schema& schema, const Query& q, const Database& db,
                                        const JoinRow& s, AttrSet component,
                                        const std::vector<int>& span_attrs,
                                        const std::vector<std::string>& span_values,
                                        const FdIndex& index);

// The minimal-component join: quotient by each layer's components down
// to the all-placeholder base, then unwind with fd-index extension.
// Equals join_baseline exactly.
Table join_components(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                      const Query& q, const Database& db, const EvalOptions& options = {},
                      EvalStats* stats = nullptr);

// Deduplicating projection (set semantics).
Table project_set(const Table& t, AttrSet free);

struct BagProjection {
    std::vector<std::pair<std::vector<std::string>, std::int64_t>> multiplicities;
    std::int64_t total = 0; // always |t|
};

BagProjection project_bag_count(const Table& t, AttrSet free);

} // namespace joinbound
