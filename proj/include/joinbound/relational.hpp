#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "joinbound/constants.hpp"

namespace joinbound {

// Attribute sets are bitmasks over a schema's ordered attribute list.
// Desk-scale universes (<= kMaxSchemaAttrs attributes) by design.
using AttrSet = std::uint32_t;

inline AttrSet attr_bit(int id) { return AttrSet{1} << id; }
inline bool attr_in(AttrSet s, int id) { return (s >> id) & 1u; }
inline bool subset_of(AttrSet a, AttrSet b) { return (a & ~b) == 0; }
inline int attr_count(AttrSet s) { return std::popcount(s); }

// Ascending attribute ids of a set.
std::vector<int> attr_ids(AttrSet s);

struct FunctionalDependency {
    AttrSet lhs = 0;
    int rhs = 0;

    friend auto operator<=>(const FunctionalDependency&, const FunctionalDependency&) = default;
};

class Schema {
public:
    Schema(std::vector<std::string> attributes,
           std::vector<std::pair<std::string, std::vector<std::string>>> relations);

    int attr_count() const { return static_cast<int>(attrs_.size()); }
    int relation_count() const { return static_cast<int>(rel_names_.size()); }

    const std::string& attr_name(int id) const { return attrs_[id]; }
    const std::string& relation_name(int id) const { return rel_names_[id]; }
    AttrSet relation_attrs(int id) const { return rel_attrs_[id]; }

    // -1 when absent.
    int attr_id(const std::string& name) const;
    int relation_id(const std::string& name) const;

    AttrSet all_attrs() const { return attrs_.size() >= 32 ? ~AttrSet{0} : attr_bit(attr_count()) - 1; }

    // Human-readable "{x,y}" label for a set, sorted by attribute order.
    std::string set_label(AttrSet s) const;

    // Inverse of set_label; throws ParseError on unknown attributes.
    AttrSet parse_set_label(const std::string& label) const;

    FunctionalDependency make_fd(const std::vector<std::string>& lhs, const std::string& rhs) const;

private:
    std::vector<std::string> attrs_;
    std::vector<std::string> rel_names_;
    std::vector<AttrSet> rel_attrs_;
    std::map<std::string, int> attr_index_;
    std::map<std::string, int> rel_index_;
};

struct Query {
    std::vector<int> joins; // relation ids, ascending
    AttrSet vars = 0;       // V(Q) = union of joined relations' attributes
    AttrSet free = 0;       // subset of vars; == vars for natural join queries

    bool is_natural() const { return free == vars; }
};

Query make_query(const Schema& schema, const std::vector<std::string>& joins,
                 const std::optional<std::vector<std::string>>& free = std::nullopt);

// A table is a set of rows over a fixed attribute set. Rows are value
// vectors aligned with attr_ids(attrs); the row list is kept sorted and
// deduplicated (set semantics, canonical for equality checks).
struct Table {
    AttrSet attrs = 0;
    std::vector<int> cols;                       // == attr_ids(attrs)
    std::vector<std::vector<std::string>> rows;  // sorted, unique

    explicit Table(AttrSet a = 0);

    std::size_t size() const { return rows.size(); }
    int col_of(int attr_id) const; // position in cols, -1 if absent

    void add_row(std::vector<std::string> row);
    void normalize(); // sort + dedupe

    friend bool operator==(const Table&, const Table&) = default;
};

// Tables aligned with the schema's relation order; every relation present.
struct Database {
    std::vector<Table> tables;

    std::size_t max_table_size() const;
};

Database empty_database(const Schema& schema);

// True iff no relation containing lhs ∪ {rhs} has two rows agreeing on
// lhs and differing on rhs. Relations not containing those attributes
// impose no constraint.
bool check_fd(const Schema& schema, const Database& db, const FunctionalDependency& fd);

bool check_all_fds(const Schema& schema, const Database& db,
                   const std::vector<FunctionalDependency>& fds);

// D^n: rows are n-tuples of rows, values joined with the reserved
// separator. Rejects when any |R|^n exceeds row_limit.
Database power_database(const Schema& schema, const Database& db, int n,
                        std::int64_t row_limit = kDefaultRowLimit);

// log |Q(D)| / log |D| with |D| the largest table; nullopt when |D| <= 1
// or the join is empty.
std::optional<double> measure_alpha(const Query& q, const Database& db, const Table& join_result);

} // namespace joinbound
