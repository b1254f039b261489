#include "joinbound/evaluator.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "joinbound/constants.hpp"

namespace joinbound {

std::string placeholder_value(const Schema& schema, int attr_id) {
    return std::string(kPlaceholderOpen) + schema.attr_name(attr_id) + kPlaceholderClose;
}

namespace {

constexpr char kKeySep = '\x1f';

} // namespace

Table join_baseline(const Schema& /*schema*/, const Query& q, const Database& db) {
    if (!q.is_natural())
        throw std::invalid_argument("join_baseline evaluates the natural join part only");
    const std::vector<int> vars = attr_ids(q.vars);
    std::map<int, int> pos_of; // attr id -> position in vars
    for (int i = 0; i < static_cast<int>(vars.size()); ++i)
        pos_of[vars[i]] = i;

    std::vector<int> order = q.joins;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return db.tables[a].size() < db.tables[b].size();
    });

    // Per depth: the attributes shared with everything placed earlier,
    // and a hash index of the relation's rows keyed by that projection.
    struct Level {
        int rel;
        std::vector<int> shared_cols;  // columns (within the table) of shared attrs
        std::vector<int> shared_pos;   // positions (within vars) of shared attrs
        std::vector<int> new_cols;     // table columns introducing new attrs
        std::vector<int> new_pos;      // their positions within vars
        std::unordered_map<std::string, std::vector<std::size_t>> index;
    };
    std::vector<Level> levels;
    AttrSet placed = 0;
    for (int rel : order) {
        Level lv;
        lv.rel = rel;
        const Table& t = db.tables[rel];
        for (int c = 0; c < static_cast<int>(t.cols.size()); ++c) {
            int a = t.cols[c];
            if (attr_in(placed, a)) {
                lv.shared_cols.push_back(c);
                lv.shared_pos.push_back(pos_of[a]);
            } else {
                lv.new_cols.push_back(c);
                lv.new_pos.push_back(pos_of[a]);
            }
        }
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            std::string key;
            for (int c : lv.shared_cols) {
                key += t.rows[i][c];
                key += kKeySep;
            }
            lv.index[key].push_back(i);
        }
        placed |= t.attrs;
        levels.push_back(std::move(lv));
    }

    Table out((q.vars));
    JoinRow partial(vars.size());
    auto backtrack = [&](auto&& self, std::size_t depth) -> void {
        if (depth == levels.size()) {
            out.rows.push_back(partial);
            return;
        }
        const Level& lv = levels[depth];
        const Table& t = db.tables[lv.rel];
        std::string key;
        for (int p : lv.shared_pos) {
            key += partial[p];
            key += kKeySep;
        }
        auto it = lv.index.find(key);
        if (it == lv.index.end())
            return;
        for (std::size_t ri : it->second) {
            for (std::size_t k = 0; k < lv.new_cols.size(); ++k)
                partial[lv.new_pos[k]] = t.rows[ri][lv.new_cols[k]];
            self(self, depth + 1);
        }
    };
    backtrack(backtrack, 0);
    out.normalize();
    return out;
}

std::vector<std::string> candidate_values(const Schema& schema, const Query& q,
                                          const Database& db, int attr) {
    bool found = false;
    std::set<std::string> values;
    for (int r : q.joins) {
        if (!attr_in(schema.relation_attrs(r), attr))
            continue;
        const Table& t = db.tables[r];
        int c = t.col_of(attr);
        std::set<std::string> col;
        for (const auto& row : t.rows)
            col.insert(row[c]);
        if (!found) {
            values = std::move(col);
            found = true;
        } else {
            std::set<std::string> kept;
            std::set_intersection(values.begin(), values.end(), col.begin(), col.end(),
                                  std::inserter(kept, kept.end()));
            values = std::move(kept);
        }
    }
    if (!found)
        throw std::invalid_argument("attribute '" + schema.attr_name(attr) +
                                    "' occurs in no joined relation");
    return {values.begin(), values.end()};
}

Database quotient_database(const Schema& schema, const Database& db, AttrSet c) {
    Database out = db;
    for (int r = 0; r < schema.relation_count(); ++r) {
        Table& t = out.tables[r];
        if ((t.attrs & c) == 0)
            continue;
        for (auto& row : t.rows)
            for (int i = 0; i < static_cast<int>(t.cols.size()); ++i)
                if (attr_in(c, t.cols[i]))
                    row[i] = placeholder_value(schema, t.cols[i]);
        t.normalize();
    }
    return out;
}

FdIndex::FdIndex(const Schema& schema, const Query& q, const Database& db,
                 const std::vector<FunctionalDependency>& fds,
                 const std::vector<AttrSet>& witness_scopes) {
    assert(fds.size() == witness_scopes.size());
    for (std::size_t i = 0; i < fds.size(); ++i) {
        Entry e;
        e.fd = fds[i];
        for (int r : q.joins) {
            if (!subset_of(witness_scopes[i], schema.relation_attrs(r)))
                continue;
            if (e.relation < 0 || db.tables[r].size() < db.tables[e.relation].size())
                e.relation = r;
        }
        if (e.relation >= 0) {
            const Table& t = db.tables[e.relation];
            std::vector<int> lhs_cols;
            for (int a : attr_ids(e.fd.lhs))
                lhs_cols.push_back(t.col_of(a));
            int rhs_col = t.col_of(e.fd.rhs);
            for (const auto& row : t.rows) {
                std::string key;
                for (int c : lhs_cols) {
                    key += row[c];
                    key += kKeySep;
                }
                auto [it, inserted] = e.lookup.emplace(std::move(key), row[rhs_col]);
                // Ambiguity means the database violates the fd.
                assert(inserted || it->second == row[rhs_col]);
            }
        }
        entries_.push_back(std::move(e));
    }
}

std::optional<JoinRow> extend_component(const Schema& /*schema*/, const Query& q, const Database& db,
                                        const JoinRow& s, AttrSet component,
                                        const std::vector<int>& span_attrs,
                                        const std::vector<std::string>& span_values,
                                        const FdIndex& index) {
    const std::vector<int> vars = attr_ids(q.vars);
    std::vector<int> pos_of(vars.empty() ? 0 : vars.back() + 1, -1);
    for (int i = 0; i < static_cast<int>(vars.size()); ++i)
        pos_of[vars[i]] = i;

    JoinRow t = s;
    AttrSet valued = q.vars & ~component;
    for (std::size_t i = 0; i < span_attrs.size(); ++i) {
        t[pos_of[span_attrs[i]]] = span_values[i];
        valued |= attr_bit(span_attrs[i]);
    }

    // Chase: apply every fd whose lhs is fully valued; a missing lookup
    // or a conflicting derived value kills the row.
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& e : index.entries()) {
            if (e.relation < 0)
                continue;
            if (!subset_of(e.fd.lhs, valued))
                continue;
            std::string key;
            for (int a : attr_ids(e.fd.lhs)) {
                key += t[pos_of[a]];
                key += kKeySep;
            }
            auto it = e.lookup.find(key);
            if (it == e.lookup.end())
                return std::nullopt;
            int p = pos_of[e.fd.rhs];
            if (attr_in(valued, e.fd.rhs)) {
                if (t[p] != it->second)
                    return std::nullopt;
            } else {
                t[p] = it->second;
                valued |= attr_bit(e.fd.rhs);
                progress = true;
            }
        }
    }
    if (!subset_of(component, valued))
        return std::nullopt; // spanning set did not chase out the component

    for (int r : q.joins) {
        const Table& tab = db.tables[r];
        std::vector<std::string> proj(tab.cols.size());
        for (int i = 0; i < static_cast<int>(tab.cols.size()); ++i)
            proj[i] = t[pos_of[tab.cols[i]]];
        if (!std::binary_search(tab.rows.begin(), tab.rows.end(), proj))
            return std::nullopt;
    }
    return t;
}

Table join_components(const Schema& schema, const std::vector<FunctionalDependency>& fds,
                      const Query& q, const Database& db, const EvalOptions& options,
                      EvalStats* stats) {
    if (!q.is_natural())
        throw std::invalid_argument("join_components evaluates the natural join part only");
    const std::vector<int> vars = attr_ids(q.vars);

    // Rewritten fds carry the original scope so chaseability survives
    // layer rewriting (witness relation must contain the original fd).
    struct TrackedFd {
        FunctionalDependency fd;
        AttrSet original_scope;
    };
    std::vector<TrackedFd> cur;
    for (const auto& fd : fds) {
        AttrSet scope = fd.lhs | attr_bit(fd.rhs);
        if (subset_of(scope, q.vars))
            cur.push_back({fd, scope});
    }

    struct UnwindStep {
        AttrSet component = 0;
        Database snapshot;                         // db before masking this component
        std::vector<FunctionalDependency> chase_fds;
        std::vector<AttrSet> chase_scopes;
        std::vector<int> span_attrs;
    };
    std::vector<UnwindStep> steps;

    Database cur_db = db;
    AttrSet remaining = q.vars;
    while (remaining != 0) {
        std::vector<FunctionalDependency> plain;
        for (const auto& tf : cur)
            plain.push_back(tf.fd);
        std::vector<AttrSet> comps = minimal_components(plain, remaining);
        for (AttrSet c : comps) {
            UnwindStep step;
            step.component = c;
            step.snapshot = cur_db;
            // Chaseable fds of F[C]: witnessed by some joined relation.
            for (const auto& tf : cur) {
                if (!subset_of(tf.fd.lhs, c) || !attr_in(c, tf.fd.rhs))
                    continue;
                bool witnessed = false;
                for (int r : q.joins)
                    if (subset_of(tf.original_scope, schema.relation_attrs(r))) {
                        witnessed = true;
                        break;
                    }
                if (witnessed) {
                    step.chase_fds.push_back(tf.fd);
                    step.chase_scopes.push_back(tf.original_scope);
                }
            }
            step.span_attrs = attr_ids(min_spanning_set(step.chase_fds, c));
            steps.push_back(std::move(step));
            cur_db = quotient_database(schema, cur_db, c);
        }
        AttrSet removed = 0;
        for (AttrSet c : comps)
            removed |= c;
        remaining &= ~removed;
        std::vector<TrackedFd> next;
        for (const auto& tf : cur) {
            if (attr_in(removed, tf.fd.rhs))
                continue;
            next.push_back({{tf.fd.lhs & ~removed, tf.fd.rhs}, tf.original_scope});
        }
        cur = std::move(next);
    }

    // Base: the all-placeholder row, present iff all joined tables are
    // non-empty.
    std::vector<JoinRow> result;
    bool any_empty = std::any_of(q.joins.begin(), q.joins.end(),
                                 [&](int r) { return db.tables[r].rows.empty(); });
    if (!any_empty) {
        JoinRow base(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            base[i] = placeholder_value(schema, vars[i]);
        result.push_back(std::move(base));
    }

    if (stats)
        *stats = {};

    const std::vector<int> var_pos = [&] {
        std::vector<int> pos(vars.empty() ? 0 : vars.back() + 1, -1);
        for (int i = 0; i < static_cast<int>(vars.size()); ++i)
            pos[vars[i]] = i;
        return pos;
    }();

    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const UnwindStep& step = *it;
        FdIndex index(schema, q, step.snapshot, step.chase_fds, step.chase_scopes);

        // K is the product of the candidate value sets over the spanning
        // set, enumerated lazily: per partial row, each span attribute's
        // candidates are pruned against one indexed relation keyed by the
        // attributes outside the component (same result set, fewer
        // attempts). k_size below reports the unpruned |K|.
        struct SpanPruner {
            std::vector<int> key_positions;                              // JoinRow positions
            std::unordered_map<std::string, std::vector<std::string>> by_key;
        };
        std::vector<SpanPruner> pruners;
        std::int64_t k_size = result.empty() ? 0 : 1;
        for (int a : step.span_attrs) {
            if (k_size > 0) {
                std::int64_t global =
                    static_cast<std::int64_t>(candidate_values(schema, q, step.snapshot, a).size());
                k_size *= global;
            }
            int rel = -1;
            for (int r : q.joins) {
                if (!attr_in(schema.relation_attrs(r), a))
                    continue;
                if (rel < 0 || step.snapshot.tables[r].size() < step.snapshot.tables[rel].size())
                    rel = r;
            }
            SpanPruner pr;
            const Table& t = step.snapshot.tables[rel];
            int val_col = t.col_of(a);
            std::vector<int> key_cols;
            for (int i = 0; i < static_cast<int>(t.cols.size()); ++i) {
                if (!attr_in(step.component, t.cols[i])) {
                    key_cols.push_back(i);
                    pr.key_positions.push_back(var_pos[t.cols[i]]);
                }
            }
            for (const auto& row : t.rows) {
                std::string key;
                for (int c : key_cols) {
                    key += row[c];
                    key += kKeySep;
                }
                pr.by_key[key].push_back(row[val_col]);
            }
            for (auto& [key, vals] : pr.by_key) {
                std::sort(vals.begin(), vals.end());
                vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            }
            pruners.push_back(std::move(pr));
        }

        auto extend_one = [&](const JoinRow& s, std::vector<JoinRow>& sink,
                              std::int64_t& attempts) {
            // Candidates for this particular partial row.
            std::vector<const std::vector<std::string>*> cand(step.span_attrs.size());
            for (std::size_t i = 0; i < step.span_attrs.size(); ++i) {
                std::string key;
                for (int p : pruners[i].key_positions) {
                    key += s[p];
                    key += kKeySep;
                }
                auto hit = pruners[i].by_key.find(key);
                if (hit == pruners[i].by_key.end())
                    return;
                cand[i] = &hit->second;
            }
            std::vector<std::string> assignment(step.span_attrs.size());
            std::vector<std::size_t> odo(step.span_attrs.size(), 0);
            while (true) {
                for (std::size_t i = 0; i < odo.size(); ++i)
                    assignment[i] = (*cand[i])[odo[i]];
                ++attempts;
                auto t = extend_component(schema, q, step.snapshot, s, step.component,
                                          step.span_attrs, assignment, index);
                if (t)
                    sink.push_back(std::move(*t));
                if (odo.empty())
                    break;
                std::size_t j = odo.size();
                while (j > 0 && ++odo[j - 1] == cand[j - 1]->size()) {
                    odo[j - 1] = 0;
                    --j;
                }
                if (j == 0)
                    break;
            }
        };

        std::vector<JoinRow> extended;
        std::int64_t attempts = 0;
        if (options.parallel) {
#ifdef _OPENMP
            int nthreads = omp_get_max_threads();
#else
            int nthreads = 1;
#endif
            std::vector<std::vector<JoinRow>> buckets(static_cast<std::size_t>(nthreads));
            std::vector<std::int64_t> counts(static_cast<std::size_t>(nthreads), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
            for (std::int64_t si = 0; si < static_cast<std::int64_t>(result.size()); ++si) {
#ifdef _OPENMP
                int tid = omp_get_thread_num();
#else
                int tid = 0;
#endif
                extend_one(result[static_cast<std::size_t>(si)], buckets[tid], counts[tid]);
            }
            for (auto& b : buckets)
                extended.insert(extended.end(), std::make_move_iterator(b.begin()),
                                std::make_move_iterator(b.end()));
            for (std::int64_t c : counts)
                attempts += c;
        } else {
            for (const JoinRow& s : result)
                extend_one(s, extended, attempts);
        }

        if (stats) {
            LayerStats ls;
            ls.component = step.component;
            ls.partial_rows = static_cast<std::int64_t>(result.size());
            ls.k_size = k_size;
            ls.attempts = attempts;
            ls.span_size = static_cast<int>(step.span_attrs.size());
            stats->layers.push_back(ls);
            stats->total_attempts += ls.attempts;
        }
        result = std::move(extended);
    }

    Table out((q.vars));
    out.rows = std::move(result);
    out.normalize();
    return out;
}

Table project_set(const Table& t, AttrSet free) {
    if (!subset_of(free, t.attrs))
        throw std::invalid_argument("projection outside the table's attributes");
    Table out(free);
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(t.cols.size()); ++i)
        if (attr_in(free, t.cols[i]))
            keep.push_back(i);
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        r.reserve(keep.size());
        for (int i : keep)
            r.push_back(row[i]);
        out.rows.push_back(std::move(r));
    }
    out.normalize();
    return out;
}

BagProjection project_bag_count(const Table& t, AttrSet free) {
    if (!subset_of(free, t.attrs))
        throw std::invalid_argument("projection outside the table's attributes");
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(t.cols.size()); ++i)
        if (attr_in(free, t.cols[i]))
            keep.push_back(i);
    std::map<std::vector<std::string>, std::int64_t> counts;
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        r.reserve(keep.size());
        for (int i : keep)
            r.push_back(row[i]);
        ++counts[std::move(r)];
    }
    BagProjection out;
    out.total = static_cast<std::int64_t>(t.rows.size());
    for (auto& [row, n] : counts)
        out.multiplicities.emplace_back(row, n);
    return out;
}

} // namespace joinbound
