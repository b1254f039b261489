#include "joinbound/relational.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "joinbound/errors.hpp"

namespace joinbound {

std::vector<int> attr_ids(AttrSet s) {
    std::vector<int> ids;
    for (int i = 0; s >> i; ++i)
        if (attr_in(s, i))
            ids.push_back(i);
    return ids;
}

Schema::Schema(std::vector<std::string> attributes,
               std::vector<std::pair<std::string, std::vector<std::string>>> relations)
    : attrs_(std::move(attributes)) {
    if (attrs_.empty())
        throw ParseError("schema needs at least one attribute");
    if (static_cast<int>(attrs_.size()) > kMaxSchemaAttrs)
        throw CapError("schema exceeds the attribute cap of " + std::to_string(kMaxSchemaAttrs));
    for (int i = 0; i < static_cast<int>(attrs_.size()); ++i) {
        const std::string& a = attrs_[i];
        if (a.empty())
            throw ParseError("empty attribute name");
        if (a.find_first_of(" \t\r\n") != std::string::npos ||
            a.find(kPlaceholderOpen) != std::string::npos ||
            a.find(kPlaceholderClose) != std::string::npos)
            throw ParseError("forbidden character in attribute name '" + a + "'");
        if (!attr_index_.emplace(a, i).second)
            throw ParseError("duplicate attribute '" + a + "'");
    }
    if (relations.empty())
        throw ParseError("schema needs at least one relation");
    for (auto& [name, rattrs] : relations) {
        if (name.empty())
            throw ParseError("empty relation name");
        if (rattrs.empty())
            throw ParseError("relation '" + name + "' has no attributes");
        AttrSet mask = 0;
        for (const std::string& a : rattrs) {
            int id = attr_id(a);
            if (id < 0)
                throw ParseError("relation '" + name + "' references unknown attribute '" + a + "'");
            mask |= attr_bit(id);
        }
        if (!rel_index_.emplace(name, static_cast<int>(rel_names_.size())).second)
            throw ParseError("duplicate relation '" + name + "'");
        rel_names_.push_back(name);
        rel_attrs_.push_back(mask);
    }
}

int Schema::attr_id(const std::string& name) const {
    auto it = attr_index_.find(name);
    return it == attr_index_.end() ? -1 : it->second;
}

int Schema::relation_id(const std::string& name) const {
    auto it = rel_index_.find(name);
    return it == rel_index_.end() ? -1 : it->second;
}

std::string Schema::set_label(AttrSet s) const {
    std::string out = "{";
    bool first = true;
    for (int id : attr_ids(s)) {
        if (!first)
            out += ",";
        first = false;
        out += attrs_[id];
    }
    return out + "}";
}

AttrSet Schema::parse_set_label(const std::string& label) const {
    if (label.size() < 2 || label.front() != '{' || label.back() != '}')
        throw ParseError("malformed set label '" + label + "'");
    AttrSet s = 0;
    std::string inner = label.substr(1, label.size() - 2);
    std::size_t start = 0;
    while (start < inner.size()) {
        std::size_t comma = inner.find(',', start);
        std::string tok =
            inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        int id = attr_id(tok);
        if (id < 0)
            throw ParseError("set label references unknown attribute '" + tok + "'");
        s |= attr_bit(id);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return s;
}

FunctionalDependency Schema::make_fd(const std::vector<std::string>& lhs,
                                     const std::string& rhs) const {
    FunctionalDependency fd;
    for (const std::string& a : lhs) {
        int id = attr_id(a);
        if (id < 0)
            throw ParseError("fd references unknown attribute '" + a + "'");
        fd.lhs |= attr_bit(id);
    }
    int id = attr_id(rhs);
    if (id < 0)
        throw ParseError("fd references unknown attribute '" + rhs + "'");
    fd.rhs = id;
    return fd;
}

Query make_query(const Schema& schema, const std::vector<std::string>& joins,
                 const std::optional<std::vector<std::string>>& free) {
    if (joins.empty())
        throw ParseError("query joins no relation");
    Query q;
    std::set<int> seen;
    for (const std::string& name : joins) {
        int id = schema.relation_id(name);
        if (id < 0)
            throw ParseError("query references unknown relation '" + name + "'");
        if (seen.insert(id).second)
            q.joins.push_back(id);
    }
    std::sort(q.joins.begin(), q.joins.end());
    for (int r : q.joins)
        q.vars |= schema.relation_attrs(r);
    if (free) {
        q.free = 0;
        for (const std::string& a : *free) {
            int id = schema.attr_id(a);
            if (id < 0)
                throw ParseError("query free list references unknown attribute '" + a + "'");
            if (!attr_in(q.vars, id))
                throw ParseError("free attribute '" + a + "' is not joined by the query");
            q.free |= attr_bit(id);
        }
    } else {
        q.free = q.vars;
    }
    return q;
}

Table::Table(AttrSet a) : attrs(a), cols(attr_ids(a)) {}

int Table::col_of(int attr_id) const {
    for (int i = 0; i < static_cast<int>(cols.size()); ++i)
        if (cols[i] == attr_id)
            return i;
    return -1;
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != cols.size())
        throw std::invalid_argument("row arity mismatch");
    rows.push_back(std::move(row));
}

void Table::normalize() {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

std::size_t Database::max_table_size() const {
    std::size_t m = 0;
    for (const Table& t : tables)
        m = std::max(m, t.size());
    return m;
}

Database empty_database(const Schema& schema) {
    Database db;
    for (int r = 0; r < schema.relation_count(); ++r)
        db.tables.emplace_back(schema.relation_attrs(r));
    return db;
}

namespace {

// Projection of a row (aligned with `from.cols`) onto the attrs in `mask`.
std::string project_key(const Table& t, const std::vector<std::string>& row, AttrSet mask) {
    std::string key;
    for (int i = 0; i < static_cast<int>(t.cols.size()); ++i) {
        if (attr_in(mask, t.cols[i])) {
            key += row[i];
            key += '\x1f';
        }
    }
    return key;
}

} // namespace

bool check_fd(const Schema& schema, const Database& db, const FunctionalDependency& fd) {
    AttrSet needed = fd.lhs | attr_bit(fd.rhs);
    for (int r = 0; r < schema.relation_count(); ++r) {
        const Table& t = db.tables[r];
        if (!subset_of(needed, t.attrs))
            continue;
        int rhs_col = t.col_of(fd.rhs);
        std::unordered_map<std::string, const std::string*> seen;
        for (const auto& row : t.rows) {
            std::string key = project_key(t, row, fd.lhs);
            auto [it, inserted] = seen.emplace(std::move(key), &row[rhs_col]);
            if (!inserted && *it->second != row[rhs_col])
                return false;
        }
    }
    return true;
}

bool check_all_fds(const Schema& schema, const Database& db,
                   const std::vector<FunctionalDependency>& fds) {
    return std::all_of(fds.begin(), fds.end(),
                       [&](const FunctionalDependency& fd) { return check_fd(schema, db, fd); });
}

Database power_database(const Schema& schema, const Database& db, int n, std::int64_t row_limit) {
    if (n < 1)
        throw std::invalid_argument("power_database needs n >= 1");
    for (int r = 0; r < schema.relation_count(); ++r) {
        double projected = std::pow(static_cast<double>(db.tables[r].size()), n);
        if (projected > static_cast<double>(row_limit))
            throw CapError("power database would exceed the row limit for relation '" +
                           schema.relation_name(r) + "'");
    }
    Database out = empty_database(schema);
    for (int r = 0; r < schema.relation_count(); ++r) {
        const Table& t = db.tables[r];
        Table& dst = out.tables[r];
        if (t.rows.empty())
            continue;
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<std::string> row(t.cols.size());
            for (std::size_t c = 0; c < t.cols.size(); ++c) {
                std::string v;
                for (int j = 0; j < n; ++j) {
                    if (j > 0)
                        v += kValueSeparator;
                    v += t.rows[idx[j]][c];
                }
                row[c] = std::move(v);
            }
            dst.add_row(std::move(row));
            int j = n - 1;
            while (j >= 0 && ++idx[j] == t.rows.size()) {
                idx[j] = 0;
                --j;
            }
            if (j < 0)
                break;
        }
        dst.normalize();
    }
    return out;
}

std::optional<double> measure_alpha(const Query& q, const Database& db, const Table& join_result) {
    (void)q;
    std::size_t d = db.max_table_size();
    if (d <= 1 || join_result.rows.empty())
        return std::nullopt;
    return std::log2(static_cast<double>(join_result.rows.size())) /
           std::log2(static_cast<double>(d));
}

} // namespace joinbound
