#include "joinbound/io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "joinbound/constants.hpp"
#include "joinbound/errors.hpp"

namespace joinbound {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

void check_control_chars(const std::string& v, const std::string& origin) {
    for (unsigned char c : v)
        if (c < 0x20)
            throw ParseError(origin + ": control character in value");
}

void check_value(const std::string& v, bool allow_reserved, const std::string& origin) {
    check_control_chars(v, origin);
    if (!allow_reserved && v.find(kValueSeparator) != std::string::npos)
        throw ParseError(origin + ": value '" + v + "' contains the reserved character '" +
                         std::string(1, kValueSeparator) + "'");
    if (v.find(kPlaceholderOpen) != std::string::npos ||
        v.find(kPlaceholderClose) != std::string::npos)
        throw ParseError(origin + ": value '" + v + "' contains a reserved placeholder bracket");
}

Rat parse_rat_field(const json& j, const std::string& origin) {
    try {
        if (j.is_number_integer())
            return Rat(j.get<long>());
        return rat_from_string(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError(origin + ": bad rational: " + e.what());
    }
}

} // namespace

ParsedInstance parse_instance_text(const std::string& text, const std::string& origin) {
    json j = parse_json(text, origin);
    try {
        if (!j.is_object())
            throw ParseError("instance document must be an object");
        std::vector<std::string> attributes = j.at("attributes").get<std::vector<std::string>>();
        std::vector<std::pair<std::string, std::vector<std::string>>> relations;
        if (!j.at("relations").is_object())
            throw ParseError("'relations' must map names to attribute lists");
        for (const auto& [name, attrs] : j.at("relations").items())
            relations.emplace_back(name, attrs.get<std::vector<std::string>>());

        Schema schema(std::move(attributes), std::move(relations));

        std::vector<FunctionalDependency> fds;
        if (j.contains("fds")) {
            for (const auto& fd : j.at("fds")) {
                auto lhs = fd.at("lhs").get<std::vector<std::string>>();
                auto rhs = fd.at("rhs").get<std::string>();
                FunctionalDependency parsed = schema.make_fd(lhs, rhs);
                // Per-relation syntax "R: lhs -> rhs" is accepted and
                // normalized to a schema-wide fd.
                if (fd.contains("relation")) {
                    std::string rel = fd.at("relation").get<std::string>();
                    int r = schema.relation_id(rel);
                    if (r < 0)
                        throw ParseError("fd names unknown relation '" + rel + "'");
                    if (!subset_of(parsed.lhs | attr_bit(parsed.rhs), schema.relation_attrs(r)))
                        throw ParseError("fd attributes are not all in relation '" + rel + "'");
                }
                fds.push_back(parsed);
            }
            std::sort(fds.begin(), fds.end());
            fds.erase(std::unique(fds.begin(), fds.end()), fds.end());
        }

        const json& jq = j.at("query");
        std::optional<std::vector<std::string>> free;
        if (jq.contains("free"))
            free = jq.at("free").get<std::vector<std::string>>();
        Query query = make_query(schema, jq.at("joins").get<std::vector<std::string>>(), free);

        std::optional<std::map<int, Rat>> budgets;
        if (j.contains("budgets")) {
            budgets.emplace();
            for (const auto& [name, val] : j.at("budgets").items()) {
                int r = schema.relation_id(name);
                if (r < 0)
                    throw ParseError("budget for unknown relation '" + name + "'");
                Rat b = parse_rat_field(val, origin);
                if (sgn(b) < 0)
                    throw ParseError("budget for relation '" + name + "' is negative");
                (*budgets)[r] = b;
            }
        }
        return ParsedInstance{std::move(schema), std::move(fds), query, std::move(budgets)};
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

ParsedInstance parse_instance(const std::string& path) {
    return parse_instance_text(slurp(path), path);
}

Database parse_database_text(const std::string& text, const Schema& schema,
                             const std::string& origin) {
    json j = parse_json(text, origin);
    try {
        bool generated = j.value("generated", false);
        Database db = empty_database(schema);
        if (!j.at("tables").is_object())
            throw ParseError("'tables' must map relation names to table objects");
        for (const auto& [name, jt] : j.at("tables").items()) {
            int r = schema.relation_id(name);
            if (r < 0)
                throw ParseError(origin + ": unknown relation '" + name + "'");
            Table& t = db.tables[r];
            std::vector<std::string> file_attrs =
                jt.at("attributes").get<std::vector<std::string>>();
            std::vector<int> perm; // file column -> table column
            AttrSet seen = 0;
            for (const std::string& a : file_attrs) {
                int id = schema.attr_id(a);
                if (id < 0 || !attr_in(t.attrs, id))
                    throw ParseError(origin + ": relation '" + name + "' does not have attribute '" +
                                     a + "'");
                if (attr_in(seen, id))
                    throw ParseError(origin + ": duplicate attribute '" + a + "' in relation '" +
                                     name + "'");
                seen |= attr_bit(id);
                perm.push_back(t.col_of(id));
            }
            if (seen != t.attrs)
                throw ParseError(origin + ": relation '" + name + "' is missing attributes");
            for (const auto& jrow : jt.at("rows")) {
                std::vector<std::string> file_row = jrow.get<std::vector<std::string>>();
                if (file_row.size() != perm.size())
                    throw ParseError(origin + ": row arity mismatch in relation '" + name + "'");
                std::vector<std::string> row(perm.size());
                for (std::size_t i = 0; i < perm.size(); ++i) {
                    check_value(file_row[i], generated, origin);
                    row[static_cast<std::size_t>(perm[i])] = std::move(file_row[i]);
                }
                t.rows.push_back(std::move(row));
            }
            std::size_t before = t.rows.size();
            t.normalize();
            if (t.rows.size() < before)
                std::cerr << "warning: " << origin << ": " << (before - t.rows.size())
                          << " duplicate row(s) dropped from relation '" << name << "'\n";
        }
        return db;
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

Database parse_database(const std::string& path, const Schema& schema) {
    return parse_database_text(slurp(path), schema, path);
}

std::string serialize_database(const Schema& schema, const Database& db, bool generated) {
    json j;
    j["generated"] = generated;
    json tables = json::object();
    for (int r = 0; r < schema.relation_count(); ++r) {
        const Table& t = db.tables[r];
        json jt;
        json attrs = json::array();
        for (int a : t.cols)
            attrs.push_back(schema.attr_name(a));
        jt["attributes"] = std::move(attrs);
        json rows = json::array();
        for (const auto& row : t.rows)
            rows.push_back(row);
        jt["rows"] = std::move(rows);
        tables[schema.relation_name(r)] = std::move(jt);
    }
    j["tables"] = std::move(tables);
    return j.dump(2) + "\n";
}

void write_database(const std::string& path, const Schema& schema, const Database& db,
                    bool generated) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'");
    out << serialize_database(schema, db, generated);
}

std::string bound_report_json(const BoundReport& report) {
    json j;
    j["method"] = bound_method_name(report.method);
    j["value"] = rat_to_string(report.value);
    json cert = json::object();
    for (const auto& [label, w] : report.certificate)
        cert[label] = rat_to_string(w);
    j["certificate"] = std::move(cert);
    return j.dump(2) + "\n";
}

std::string entropy_vector_json(const Schema& schema, const EntropyVector& v) {
    json j = json::array();
    const int n = static_cast<int>(v.cols.size());
    for (AttrSet mask = 0; mask < (AttrSet{1} << n); ++mask) {
        json entry;
        json subset = json::array();
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1u)
                subset.push_back(schema.attr_name(v.cols[i]));
        entry["subset"] = std::move(subset);
        entry["bits"] = v.coords[mask];
        j.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

namespace {

GfMatrix parse_gf_matrix(const json& rows, int prime, int dim, const std::string& origin) {
    GfMatrix m(prime, dim);
    for (const auto& jrow : rows) {
        std::vector<int> row = jrow.get<std::vector<int>>();
        if (static_cast<int>(row.size()) != dim)
            throw ParseError(origin + ": basis vector width mismatch");
        m.add_row(std::move(row));
    }
    m.rref();
    return m;
}

} // namespace

SynthParams parse_synth_params(const std::string& path, const Schema& schema) {
    const std::string origin = path;
    json j = parse_json(slurp(path), origin);
    SynthParams out;
    try {
        if (j.contains("packing")) {
            out.packing.emplace();
            for (const auto& [name, val] : j.at("packing").items()) {
                int a = schema.attr_id(name);
                if (a < 0)
                    throw ParseError(origin + ": packing weight for unknown attribute '" + name +
                                     "'");
                (*out.packing)[a] = parse_rat_field(val, origin);
            }
        }
        if (j.contains("coloring")) {
            Coloring f;
            for (const auto& [name, colors] : j.at("coloring").items()) {
                int a = schema.attr_id(name);
                if (a < 0)
                    throw ParseError(origin + ": coloring for unknown attribute '" + name + "'");
                f.assign[a] = colors.get<std::vector<std::string>>();
                std::sort(f.assign[a].begin(), f.assign[a].end());
            }
            out.coloring = std::move(f);
        }
        if (j.contains("values"))
            out.values = j.at("values").get<std::vector<std::string>>();
        if (j.contains("vspace")) {
            const json& jv = j.at("vspace");
            VectorSpaceSystem sys;
            sys.prime = jv.at("prime").get<int>();
            sys.dim = jv.at("dim").get<int>();
            for (const auto& [name, rows] : jv.at("subspaces").items()) {
                int a = schema.attr_id(name);
                if (a < 0)
                    throw ParseError(origin + ": subspace for unknown attribute '" + name + "'");
                sys.subspaces.emplace(a, parse_gf_matrix(rows, sys.prime, sys.dim, origin));
            }
            out.vspace = std::move(sys);
        }
        if (j.contains("base")) {
            const json& jb = j.at("base");
            Distribution d;
            std::vector<std::string> attrs = jb.at("attributes").get<std::vector<std::string>>();
            for (const std::string& a : attrs) {
                int id = schema.attr_id(a);
                if (id < 0)
                    throw ParseError(origin + ": base attribute '" + a + "' is unknown");
                d.attrs |= attr_bit(id);
            }
            d.cols = attr_ids(d.attrs);
            std::vector<int> perm;
            for (const std::string& a : attrs)
                perm.push_back(
                    static_cast<int>(std::find(d.cols.begin(), d.cols.end(),
                                               schema.attr_id(a)) -
                                     d.cols.begin()));
            for (const auto& jrow : jb.at("rows")) {
                std::vector<std::string> file_row = jrow.get<std::vector<std::string>>();
                if (file_row.size() != attrs.size())
                    throw ParseError(origin + ": base row arity mismatch");
                std::vector<std::string> row(attrs.size());
                for (std::size_t i = 0; i < file_row.size(); ++i)
                    row[static_cast<std::size_t>(perm[i])] = std::move(file_row[i]);
                d.support.push_back(std::move(row));
            }
            if (jb.contains("probs")) {
                for (const auto& p : jb.at("probs"))
                    d.probs.push_back(parse_rat_field(p, origin));
            } else {
                d.probs.assign(d.support.size(),
                               Rat(1, static_cast<unsigned long>(d.support.size())));
            }
            d.validate();
            out.base = std::move(d);
        }
        if (j.contains("k"))
            out.k = j.at("k").get<long>();
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return out;
}

} // namespace joinbound
