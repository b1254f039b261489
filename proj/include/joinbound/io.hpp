#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "joinbound/bounds.hpp"
#include "joinbound/entropy.hpp"
#include "joinbound/relational.hpp"
#include "joinbound/synth.hpp"

namespace joinbound {

// A parsed instance file: schema + fds + query + optional budgets.
struct ParsedInstance {
    Schema schema;
    std::vector<FunctionalDependency> fds;
    Query query;
    std::optional<std::map<int, Rat>> budgets;
};

ParsedInstance parse_instance(const std::string& path);
ParsedInstance parse_instance_text(const std::string& text, const std::string& origin = "<text>");

// Database files: tables keyed by relation name, rows as string arrays.
// "generated": true permits the reserved separator inside values
// (tuple/coset encodings written by the generators).
Database parse_database(const std::string& path, const Schema& schema);
Database parse_database_text(const std::string& text, const Schema& schema,
                             const std::string& origin = "<text>");

std::string serialize_database(const Schema& schema, const Database& db, bool generated);
void write_database(const std::string& path, const Schema& schema, const Database& db,
                    bool generated);

// Stable keys: "method", "value" ("p/q"), "certificate".
std::string bound_report_json(const BoundReport& report);

// Records of ("subset as sorted attribute list", bits).
std::string entropy_vector_json(const Schema& schema, const EntropyVector& v);

// Construction parameter documents for cmd_synth.
struct SynthParams {
    std::optional<std::map<int, Rat>> packing;          // product
    std::optional<Coloring> coloring;                   // coloring
    std::optional<std::vector<std::string>> values;     // coloring value set
    std::optional<VectorSpaceSystem> vspace;            // vspace
    std::optional<Distribution> base;                   // permutation
    std::optional<long> k;                              // permutation
};

SynthParams parse_synth_params(const std::string& path, const Schema& schema);

} // namespace joinbound
