#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "joinbound/bounds.hpp"
#include "joinbound/io.hpp"

namespace joinbound {

// Exit-code contract shared by every subcommand:
// 0 ok / 1 verify-fail / 2 parse / 3 caps / 4 invalid construction.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFail = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitCaps = 3;
inline constexpr int kExitConstruction = 4;

int cmd_bound(const std::string& instance_path, const std::string& method, bool json_out,
              std::ostream& out, std::ostream& err);

struct SynthCmdOptions {
    std::string construction; // product | coloring | vspace | permutation
    std::optional<std::string> params_path;
    std::optional<long> n_value; // --N (product), value-set size (coloring)
    std::optional<long> k_value; // --k (permutation)
    bool count_only = false;
    std::optional<std::string> out_path;
    bool json = false;
};

int cmd_synth(const std::string& instance_path, const SynthCmdOptions& opts, std::ostream& out,
              std::ostream& err);

struct EvalCmdOptions {
    std::string algo = "components"; // baseline | components
    std::optional<std::string> projection; // set | bag
    bool parallel = false;
    bool json = false;
    std::optional<std::string> dump_path;
};

int cmd_eval(const std::string& instance_path, const std::string& db_path,
             const EvalCmdOptions& opts, std::ostream& out, std::ostream& err);

struct VerifyCmdOptions {
    std::optional<long> n_value; // product N override
    bool json = false;
};

int cmd_verify(const std::string& instance_path, const VerifyCmdOptions& opts, std::ostream& out,
               std::ostream& err);

// Integral coloring scaled out of the coloring LP certificate; the
// database it generates meets the coloring bound exactly.
Coloring coloring_from_certificate(const Schema& schema, const BoundReport& coloring_report);

// GF(2) embedding of the same integral coloring (V_x spanned by the
// unit vectors of its colors), for the dualized system construction.
VectorSpaceColoring vspace_coloring_from(const Schema& schema, const Coloring& f, const Query& q);

} // namespace joinbound
