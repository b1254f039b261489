#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "joinbound/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Worst-case join size bounds, worst-case database synthesis, and "
                 "minimal-component join evaluation"};
    app.require_subcommand(1);

    // bound
    std::string bound_instance, bound_method = "polymatroid";
    bool bound_json = false;
    CLI::App* bound = app.add_subcommand("bound", "Compute an output-size bound");
    bound->add_option("instance", bound_instance, "instance file (JSON)")->required();
    bound->add_option("--method", bound_method, "agm|packing|polymatroid|coloring")
        ->default_val("polymatroid");
    bound->add_flag("--json", bound_json, "machine-readable report");

    // synth
    std::string synth_instance;
    joinbound::SynthCmdOptions synth_opts;
    std::string synth_params, synth_out;
    long synth_n = 0, synth_k = 0;
    CLI::App* synth = app.add_subcommand("synth", "Synthesize a worst-case database");
    synth->add_option("instance", synth_instance, "instance file (JSON)")->required();
    synth->add_option("--construction", synth_opts.construction,
                      "product|coloring|vspace|permutation")
        ->required();
    synth->add_option("--params", synth_params, "construction parameter file (JSON)");
    synth->add_option("--N", synth_n, "product N / coloring value-set size");
    synth->add_option("--k", synth_k, "permutation matrix rows (multiple of the base denominator)");
    synth->add_flag("--count-only", synth_opts.count_only, "closed-form sizes only");
    synth->add_option("--out", synth_out, "output database file");
    synth->add_flag("--json", synth_opts.json, "machine-readable report");

    // eval
    std::string eval_instance, eval_db;
    joinbound::EvalCmdOptions eval_opts;
    std::string eval_projection, eval_dump;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate the query on a database");
    eval->add_option("instance", eval_instance, "instance file (JSON)")->required();
    eval->add_option("database", eval_db, "database file (JSON)")->required();
    eval->add_option("--algo", eval_opts.algo, "baseline|components")->default_val("components");
    eval->add_option("--free-projection", eval_projection, "set|bag");
    eval->add_flag("--parallel", eval_opts.parallel, "OpenMP extension loop");
    eval->add_option("--dump", eval_dump, "write the result table to a file");
    eval->add_flag("--json", eval_opts.json, "machine-readable report");

    // verify
    std::string verify_instance;
    joinbound::VerifyCmdOptions verify_opts;
    long verify_n = 0;
    bool verify_json = false;
    CLI::App* verify =
        app.add_subcommand("verify", "Bounds + constructions + sandwich cross-check");
    verify->add_option("instance", verify_instance, "instance file (JSON)")->required();
    verify->add_option("--N", verify_n, "product construction N");
    verify->add_flag("--json", verify_json, "machine-readable report");

    CLI11_PARSE(app, argc, argv);

    if (bound->parsed())
        return joinbound::cmd_bound(bound_instance, bound_method, bound_json, std::cout,
                                    std::cerr);
    if (synth->parsed()) {
        if (!synth_params.empty())
            synth_opts.params_path = synth_params;
        if (!synth_out.empty())
            synth_opts.out_path = synth_out;
        if (synth->count("--N"))
            synth_opts.n_value = synth_n;
        if (synth->count("--k"))
            synth_opts.k_value = synth_k;
        return joinbound::cmd_synth(synth_instance, synth_opts, std::cout, std::cerr);
    }
    if (eval->parsed()) {
        if (!eval_projection.empty())
            eval_opts.projection = eval_projection;
        if (!eval_dump.empty())
            eval_opts.dump_path = eval_dump;
        return joinbound::cmd_eval(eval_instance, eval_db, eval_opts, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        if (verify->count("--N"))
            verify_opts.n_value = verify_n;
        verify_opts.json = verify_json;
        return joinbound::cmd_verify(verify_instance, verify_opts, std::cout, std::cerr);
    }
    return 0;
}
