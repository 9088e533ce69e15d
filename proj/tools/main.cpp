// auxeng command-line tool.

#include <CLI11.hpp>

#include "auxeng/cli.hpp"

int main(int argc, char** argv) {
    using namespace auxeng::cli;
    CLI::App app{"Engineer nonlinear couplings with auxiliary qubits"};
    app.set_version_flag("--version", AUXENG_VERSION);
    app.require_subcommand(1, 1);

    RunConfig rc;
    std::string format = "both";
    int order = 0, samples = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", rc.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--fixture", rc.fixture, "Built-in fixture name")
            ->check(CLI::IsMember(auxeng::fixture_names()));
        sub->add_option("--seed", rc.seed, "Random seed");
        sub->add_option("--out,--output-dir", rc.output_dir, "Directory for records and tables");
        sub->add_option("--format", format, "jsonl, csv or both")->check(CLI::IsMember({"jsonl", "structured-text", "csv", "both"}));
        sub->add_option("--order", order, "Maximum expansion order")->check(CLI::Range(1, auxeng::kMaxExpansionOrder));
        sub->add_option("--samples", samples, "Noise samples")->check(CLI::PositiveNumber);
        sub->add_option("--threads", rc.threads, "Worker threads (0: hardware)");
    };

    CLI::App* cmds[] = {
        app.add_subcommand("expand", "Perturbative expansion of the auxiliary energies"),
        app.add_subcommand("conditions", "Elimination residuals for a configuration"),
        app.add_subcommand("search", "Search for auxiliary designs"),
        app.add_subcommand("robustness", "Noise sensitivity and decay shifts"),
        app.add_subcommand("dynamics", "Joint resonator-auxiliary simulation"),
        app.add_subcommand("reproduce", "Check published and derived values"),
    };
    for (auto* c : cmds) add_common(c);
    cmds[5]->add_flag("--all", rc.all, "Check every fixture");
    cmds[5]->add_option("--candidates", rc.candidates_path, "Re-verify a search log")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    for (auto* c : cmds)
        if (c->parsed()) rc.command = c->get_name();
    rc.format = format_from_string(format);
    if (order > 0) rc.order = order;
    if (samples > 0) rc.samples = samples;
    return run(rc);
}
