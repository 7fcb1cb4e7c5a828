#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "platoon/cli.hpp"

namespace {

void add_common(CLI::App& cmd, platoon::cli::Options& opts, std::string& variant, std::string& channel,
                std::string& n_list) {
    cmd.add_option("--config", opts.config, "Config file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--variant", variant, "Controller variant: c1 (no integral action) or c2");
    cmd.add_option("--seed", opts.seed, "Scenario (and search) seed");
    cmd.add_option("--dt", opts.dt, "Integration step [s]");
    cmd.add_option("--t-end", opts.t_end, "Horizon [s]");
    cmd.add_option("--out", opts.out, "Output directory (PLATOON_DSS_OUT takes precedence)");
    cmd.add_option("--n-list", n_list, "Comma-separated platoon lengths for sweep");
    cmd.add_option("--toggle-disturbance-channel", channel, "Disturbance channel: accel or force");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify, synthesize and simulate integral-action platoon controllers"};
    app.require_subcommand(1);

    platoon::cli::Options opts;
    std::string variant;
    std::string channel;
    std::string n_list;

    auto* certify = app.add_subcommand("certify", "Check the stability conditions for the configured gains");
    auto* simulate = app.add_subcommand("simulate", "Simulate the configured scenario and check the error bounds");
    auto* sweep = app.add_subcommand("sweep", "Worst error norm across platoon lengths");
    auto* synthesize = app.add_subcommand("synthesize", "Search for certified gains");
    for (auto* cmd : {certify, simulate, sweep, synthesize}) add_common(*cmd, opts, variant, channel, n_list);

    try {
        app.parse(argc, argv);
        if (!variant.empty()) {
            opts.variant = platoon::parse_variant(variant);
            if (!opts.variant) throw CLI::ValidationError("--variant", "expected c1 or c2");
        }
        if (!channel.empty()) {
            opts.channel = platoon::parse_channel(channel);
            if (!opts.channel) throw CLI::ValidationError("--toggle-disturbance-channel", "expected accel or force");
        }
        if (app.get_subcommands().front()->count("--n-list") > 0) {
            opts.n_list = platoon::parse_size_list(n_list, "--n-list");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : platoon::cli::kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return platoon::cli::kInputError;
    }

    if (*certify) return platoon::cli::cmd_certify(opts, std::cout, std::cerr);
    if (*simulate) return platoon::cli::cmd_simulate(opts, std::cout, std::cerr);
    if (*sweep) return platoon::cli::cmd_sweep(opts, std::cout, std::cerr);
    return platoon::cli::cmd_synthesize(opts, std::cout, std::cerr);
}
