#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "platoon/config.hpp"

namespace platoon::cli {

// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kInfeasible = 1,  // infeasible certificate or a violated bound
    kInputError = 2,
    kDiverged = 3,
};

// Command-line overrides applied on top of the config file.
struct Options {
    std::filesystem::path config;
    std::optional<Variant> variant;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> out;
    std::optional<std::vector<std::size_t>> n_list;
    std::optional<DisturbanceChannel> channel;
};

// Loads the config and applies overrides; PLATOON_DSS_OUT beats --out.
RunConfig resolve(const Options& opts);

int cmd_certify(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_synthesize(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace platoon::cli
