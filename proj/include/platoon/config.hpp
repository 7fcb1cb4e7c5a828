#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/bounds.hpp"
#include "platoon/controller.hpp"
#include "platoon/platoon_model.hpp"
#include "platoon/simulator.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

/**
 * Everything one invocation of the command-line tool needs.
 *
 * Text form is INI with four sections; `;` starts a comment. Unknown keys are
 * rejected so that typos surface as errors instead of silent defaults.
 *
 *   [scenario]   template fields of ScenarioTemplate plus `seed`
 *   [gains]      all fourteen GainSet fields (required for certify/simulate)
 *   [run]        id, variant, dt, t_end, out, disturbance_channel, bounds,
 *                n_list, sweep_pattern
 *   [synthesis]  n_starts, max_iters, seed, shrink, init_step, min_step,
 *                start_from_gains, box_<gain> = lo,hi and fix_<gain> = value
 */
struct RunConfig {
    std::string id = "run";
    ScenarioTemplate scenario;
    std::uint64_t seed = 1;
    std::optional<GainSet> gains;
    SimOptions sim;
    std::string out_dir = "out";
    std::vector<BoundKind> bounds{BoundKind::original, BoundKind::total_disturbance, BoundKind::augmented};
    std::vector<std::size_t> n_list{3, 5, 10, 20, 40};
    DrawPattern sweep_pattern = DrawPattern::alternating;
    SearchSpec search;
};

// `source` names the input in diagnostics. Throws ConfigError.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

std::string format_config(const RunConfig& cfg);

// Comma-separated lists, e.g. "3,5,10". Throws ConfigError naming `field`.
std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view field);

std::string_view to_string(Variant v);
std::string_view to_string(DisturbanceChannel c);
std::string_view to_string(DrawPattern p);
std::optional<Variant> parse_variant(std::string_view s);
std::optional<DisturbanceChannel> parse_channel(std::string_view s);
std::optional<DrawPattern> parse_pattern(std::string_view s);

// [gains] section text with every value printed round-trip exact.
std::string format_gains(const GainSet& g);

}  // namespace platoon
