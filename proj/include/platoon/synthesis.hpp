#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dss_conditions.hpp"

namespace platoon {

inline constexpr std::size_t kGainCount = 14;

// Field names in declaration order of GainSet; also the config keys.
const std::array<std::string_view, kGainCount>& gain_names();

std::optional<std::size_t> gain_index(std::string_view name);

// Throws std::invalid_argument for unknown names.
double get_gain(const GainSet& g, std::string_view name);
void set_gain(GainSet& g, std::string_view name, double value);

std::array<double, kGainCount> to_array(const GainSet& g);
GainSet from_array(const std::array<double, kGainCount>& values);

struct Box {
    double lo = 0.0;
    double hi = 0.0;
};

/**
 * Search space and budget for gain synthesis.
 *
 * Defaults: every controller gain in [1e-4, 10], alpha and beta in [-2, 2],
 * eps pinned to 1.
 */
struct SearchSpec {
    std::array<Box, kGainCount> boxes{};
    std::array<std::optional<double>, kGainCount> fixed{};
    std::optional<GainSet> initial;
    std::size_t n_starts = 8;
    std::size_t max_iters = 200;
    std::uint64_t seed = 1;
    double shrink = 0.5;
    double init_step = 0.25;
    double min_step = 1e-4;

    SearchSpec();

    void set_box(std::string_view name, double lo, double hi);
    void pin(std::string_view name, double value);
    void pin_all(const GainSet& g);

    // Effective range of a parameter: the pinned value or its box.
    [[nodiscard]] Box range(std::size_t idx) const;

    // Throws DomainError on empty boxes, n_starts == 0 or a bad shrink factor.
    void validate() const;
};

struct SynthesisResult {
    bool feasible = false;
    // Best point found. Only a valid, certified gain set when feasible.
    GainSet gains;
    ConditionReport report;
    // Certified rate when feasible, minus the infeasibility penalty otherwise.
    double score = 0.0;
    std::size_t evaluations = 0;
};

// max(0, -c^2) + max(0, eps - (c^2/b - 1)) + max(0, -last-vehicle margin).
double infeasibility_penalty(const ConditionReport& r);

/**
 * Multi-start coordinate pattern search maximizing the certified margin.
 *
 * Every candidate is scored through check_conditions only. Each iteration
 * tries +/- step on every free coordinate and moves to the best improvement;
 * without one, steps shrink by `shrink` until they fall under min_step of
 * the box width. Start 0 is `initial` when given, the others are drawn from
 * the seed. Deterministic for a fixed spec.
 */
SynthesisResult synthesize(const SearchSpec& spec);

struct LandscapePoint {
    double value = 0.0;
    double cbar_sq = 0.0;
    bool feasible = false;
};

// One-parameter sweep of the certificate around `gains`.
std::vector<LandscapePoint> margin_landscape(const GainSet& gains, std::string_view param,
                                             std::span<const double> grid);

}  // namespace platoon
