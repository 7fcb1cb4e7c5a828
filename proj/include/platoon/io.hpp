#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "platoon/bounds.hpp"
#include "platoon/dss_conditions.hpp"
#include "platoon/platoon_model.hpp"
#include "platoon/simulator.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

// Parsed CSV: one header row, then rows of cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws ConfigError for unknown columns or non-numeric cells.
    [[nodiscard]] std::size_t column_index(std::string_view name) const;
    [[nodiscard]] std::vector<double> numeric_column(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> text_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// t, then per vehicle q_i, v_i, zeta_i, u_i, a_i, d_i, e_gap_i.
std::string trajectory_csv(const Trajectory& traj, const ErrorMetrics& metrics);

// t, sup_err, sup_err_z (c2 only), then one bound_<kind> column per bound.
std::string metrics_csv(const Trajectory& traj, const ErrorMetrics& metrics, std::span<const DssBound> bounds);

// Long format: t, bound_value, kind.
std::string bound_curves_csv(std::span<const double> t_grid, std::span<const DssBound> bounds);

// N, worst_sup_err, bound_envelope.
std::string sweep_csv(std::span<const SweepRow> rows);

// One row per vehicle with every field of its setup; round-trips through
// read_scenario_csv together with the platoon-level fields.
std::string scenario_csv(const PlatoonConfig& cfg);
PlatoonConfig scenario_from_csv(const CsvTable& table);

nlohmann::ordered_json certificate_json(const ConditionReport& r);

// Gains section followed by a [certificate] section; identical bytes for
// identical inputs.
std::string gains_record(const GainSet& g, const ConditionReport& r);

// gnuplot script drawing the error norm against the bounds.
std::string gnuplot_script(std::string_view metrics_file, std::span<const DssBound> bounds, bool has_z);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace platoon
