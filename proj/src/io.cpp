#include "platoon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "platoon/config.hpp"
#include "platoon/errors.hpp"

namespace platoon {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

double cell_to_double(const std::string& s, std::string_view column, std::size_t row) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("csv: column {} row {}: '{}' is not a number", column, row + 1, s));
    }
    return value;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::size_t CsvTable::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    throw ConfigError(fmt::format("csv: no column named '{}'", name));
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(cell_to_double(rows[r][j], name, r));
    return out;
}

std::vector<std::string> CsvTable::text_column(std::string_view name) const {
    const std::size_t j = column_index(name);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[j]);
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (first) {
            table.header = std::move(cells);
            first = false;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ConfigError(fmt::format("csv: line {} has {} cells, header has {}", line_no, cells.size(),
                                          table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (first) throw ConfigError("csv: missing header row");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("{}: cannot open", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string trajectory_csv(const Trajectory& traj, const ErrorMetrics& metrics) {
    const std::size_t n = traj.n_vehicles;
    fmt::memory_buffer out;
    fmt::format_to(std::back_inserter(out), "t");
    for (std::size_t i = 1; i <= n; ++i) {
        fmt::format_to(std::back_inserter(out), ",q_{0},v_{0},zeta_{0},u_{0},a_{0},d_{0},e_gap_{0}", i);
    }
    out.push_back('\n');
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        fmt::format_to(std::back_inserter(out), "{}", num(traj.times[k]));
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t idx = k * n + (i - 1);
            const AugmentedState& s = traj.states[idx];
            fmt::format_to(std::back_inserter(out), ",{},{},{},{},{},{},{}", num(s.q), num(s.v), num(s.zeta),
                           num(traj.control[idx]), num(traj.acceleration[idx]), num(traj.disturbance[idx]),
                           num(metrics.gap_err[idx]));
        }
        out.push_back('\n');
    }
    return fmt::to_string(out);
}

std::string metrics_csv(const Trajectory& traj, const ErrorMetrics& metrics, std::span<const DssBound> bounds) {
    const bool has_z = !metrics.sup_err_z.empty();
    fmt::memory_buffer out;
    fmt::format_to(std::back_inserter(out), "t,sup_err");
    if (has_z) fmt::format_to(std::back_inserter(out), ",sup_err_z");
    for (const DssBound& b : bounds) fmt::format_to(std::back_inserter(out), ",bound_{}", to_string(b.kind));
    out.push_back('\n');
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        fmt::format_to(std::back_inserter(out), "{},{}", num(t), num(metrics.sup_err[k]));
        if (has_z) fmt::format_to(std::back_inserter(out), ",{}", num(metrics.sup_err_z[k]));
        for (const DssBound& b : bounds) fmt::format_to(std::back_inserter(out), ",{}", num(eval_bound(b, t)));
        out.push_back('\n');
    }
    return fmt::to_string(out);
}

std::string bound_curves_csv(std::span<const double> t_grid, std::span<const DssBound> bounds) {
    fmt::memory_buffer out;
    fmt::format_to(std::back_inserter(out), "t,bound_value,kind\n");
    for (const DssBound& b : bounds) {
        for (const BoundPoint& p : bound_curve(b, t_grid)) {
            fmt::format_to(std::back_inserter(out), "{},{},{}\n", num(p.t), num(p.value), to_string(b.kind));
        }
    }
    return fmt::to_string(out);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "N,worst_sup_err,bound_envelope\n";
    for (const SweepRow& r : rows) {
        out += fmt::format("{},{},{}\n", r.n_vehicles, num(r.worst_sup_err), num(r.bound_envelope));
    }
    return out;
}

std::string scenario_csv(const PlatoonConfig& cfg) {
    std::string out =
        "vehicle,gap,mass_true,mass_nominal,w_bar,amp,decay,freq,q0,v0,zeta0,leader_speed,leader_initial_position,"
        "seed\n";
    for (std::size_t i = 0; i < cfg.n_vehicles(); ++i) {
        const VehicleSetup& s = cfg.per_vehicle[i];
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i + 1, num(cfg.gaps[i]),
                           num(s.params.mass_true), num(s.params.mass_nominal), num(s.disturbance.w_bar),
                           num(s.disturbance.amp), num(s.disturbance.decay), num(s.disturbance.freq),
                           num(s.initial.q), num(s.initial.v), num(s.initial.zeta), num(cfg.leader_speed),
                           num(cfg.leader_initial_position), cfg.seed);
    }
    return out;
}

PlatoonConfig scenario_from_csv(const CsvTable& table) {
    if (table.rows.empty()) throw ConfigError("scenario csv: no vehicles");
    PlatoonConfig cfg;
    cfg.gaps = table.numeric_column("gap");
    const auto mass_true = table.numeric_column("mass_true");
    const auto mass_nominal = table.numeric_column("mass_nominal");
    const auto w_bar = table.numeric_column("w_bar");
    const auto amp = table.numeric_column("amp");
    const auto decay = table.numeric_column("decay");
    const auto freq = table.numeric_column("freq");
    const auto q0 = table.numeric_column("q0");
    const auto v0 = table.numeric_column("v0");
    const auto zeta0 = table.numeric_column("zeta0");
    cfg.leader_speed = table.numeric_column("leader_speed").front();
    cfg.leader_initial_position = table.numeric_column("leader_initial_position").front();
    const std::string seed = table.text_column("seed").front();
    std::from_chars(seed.data(), seed.data() + seed.size(), cfg.seed);
    for (std::size_t i = 0; i < cfg.gaps.size(); ++i) {
        cfg.per_vehicle.push_back(
            {{mass_true[i], mass_nominal[i]}, {w_bar[i], amp[i], decay[i], freq[i]}, {q0[i], v0[i], zeta0[i]}});
    }
    cfg.validate();
    return cfg;
}

nlohmann::ordered_json certificate_json(const ConditionReport& r) {
    nlohmann::ordered_json j;
    j["c_sq"] = r.c_sq;
    j["b"] = r.b;
    j["b_eps_weighted"] = r.b_eps_weighted;
    j["eps"] = r.eps;
    j["eps_max_allowed"] = r.eps_max_allowed;
    j["cbar_sq"] = r.cbar_sq;
    j["tail_c_sq"] = r.tail_c_sq;
    j["tail_cbar_sq"] = r.tail_cbar_sq;
    j["gain_k"] = r.gain_k;
    j["flags"] = {{"equilibrium", r.c1_ok}, {"contraction", r.c2_ok}, {"symmetry", r.c3_ok},
                  {"feasible", r.feasible()}};
    j["equilibrium_residual"] = r.c1_residual;
    j["worst_vertex"] = {{"s_h", r.worst_vertex.s_h}, {"s_g", r.worst_vertex.s_g}};
    j["worst_norm_vertex"] = {{"s_h", r.worst_norm_vertex.s_h}, {"s_g", r.worst_norm_vertex.s_g}};
    return j;
}

std::string gains_record(const GainSet& g, const ConditionReport& r) {
    std::string out = format_gains(g);
    out += "\n; certificate recomputed from the gains above\n";
    out += fmt::format("; feasible = {}\n", r.feasible() ? "true" : "false");
    out += fmt::format("; c_sq = {}\n", num(r.c_sq));
    out += fmt::format("; b = {}\n", num(r.b));
    out += fmt::format("; cbar_sq = {}\n", num(r.cbar_sq));
    out += fmt::format("; tail_cbar_sq = {}\n", num(r.tail_cbar_sq));
    out += fmt::format("; gain_k = {}\n", num(r.gain_k));
    return out;
}

std::string gnuplot_script(std::string_view metrics_file, std::span<const DssBound> bounds, bool has_z) {
    std::string out = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't [s]'\n";
    out += "set ylabel 'error norm'\nset logscale y\n";
    out += fmt::format("plot '{}' using 1:2 with lines", metrics_file);
    int col = has_z ? 4 : 3;
    if (has_z) out += fmt::format(", '' using 1:3 with lines");
    for (std::size_t i = 0; i < bounds.size(); ++i, ++col) out += fmt::format(", '' using 1:{} with lines", col);
    out += "\npause -1\n";
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("{}: cannot open for writing", path.string()));
    out << text;
    if (!out) throw ConfigError(fmt::format("{}: write failed", path.string()));
}

}  // namespace platoon
