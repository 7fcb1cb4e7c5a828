#include "platoon/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "platoon/errors.hpp"
#include "platoon/io.hpp"

namespace platoon::cli {

namespace {

namespace fs = std::filesystem;

const GainSet& require_gains(const RunConfig& cfg) {
    if (!cfg.gains) throw ConfigError(fmt::format("{}: missing [gains] section", cfg.id));
    return *cfg.gains;
}

// Shared error-to-exit-code mapping for every command.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        fmt::print(err, "error: {} (vehicle {}, t = {})\n", e.what(), e.vehicle(), e.time());
        return kDiverged;
    } catch (const ConfigError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kInputError;
    } catch (const DomainError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kInputError;
    } catch (const std::invalid_argument& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kInputError;
    }
}

std::vector<DssBound> make_bounds(const RunConfig& cfg, const PlatoonConfig& scenario, const GainSet& gains,
                                  const ConditionReport& report) {
    std::vector<DssBound> bounds;
    if (!(report.certified_rate() > 0.0)) return bounds;
    const BoundInputs in = bound_inputs(scenario, gains, report);
    for (BoundKind k : cfg.bounds) bounds.push_back({k, in});
    return bounds;
}

std::string run_name(const RunConfig& cfg) { return fmt::format("{}_{}", cfg.id, to_string(cfg.sim.variant)); }

}  // namespace

RunConfig resolve(const Options& opts) {
    RunConfig cfg = load_config(opts.config);
    if (opts.variant) cfg.sim.variant = *opts.variant;
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.search.seed = *opts.seed;
    }
    if (opts.dt) cfg.sim.dt = *opts.dt;
    if (opts.t_end) cfg.sim.t_end = *opts.t_end;
    if (opts.out) cfg.out_dir = *opts.out;
    if (const char* env = std::getenv("PLATOON_DSS_OUT"); env && *env) cfg.out_dir = env;
    if (opts.n_list) cfg.n_list = *opts.n_list;
    if (opts.channel) cfg.sim.channel = *opts.channel;
    if (!(cfg.sim.dt > 0.0) || !(cfg.sim.t_end >= cfg.sim.dt)) {
        throw ConfigError("dt must be positive and t_end at least dt");
    }
    return cfg;
}

int cmd_certify(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve(opts);
        const GainSet& gains = require_gains(cfg);
        const ConditionReport report = check_conditions(gains);
        const std::string text = format_report(report);
        fmt::print(out, "{}", text);

        const fs::path dir(cfg.out_dir);
        write_text(dir / (cfg.id + "_report.txt"), text);
        write_text(dir / (cfg.id + "_certificate.json"), certificate_json(report).dump(2) + "\n");
        return report.feasible() ? kSuccess : kInfeasible;
    });
}

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve(opts);
        const GainSet& gains = require_gains(cfg);
        const PlatoonConfig scenario = sample_scenario(cfg.scenario, cfg.seed);
        const ScenarioRun run = run_scenario(scenario, gains, cfg.sim);
        const std::vector<DssBound> bounds = make_bounds(cfg, scenario, gains, run.report);

        const fs::path dir(cfg.out_dir);
        const std::string name = run_name(cfg);
        write_text(dir / (name + "_trajectory.csv"), trajectory_csv(run.trajectory, run.metrics));
        write_text(dir / (name + "_metrics.csv"), metrics_csv(run.trajectory, run.metrics, bounds));
        write_text(dir / (name + "_bounds.csv"), bound_curves_csv(run.trajectory.times, bounds));
        write_text(dir / (name + "_scenario.csv"), scenario_csv(scenario));
        write_text(dir / (name + "_plot.gp"),
                   gnuplot_script(name + "_metrics.csv", bounds, !run.metrics.sup_err_z.empty()));

        fmt::print(out, "run {}: N = {}, variant {}, dt = {}, t_end = {}, seed = {}\n", name,
                   scenario.n_vehicles(), to_string(cfg.sim.variant), cfg.sim.dt, cfg.sim.t_end, cfg.seed);
        fmt::print(out, "certificate: {} (cbar^2 = {:.6g}, K = {:.6g})\n",
                   run.report.feasible() ? "feasible" : "infeasible", run.report.cbar_sq, run.report.gain_k);
        fmt::print(out, "{:>8} {:>14} {:>14} {:>14}\n", "vehicle", "terminal_gap", "peak_gap", "terminal_dv");
        for (std::size_t i = 0; i < scenario.n_vehicles(); ++i) {
            fmt::print(out, "{:>8} {:>14.6e} {:>14.6e} {:>14.6e}\n", i + 1, run.metrics.terminal_gap_err[i],
                       run.metrics.peak_gap_err[i], run.metrics.terminal_speed_err[i]);
        }

        bool violated = false;
        for (const DssBound& b : bounds) {
            std::optional<ErrorNorm> norm;
            if (b.kind == BoundKind::original) norm = ErrorNorm::original_x;
            if (b.kind == BoundKind::augmented && cfg.sim.variant == Variant::c2) norm = ErrorNorm::augmented_z;
            if (!norm || cfg.sim.variant != Variant::c2) continue;
            const BoundCheck check = verify_bound(run, b, *norm, cfg.sim.dt);
            fmt::print(out, "bound {}: {} (max excess {:.6e} at t = {:.4g}){}\n", to_string(b.kind),
                       check.holds ? "holds" : "VIOLATED", check.max_violation, check.argmax_t,
                       run.certified ? "" : " [not certified for this run]");
            violated = violated || (run.certified && !check.holds);
        }
        if (bounds.empty()) fmt::print(out, "bounds: not evaluated (gains not certified)\n");
        fmt::print(out, "outputs written to {}\n", dir.string());
        return violated ? kInfeasible : kSuccess;
    });
}

int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve(opts);
        const GainSet& gains = require_gains(cfg);
        gains.validate();
        ScenarioTemplate base = cfg.scenario;
        base.pattern = cfg.sweep_pattern;
        const std::vector<SweepRow> rows = string_sweep(base, cfg.seed, gains, cfg.sim, cfg.n_list);

        const fs::path dir(cfg.out_dir);
        write_text(dir / (run_name(cfg) + "_sweep.csv"), sweep_csv(rows));
        fmt::print(out, "{:>6} {:>16} {:>16}\n", "N", "worst_sup_err", "bound_envelope");
        bool violated = false;
        for (const SweepRow& r : rows) {
            fmt::print(out, "{:>6} {:>16.8g} {:>16.8g}\n", r.n_vehicles, r.worst_sup_err, r.bound_envelope);
            violated = violated || r.worst_sup_err > r.bound_envelope;
        }
        return violated ? kInfeasible : kSuccess;
    });
}

int cmd_synthesize(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve(opts);
        const SynthesisResult result = synthesize(cfg.search);
        const ConditionReport recheck = check_conditions(result.gains);

        const fs::path dir(cfg.out_dir);
        if (!result.feasible) {
            fmt::print(out, "no feasible gain set found after {} evaluations\n", result.evaluations);
            fmt::print(out, "best infeasibility penalty: {:.6e}\n", -result.score);
            fmt::print(out, "{}", format_report(recheck));
            write_text(dir / (cfg.id + "_infeasible.cfg"), gains_record(result.gains, recheck));
            return kInfeasible;
        }
        const std::string record = gains_record(result.gains, recheck);
        write_text(dir / (cfg.id + "_gains.cfg"), record);
        write_text(dir / (cfg.id + "_certificate.json"), certificate_json(recheck).dump(2) + "\n");
        fmt::print(out, "{}\n{}", record, format_report(recheck));
        fmt::print(out, "evaluations: {}\n", result.evaluations);
        return recheck.feasible() ? kSuccess : kInfeasible;
    });
}

}  // namespace platoon::cli
