#include "platoon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

ClosedLoop::ClosedLoop(PlatoonConfig cfg, GainSet gains, SimOptions opts)
    : cfg_(std::move(cfg)), gains_(gains), opts_(opts) {
    cfg_.validate();
    spacing_.resize(cfg_.n_vehicles());
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg_.n_vehicles(); ++i) {
        sum += cfg_.gaps[i];
        spacing_[i] = sum;
    }
}

std::vector<double> ClosedLoop::initial_state() const {
    std::vector<double> x;
    x.reserve(dimension());
    for (const VehicleSetup& s : cfg_.per_vehicle) {
        x.push_back(s.initial.q);
        x.push_back(s.initial.v);
        x.push_back(opts_.variant == Variant::c2 ? s.initial.zeta : 0.0);
    }
    return x;
}

NeighborView ClosedLoop::view(std::size_t i, double t, std::span<const double> x) const {
    const std::size_t n = cfg_.n_vehicles();
    NeighborView v;
    v.leader = leader_state(t, cfg_);
    v.pred = i == 1 ? v.leader : VehicleState{x[3 * (i - 2)], x[3 * (i - 2) + 1]};
    v.gap_pred = cfg_.gaps[i - 1];
    if (i < n) {
        v.foll = VehicleState{x[3 * i], x[3 * i + 1]};
        v.gap_foll = cfg_.gaps[i];
    }
    v.gap_leader = spacing_[i - 1];
    return v;
}

double ClosedLoop::force(std::size_t i, double t, std::span<const double> x) const {
    const std::size_t o = 3 * (i - 1);
    return control_input(gains_, {x[o], x[o + 1]}, view(i, t, x), x[o + 2],
                         cfg_.per_vehicle[i - 1].params.mass_nominal, opts_.variant);
}

void ClosedLoop::operator()(double t, std::span<const double> x, std::span<double> dxdt) const {
    const std::size_t n = cfg_.n_vehicles();
    if (x.size() != 3 * n || dxdt.size() != 3 * n) {
        throw DimensionError(fmt::format("closed loop: expected state of size {}, got {}", 3 * n, x.size()));
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k]) || std::abs(x[k]) > kDivergenceLimit) {
            throw DivergenceError(k / 3 + 1, t,
                                  fmt::format("simulation diverged: vehicle {} state component {} is {} at t = {}",
                                              k / 3 + 1, k % 3, x[k], t));
        }
    }

    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t o = 3 * (i - 1);
        const VehicleSetup& s = cfg_.per_vehicle[i - 1];
        const VehicleState self{x[o], x[o + 1]};
        const NeighborView nv = view(i, t, x);
        const double u = control_input(gains_, self, nv, x[o + 2], s.params.mass_nominal, opts_.variant);
        const double d = disturbance_value(s.disturbance, t);

        dxdt[o] = self.v;
        dxdt[o + 1] = opts_.channel == DisturbanceChannel::acceleration
                          ? u / s.params.mass_true + d
                          : (u + s.params.mass_nominal * d) / s.params.mass_true;
        dxdt[o + 2] = opts_.variant == Variant::c2 ? integral_rate(gains_, self, nv) : 0.0;
    }
}

std::vector<double> closed_loop_rhs(double t, std::span<const double> x, const PlatoonConfig& cfg,
                                    const GainSet& gains, const SimOptions& opts) {
    const ClosedLoop loop(cfg, gains, opts);
    std::vector<double> dxdt(loop.dimension());
    loop(t, x, dxdt);
    return dxdt;
}

OdeSolution integrate_rk4(const OdeRhs& rhs, std::span<const double> x0, double dt, double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrate_rk4: dt must be positive");
    if (!(t_end >= dt)) throw DomainError("integrate_rk4: t_end must be at least dt");
    const double ratio = t_end / dt;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
        throw DomainError(fmt::format("integrate_rk4: t_end = {} is not a multiple of dt = {}", t_end, dt));
    }

    const std::size_t n = x0.size();
    OdeSolution sol;
    sol.dim = n;
    sol.times.resize(steps + 1);
    sol.states.resize((steps + 1) * n);
    std::copy(x0.begin(), x0.end(), sol.states.begin());
    sol.times[0] = 0.0;

    std::vector<double> x(x0.begin(), x0.end()), tmp(n), k1(n), k2(n), k3(n), k4(n);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        rhs(t, x, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k1[j];
        rhs(t + 0.5 * dt, tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * dt * k2[j];
        rhs(t + 0.5 * dt, tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + dt * k3[j];
        rhs(t + dt, tmp, k4);
        for (std::size_t j = 0; j < n; ++j) x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        sol.times[step + 1] = static_cast<double>(step + 1) * dt;
        std::copy(x.begin(), x.end(), sol.states.begin() + static_cast<std::ptrdiff_t>((step + 1) * n));
    }
    return sol;
}

ErrorMetrics compute_metrics(const Trajectory& traj, const PlatoonConfig& cfg, const GainSet& gains,
                             Variant variant) {
    const std::size_t n = traj.n_vehicles;
    const std::size_t steps = traj.times.size();
    ErrorMetrics m;
    m.sup_err.resize(steps);
    m.gap_err.resize(steps * n);
    if (variant == Variant::c2) m.sup_err_z.resize(steps);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = traj.times[k];
        double sup_x = 0.0;
        double sup_z = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const AugmentedState& s = traj.state(k, i);
            const VehicleState want = desired_state(i, t, cfg);
            const double dq = s.q - want.q;
            const double dv = s.v - want.v;
            sup_x = std::max(sup_x, std::hypot(dq, dv));
            if (variant == Variant::c2) {
                const double xi = shifted_integral(s.zeta, cfg.per_vehicle[i - 1].disturbance.w_bar, gains.k_int);
                sup_z = std::max(sup_z, std::sqrt(dq * dq + dv * dv + xi * xi));
            }
            const double pred_q = i == 1 ? traj.leader[k].q : traj.state(k, i - 1).q;
            m.gap_err[k * n + (i - 1)] = pred_q - s.q - cfg.gaps[i - 1];
        }
        m.sup_err[k] = sup_x;
        if (variant == Variant::c2) m.sup_err_z[k] = sup_z;
    }

    m.terminal_gap_err.resize(n);
    m.peak_gap_err.assign(n, 0.0);
    m.terminal_speed_err.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.terminal_gap_err[i] = m.gap_err[(steps - 1) * n + i];
        m.terminal_speed_err[i] = traj.state(steps - 1, i + 1).v - traj.leader[steps - 1].v;
        for (std::size_t k = 0; k < steps; ++k) {
            const double e = m.gap_err[k * n + i];
            if (std::abs(e) > std::abs(m.peak_gap_err[i])) m.peak_gap_err[i] = e;
        }
    }
    return m;
}

ScenarioRun run_scenario(const PlatoonConfig& cfg, const GainSet& gains, const SimOptions& opts) {
    gains.validate();
    const ClosedLoop loop(cfg, gains, opts);
    const std::vector<double> x0 = loop.initial_state();
    const OdeSolution sol =
        integrate_rk4([&loop](double t, std::span<const double> x, std::span<double> dx) { loop(t, x, dx); }, x0,
                      opts.dt, opts.t_end);

    const std::size_t n = cfg.n_vehicles();
    const std::size_t steps = sol.times.size();
    ScenarioRun run;
    Trajectory& traj = run.trajectory;
    traj.times = sol.times;
    traj.n_vehicles = n;
    traj.states.resize(steps * n);
    traj.control.resize(steps * n);
    traj.acceleration.resize(steps * n);
    traj.disturbance.resize(steps * n);
    traj.leader.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = sol.times[k];
        const std::span<const double> x = sol.at(k);
        traj.leader[k] = leader_state(t, cfg);
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t o = 3 * (i - 1);
            const std::size_t idx = k * n + (i - 1);
            const VehicleSetup& s = cfg.per_vehicle[i - 1];
            traj.states[idx] = {x[o], x[o + 1], x[o + 2]};
            traj.control[idx] = loop.force(i, t, x);
            traj.acceleration[idx] = traj.control[idx] / s.params.mass_true;
            traj.disturbance[idx] = disturbance_value(s.disturbance, t);
        }
    }

    run.metrics = compute_metrics(traj, cfg, gains, opts.variant);
    run.report = check_conditions(gains);
    const bool nominal = std::all_of(cfg.per_vehicle.begin(), cfg.per_vehicle.end(), [](const VehicleSetup& s) {
        return s.params.mass_true == s.params.mass_nominal;
    });
    run.certified = run.report.feasible() && opts.variant == Variant::c2 && nominal;
    return run;
}

BoundCheck verify_bound(std::span<const double> times, std::span<const double> measured, const DssBound& bound,
                        double tolerance) {
    if (times.size() != measured.size()) {
        throw DimensionError(
            fmt::format("verify_bound: {} samples against a grid of {} times", measured.size(), times.size()));
    }
    BoundCheck check;
    check.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double excess = measured[k] - eval_bound(bound, times[k]);
        if (excess > check.max_violation) {
            check.max_violation = excess;
            check.argmax_t = times[k];
        }
    }
    check.holds = times.empty() || check.max_violation <= tolerance;
    if (times.empty()) check.max_violation = 0.0;
    return check;
}

BoundCheck verify_bound(const ScenarioRun& run, const DssBound& bound, ErrorNorm which, double dt) {
    const std::vector<double>& series = which == ErrorNorm::original_x ? run.metrics.sup_err : run.metrics.sup_err_z;
    if (series.empty()) throw DomainError("verify_bound: z-coordinate errors exist only with integral action");
    const double tolerance = 1e-6 + 10.0 * std::pow(dt, 4);
    return verify_bound(run.trajectory.times, series, bound, tolerance);
}

BoundInputs envelope_inputs(const ScenarioTemplate& base, const GainSet& gains, const ConditionReport& report) {
    BoundInputs in;
    in.cbar_sq = report.certified_rate();
    in.gain_k = report.gain_k;
    in.init_err = std::hypot(base.position_spread, base.velocity_spread);
    const double w_bar_max = std::abs(base.constant_center) + std::abs(base.constant_spread);
    in.init_integral_err = gains.k_int != 0.0 ? w_bar_max / std::abs(gains.k_int) : 0.0;
    in.init_err_z = std::hypot(in.init_err, in.init_integral_err);
    const DisturbanceSpec worst{0.0, std::abs(base.amplitude_spread), base.disturbance_decay, base.disturbance_freq};
    in.sup_w = sup_time_varying(worst);
    in.sup_w_total = w_bar_max + in.sup_w;
    return in;
}

std::vector<SweepRow> string_sweep(const ScenarioTemplate& base, std::uint64_t seed, const GainSet& gains,
                                   const SimOptions& opts, std::span<const std::size_t> n_list) {
    const ConditionReport report = check_conditions(gains);
    const DssBound envelope{BoundKind::original, envelope_inputs(base, gains, report)};
    const double bound_env = report.certified_rate() > 0.0 ? bound_envelope(envelope, opts.t_end)
                                                           : std::numeric_limits<double>::infinity();

    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(n_list.size());
    for (std::size_t n : n_list) {
        jobs.push_back(std::async(std::launch::async, [=, &base, &gains, &opts] {
            ScenarioTemplate sized = base;
            sized.n_vehicles = n;
            const ScenarioRun run = run_scenario(sample_scenario(sized, seed), gains, opts);
            const auto& sup = run.metrics.sup_err;
            return SweepRow{n, *std::max_element(sup.begin(), sup.end()), bound_env};
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(jobs.size());
    for (auto& job : jobs) rows.push_back(job.get());
    return rows;
}

}  // namespace platoon
