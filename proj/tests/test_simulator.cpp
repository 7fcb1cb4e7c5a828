#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "platoon/errors.hpp"
#include "platoon/simulator.hpp"

using namespace platoon;

namespace {

PlatoonConfig at_rest(std::size_t n) {
    PlatoonConfig cfg;
    cfg.gaps.assign(n, 10.0);
    cfg.per_vehicle.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const VehicleState d = desired_state(i, 0.0, cfg);
        cfg.per_vehicle[i - 1].initial = {d.q, d.v, 0.0};
    }
    return cfg;
}

PlatoonConfig published_scenario(std::uint64_t seed, bool mismatch) {
    ScenarioTemplate base;
    base.mass_mismatch = mismatch;
    return sample_scenario(base, seed);
}

std::vector<double> xi_terminal(const ScenarioRun& run, const PlatoonConfig& cfg, const GainSet& g) {
    std::vector<double> out;
    const std::size_t last = run.trajectory.times.size() - 1;
    for (std::size_t i = 1; i <= cfg.n_vehicles(); ++i) {
        out.push_back(shifted_integral(run.trajectory.state(last, i).zeta, cfg.per_vehicle[i - 1].disturbance.w_bar,
                                       g.k_int));
    }
    return out;
}

}  // namespace

TEST(ClosedLoopRhs, EquilibriumMovesWithLeader) {
    const PlatoonConfig cfg = at_rest(4);
    const GainSet g = published_gains();
    const std::vector<double> x = ClosedLoop(cfg, g, {}).initial_state();
    const auto dx = closed_loop_rhs(0.0, x, cfg, g, {});
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(dx[3 * i], 20.0);
        EXPECT_NEAR(dx[3 * i + 1], 0.0, 1e-15);
        EXPECT_NEAR(dx[3 * i + 2], 0.0, 1e-15);
    }
}

TEST(ClosedLoopRhs, ConstantDisturbanceSingleVehicle) {
    PlatoonConfig cfg = at_rest(1);
    cfg.per_vehicle[0].disturbance = {1.3, 0.0, 0.1, 1.0};
    cfg.per_vehicle[0].params.mass_true = 1100.0;
    const GainSet g = published_gains();
    const std::vector<double> x = ClosedLoop(cfg, g, {}).initial_state();
    EXPECT_NEAR(closed_loop_rhs(0.0, x, cfg, g, {})[1], 1.3, 1e-15);
    SimOptions force;
    force.channel = DisturbanceChannel::force;
    EXPECT_NEAR(closed_loop_rhs(0.0, x, cfg, g, force)[1], 1.3 * 1000.0 / 1100.0, 1e-15);
}

TEST(ClosedLoopRhs, PlantUsesTrueMassControllerNominal) {
    PlatoonConfig cfg = at_rest(1);
    cfg.per_vehicle[0].params.mass_true = 800.0;
    cfg.per_vehicle[0].initial.zeta = 1.0;
    const GainSet g = published_gains();
    const ClosedLoop loop(cfg, g, {});
    const std::vector<double> x = loop.initial_state();
    EXPECT_NEAR(loop.force(1, 0.0, x), 250.8, 1e-10);
    EXPECT_NEAR(closed_loop_rhs(0.0, x, cfg, g, {})[1], 250.8 / 800.0, 1e-14);
    SimOptions c1;
    c1.variant = Variant::c1;
    const std::vector<double> frozen = ClosedLoop(cfg, g, c1).initial_state();
    EXPECT_EQ(frozen[2], 0.0);
    EXPECT_EQ(closed_loop_rhs(0.0, frozen, cfg, g, c1)[1], 0.0);
}

TEST(ClosedLoopRhs, DimensionAndDivergenceErrors) {
    const PlatoonConfig cfg = at_rest(3);
    const GainSet g = published_gains();
    EXPECT_THROW(closed_loop_rhs(0.0, std::vector<double>(5), cfg, g, {}), DimensionError);
    std::vector<double> x = ClosedLoop(cfg, g, {}).initial_state();
    x[4] = std::nan("");
    try {
        closed_loop_rhs(2.5, x, cfg, g, {});
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.vehicle(), 2u);
        EXPECT_EQ(e.time(), 2.5);
    }
}

TEST(Rk4, ExponentialDecay) {
    const std::vector<double> x0{1.0};
    const OdeSolution sol = integrate_rk4(
        [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; }, x0, 0.01, 1.0);
    ASSERT_EQ(sol.times.size(), 101u);
    EXPECT_NEAR(sol.times.back(), 1.0, 1e-15);
    EXPECT_NEAR(sol.at(100)[0], std::exp(-1.0), 1e-9);
}

TEST(Rk4, ZeroFieldIsConstant) {
    const std::vector<double> x0{1.5, -2.0, 0.25};
    const OdeSolution sol = integrate_rk4(
        [](double, std::span<const double>, std::span<double> dx) { std::fill(dx.begin(), dx.end(), 0.0); }, x0, 0.1,
        5.0);
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(sol.at(k)[j], x0[j]);
}

TEST(Rk4, GridErrors) {
    const std::vector<double> x0{1.0};
    const OdeRhs rhs = [](double, std::span<const double>, std::span<double> dx) { dx[0] = 0.0; };
    EXPECT_THROW(integrate_rk4(rhs, x0, 0.0, 1.0), DomainError);
    EXPECT_THROW(integrate_rk4(rhs, x0, 0.3, 1.0), DomainError);
    EXPECT_NO_THROW(integrate_rk4(rhs, x0, 0.1, 1.0));
}

TEST(Simulation, EquilibriumInvariance) {
    const PlatoonConfig cfg = at_rest(6);
    const GainSet g = published_gains();
    SimOptions opts;
    opts.t_end = 100.0;
    const ScenarioRun run = run_scenario(cfg, g, opts);
    for (double e : run.metrics.sup_err) EXPECT_LT(e, 1e-9);
    for (double e : run.metrics.sup_err_z) EXPECT_LT(e, 1e-9);
    for (double e : run.metrics.gap_err) EXPECT_LT(std::abs(e), 1e-9);
    EXPECT_TRUE(run.certified);
    const DssBound b{BoundKind::augmented, bound_inputs(cfg, g, run.report)};
    EXPECT_TRUE(verify_bound(run, b, ErrorNorm::augmented_z, opts.dt).holds);
}

TEST(Simulation, TrajectoryLayout) {
    const PlatoonConfig cfg = published_scenario(2, true);
    SimOptions opts;
    opts.t_end = 1.0;
    const ScenarioRun run = run_scenario(cfg, published_gains(), opts);
    const Trajectory& tr = run.trajectory;
    ASSERT_EQ(tr.times.size(), 101u);
    ASSERT_EQ(tr.states.size(), 101u * 5);
    EXPECT_EQ(tr.state(0, 3), cfg.per_vehicle[2].initial);
    for (std::size_t k = 0; k < tr.times.size(); k += 10) {
        for (std::size_t i = 1; i <= 5; ++i) {
            const std::size_t idx = k * 5 + i - 1;
            EXPECT_DOUBLE_EQ(tr.acceleration[idx], tr.control[idx] / cfg.per_vehicle[i - 1].params.mass_true);
            EXPECT_EQ(tr.disturbance[idx], disturbance_value(cfg.per_vehicle[i - 1].disturbance, tr.times[k]));
            const double pred = i == 1 ? tr.leader[k].q : tr.state(k, i - 1).q;
            EXPECT_DOUBLE_EQ(run.metrics.gap_err[idx], pred - tr.state(k, i).q - 10.0);
        }
    }
    EXPECT_FALSE(run.certified);
}

TEST(Simulation, ConstantDisturbanceRejection) {
    const GainSet g = published_gains();
    for (double w : {0.0, 0.5, 1.0, 1.7, 2.0}) {
        ScenarioTemplate base;
        base.mass_mismatch = false;
        base.amplitude_spread = 0.0;
        base.constant_center = w;
        base.constant_spread = 0.0;
        const PlatoonConfig cfg = sample_scenario(base, 5);
        const ScenarioRun run = run_scenario(cfg, g, {});
        for (double dv : run.metrics.terminal_speed_err) EXPECT_LT(std::abs(dv), 1e-3) << "w_bar " << w;
        for (double xi : xi_terminal(run, cfg, g)) EXPECT_LT(std::abs(xi), 1e-3) << "w_bar " << w;
    }
}

TEST(Simulation, IntegralActionRemovesSteadyStateGap) {
    const PlatoonConfig cfg = published_scenario(1, false);
    SimOptions c1;
    c1.variant = Variant::c1;
    const ScenarioRun with = run_scenario(cfg, published_gains(), {});
    const ScenarioRun without = run_scenario(cfg, published_gains(), c1);
    double worst_c2 = 0.0;
    double worst_c1 = 0.0;
    for (double e : with.metrics.terminal_gap_err) worst_c2 = std::max(worst_c2, std::abs(e));
    for (double e : without.metrics.terminal_gap_err) worst_c1 = std::max(worst_c1, std::abs(e));
    EXPECT_LT(worst_c2, 0.01);
    EXPECT_GT(worst_c1, 0.05);
    EXPECT_GT(worst_c1, 10.0 * worst_c2);
    EXPECT_TRUE(without.metrics.sup_err_z.empty());
}

TEST(Simulation, StepSizeRobustness) {
    const PlatoonConfig cfg = published_scenario(3, false);
    SimOptions coarse;
    SimOptions fine;
    fine.dt = 0.005;
    const ScenarioRun a = run_scenario(cfg, published_gains(), coarse);
    const ScenarioRun b = run_scenario(cfg, published_gains(), fine);
    ASSERT_EQ(b.metrics.sup_err.size(), 2 * a.metrics.sup_err.size() - 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.metrics.sup_err.size(); ++k)
        worst = std::max(worst, std::abs(a.metrics.sup_err[k] - b.metrics.sup_err[2 * k]));
    EXPECT_LT(worst, 1e-6);
}

TEST(Simulation, DivergenceIsReported) {
    GainSet g = published_gains();
    g.kp0 = -50.0;
    SimOptions opts;
    opts.t_end = 50.0;
    try {
        run_scenario(published_scenario(1, false), g, opts);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.vehicle(), 1u);
        EXPECT_LE(e.vehicle(), 5u);
        EXPECT_GT(e.time(), 0.0);
        EXPECT_LT(e.time(), 50.0);
    }
}

TEST(VerifyBound, HoldsOnCertifiedRunAndIsFalsifiable) {
    const PlatoonConfig cfg = published_scenario(1, false);
    const GainSet g = published_gains();
    const ScenarioRun run = run_scenario(cfg, g, {});
    ASSERT_TRUE(run.certified);
    const BoundInputs in = bound_inputs(cfg, g, run.report);
    const BoundCheck x = verify_bound(run, {BoundKind::original, in}, ErrorNorm::original_x, 0.01);
    const BoundCheck z = verify_bound(run, {BoundKind::augmented, in}, ErrorNorm::augmented_z, 0.01);
    EXPECT_TRUE(x.holds);
    EXPECT_TRUE(z.holds);
    EXPECT_LT(x.max_violation, 0.0);

    BoundInputs shrunk = in;
    shrunk.gain_k /= 100.0;
    const BoundCheck bad = verify_bound(run, {BoundKind::original, shrunk}, ErrorNorm::original_x, 0.01);
    EXPECT_FALSE(bad.holds);
    EXPECT_GT(bad.max_violation, 0.0);
}

TEST(VerifyBound, ZeroRunTriviallyHolds) {
    const PlatoonConfig cfg = at_rest(3);
    SimOptions opts;
    opts.t_end = 10.0;
    const ScenarioRun run = run_scenario(cfg, published_gains(), opts);
    const BoundInputs in = bound_inputs(cfg, published_gains(), run.report);
    EXPECT_EQ(in.init_err, 0.0);
    EXPECT_TRUE(verify_bound(run, {BoundKind::original, in}, ErrorNorm::original_x, opts.dt).holds);
}

TEST(VerifyBound, Errors) {
    DssBound b{BoundKind::original, {}};
    b.inputs.cbar_sq = 0.1;
    EXPECT_THROW(verify_bound(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0}, b, 1e-6), DimensionError);
    SimOptions c1;
    c1.variant = Variant::c1;
    c1.t_end = 1.0;
    const ScenarioRun run = run_scenario(at_rest(2), published_gains(), c1);
    EXPECT_THROW(verify_bound(run, b, ErrorNorm::augmented_z, 0.01), DomainError);
}

TEST(StringSweep, ShapeAndEnvelope) {
    ScenarioTemplate base;
    base.mass_mismatch = false;
    base.pattern = DrawPattern::alternating;
    SimOptions opts;
    opts.t_end = 30.0;
    const std::vector<std::size_t> ns{1, 3, 5, 10};
    const auto rows = string_sweep(base, 1, published_gains(), opts, ns);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k].n_vehicles, ns[k]);
        EXPECT_GT(rows[k].worst_sup_err, 0.0);
        EXPECT_LE(rows[k].worst_sup_err, rows[k].bound_envelope);
        EXPECT_EQ(rows[k].bound_envelope, rows[0].bound_envelope);
    }
    EXPECT_TRUE(string_sweep(base, 1, published_gains(), opts, std::vector<std::size_t>{}).empty());
}

TEST(StringSweep, EnvelopeCoversSampledScenarios) {
    ScenarioTemplate base;
    base.mass_mismatch = false;
    const GainSet g = published_gains();
    const ConditionReport r = check_conditions(g);
    const BoundInputs env = envelope_inputs(base, g, r);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        base.n_vehicles = 1 + seed % 7;
        const BoundInputs in = bound_inputs(sample_scenario(base, seed), g, r);
        EXPECT_LE(in.init_err, env.init_err);
        EXPECT_LE(in.init_integral_err, env.init_integral_err);
        EXPECT_LE(in.init_err_z, env.init_err_z);
        EXPECT_LE(in.sup_w, env.sup_w);
        EXPECT_LE(in.sup_w_total, env.sup_w_total);
    }
}
