#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "platoon/bounds.hpp"
#include "platoon/controller.hpp"
#include "platoon/dss_conditions.hpp"
#include "platoon/platoon_model.hpp"

namespace platoon {

// How the disturbance d_i reaches the velocity equation.
enum class DisturbanceChannel {
    // v_dot = u / m + d: d is an acceleration.
    acceleration,
    // v_dot = (u + m_nominal d) / m: d is a force per unit nominal mass, so
    // it is scaled by the true mass like the control force.
    force,
};

struct SimOptions {
    Variant variant = Variant::c2;
    double dt = 0.01;
    double t_end = 100.0;
    DisturbanceChannel channel = DisturbanceChannel::acceleration;
};

// States beyond this magnitude count as diverged.
inline constexpr double kDivergenceLimit = 1e9;

/**
 * Closed-loop vector field of the whole platoon.
 *
 * The state is interleaved per vehicle: [q_1, v_1, zeta_1, q_2, ...]. The
 * plant integrates with each vehicle's true mass; the controller scales its
 * command by the nominal mass. Under Variant::c1 the integrator is frozen.
 */
class ClosedLoop {
public:
    ClosedLoop(PlatoonConfig cfg, GainSet gains, SimOptions opts);

    [[nodiscard]] std::size_t dimension() const noexcept { return 3 * cfg_.n_vehicles(); }
    [[nodiscard]] const PlatoonConfig& config() const noexcept { return cfg_; }

    // Throws DivergenceError when any state is non-finite or too large.
    void operator()(double t, std::span<const double> x, std::span<double> dxdt) const;

    [[nodiscard]] std::vector<double> initial_state() const;

    // Neighbour view of vehicle i (1-based) for the state vector x.
    [[nodiscard]] NeighborView view(std::size_t i, double t, std::span<const double> x) const;

    [[nodiscard]] double force(std::size_t i, double t, std::span<const double> x) const;

private:
    PlatoonConfig cfg_;
    GainSet gains_;
    SimOptions opts_;
    std::vector<double> spacing_;
};

std::vector<double> closed_loop_rhs(double t, std::span<const double> x, const PlatoonConfig& cfg,
                                    const GainSet& gains, const SimOptions& opts);

using OdeRhs = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

// Uniformly sampled solution; row k of `states` is the state at times[k].
struct OdeSolution {
    std::vector<double> times;
    std::size_t dim = 0;
    std::vector<double> states;

    [[nodiscard]] std::span<const double> at(std::size_t k) const { return {states.data() + k * dim, dim}; }
};

// Classical fixed-step RK4 on {0, dt, ..., t_end}. t_end must be an integer
// multiple of dt (to 1e-9 relative); throws DomainError otherwise.
OdeSolution integrate_rk4(const OdeRhs& rhs, std::span<const double> x0, double dt, double t_end);

// Recorded closed-loop run. Per-vehicle series are stored row-major by time:
// entry k * n_vehicles + (i - 1).
struct Trajectory {
    std::vector<double> times;
    std::size_t n_vehicles = 0;
    std::vector<AugmentedState> states;
    std::vector<double> control;       // u_i, N
    std::vector<double> acceleration;  // u_i / m_i, m/s^2
    std::vector<double> disturbance;   // d_i, m/s^2
    std::vector<VehicleState> leader;

    [[nodiscard]] const AugmentedState& state(std::size_t k, std::size_t i) const {
        return states[k * n_vehicles + (i - 1)];
    }
};

struct ErrorMetrics {
    std::vector<double> sup_err;    // sup_i |x_i - x_i*|
    std::vector<double> sup_err_z;  // sup_i |z_i - z_i*|; empty for c1
    std::vector<double> gap_err;    // e_{i,i-1}, same layout as Trajectory
    std::vector<double> terminal_gap_err;
    std::vector<double> peak_gap_err;  // signed value of largest |e| per vehicle
    std::vector<double> terminal_speed_err;
};

ErrorMetrics compute_metrics(const Trajectory& traj, const PlatoonConfig& cfg, const GainSet& gains, Variant variant);

struct ScenarioRun {
    Trajectory trajectory;
    ErrorMetrics metrics;
    ConditionReport report;
    // Gains certified, integral action on and plant masses nominal: the
    // estimates are guaranteed to hold for this run.
    bool certified = false;
};

ScenarioRun run_scenario(const PlatoonConfig& cfg, const GainSet& gains, const SimOptions& opts);

enum class ErrorNorm { original_x, augmented_z };

struct BoundCheck {
    bool holds = true;
    // max over the grid of (measured - bound); negative means slack.
    double max_violation = 0.0;
    double argmax_t = 0.0;
};

// Pointwise comparison with tolerance. Throws DimensionError if the series
// and the time grid differ in length.
BoundCheck verify_bound(std::span<const double> times, std::span<const double> measured, const DssBound& bound,
                        double tolerance);

// Tolerance 1e-6 + 10 dt^4 on the run's own grid.
BoundCheck verify_bound(const ScenarioRun& run, const DssBound& bound, ErrorNorm which, double dt);

struct SweepRow {
    std::size_t n_vehicles = 0;
    double worst_sup_err = 0.0;
    double bound_envelope = 0.0;
};

// Bound inputs covering every scenario the template can produce, whatever N.
BoundInputs envelope_inputs(const ScenarioTemplate& base, const GainSet& gains, const ConditionReport& report);

/**
 * Runs the template at each platoon length and reports the worst error norm
 * over the whole horizon next to the N-independent envelope of the original
 * estimate. Lengths run concurrently; rows keep the order of n_list.
 */
std::vector<SweepRow> string_sweep(const ScenarioTemplate& base, std::uint64_t seed, const GainSet& gains,
                                   const SimOptions& opts, std::span<const std::size_t> n_list);

}  // namespace platoon
