#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace platoon {

// Position (m) and velocity (m/s) of one vehicle.
struct VehicleState {
    double q = 0.0;
    double v = 0.0;

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

// Vehicle state extended with the controller's integral state.
//
// Inside the simulator `zeta` is the raw integrator value. The shifted
// coordinate used by the stability analysis is zeta + w_bar / k, see
// shifted_integral().
struct AugmentedState {
    double q = 0.0;
    double v = 0.0;
    double zeta = 0.0;

    [[nodiscard]] VehicleState vehicle() const noexcept { return {q, v}; }

    friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

// d(t) = w_bar + amp * sin(freq * t) * exp(-decay * t), in m/s^2.
struct DisturbanceSpec {
    double w_bar = 0.0;
    double amp = 0.0;
    double decay = 0.1;
    double freq = 1.0;

    friend bool operator==(const DisturbanceSpec&, const DisturbanceSpec&) = default;
};

struct VehicleParams {
    double mass_true = 1000.0;
    double mass_nominal = 1000.0;

    friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

struct VehicleSetup {
    VehicleParams params;
    DisturbanceSpec disturbance;
    AugmentedState initial;

    friend bool operator==(const VehicleSetup&, const VehicleSetup&) = default;
};

/**
 * A concrete platoon: N vehicles following a constant-speed virtual leader.
 *
 * gaps[i-1] is the desired distance between vehicle i and its predecessor
 * (vehicle 0 being the leader). per_vehicle[i-1] holds vehicle i's plant,
 * disturbance and initial state.
 */
struct PlatoonConfig {
    std::vector<double> gaps;
    double leader_speed = 20.0;
    double leader_initial_position = 0.0;
    std::uint64_t seed = 0;
    std::vector<VehicleSetup> per_vehicle;

    [[nodiscard]] std::size_t n_vehicles() const noexcept { return gaps.size(); }

    // Throws ConfigError when lengths disagree, a gap is not positive, a mass
    // is not positive, a decay is negative or anything is non-finite.
    void validate() const;

    friend bool operator==(const PlatoonConfig&, const PlatoonConfig&) = default;
};

VehicleState leader_state(double t, const PlatoonConfig& cfg);

// Distance from the leader to vehicle i (1-based): sum of the first i gaps.
double spacing_to_leader(std::size_t i, const PlatoonConfig& cfg);

// Desired configuration of vehicle i at time t (constant spacing policy).
VehicleState desired_state(std::size_t i, double t, const PlatoonConfig& cfg);

double disturbance_value(const DisturbanceSpec& spec, double t);

// sup over t >= 0 of |amp * sin(freq t) * exp(-decay t)|.
double sup_time_varying(const DisturbanceSpec& spec);

// sup over t >= 0 of |w_bar + amp * sin(freq t) * exp(-decay t)|.
double sup_total(const DisturbanceSpec& spec);

// zeta + w_bar / k.
double shifted_integral(double zeta, double w_bar, double k_int);

// How per-vehicle perturbations are drawn.
enum class DrawPattern {
    // Every use draws a fresh r ~ U[-1, 1].
    uniform,
    // Every use takes r = +1 for odd vehicles and -1 for even ones: all
    // vehicles sit on the envelope, neighbours pull in opposite directions.
    alternating,
};

/**
 * Recipe for a randomized scenario. Each perturbation is center + spread * r
 * with r drawn per vehicle and per use.
 */
struct ScenarioTemplate {
    std::size_t n_vehicles = 5;
    double gap = 10.0;
    double leader_speed = 20.0;
    double leader_initial_position = 0.0;
    double mass_nominal = 1000.0;
    double mass_spread = 200.0;
    bool mass_mismatch = true;
    double position_spread = 1.0;
    double velocity_spread = 1.0;
    double amplitude_spread = 1.0;
    double constant_center = 1.0;
    double constant_spread = 1.0;
    double disturbance_decay = 0.1;
    double disturbance_freq = 1.0;
    DrawPattern pattern = DrawPattern::uniform;

    void validate() const;

    friend bool operator==(const ScenarioTemplate&, const ScenarioTemplate&) = default;
};

/**
 * Seeded source of r ~ U[-1, 1].
 *
 * Wraps std::mt19937_64, whose output sequence is fixed by the C++ standard,
 * and maps each 64-bit word to [-1, 1] through its top 53 bits:
 * r = 2 * (word >> 11) * 2^-53 - 1. Unlike std::uniform_real_distribution this
 * mapping is the same on every standard library.
 */
class ScenarioRng {
public:
    explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}

    double symmetric_unit();

private:
    std::mt19937_64 engine_;
};

/**
 * Materializes a PlatoonConfig from a template.
 *
 * Per vehicle, in order: initial position offset, initial velocity offset,
 * time-varying amplitude, constant disturbance, mass. The mass draw is taken
 * even when mass_mismatch is off so that toggling it leaves the other draws
 * untouched. Integral states start at zero.
 */
PlatoonConfig sample_scenario(const ScenarioTemplate& base, std::uint64_t seed);

}  // namespace platoon
