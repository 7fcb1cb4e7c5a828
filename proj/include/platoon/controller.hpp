#pragma once

#include <optional>
#include <span>

#include "platoon/platoon_model.hpp"

namespace platoon {

/**
 * Gains of the integral-action platoon controller.
 *
 * Position coupling to neighbours saturates through kp1 * tanh(kp2 * e);
 * velocity coupling is linear in kv. The leader terms kp0/kv0 are linear.
 * The integrator obeys the same structure with the g-gains. alpha and beta
 * parametrize the coordinate transform used for certification, and eps
 * weights the coupling to the following vehicle.
 */
struct GainSet {
    double kp1 = 0.0;
    double kp2 = 0.0;
    double kv = 0.0;
    double kp0 = 0.0;
    double kv0 = 0.0;
    double k_int = 0.0;
    double gp1 = 0.0;
    double gp2 = 0.0;
    double gv = 0.0;
    double gp0 = 0.0;
    double gv0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double eps = 0.0;

    // Throws DomainError unless kp1, kp2, gp1, gp2 > 0, k_int != 0,
    // eps in [0, 1] and everything is finite.
    void validate() const;

    friend bool operator==(const GainSet&, const GainSet&) = default;
};

// The published case-study gain set.
GainSet published_gains();

// c1: no integral action (k = 0, integrator frozen). c2: full controller.
enum class Variant { c1, c2 };

/**
 * What vehicle i sees of the platoon.
 *
 * For vehicle 1 `pred` is the virtual leader. `foll` is empty for the last
 * vehicle, which removes the follower terms altogether.
 */
struct NeighborView {
    VehicleState pred;
    std::optional<VehicleState> foll;
    VehicleState leader;
    double gap_pred = 0.0;
    double gap_foll = 0.0;
    double gap_leader = 0.0;
};

// Builds vehicle i's view (1-based) from all vehicle states at time t.
NeighborView make_view(std::size_t i, double t, std::span<const VehicleState> states, const PlatoonConfig& cfg);

double hp(const GainSet& g, double x);
double gp(const GainSet& g, double x);

// d hp / dx and d gp / dx, both in (0, k1 * k2].
double hp_slope(const GainSet& g, double x);
double gp_slope(const GainSet& g, double x);

double coupling_pred(const GainSet& g, const VehicleState& self, const NeighborView& view);
double coupling_foll(const GainSet& g, const VehicleState& self, const NeighborView& view);
double coupling_leader(const GainSet& g, const VehicleState& self, const NeighborView& view);

double integral_pred(const GainSet& g, const VehicleState& self, const NeighborView& view);
double integral_foll(const GainSet& g, const VehicleState& self, const NeighborView& view);
double integral_leader(const GainSet& g, const VehicleState& self, const NeighborView& view);

// zeta_dot = g_pred + eps * g_foll + g_leader.
double integral_rate(const GainSet& g, const VehicleState& self, const NeighborView& view);

// Control per unit mass: h_pred + eps * h_foll + h_leader (+ k * zeta for c2).
double control_accel(const GainSet& g, const VehicleState& self, const NeighborView& view, double zeta,
                     Variant variant = Variant::c2);

// Force command u = m_nominal * control_accel(...), in N.
double control_input(const GainSet& g, const VehicleState& self, const NeighborView& view, double zeta,
                     double mass_nominal, Variant variant = Variant::c2);

}  // namespace platoon
