#include "platoon/controller.hpp"

#include <cmath>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

void GainSet::validate() const {
    for (double x : {kp1, kp2, kv, kp0, kv0, k_int, gp1, gp2, gv, gp0, gv0, alpha, beta, eps}) {
        if (!std::isfinite(x)) throw DomainError("gains: all gains must be finite");
    }
    if (!(kp1 > 0.0 && kp2 > 0.0)) throw DomainError("gains: kp1 and kp2 must be positive");
    if (!(gp1 > 0.0 && gp2 > 0.0)) throw DomainError("gains: gp1 and gp2 must be positive");
    if (k_int == 0.0) throw DomainError("gains: k_int must be non-zero");
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError(fmt::format("gains: eps must lie in [0, 1], got {}", eps));
}

GainSet published_gains() {
    GainSet g;
    g.alpha = 0.3;
    g.beta = -0.4;
    g.eps = 1.0;
    g.kp1 = 0.1188;
    g.kp2 = 0.1188;
    g.kv = 0.0121;
    g.kp0 = 0.6;
    g.kv0 = 0.6;
    g.k_int = 0.2508;
    g.gp1 = 0.01;
    g.gp2 = 0.01;
    g.gv = 0.01;
    g.gp0 = 0.2881;
    g.gv0 = 0.3420;
    return g;
}

NeighborView make_view(std::size_t i, double t, std::span<const VehicleState> states, const PlatoonConfig& cfg) {
    const std::size_t n = cfg.n_vehicles();
    if (i < 1 || i > n) throw std::out_of_range(fmt::format("make_view: vehicle {} outside 1..{}", i, n));
    if (states.size() != n) throw DimensionError("make_view: one state per vehicle expected");

    NeighborView view;
    view.leader = leader_state(t, cfg);
    view.pred = i == 1 ? view.leader : states[i - 2];
    view.gap_pred = cfg.gaps[i - 1];
    if (i < n) {
        view.foll = states[i];
        view.gap_foll = cfg.gaps[i];
    }
    view.gap_leader = spacing_to_leader(i, cfg);
    return view;
}

double hp(const GainSet& g, double x) { return g.kp1 * std::tanh(g.kp2 * x); }
double gp(const GainSet& g, double x) { return g.gp1 * std::tanh(g.gp2 * x); }

double hp_slope(const GainSet& g, double x) {
    const double c = std::cosh(g.kp2 * x);
    return g.kp1 * g.kp2 / (c * c);
}

double gp_slope(const GainSet& g, double x) {
    const double c = std::cosh(g.gp2 * x);
    return g.gp1 * g.gp2 / (c * c);
}

double coupling_pred(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    return hp(g, view.pred.q - self.q - view.gap_pred) + g.kv * (view.pred.v - self.v);
}

double coupling_foll(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    if (!view.foll) return 0.0;
    return hp(g, view.foll->q - self.q + view.gap_foll) + g.kv * (view.foll->v - self.v);
}

double coupling_leader(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    return g.kp0 * (view.leader.q - self.q - view.gap_leader) + g.kv0 * (view.leader.v - self.v);
}

double integral_pred(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    return gp(g, view.pred.q - self.q - view.gap_pred) + g.gv * (view.pred.v - self.v);
}

double integral_foll(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    if (!view.foll) return 0.0;
    return gp(g, view.foll->q - self.q + view.gap_foll) + g.gv * (view.foll->v - self.v);
}

double integral_leader(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    return g.gp0 * (view.leader.q - self.q - view.gap_leader) + g.gv0 * (view.leader.v - self.v);
}

double integral_rate(const GainSet& g, const VehicleState& self, const NeighborView& view) {
    return integral_pred(g, self, view) + g.eps * integral_foll(g, self, view) + integral_leader(g, self, view);
}

double control_accel(const GainSet& g, const VehicleState& self, const NeighborView& view, double zeta,
                     Variant variant) {
    const double coupling =
        coupling_pred(g, self, view) + g.eps * coupling_foll(g, self, view) + coupling_leader(g, self, view);
    return variant == Variant::c2 ? coupling + g.k_int * zeta : coupling;
}

double control_input(const GainSet& g, const VehicleState& self, const NeighborView& view, double zeta,
                     double mass_nominal, Variant variant) {
    return mass_nominal * control_accel(g, self, view, zeta, variant);
}

}  // namespace platoon
