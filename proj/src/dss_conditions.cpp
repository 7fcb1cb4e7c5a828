#include "platoon/dss_conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

Matrix drift() {
    Matrix f(3, 3);
    f(0, 1) = 1.0;
    return f;
}

Matrix neighbor_partials(double s_h, double s_g, const GainSet& g) {
    Matrix d(3, 3);
    d(1, 0) = s_h;
    d(1, 1) = g.kv;
    d(2, 0) = s_g;
    d(2, 1) = g.gv;
    return d;
}

}  // namespace

TransformPair build_transform(double alpha, double beta) {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw DomainError("build_transform: alpha, beta must be finite");
    return {Matrix{{1.0, alpha, 0.0}, {0.0, 1.0, beta}, {0.0, 0.0, 1.0}},
            Matrix{{1.0, -alpha, alpha * beta}, {0.0, 1.0, -beta}, {0.0, 0.0, 1.0}}};
}

SlopeBox slope_box(const GainSet& g) { return {g.kp1 * g.kp2, g.gp1 * g.gp2}; }

Matrix transformed_drift(const TransformPair& t) { return t.t_mat * drift() * t.t_inv; }

JacobianBlocks jacobian_blocks_at(const GainSet& g, const SlopeSample& s, bool has_follower) {
    const TransformPair t = build_transform(g.alpha, g.beta);
    const double eps = has_follower ? g.eps : 0.0;
    const double h_foll = has_follower ? s.h_foll : 0.0;
    const double g_foll = has_follower ? s.g_foll : 0.0;

    // Partials of (v_x, v_zeta) with respect to the vehicle's own (q, v, xi).
    Matrix own(3, 3);
    own(1, 0) = -(s.h_pred + eps * h_foll + g.kp0);
    own(1, 1) = -(g.kv * (1.0 + eps) + g.kv0);
    own(1, 2) = g.k_int;
    own(2, 0) = -(s.g_pred + eps * g_foll + g.gp0);
    own(2, 1) = -(g.gv * (1.0 + eps) + g.gv0);

    JacobianBlocks out{t.t_mat * (drift() + own) * t.t_inv,
                       t.t_mat * neighbor_partials(s.h_pred, s.g_pred, g) * t.t_inv, Matrix(3, 3)};
    if (has_follower) out.j_foll = t.t_mat * neighbor_partials(s.h_foll, s.g_foll, g) * t.t_inv;
    return out;
}

JacobianBlocks jacobian_blocks(const GainSet& g, double s_h, double s_g) {
    const SlopeBox box = slope_box(g);
    constexpr double slack = 1e-12;
    if (!(s_h >= -slack && s_h <= box.h_max + slack) || !(s_g >= -slack && s_g <= box.g_max + slack)) {
        throw DomainError(fmt::format("jacobian_blocks: slopes ({}, {}) outside [0, {}] x [0, {}]", s_h, s_g,
                                      box.h_max, box.g_max));
    }
    return jacobian_blocks_at(g, {s_h, s_h, s_g, s_g}, true);
}

double equilibrium_residual(const GainSet& g) {
    PlatoonConfig probe;
    probe.gaps = {10.0, 12.0, 8.0};
    probe.leader_speed = 20.0;
    probe.leader_initial_position = 5.0;
    probe.per_vehicle.resize(probe.gaps.size());

    double worst = 0.0;
    for (double t : {0.0, 1.7, 50.0}) {
        std::vector<VehicleState> states;
        for (std::size_t i = 1; i <= probe.n_vehicles(); ++i) states.push_back(desired_state(i, t, probe));
        for (std::size_t i = 1; i <= probe.n_vehicles(); ++i) {
            const NeighborView view = make_view(i, t, states, probe);
            const VehicleState& self = states[i - 1];
            for (double r : {coupling_pred(g, self, view), coupling_foll(g, self, view),
                             coupling_leader(g, self, view), integral_pred(g, self, view),
                             integral_foll(g, self, view), integral_leader(g, self, view)}) {
                worst = std::max(worst, std::abs(r));
            }
        }
    }
    return worst;
}

double contraction_margin(double c_sq, double b, double eps) {
    if (!(b >= 0.0)) throw DomainError(fmt::format("contraction_margin: b must be non-negative, got {}", b));
    return c_sq - b * (1.0 + eps);
}

double gain_K(const TransformPair& t) {
    const SingularValueExtremes sv = singular_value_extremes(t.t_mat);
    if (!(sv.sigma_min > 0.0)) throw NumericError("gain_K: transform is singular");
    return sv.sigma_max / sv.sigma_min;
}

ConditionReport check_conditions(const GainSet& g) {
    const SlopeBox box = slope_box(g);
    const std::array<SlopeVertex, 4> vertices{
        {{0.0, 0.0}, {0.0, box.g_max}, {box.h_max, 0.0}, {box.h_max, box.g_max}}};

    ConditionReport r;
    r.eps = g.eps;
    double worst_mu = -std::numeric_limits<double>::infinity();
    double worst_tail_mu = worst_mu;
    double worst_norm = 0.0;
    double worst_norm_weighted = 0.0;
    for (const SlopeVertex& v : vertices) {
        const SlopeSample s{v.s_h, v.s_h, v.s_g, v.s_g};
        const JacobianBlocks inner = jacobian_blocks_at(g, s, true);
        const JacobianBlocks tail = jacobian_blocks_at(g, s, false);

        const double mu = matrix_measure_2(inner.j_ii);
        if (mu > worst_mu) {
            worst_mu = mu;
            r.worst_vertex = v;
        }
        worst_tail_mu = std::max(worst_tail_mu, matrix_measure_2(tail.j_ii));

        const double n_pred = spectral_norm_2(inner.j_pred);
        const double n_foll = spectral_norm_2(inner.j_foll);
        const double norm = std::max(n_pred, n_foll);
        if (norm > worst_norm) {
            worst_norm = norm;
            r.worst_norm_vertex = v;
        }
        worst_norm_weighted = std::max(worst_norm_weighted, std::max(n_pred, g.eps * n_foll));
    }

    r.c_sq = -worst_mu;
    r.b = worst_norm;
    r.b_eps_weighted = worst_norm_weighted;
    r.tail_c_sq = -worst_tail_mu;
    r.eps_max_allowed = r.b > 0.0 ? r.c_sq / r.b - 1.0 : std::numeric_limits<double>::infinity();

    r.c1_residual = equilibrium_residual(g);
    r.c1_ok = r.c1_residual < 1e-12;
    r.c2_ok = r.c_sq > kConditionTolerance;
    r.c3_ok = r.eps_max_allowed - g.eps > kConditionTolerance;
    r.cbar_sq = contraction_margin(r.c_sq, r.b, g.eps);
    r.tail_cbar_sq = r.tail_c_sq - r.b;
    r.gain_k = gain_K(build_transform(g.alpha, g.beta));
    return r;
}

std::string format_report(const ConditionReport& r) {
    auto flag = [](bool ok) { return ok ? "ok" : "FAILED"; };
    std::string out;
    out += fmt::format("equilibrium           : {}  (residual {:.3e})\n", flag(r.c1_ok), r.c1_residual);
    out += fmt::format("contraction           : {}  (c^2 = {:.10g}, b = {:.10g})\n", flag(r.c2_ok), r.c_sq, r.b);
    out += fmt::format("symmetry              : {}  (eps = {:.6g} < c^2/b - 1 = {:.10g})\n", flag(r.c3_ok), r.eps,
                       r.eps_max_allowed);
    out += fmt::format("margin cbar^2         : {:.10g}\n", r.cbar_sq);
    out += fmt::format("last-vehicle margin   : {:.10g}  (c^2 = {:.10g})\n", r.tail_cbar_sq, r.tail_c_sq);
    out += fmt::format("b, eps-weighted       : {:.10g}\n", r.b_eps_weighted);
    out += fmt::format("gain K                : {:.10g}\n", r.gain_k);
    out += fmt::format("worst vertex (mu2)    : s_h = {:.6g}, s_g = {:.6g}\n", r.worst_vertex.s_h, r.worst_vertex.s_g);
    out += fmt::format("worst vertex (norm)   : s_h = {:.6g}, s_g = {:.6g}\n", r.worst_norm_vertex.s_h,
                       r.worst_norm_vertex.s_g);
    out += fmt::format("verdict               : {}\n", r.feasible() ? "FEASIBLE" : "INFEASIBLE");
    return out;
}

}  // namespace platoon
