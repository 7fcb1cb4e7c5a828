#pragma once

#include <string>

#include "platoon/controller.hpp"
#include "platoon/matrix.hpp"

namespace platoon {

// Unit upper-triangular change of coordinates on (q, v, xi) and its inverse.
struct TransformPair {
    Matrix t_mat;
    Matrix t_inv;
};

// T = [[1, alpha, 0], [0, 1, beta], [0, 0, 1]], inverse in closed form.
TransformPair build_transform(double alpha, double beta);

// Range of the tanh coupling slopes: [0, kp1*kp2] and [0, gp1*gp2].
struct SlopeBox {
    double h_max = 0.0;
    double g_max = 0.0;
};

SlopeBox slope_box(const GainSet& g);

// Local slopes of the position couplings toward each neighbour.
struct SlopeSample {
    double h_pred = 0.0;
    double h_foll = 0.0;
    double g_pred = 0.0;
    double g_foll = 0.0;
};

// Closed-loop Jacobian blocks in transformed coordinates, per unit mass.
//
// j_ii is T (F + dV/dz_i) T^-1 where V = [0, v_x, v_zeta]. The neighbour
// blocks are T (dH/dz_j) T^-1 for the predecessor and follower couplings
// without the eps weight; eps enters j_ii and the contraction margin only.
struct JacobianBlocks {
    Matrix j_ii;
    Matrix j_pred;
    Matrix j_foll;
};

// Blocks at independent predecessor/follower slopes. With has_follower false
// (the last vehicle) the follower terms vanish from j_ii and j_foll is zero.
JacobianBlocks jacobian_blocks_at(const GainSet& g, const SlopeSample& s, bool has_follower = true);

// Blocks with a common slope toward both neighbours. Throws DomainError if
// (s_h, s_g) is outside slope_box(g) (with 1e-12 slack).
JacobianBlocks jacobian_blocks(const GainSet& g, double s_h, double s_g);

// Open-loop drift T F T^-1.
Matrix transformed_drift(const TransformPair& t);

struct SlopeVertex {
    double s_h = 0.0;
    double s_g = 0.0;

    friend bool operator==(const SlopeVertex&, const SlopeVertex&) = default;
};

/**
 * Outcome of certifying a gain set.
 *
 * c_sq is minus the worst matrix measure of j_ii over the slope box, b the
 * worst neighbour-block norm. cbar_sq = c_sq - b (1 + eps) is the certified
 * decay rate. The last vehicle has no follower, so its diagonal block differs;
 * tail_c_sq / tail_cbar_sq (= tail_c_sq - b) cover it, and feasibility needs
 * both margins positive.
 */
struct ConditionReport {
    double c_sq = 0.0;
    double b = 0.0;
    // max(||j_pred||, eps * ||j_foll||): b under the convention that the
    // follower block already carries its eps weight.
    double b_eps_weighted = 0.0;
    double eps = 0.0;
    double eps_max_allowed = 0.0;
    bool c1_ok = false;
    bool c2_ok = false;
    bool c3_ok = false;
    double c1_residual = 0.0;
    double cbar_sq = 0.0;
    double tail_c_sq = 0.0;
    double tail_cbar_sq = 0.0;
    double gain_k = 1.0;
    SlopeVertex worst_vertex;
    SlopeVertex worst_norm_vertex;

    [[nodiscard]] bool feasible() const noexcept { return c1_ok && c2_ok && c3_ok && tail_cbar_sq > 0.0; }

    // Smallest of the interior and tail margins; the rate the bounds may use.
    [[nodiscard]] double certified_rate() const noexcept { return cbar_sq < tail_cbar_sq ? cbar_sq : tail_cbar_sq; }
};

// Absolute tolerance for all inequality verdicts.
inline constexpr double kConditionTolerance = 1e-9;

// Evaluates the transformed conditions at the four slope-box vertices.
// Infeasibility is a normal outcome, not an exception. Does not validate
// gain invariants, so degenerate (e.g. all-zero) gain sets can be checked.
ConditionReport check_conditions(const GainSet& g);

// Largest |coupling| over every vehicle of a probe platoon placed exactly on
// its desired configuration, at several times.
double equilibrium_residual(const GainSet& g);

// c_sq - b (1 + eps). Throws DomainError when b < 0.
double contraction_margin(double c_sq, double b, double eps);

// sigma_max(T) / sigma_min(T).
double gain_K(const TransformPair& t);

// Multi-line human-readable report.
std::string format_report(const ConditionReport& r);

}  // namespace platoon
