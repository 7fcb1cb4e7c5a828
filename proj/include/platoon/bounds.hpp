#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dss_conditions.hpp"
#include "platoon/platoon_model.hpp"

namespace platoon {

/// Which error estimate to evaluate.
///
/// - baseline: no integral action and no transform,
///   e^{-r t} e0 + (1 - e^{-r t}) / r * sup|d|.
/// - augmented: integral-augmented state z = (x, xi) with transform gain K,
///   K e^{-r t} e0_z + K (1 - e^{-r t}) / r * sup|w|.
/// - original: the augmented estimate re-expressed on x alone,
///   K e^{-r t} (e0 + e0_xi) + K (1 - e^{-r t}) / r * sup|w|.
/// - total_disturbance: the estimate without integral action, driven by the
///   full disturbance, K e^{-r t} e0 + K (1 - e^{-r t}) / r * sup|w_bar + w|.
enum class BoundKind { baseline, augmented, original, total_disturbance };

std::string_view to_string(BoundKind kind);
std::optional<BoundKind> parse_bound_kind(std::string_view name);

/// Suprema the estimates are built from. All non-negative.
struct BoundInputs {
    double cbar_sq = 0.0;            // decay rate r, 1/s
    double gain_k = 1.0;             // transform condition number K
    double init_err = 0.0;           // sup_i |x_i(0) - x_i*(0)|
    double init_integral_err = 0.0;  // sup_i |zeta_i(0) + w_bar_i / k|
    double init_err_z = 0.0;         // sup_i |z_i(0) - z_i*(0)|
    double sup_w = 0.0;              // sup_i ||w_i||_inf
    double sup_w_total = 0.0;        // sup_i ||w_bar_i + w_i||_inf
};

struct DssBound {
    BoundKind kind = BoundKind::original;
    BoundInputs inputs;
};

/// Throws CertificateError when cbar_sq <= 0 and DomainError for t < 0.
double eval_bound(const DssBound& bound, double t);

struct BoundPoint {
    double t;
    double value;
};

/// Throws DomainError if the grid is not ascending.
std::vector<BoundPoint> bound_curve(const DssBound& bound, std::span<const double> t_grid);

/// Largest value of the estimate over [0, t_end]. Every kind is either
/// monotone or a single exponential blend of its t = 0 value and its limit,
/// so the sup is attained at an end point.
double bound_envelope(const DssBound& bound, double t_end);

/// Extracts the suprema from a concrete scenario and a certificate. The
/// certified rate is the smaller of the interior and last-vehicle margins.
BoundInputs bound_inputs(const PlatoonConfig& cfg, const GainSet& gains, const ConditionReport& report);

}  // namespace platoon
