#include "platoon/bounds.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

std::string_view to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::baseline: return "baseline";
        case BoundKind::augmented: return "augmented";
        case BoundKind::original: return "original";
        case BoundKind::total_disturbance: return "total_disturbance";
    }
    return "unknown";
}

std::optional<BoundKind> parse_bound_kind(std::string_view name) {
    for (BoundKind k : {BoundKind::baseline, BoundKind::augmented, BoundKind::original, BoundKind::total_disturbance}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

double eval_bound(const DssBound& bound, double t) {
    const BoundInputs& in = bound.inputs;
    if (!(in.cbar_sq > 0.0)) {
        throw CertificateError(fmt::format("eval_bound: contraction margin {} is not positive", in.cbar_sq));
    }
    if (!(t >= 0.0)) throw DomainError("eval_bound: t must be non-negative");

    const double decay = std::exp(-in.cbar_sq * t);
    // (1 - e^{-r t}) / r without cancellation for small r t.
    const double gain = -std::expm1(-in.cbar_sq * t) / in.cbar_sq;
    switch (bound.kind) {
        case BoundKind::baseline: return decay * in.init_err + gain * in.sup_w_total;
        case BoundKind::augmented: return in.gain_k * (decay * in.init_err_z + gain * in.sup_w);
        case BoundKind::original:
            return in.gain_k * (decay * (in.init_err + in.init_integral_err) + gain * in.sup_w);
        case BoundKind::total_disturbance: return in.gain_k * (decay * in.init_err + gain * in.sup_w_total);
    }
    throw DomainError("eval_bound: unknown kind");
}

std::vector<BoundPoint> bound_curve(const DssBound& bound, std::span<const double> t_grid) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw DomainError("bound_curve: grid must be ascending");
    std::vector<BoundPoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back({t, eval_bound(bound, t)});
    return out;
}

double bound_envelope(const DssBound& bound, double t_end) {
    return std::max(eval_bound(bound, 0.0), eval_bound(bound, t_end));
}

BoundInputs bound_inputs(const PlatoonConfig& cfg, const GainSet& gains, const ConditionReport& report) {
    BoundInputs in;
    in.cbar_sq = report.certified_rate();
    in.gain_k = report.gain_k;
    for (std::size_t i = 1; i <= cfg.n_vehicles(); ++i) {
        const VehicleSetup& s = cfg.per_vehicle[i - 1];
        const VehicleState want = desired_state(i, 0.0, cfg);
        const double dq = s.initial.q - want.q;
        const double dv = s.initial.v - want.v;
        const double xi = gains.k_int != 0.0 ? shifted_integral(s.initial.zeta, s.disturbance.w_bar, gains.k_int) : 0.0;
        in.init_err = std::max(in.init_err, std::hypot(dq, dv));
        in.init_integral_err = std::max(in.init_integral_err, std::abs(xi));
        in.init_err_z = std::max(in.init_err_z, std::sqrt(dq * dq + dv * dv + xi * xi));
        in.sup_w = std::max(in.sup_w, sup_time_varying(s.disturbance));
        in.sup_w_total = std::max(in.sup_w_total, sup_total(s.disturbance));
    }
    return in;
}

}  // namespace platoon
