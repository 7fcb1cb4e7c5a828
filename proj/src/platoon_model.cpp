#include "platoon/platoon_model.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

// Golden-section extremum of sin(w t) exp(-d t) on one half-period lobe.
// Each lobe is unimodal, and the first lobe carries the global maximum.
double lobe_extremum(double freq, double decay, int lobe) {
    const double w = std::abs(freq);
    const double lo = lobe * std::numbers::pi / w;
    const double hi = (lobe + 1) * std::numbers::pi / w;
    const double sign = lobe % 2 == 0 ? 1.0 : -1.0;
    auto negated = [&](double t) { return -sign * std::sin(w * t) * std::exp(-decay * t); };
    // 40 bits locates t* to ~1e-12; the value error is quadratic in that.
    const auto [t_star, neg_val] = boost::math::tools::brent_find_minima(negated, lo, hi, 40);
    (void)t_star;
    return -sign * neg_val;
}

void require_index(std::size_t i, const PlatoonConfig& cfg) {
    if (i < 1 || i > cfg.n_vehicles()) {
        throw std::out_of_range(fmt::format("vehicle index {} outside 1..{}", i, cfg.n_vehicles()));
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void PlatoonConfig::validate() const {
    if (gaps.empty()) throw ConfigError("platoon: at least one vehicle is required");
    if (per_vehicle.size() != gaps.size()) {
        throw ConfigError(
            fmt::format("platoon: {} gaps but {} vehicle setups", gaps.size(), per_vehicle.size()));
    }
    if (!finite(leader_speed) || !finite(leader_initial_position)) {
        throw ConfigError("platoon: leader trajectory must be finite");
    }
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (!(gaps[i] > 0.0) || !finite(gaps[i])) {
            throw ConfigError(fmt::format("platoon: gap of vehicle {} must be positive, got {}", i + 1, gaps[i]));
        }
        const VehicleSetup& s = per_vehicle[i];
        if (!(s.params.mass_true > 0.0) || !(s.params.mass_nominal > 0.0) || !finite(s.params.mass_true) ||
            !finite(s.params.mass_nominal)) {
            throw ConfigError(fmt::format("platoon: masses of vehicle {} must be positive", i + 1));
        }
        const DisturbanceSpec& d = s.disturbance;
        if (!(d.decay >= 0.0) || !finite(d.decay) || !finite(d.w_bar) || !finite(d.amp) || !finite(d.freq)) {
            throw ConfigError(fmt::format("platoon: disturbance of vehicle {} is invalid", i + 1));
        }
        if (!finite(s.initial.q) || !finite(s.initial.v) || !finite(s.initial.zeta)) {
            throw ConfigError(fmt::format("platoon: initial state of vehicle {} is not finite", i + 1));
        }
    }
}

VehicleState leader_state(double t, const PlatoonConfig& cfg) {
    return {cfg.leader_initial_position + cfg.leader_speed * t, cfg.leader_speed};
}

double spacing_to_leader(std::size_t i, const PlatoonConfig& cfg) {
    require_index(i, cfg);
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) sum += cfg.gaps[j];
    return sum;
}

VehicleState desired_state(std::size_t i, double t, const PlatoonConfig& cfg) {
    const VehicleState leader = leader_state(t, cfg);
    return {leader.q - spacing_to_leader(i, cfg), leader.v};
}

double disturbance_value(const DisturbanceSpec& spec, double t) {
    return spec.w_bar + spec.amp * std::sin(spec.freq * t) * std::exp(-spec.decay * t);
}

double sup_time_varying(const DisturbanceSpec& spec) {
    if (spec.amp == 0.0 || spec.freq == 0.0) return 0.0;
    if (spec.decay == 0.0) return std::abs(spec.amp);
    return std::abs(spec.amp) * lobe_extremum(spec.freq, spec.decay, 0);
}

double sup_total(const DisturbanceSpec& spec) {
    if (spec.amp == 0.0 || spec.freq == 0.0) return std::abs(spec.w_bar);
    // s(t) = sin(w t) exp(-d t) sweeps [s_min, s_max] continuously, and
    // |w_bar + amp s| is convex in s, so the sup sits at an end of the range.
    const double s_max = spec.decay == 0.0 ? 1.0 : lobe_extremum(spec.freq, spec.decay, 0);
    const double s_min = spec.decay == 0.0 ? -1.0 : lobe_extremum(spec.freq, spec.decay, 1);
    const double sign = spec.freq > 0.0 ? 1.0 : -1.0;
    const double a = sign * spec.amp;
    return std::max(std::abs(spec.w_bar + a * s_max), std::abs(spec.w_bar + a * s_min));
}

double shifted_integral(double zeta, double w_bar, double k_int) {
    if (k_int == 0.0) throw DomainError("shifted_integral: integral gain is zero");
    return zeta + w_bar / k_int;
}

void ScenarioTemplate::validate() const {
    if (n_vehicles < 1) throw ConfigError("scenario: n_vehicles must be at least 1");
    if (!(gap > 0.0)) throw ConfigError("scenario: gap must be positive");
    if (!(mass_nominal > 0.0)) throw ConfigError("scenario: mass_nominal must be positive");
    if (mass_mismatch && !(mass_nominal - std::abs(mass_spread) > 0.0)) {
        throw ConfigError("scenario: mass_spread must keep every mass positive");
    }
    if (!(disturbance_decay >= 0.0)) throw ConfigError("scenario: disturbance_decay must be non-negative");
    for (double x : {gap, leader_speed, leader_initial_position, mass_nominal, mass_spread, position_spread,
                     velocity_spread, amplitude_spread, constant_center, constant_spread, disturbance_decay,
                     disturbance_freq}) {
        if (!finite(x)) throw ConfigError("scenario: all numeric fields must be finite");
    }
}

double ScenarioRng::symmetric_unit() {
    const std::uint64_t word = engine_();
    const double unit = static_cast<double>(word >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
}

PlatoonConfig sample_scenario(const ScenarioTemplate& base, std::uint64_t seed) {
    base.validate();
    ScenarioRng rng(seed);
    PlatoonConfig cfg;
    cfg.seed = seed;
    cfg.leader_speed = base.leader_speed;
    cfg.leader_initial_position = base.leader_initial_position;
    cfg.gaps.assign(base.n_vehicles, base.gap);
    cfg.per_vehicle.reserve(base.n_vehicles);

    for (std::size_t i = 1; i <= base.n_vehicles; ++i) {
        auto draw = [&]() {
            if (base.pattern == DrawPattern::alternating) return i % 2 == 1 ? 1.0 : -1.0;
            return rng.symmetric_unit();
        };
        const double r_pos = draw();
        const double r_vel = draw();
        const double r_amp = draw();
        const double r_const = draw();
        const double r_mass = draw();

        VehicleSetup s;
        const double slot = base.leader_initial_position - base.gap * static_cast<double>(i);
        s.initial = {slot + base.position_spread * r_pos, base.leader_speed + base.velocity_spread * r_vel, 0.0};
        s.disturbance = {base.constant_center + base.constant_spread * r_const, base.amplitude_spread * r_amp,
                         base.disturbance_decay, base.disturbance_freq};
        s.params.mass_nominal = base.mass_nominal;
        s.params.mass_true = base.mass_mismatch ? base.mass_nominal + base.mass_spread * r_mass : base.mass_nominal;
        cfg.per_vehicle.push_back(s);
    }
    return cfg;
}

}  // namespace platoon
