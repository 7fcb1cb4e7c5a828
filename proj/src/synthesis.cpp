#include "platoon/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

constexpr std::array<double GainSet::*, kGainCount> kFields{
    &GainSet::kp1, &GainSet::kp2, &GainSet::kv,    &GainSet::kp0,   &GainSet::kv0,  &GainSet::k_int, &GainSet::gp1,
    &GainSet::gp2, &GainSet::gv,  &GainSet::gp0,   &GainSet::gv0,   &GainSet::alpha, &GainSet::beta, &GainSet::eps};

constexpr std::array<std::string_view, kGainCount> kNames{"kp1", "kp2", "kv",  "kp0",   "kv0",  "k_int", "gp1",
                                                           "gp2", "gv",  "gp0", "gv0", "alpha", "beta",  "eps"};

std::size_t require_index(std::string_view name) {
    const auto idx = gain_index(name);
    if (!idx) throw std::invalid_argument(fmt::format("unknown gain parameter '{}'", name));
    return *idx;
}

using Point = std::array<double, kGainCount>;

struct Scored {
    Point x{};
    ConditionReport report;
    bool feasible = false;
    double score = 0.0;
};

// Strictly better, with lexicographic order on the point as tie-break.
bool better(const Scored& a, const Scored& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.score != b.score) return a.score > b.score;
    return a.x < b.x;
}

Scored evaluate(const Point& x) {
    Scored s;
    s.x = x;
    const GainSet g = from_array(x);
    s.report = check_conditions(g);
    bool valid = true;
    try {
        g.validate();
    } catch (const DomainError&) {
        valid = false;
    }
    s.feasible = valid && s.report.feasible();
    s.score = s.feasible ? s.report.certified_rate() : -(infeasibility_penalty(s.report) + (valid ? 0.0 : 1.0));
    return s;
}

Point project(Point x, const SearchSpec& spec) {
    for (std::size_t j = 0; j < kGainCount; ++j) {
        const Box r = spec.range(j);
        x[j] = std::clamp(x[j], r.lo, r.hi);
    }
    return x;
}

Point random_point(const SearchSpec& spec, std::mt19937_64& engine) {
    Point x{};
    for (std::size_t j = 0; j < kGainCount; ++j) {
        const Box r = spec.range(j);
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        // Boxes spanning decades of positive values are sampled log-uniformly.
        if (r.lo > 0.0 && r.hi / r.lo > 100.0) {
            x[j] = r.lo * std::pow(r.hi / r.lo, u);
        } else {
            x[j] = r.lo + u * (r.hi - r.lo);
        }
    }
    return x;
}

struct StartResult {
    Scored best;
    std::size_t evaluations = 0;
};

StartResult pattern_search(const Point& start, const SearchSpec& spec) {
    StartResult out;
    Scored current = evaluate(project(start, spec));
    ++out.evaluations;

    Point step{};
    Point width{};
    for (std::size_t j = 0; j < kGainCount; ++j) {
        const Box r = spec.range(j);
        width[j] = r.hi - r.lo;
        step[j] = spec.init_step * width[j];
    }

    for (std::size_t iter = 0; iter < spec.max_iters; ++iter) {
        bool any_free = false;
        for (std::size_t j = 0; j < kGainCount; ++j) {
            if (width[j] > 0.0 && step[j] >= spec.min_step * width[j]) any_free = true;
        }
        if (!any_free) break;

        std::optional<Scored> best;
        for (std::size_t j = 0; j < kGainCount; ++j) {
            if (width[j] <= 0.0) continue;
            for (double dir : {1.0, -1.0}) {
                Point cand = current.x;
                cand[j] += dir * step[j];
                cand = project(cand, spec);
                if (cand == current.x) continue;
                Scored s = evaluate(cand);
                ++out.evaluations;
                if (!best || better(s, *best)) best = std::move(s);
            }
        }
        if (best && better(*best, current)) {
            current = std::move(*best);
        } else {
            for (double& s : step) s *= spec.shrink;
        }
    }
    out.best = std::move(current);
    return out;
}

}  // namespace

const std::array<std::string_view, kGainCount>& gain_names() { return kNames; }

std::optional<std::size_t> gain_index(std::string_view name) {
    for (std::size_t j = 0; j < kGainCount; ++j) {
        if (kNames[j] == name) return j;
    }
    return std::nullopt;
}

double get_gain(const GainSet& g, std::string_view name) { return g.*kFields[require_index(name)]; }

void set_gain(GainSet& g, std::string_view name, double value) { g.*kFields[require_index(name)] = value; }

std::array<double, kGainCount> to_array(const GainSet& g) {
    std::array<double, kGainCount> out{};
    for (std::size_t j = 0; j < kGainCount; ++j) out[j] = g.*kFields[j];
    return out;
}

GainSet from_array(const std::array<double, kGainCount>& values) {
    GainSet g;
    for (std::size_t j = 0; j < kGainCount; ++j) g.*kFields[j] = values[j];
    return g;
}

SearchSpec::SearchSpec() {
    for (std::size_t j = 0; j < kGainCount; ++j) boxes[j] = {1e-4, 10.0};
    boxes[*gain_index("alpha")] = {-2.0, 2.0};
    boxes[*gain_index("beta")] = {-2.0, 2.0};
    boxes[*gain_index("eps")] = {0.0, 1.0};
    fixed[*gain_index("eps")] = 1.0;
}

void SearchSpec::set_box(std::string_view name, double lo, double hi) {
    const std::size_t j = require_index(name);
    boxes[j] = {lo, hi};
    fixed[j].reset();
}

void SearchSpec::pin(std::string_view name, double value) { fixed[require_index(name)] = value; }

void SearchSpec::pin_all(const GainSet& g) {
    const auto values = to_array(g);
    for (std::size_t j = 0; j < kGainCount; ++j) fixed[j] = values[j];
}

Box SearchSpec::range(std::size_t idx) const {
    if (fixed[idx]) return {*fixed[idx], *fixed[idx]};
    return boxes[idx];
}

void SearchSpec::validate() const {
    for (std::size_t j = 0; j < kGainCount; ++j) {
        const Box r = range(j);
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
            throw DomainError(fmt::format("search: box for {} is empty or not finite", kNames[j]));
        }
    }
    if (n_starts < 1) throw DomainError("search: n_starts must be at least 1");
    if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("search: shrink must lie in (0, 1)");
    if (!(init_step > 0.0) || !(min_step > 0.0)) throw DomainError("search: steps must be positive");
}

double infeasibility_penalty(const ConditionReport& r) {
    double p = std::max(0.0, -r.c_sq);
    if (r.b > 0.0) p += std::max(0.0, r.eps - (r.c_sq / r.b - 1.0));
    p += std::max(0.0, -r.tail_cbar_sq);
    return p;
}

SynthesisResult synthesize(const SearchSpec& spec) {
    spec.validate();

    std::vector<Point> starts;
    starts.reserve(spec.n_starts);
    for (std::size_t s = 0; s < spec.n_starts; ++s) {
        if (s == 0 && spec.initial) {
            starts.push_back(to_array(*spec.initial));
            continue;
        }
        std::mt19937_64 engine(spec.seed + 0x9E3779B97F4A7C15ULL * (s + 1));
        starts.push_back(random_point(spec, engine));
    }

    std::vector<std::future<StartResult>> jobs;
    jobs.reserve(starts.size());
    for (const Point& p : starts) {
        jobs.push_back(std::async(std::launch::async, [&spec, p] { return pattern_search(p, spec); }));
    }

    SynthesisResult result;
    std::optional<Scored> best;
    for (auto& job : jobs) {
        StartResult r = job.get();
        result.evaluations += r.evaluations;
        if (!best || better(r.best, *best)) best = std::move(r.best);
    }
    result.feasible = best->feasible;
    result.gains = from_array(best->x);
    result.report = best->report;
    result.score = best->score;
    return result;
}

std::vector<LandscapePoint> margin_landscape(const GainSet& gains, std::string_view param,
                                             std::span<const double> grid) {
    const std::size_t j = require_index(param);
    std::vector<LandscapePoint> out;
    out.reserve(grid.size());
    for (double value : grid) {
        GainSet g = gains;
        g.*kFields[j] = value;
        const ConditionReport r = check_conditions(g);
        out.push_back({value, r.cbar_sq, r.feasible()});
    }
    return out;
}

}  // namespace platoon
