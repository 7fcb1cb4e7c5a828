#include "platoon/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "platoon/errors.hpp"

namespace platoon {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view raw, std::string_view field) {
    const std::string s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        throw ConfigError(fmt::format("field {}: expected a finite number, got '{}'", field, s));
    }
    return value;
}

std::uint64_t to_u64(std::string_view raw, std::string_view field) {
    const std::string s = trim(raw);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("field {}: expected a non-negative integer, got '{}'", field, s));
    }
    return value;
}

bool to_bool(std::string_view raw, std::string_view field) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(fmt::format("field {}: expected true or false, got '{}'", field, s));
}

Box to_box(std::string_view raw, std::string_view field) {
    const std::string s(raw);
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError(fmt::format("field {}: expected 'lo,hi', got '{}'", field, s));
    return {to_double(s.substr(0, comma), field), to_double(s.substr(comma + 1), field)};
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    [[nodiscard]] bool present() const { return tree_ != nullptr; }

    [[nodiscard]] std::optional<std::string> raw(const std::string& key) const {
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        return v ? std::optional<std::string>(trim(*v)) : std::nullopt;
    }

    [[nodiscard]] std::string field(const std::string& key) const { return name_ + "." + key; }

    void number(const std::string& key, double& out) const {
        if (auto v = raw(key)) out = to_double(*v, field(key));
    }
    void count(const std::string& key, std::size_t& out) const {
        if (auto v = raw(key)) out = static_cast<std::size_t>(to_u64(*v, field(key)));
    }
    void u64(const std::string& key, std::uint64_t& out) const {
        if (auto v = raw(key)) out = to_u64(*v, field(key));
    }
    void flag(const std::string& key, bool& out) const {
        if (auto v = raw(key)) out = to_bool(*v, field(key));
    }

    // Rejects keys not in `allowed` (and not matching an allowed prefix).
    void check_keys(const std::set<std::string>& allowed, const std::vector<std::string>& prefixes = {}) const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            if (allowed.count(key)) continue;
            bool ok = false;
            for (const auto& p : prefixes) ok = ok || key.rfind(p, 0) == 0;
            if (!ok) throw ConfigError(fmt::format("unknown field {}", field(key)));
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
    const auto child = root.get_child_optional(pt::ptree::path_type(name, '\0'));
    return {child ? &*child : nullptr, name};
}

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::c1 ? "c1" : "c2"; }

std::string_view to_string(DisturbanceChannel c) {
    return c == DisturbanceChannel::acceleration ? "accel" : "force";
}

std::string_view to_string(DrawPattern p) { return p == DrawPattern::uniform ? "uniform" : "alternating"; }

std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "c1" || s == "C1") return Variant::c1;
    if (s == "c2" || s == "C2") return Variant::c2;
    return std::nullopt;
}

std::optional<DisturbanceChannel> parse_channel(std::string_view s) {
    if (s == "accel" || s == "acceleration") return DisturbanceChannel::acceleration;
    if (s == "force") return DisturbanceChannel::force;
    return std::nullopt;
}

std::optional<DrawPattern> parse_pattern(std::string_view s) {
    if (s == "uniform") return DrawPattern::uniform;
    if (s == "alternating") return DrawPattern::alternating;
    return std::nullopt;
}

std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view field) {
    std::vector<std::size_t> out;
    const std::string s = trim(text);
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::uint64_t n = to_u64(item, field);
        if (n == 0) throw ConfigError(fmt::format("field {}: platoon lengths must be at least 1", field));
        out.push_back(static_cast<std::size_t>(n));
    }
    return out;
}

RunConfig parse_config(std::string_view text, const std::string& source) {
    pt::ptree root;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("{}:{}: {}", source, e.line(), e.message()));
    }

    const std::set<std::string> known_sections{"scenario", "gains", "run", "synthesis"};
    // The INI reader drops empty sections, so headers are checked on the raw text too.
    {
        std::istringstream lines{std::string(text)};
        std::string line;
        for (std::size_t line_no = 1; std::getline(lines, line); ++line_no) {
            const std::string s = trim(line);
            if (s.size() < 2 || s.front() != '[' || s.back() != ']') continue;
            const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
            if (!known_sections.count(name)) {
                throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source, line_no, name));
            }
        }
    }
    for (const auto& [name, child] : root) {
        if (!known_sections.count(name)) throw ConfigError(fmt::format("{}: unknown section [{}]", source, name));
        if (child.data().size() && child.empty()) {
            throw ConfigError(fmt::format("{}: key '{}' outside of any section", source, name));
        }
    }

    RunConfig cfg;
    try {
        const Section sc = section(root, "scenario");
        sc.check_keys({"n_vehicles", "gap", "leader_speed", "leader_initial_position", "mass_nominal", "mass_spread",
                       "mass_mismatch", "position_spread", "velocity_spread", "amplitude_spread", "constant_center",
                       "constant_spread", "disturbance_decay", "disturbance_freq", "pattern", "seed"});
        ScenarioTemplate& t = cfg.scenario;
        sc.count("n_vehicles", t.n_vehicles);
        sc.number("gap", t.gap);
        sc.number("leader_speed", t.leader_speed);
        sc.number("leader_initial_position", t.leader_initial_position);
        sc.number("mass_nominal", t.mass_nominal);
        sc.number("mass_spread", t.mass_spread);
        sc.flag("mass_mismatch", t.mass_mismatch);
        sc.number("position_spread", t.position_spread);
        sc.number("velocity_spread", t.velocity_spread);
        sc.number("amplitude_spread", t.amplitude_spread);
        sc.number("constant_center", t.constant_center);
        sc.number("constant_spread", t.constant_spread);
        sc.number("disturbance_decay", t.disturbance_decay);
        sc.number("disturbance_freq", t.disturbance_freq);
        if (auto p = sc.raw("pattern")) {
            const auto parsed = parse_pattern(*p);
            if (!parsed) throw ConfigError(fmt::format("field scenario.pattern: expected uniform or alternating, got '{}'", *p));
            t.pattern = *parsed;
        }
        sc.u64("seed", cfg.seed);
        t.validate();

        const Section gs = section(root, "gains");
        if (gs.present()) {
            std::set<std::string> names;
            for (auto n : gain_names()) names.emplace(n);
            gs.check_keys(names);
            GainSet g;
            for (auto n : gain_names()) {
                const std::string key(n);
                const auto v = gs.raw(key);
                if (!v) throw ConfigError(fmt::format("missing field gains.{}", key));
                set_gain(g, key, to_double(*v, gs.field(key)));
            }
            cfg.gains = g;
        }

        const Section rs = section(root, "run");
        rs.check_keys({"id", "variant", "dt", "t_end", "out", "disturbance_channel", "bounds", "n_list", "sweep_pattern"});
        if (auto v = rs.raw("id")) {
            if (v->empty()) throw ConfigError("field run.id: must not be empty");
            cfg.id = *v;
        } else {
            cfg.id = source == "<config>" ? "run" : std::filesystem::path(source).stem().string();
        }
        if (auto v = rs.raw("variant")) {
            const auto parsed = parse_variant(*v);
            if (!parsed) throw ConfigError(fmt::format("field run.variant: expected c1 or c2, got '{}'", *v));
            cfg.sim.variant = *parsed;
        }
        rs.number("dt", cfg.sim.dt);
        rs.number("t_end", cfg.sim.t_end);
        if (!(cfg.sim.dt > 0.0)) throw ConfigError("field run.dt: must be positive");
        if (!(cfg.sim.t_end >= cfg.sim.dt)) throw ConfigError("field run.t_end: must be at least dt");
        if (auto v = rs.raw("out")) cfg.out_dir = *v;
        if (auto v = rs.raw("disturbance_channel")) {
            const auto parsed = parse_channel(*v);
            if (!parsed) throw ConfigError(fmt::format("field run.disturbance_channel: expected accel or force, got '{}'", *v));
            cfg.sim.channel = *parsed;
        }
        if (auto v = rs.raw("bounds")) {
            cfg.bounds.clear();
            std::stringstream ss(*v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto kind = parse_bound_kind(trim(item));
                if (!kind) throw ConfigError(fmt::format("field run.bounds: unknown bound kind '{}'", trim(item)));
                cfg.bounds.push_back(*kind);
            }
        }
        if (auto v = rs.raw("n_list")) cfg.n_list = parse_size_list(*v, "run.n_list");
        if (auto v = rs.raw("sweep_pattern")) {
            const auto parsed = parse_pattern(*v);
            if (!parsed) throw ConfigError(fmt::format("field run.sweep_pattern: expected uniform or alternating, got '{}'", *v));
            cfg.sweep_pattern = *parsed;
        }

        const Section ss = section(root, "synthesis");
        ss.check_keys({"n_starts", "max_iters", "seed", "shrink", "init_step", "min_step", "start_from_gains"},
                      {"box_", "fix_"});
        SearchSpec& spec = cfg.search;
        ss.count("n_starts", spec.n_starts);
        ss.count("max_iters", spec.max_iters);
        ss.u64("seed", spec.seed);
        ss.number("shrink", spec.shrink);
        ss.number("init_step", spec.init_step);
        ss.number("min_step", spec.min_step);
        for (auto n : gain_names()) {
            const std::string name(n);
            if (auto v = ss.raw("box_" + name)) {
                const Box b = to_box(*v, ss.field("box_" + name));
                spec.set_box(name, b.lo, b.hi);
            }
        }
        for (auto n : gain_names()) {
            const std::string name(n);
            if (auto v = ss.raw("fix_" + name)) spec.pin(name, to_double(*v, ss.field("fix_" + name)));
        }
        if (ss.present()) {
            for (const auto& [key, child] : root.get_child("synthesis")) {
                const bool is_box = key.rfind("box_", 0) == 0;
                if ((is_box || key.rfind("fix_", 0) == 0) && !gain_index(key.substr(4))) {
                    throw ConfigError(fmt::format("unknown field synthesis.{}", key));
                }
            }
        }
        bool start_from_gains = false;
        ss.flag("start_from_gains", start_from_gains);
        if (start_from_gains) {
            if (!cfg.gains) throw ConfigError("field synthesis.start_from_gains: needs a [gains] section");
            spec.initial = cfg.gains;
        }
        try {
            spec.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string format_gains(const GainSet& g) {
    std::string out = "[gains]\n";
    for (auto n : gain_names()) out += fmt::format("{} = {}\n", n, fmt_double(get_gain(g, n)));
    return out;
}

std::string format_config(const RunConfig& cfg) {
    const ScenarioTemplate& t = cfg.scenario;
    std::string out = "[scenario]\n";
    out += fmt::format("n_vehicles = {}\n", t.n_vehicles);
    out += fmt::format("gap = {}\n", fmt_double(t.gap));
    out += fmt::format("leader_speed = {}\n", fmt_double(t.leader_speed));
    out += fmt::format("leader_initial_position = {}\n", fmt_double(t.leader_initial_position));
    out += fmt::format("mass_nominal = {}\n", fmt_double(t.mass_nominal));
    out += fmt::format("mass_spread = {}\n", fmt_double(t.mass_spread));
    out += fmt::format("mass_mismatch = {}\n", t.mass_mismatch ? "true" : "false");
    out += fmt::format("position_spread = {}\n", fmt_double(t.position_spread));
    out += fmt::format("velocity_spread = {}\n", fmt_double(t.velocity_spread));
    out += fmt::format("amplitude_spread = {}\n", fmt_double(t.amplitude_spread));
    out += fmt::format("constant_center = {}\n", fmt_double(t.constant_center));
    out += fmt::format("constant_spread = {}\n", fmt_double(t.constant_spread));
    out += fmt::format("disturbance_decay = {}\n", fmt_double(t.disturbance_decay));
    out += fmt::format("disturbance_freq = {}\n", fmt_double(t.disturbance_freq));
    out += fmt::format("pattern = {}\n", to_string(t.pattern));
    out += fmt::format("seed = {}\n\n", cfg.seed);

    if (cfg.gains) out += format_gains(*cfg.gains) + "\n";

    out += "[run]\n";
    out += fmt::format("id = {}\n", cfg.id);
    out += fmt::format("variant = {}\n", to_string(cfg.sim.variant));
    out += fmt::format("dt = {}\n", fmt_double(cfg.sim.dt));
    out += fmt::format("t_end = {}\n", fmt_double(cfg.sim.t_end));
    out += fmt::format("out = {}\n", cfg.out_dir);
    out += fmt::format("disturbance_channel = {}\n", to_string(cfg.sim.channel));
    std::vector<std::string> kinds;
    for (BoundKind k : cfg.bounds) kinds.emplace_back(to_string(k));
    out += fmt::format("bounds = {}\n", fmt::join(kinds, ","));
    out += fmt::format("n_list = {}\n", fmt::join(cfg.n_list, ","));
    out += fmt::format("sweep_pattern = {}\n", to_string(cfg.sweep_pattern));
    return out;
}

}  // namespace platoon
