#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "platoon/config.hpp"
#include "platoon/errors.hpp"
#include "platoon/io.hpp"

using namespace platoon;

namespace {

const char* kGains = R"([gains]
kp1 = 0.1188
kp2 = 0.1188
kv = 0.0121
kp0 = 0.6
kv0 = 0.6
k_int = 0.2508
gp1 = 0.01
gp2 = 0.01
gv = 0.01
gp0 = 0.2881
gv0 = 0.342
alpha = 0.3
beta = -0.4
eps = 1
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "test.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, Defaults) {
    const RunConfig cfg = parse_config("");
    EXPECT_EQ(cfg.id, "run");
    EXPECT_EQ(cfg.scenario, ScenarioTemplate{});
    EXPECT_FALSE(cfg.gains.has_value());
    EXPECT_EQ(cfg.sim.variant, Variant::c2);
    EXPECT_EQ(cfg.sim.dt, 0.01);
    EXPECT_EQ(cfg.sim.t_end, 100.0);
    EXPECT_EQ(cfg.n_list, (std::vector<std::size_t>{3, 5, 10, 20, 40}));
}

TEST(Config, FullFile) {
    const std::string text = std::string("; leading comment\n[scenario]\nn_vehicles = 7\ngap = 12.5\nmass_mismatch = false\n"
                                         "pattern = alternating\nseed = 99\n\n") +
                             kGains +
                             "\n[run]\nid = demo\nvariant = c1\ndt = 0.02\nt_end = 40\nout = results\n"
                             "disturbance_channel = force\nbounds = original, augmented\nn_list = 2,4\n"
                             "sweep_pattern = uniform\n";
    const RunConfig cfg = parse_config(text, "x/demo_file.cfg");
    EXPECT_EQ(cfg.id, "demo");
    EXPECT_EQ(cfg.scenario.n_vehicles, 7u);
    EXPECT_EQ(cfg.scenario.gap, 12.5);
    EXPECT_FALSE(cfg.scenario.mass_mismatch);
    EXPECT_EQ(cfg.scenario.pattern, DrawPattern::alternating);
    EXPECT_EQ(cfg.seed, 99u);
    ASSERT_TRUE(cfg.gains.has_value());
    EXPECT_EQ(*cfg.gains, published_gains());
    EXPECT_EQ(cfg.sim.variant, Variant::c1);
    EXPECT_EQ(cfg.sim.dt, 0.02);
    EXPECT_EQ(cfg.sim.t_end, 40.0);
    EXPECT_EQ(cfg.out_dir, "results");
    EXPECT_EQ(cfg.sim.channel, DisturbanceChannel::force);
    EXPECT_EQ(cfg.bounds, (std::vector<BoundKind>{BoundKind::original, BoundKind::augmented}));
    EXPECT_EQ(cfg.n_list, (std::vector<std::size_t>{2, 4}));
    EXPECT_EQ(cfg.sweep_pattern, DrawPattern::uniform);
}

TEST(Config, IdDefaultsToFileStem) {
    EXPECT_EQ(parse_config("", "configs/platoon_n5.cfg").id, "platoon_n5");
}

TEST(Config, SynthesisSection) {
    const std::string text = std::string(kGains) +
                             "[synthesis]\nn_starts = 2\nmax_iters = 5\nseed = 4\nbox_kv = 0.001, 1\n"
                             "fix_alpha = 0.3\nstart_from_gains = true\n";
    const RunConfig cfg = parse_config(text);
    EXPECT_EQ(cfg.search.n_starts, 2u);
    EXPECT_EQ(cfg.search.max_iters, 5u);
    EXPECT_EQ(cfg.search.seed, 4u);
    EXPECT_EQ(cfg.search.range(*gain_index("kv")).lo, 0.001);
    EXPECT_EQ(cfg.search.range(*gain_index("kv")).hi, 1.0);
    EXPECT_EQ(cfg.search.range(*gain_index("alpha")).lo, 0.3);
    ASSERT_TRUE(cfg.search.initial.has_value());
    EXPECT_EQ(*cfg.search.initial, published_gains());
}

TEST(Config, ErrorsNameTheField) {
    std::string text = kGains;
    text.replace(text.find("kv = 0.0121"), 11, "kv = fast");
    EXPECT_NE(error_of(text).find("gains.kv"), std::string::npos);
    EXPECT_NE(error_of(text).find("test.cfg"), std::string::npos);

    text = kGains;
    text.replace(text.find("eps = 1\n"), 8, "");
    EXPECT_NE(error_of(text).find("gains.eps"), std::string::npos);

    EXPECT_NE(error_of("[scenario]\nn_vehicle = 3\n").find("n_vehicle"), std::string::npos);
    EXPECT_NE(error_of("[scenery]\n").find("scenery"), std::string::npos);
    EXPECT_NE(error_of("[run]\nvariant = c3\n").find("run.variant"), std::string::npos);
    EXPECT_NE(error_of("[run]\ndt = -1\n").find("run.dt"), std::string::npos);
    EXPECT_NE(error_of("[run]\nn_list = 3,x\n").find("run.n_list"), std::string::npos);
    EXPECT_NE(error_of("[run]\nbounds = original,nope\n").find("run.bounds"), std::string::npos);
    EXPECT_NE(error_of("[scenario]\nmass_mismatch = maybe\n").find("scenario.mass_mismatch"), std::string::npos);
    EXPECT_NE(error_of("[synthesis]\nbox_kq = 0,1\n").find("box_kq"), std::string::npos);
    EXPECT_NE(error_of("[synthesis]\nbox_kv = 1\n").find("synthesis.box_kv"), std::string::npos);
    EXPECT_NE(error_of("[synthesis]\nstart_from_gains = true\n").find("start_from_gains"), std::string::npos);
    // Malformed INI reports the line.
    EXPECT_NE(error_of("[scenario]\n[broken\n").find("test.cfg:2"), std::string::npos);
    EXPECT_THROW(load_config("/nonexistent/none.cfg"), ConfigError);
}

TEST(Config, FormatRoundTrip) {
    RunConfig cfg = parse_config(std::string(kGains) + "[scenario]\ngap = 7.25\nseed = 3\n[run]\nid = rt\n");
    cfg.sim.variant = Variant::c1;
    cfg.n_list = {1, 2, 3};
    const RunConfig back = parse_config(format_config(cfg));
    EXPECT_EQ(back.id, cfg.id);
    EXPECT_EQ(back.scenario, cfg.scenario);
    EXPECT_EQ(back.seed, cfg.seed);
    EXPECT_EQ(back.gains, cfg.gains);
    EXPECT_EQ(back.sim.variant, Variant::c1);
    EXPECT_EQ(back.n_list, cfg.n_list);
    EXPECT_EQ(back.bounds, cfg.bounds);
}

TEST(Config, GainsPrintRoundTripExact) {
    GainSet g = published_gains();
    g.kp0 = 0.1 + 0.2;
    g.alpha = 1.0 / 3.0;
    EXPECT_EQ(parse_config(format_gains(g)).gains, g);
}

TEST(Config, EnumNames) {
    EXPECT_EQ(parse_variant("c1"), Variant::c1);
    EXPECT_EQ(parse_variant(to_string(Variant::c2)), Variant::c2);
    EXPECT_EQ(parse_channel("accel"), DisturbanceChannel::acceleration);
    EXPECT_EQ(parse_channel("force"), DisturbanceChannel::force);
    EXPECT_FALSE(parse_channel("torque").has_value());
    EXPECT_EQ(parse_pattern("alternating"), DrawPattern::alternating);
    EXPECT_EQ(parse_size_list("3, 5,10", "f"), (std::vector<std::size_t>{3, 5, 10}));
    EXPECT_TRUE(parse_size_list("", "f").empty());
    EXPECT_THROW(parse_size_list("3,-1", "f"), ConfigError);
}

TEST(Csv, ParseBasics) {
    const CsvTable t = parse_csv("a,b,name\n1,2.5,x\r\n\n-3,1e-3,\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "name"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.numeric_column("b"), (std::vector<double>{2.5, 1e-3}));
    EXPECT_EQ(t.text_column("name"), (std::vector<std::string>{"x", ""}));
    EXPECT_THROW(t.numeric_column("name"), ConfigError);
    EXPECT_THROW(static_cast<void>(t.column_index("zzz")), ConfigError);
    EXPECT_THROW(parse_csv("a,b\n1\n"), ConfigError);
    EXPECT_THROW(parse_csv(""), ConfigError);
}

TEST(Csv, TrajectoryAndMetricsRoundTrip) {
    ScenarioTemplate base;
    base.n_vehicles = 3;
    const PlatoonConfig cfg = sample_scenario(base, 8);
    SimOptions opts;
    opts.t_end = 2.0;
    const ScenarioRun run = run_scenario(cfg, published_gains(), opts);
    const CsvTable traj = parse_csv(trajectory_csv(run.trajectory, run.metrics));
    EXPECT_EQ(traj.header.size(), 1u + 7u * 3u);
    EXPECT_EQ(traj.rows.size(), run.trajectory.times.size());
    EXPECT_EQ(traj.numeric_column("t"), run.trajectory.times);
    const auto q2 = traj.numeric_column("q_2");
    const auto e3 = traj.numeric_column("e_gap_3");
    for (std::size_t k = 0; k < q2.size(); ++k) {
        EXPECT_EQ(q2[k], run.trajectory.state(k, 2).q);
        EXPECT_EQ(e3[k], run.metrics.gap_err[k * 3 + 2]);
    }

    const BoundInputs in = bound_inputs(cfg, published_gains(), run.report);
    const std::vector<DssBound> bounds{{BoundKind::original, in}, {BoundKind::total_disturbance, in}};
    const CsvTable m = parse_csv(metrics_csv(run.trajectory, run.metrics, bounds));
    EXPECT_EQ(m.header, (std::vector<std::string>{"t", "sup_err", "sup_err_z", "bound_original",
                                                  "bound_total_disturbance"}));
    EXPECT_EQ(m.numeric_column("sup_err"), run.metrics.sup_err);
    const auto bo = m.numeric_column("bound_original");
    for (std::size_t k = 0; k < bo.size(); ++k) EXPECT_EQ(bo[k], eval_bound(bounds[0], run.trajectory.times[k]));

    const CsvTable bc = parse_csv(bound_curves_csv(run.trajectory.times, bounds));
    EXPECT_EQ(bc.header, (std::vector<std::string>{"t", "bound_value", "kind"}));
    EXPECT_EQ(bc.rows.size(), 2 * run.trajectory.times.size());
    EXPECT_EQ(bc.text_column("kind").back(), "total_disturbance");
}

TEST(Csv, ScenarioRoundTrip) {
    ScenarioTemplate base;
    base.n_vehicles = 6;
    base.leader_initial_position = 3.25;
    const PlatoonConfig cfg = sample_scenario(base, 0xFFFFFFFFFFFFFFF1ULL);
    EXPECT_EQ(scenario_from_csv(parse_csv(scenario_csv(cfg))), cfg);
}

TEST(Csv, SweepRoundTrip) {
    const std::vector<SweepRow> rows{{3, 1.25, 10.0}, {5, 1.5, 10.0}};
    const CsvTable t = parse_csv(sweep_csv(rows));
    EXPECT_EQ(t.header, (std::vector<std::string>{"N", "worst_sup_err", "bound_envelope"}));
    EXPECT_EQ(t.numeric_column("N"), (std::vector<double>{3, 5}));
    EXPECT_EQ(t.numeric_column("worst_sup_err"), (std::vector<double>{1.25, 1.5}));
}

TEST(Records, CertificateAndGainsRecord) {
    const ConditionReport r = check_conditions(published_gains());
    const auto j = certificate_json(r);
    EXPECT_EQ(j["c_sq"].get<double>(), r.c_sq);
    EXPECT_EQ(j["cbar_sq"].get<double>(), r.cbar_sq);
    EXPECT_TRUE(j["flags"]["feasible"].get<bool>());
    EXPECT_EQ(j["worst_vertex"]["s_h"].get<double>(), r.worst_vertex.s_h);

    const std::string rec = gains_record(published_gains(), r);
    EXPECT_EQ(rec, gains_record(published_gains(), r));
    EXPECT_EQ(parse_config(rec).gains, published_gains());
    EXPECT_NE(rec.find("; feasible = true"), std::string::npos);
}

TEST(Records, WriteTextCreatesDirectories) {
    const auto dir = std::filesystem::temp_directory_path() / "platoon_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_text(dir / "x.txt", "hello\n");
    EXPECT_EQ(read_csv(dir / "x.txt").header, (std::vector<std::string>{"hello"}));
    std::filesystem::remove_all(dir.parent_path());
}
