#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace isacfp;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("isacfp_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentSpec small_spec(int trials = 1) {
    ExperimentSpec s;
    s.scenario = uniform_config(2, 2, 4, 4, 2, 1, 20.0, 1.0, 1e-9, 1e-3);
    s.scenario.block_length = 4;
    s.scenario.seed = 42;
    s.solver.max_iters = 60;
    s.trials = trials;
    return s;
}

}  // namespace

TEST(ConfigJson, RoundTripAndBroadcast) {
    const json j = json::parse(R"({"num_cells": 2, "users_per_cell": 3, "tx_antennas": 6, "rate_weights": 0.5,
                                  "sensing_weights": [1e-9, 2e-9], "power_budget_dbm": 25, "seed": 9})");
    const auto c = config_from_json(j);
    EXPECT_EQ(c.rate_weights, (std::vector<std::vector<double>>(2, std::vector<double>(3, 0.5))));
    EXPECT_EQ(c.sensing_weights, (std::vector<double>{1e-9, 2e-9}));
    EXPECT_EQ(c.power_budget_dbm, (std::vector<double>{25.0, 25.0}));
    const auto back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.seed, 9u);
}

TEST(ConfigJson, Errors) {
    EXPECT_THROW(config_from_json(json::parse(R"({"num_cels": 2})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"num_cells": 8})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"num_cells": 2, "sensing_weights": [1, 2, 3]})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"streams": 3, "user_antennas": 2})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"scenario": {}, "trails": 2})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"scenario": {}, "algorithms": ["newton"]})")), ConfigError);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"scenario": {}, "sweep": {"parameter": "xi", "values": [1]}})")),
                 ConfigError);
}

TEST(SolverJson, RoundTrip) {
    SolverOptions o;
    o.algorithm = Algorithm::nonhomogeneous;
    o.max_iters = 77;
    o.rel_tol = 1e-7;
    o.lambda_strategy.kind = MajorantStrategy::Kind::trace;
    const auto back = solver_from_json(solver_to_json(o));
    EXPECT_EQ(solver_to_json(back), solver_to_json(o));
    EXPECT_THROW(solver_from_json(json::parse(R"({"max_iter": 3})")), ConfigError);
}

TEST(TraceCsv, RoundTripAndEmpty) {
    IterationTrace t;
    for (int i = 0; i < 3; ++i) {
        TraceRow r;
        r.iter = i;
        r.elapsed_s = 0.1 * i + 1e-17;
        r.objective = 1.0 / 3.0 + i;
        r.sum_rate = std::exp(1.0) * i;
        r.sum_fisher = 1e-300 * (i + 1);
        t.rows.push_back(r);
    }
    const auto back = trace_from_csv(trace_to_csv(t));
    ASSERT_EQ(back.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.rows[i].iter, t.rows[i].iter);
        EXPECT_EQ(back.rows[i].elapsed_s, t.rows[i].elapsed_s);
        EXPECT_EQ(back.rows[i].objective, t.rows[i].objective);
        EXPECT_EQ(back.rows[i].sum_rate, t.rows[i].sum_rate);
        EXPECT_EQ(back.rows[i].sum_fisher, t.rows[i].sum_fisher);
    }
    EXPECT_EQ(trace_to_csv(IterationTrace{}), std::string(kTraceHeader) + "\n");
    EXPECT_TRUE(trace_from_csv(trace_to_csv(IterationTrace{})).rows.empty());
    EXPECT_THROW(trace_from_csv("iter,objective\n"), ConfigError);
}

TEST(BeamformerJson, RoundTripBitExact) {
    const auto sc = test::small_instance(1);
    Rng rng = make_stream(1, 0, StreamTag::init);
    const auto W = test::random_feasible(sc.ch.sys, rng);
    const auto back = beamformers_from_json(json::parse(beamformers_to_json(W).dump()));
    ASSERT_EQ(back.blocks.size(), W.blocks.size());
    for (std::size_t i = 0; i < W.blocks.size(); ++i) EXPECT_EQ(back.blocks[i], W.blocks[i]);
    EXPECT_THROW(beamformers_from_json(json::parse(R"({"num_cells": 1})")), ConfigError);
}

TEST(Experiment, OutputsAndSummary) {
    const auto dir = fresh_dir("experiment");
    auto spec = small_spec(1);
    spec.output_dir = dir.string();
    const auto summary = run_experiment(spec);
    ASSERT_EQ(summary.runs.size(), 3u);
    int traces = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") ++traces;
    EXPECT_EQ(traces, 3);
    for (const auto& r : summary.runs) {
        ASSERT_TRUE(r.result.has_value());
        EXPECT_EQ(r.init_hash, summary.runs[0].init_hash);
        const auto t = read_trace_csv((dir / r.trace_file).string());
        EXPECT_EQ(t.rows.size(), r.result->trace.rows.size());
        EXPECT_EQ(t.rows.front().objective, summary.runs[0].result->trace.rows.front().objective);
    }
    const json s = read_json_file((dir / "summary.json").string());
    EXPECT_EQ(s.at("seed").get<std::uint64_t>(), 42u);
    EXPECT_EQ(s.at("child_seeds").size(), 1u);
    EXPECT_EQ(s.at("child_seeds")[0].get<std::uint64_t>(), child_seed(42, 0));
    EXPECT_TRUE(s.contains("build_stamp"));
    EXPECT_EQ(experiment_from_json(json{{"scenario", s.at("config")}, {"solver", s.at("solver")}}).scenario.seed, 42u);
    fs::remove_all(dir);
}

TEST(Experiment, DeterministicAcrossRuns) {
    const auto spec = small_spec(2);
    const auto a = run_experiment(spec), b = run_experiment(spec);
    ASSERT_EQ(a.runs.size(), 6u);
    EXPECT_NE(a.child_seeds[0], a.child_seeds[1]);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        const auto& ra = a.runs[i].result->trace.rows;
        const auto& rb = b.runs[i].result->trace.rows;
        ASSERT_EQ(ra.size(), rb.size());
        for (std::size_t k = 0; k < ra.size(); ++k) EXPECT_EQ(ra[k].objective, rb[k].objective);
    }
}

TEST(Sweep, RowsAndTradeoffDirection) {
    auto spec = small_spec(1);
    spec.algorithms = {Algorithm::conventional};
    spec.solver.max_iters = 400;
    spec.sweep = SweepSpec{"omega", {1e-10, 1e-6, 1e-2, 1.0}};
    spec.scenario.sensing_weights.assign(2, 1e-14);
    const auto dir = fresh_dir("sweep");
    spec.output_dir = dir.string();
    const auto rows = sweep_tradeoff(spec);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].sum_rate, rows[i - 1].sum_rate * 0.99);
    EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
    fs::remove_all(dir);

    EXPECT_THROW(apply_sweep_value(spec.scenario, "N_t", 2.5), ConfigError);
    EXPECT_EQ(apply_sweep_value(spec.scenario, "N_t", 6).tx_antennas, 6);
    EXPECT_EQ(apply_sweep_value(spec.scenario, "P_dbm", 10).power_budget_dbm[1], 10.0);
}

TEST(Race, ThresholdInterpolation) {
    IterationTrace t;
    for (int i = 0; i < 3; ++i) {
        TraceRow r;
        r.iter = i * 2;
        r.elapsed_s = i;
        r.objective = std::vector<double>{1.0, 3.0, 4.0}[static_cast<std::size_t>(i)];
        t.rows.push_back(r);
    }
    EXPECT_DOUBLE_EQ(*time_to_threshold(t, 2.0), 0.5);
    EXPECT_DOUBLE_EQ(*time_to_threshold(t, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(*time_to_threshold(t, 3.5), 1.5);
    EXPECT_FALSE(time_to_threshold(t, 5.0).has_value());
    EXPECT_EQ(*iterations_to_threshold(t, 3.5), 4);
    EXPECT_FALSE(iterations_to_threshold(t, 5.0).has_value());
}

TEST(Race, WritesRowsPerFraction) {
    auto spec = small_spec(1);
    spec.algorithms = {Algorithm::nonhomogeneous, Algorithm::fast};
    spec.solver.time_limit_s = 5.0;
    const auto rows = run_race(spec);
    EXPECT_EQ(rows.size(), race_fractions().size() * 2);
    for (std::size_t i = 0; i < rows.size(); i += 2)
        EXPECT_TRUE(rows[i].iterations.has_value() || rows[i + 1].iterations.has_value());
}

TEST(Estimation, RoughRowFirstAndPositionLabel) {
    auto spec = small_spec(1);
    spec.algorithms = {Algorithm::fast};
    const auto rows = run_estimation(spec);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].algorithm, "rough");
    EXPECT_EQ(rows[1].algorithm, "fast");
    EXPECT_EQ(rows[0].position, position_label(spec.scenario));
    EXPECT_LE(rows[0].maxse, 0.05 * 0.05);
}
