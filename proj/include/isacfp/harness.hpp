#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isacfp/estimator.hpp"
#include "isacfp/io.hpp"
#include "isacfp/metrics.hpp"
#include "isacfp/random.hpp"
#include "isacfp/scenario.hpp"
#include "isacfp/solvers.hpp"

#ifndef ISACFP_BUILD_STAMP
#define ISACFP_BUILD_STAMP "unknown"
#endif

namespace isacfp {

inline constexpr const char* kBuildStamp = ISACFP_BUILD_STAMP;

struct SweepSpec {
    std::string parameter;  // omega | beta | P_dbm | N_t
    std::vector<double> values;
};

struct ExperimentSpec {
    NetworkConfig scenario;
    SolverOptions solver;
    std::vector<Algorithm> algorithms{Algorithm::conventional, Algorithm::nonhomogeneous, Algorithm::fast};
    int trials = 1;
    std::optional<SweepSpec> sweep;
    std::string output_dir;

    void validate() const {
        scenario.validate();
        solver.validate();
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
        if (sweep) {
            const auto& p = sweep->parameter;
            if (p != "omega" && p != "beta" && p != "P_dbm" && p != "N_t")
                throw ConfigError("sweep parameter must be one of omega, beta, P_dbm, N_t");
            if (sweep->values.empty()) throw ConfigError("sweep values must be nonempty");
        }
    }
};

/// Accepts either a bare scenario object or {scenario, solver, algorithms, trials, sweep}.
inline ExperimentSpec experiment_from_json(const json& j) {
    ExperimentSpec spec;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("scenario")) {
        spec.scenario = config_from_json(j);
        return spec;
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "scenario") spec.scenario = config_from_json(v);
        else if (key == "solver") spec.solver = solver_from_json(v);
        else if (key == "algorithms") {
            spec.algorithms.clear();
            for (const auto& a : v) spec.algorithms.push_back(parse_algorithm(detail::get_as<std::string>(a, key)));
        } else if (key == "trials") spec.trials = detail::get_as<int>(v, key);
        else if (key == "sweep")
            spec.sweep = SweepSpec{detail::get_as<std::string>(v.at("parameter"), "sweep.parameter"),
                                   detail::get_as<std::vector<double>>(v.at("values"), "sweep.values")};
        else if (key == "output_dir") spec.output_dir = detail::get_as<std::string>(v, key);
        else throw ConfigError("unknown experiment field '" + key + "'");
    }
    spec.validate();
    return spec;
}

/// FNV-1a over the raw bytes of every block (dimensions included).
inline std::uint64_t hash_beamformers(const BeamformerSet& W) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& m : W.blocks) {
        const std::int64_t dims[2] = {m.rows(), m.cols()};
        mix(dims, sizeof dims);
        mix(m.data(), sizeof(cplx) * static_cast<std::size_t>(m.size()));
    }
    return h;
}

inline std::uint64_t child_seed(std::uint64_t seed, int trial) {
    return derive_seed(seed, static_cast<std::uint64_t>(trial), StreamTag::scenario);
}

/// Scenario and common starting point of one trial.
struct TrialSetup {
    std::uint64_t seed = 0;
    Scenario scenario;
    BeamformerSet W0;
};

inline TrialSetup setup_trial(const NetworkConfig& cfg, InitMode init, int trial) {
    TrialSetup t;
    t.seed = child_seed(cfg.seed, trial);
    NetworkConfig c = cfg;
    c.seed = t.seed;
    t.scenario = make_scenario(c);
    Rng rng = make_stream(t.seed, 0, StreamTag::init);
    t.W0 = init_beamformers(t.scenario.ch, init, rng);
    return t;
}

struct RunRecord {
    int trial = 0;
    Algorithm algorithm = Algorithm::conventional;
    std::uint64_t seed = 0;
    std::uint64_t init_hash = 0;
    std::optional<RunResult> result;
    ObjectiveBreakdown final;
    std::string error;
    std::string trace_file;
};

struct ExperimentSummary {
    std::vector<std::uint64_t> child_seeds;
    std::vector<RunRecord> runs;
    json to_json(const ExperimentSpec& spec) const;
};

inline json ExperimentSummary::to_json(const ExperimentSpec& spec) const {
    json runs_j = json::array();
    for (const auto& r : runs) {
        json e{{"trial", r.trial},
               {"algorithm", to_string(r.algorithm)},
               {"seed", r.seed},
               {"init_hash", r.init_hash},
               {"trace_file", r.trace_file}};
        if (r.result) {
            e["final_objective"] = r.result->final_objective;
            e["objective"] = objective_to_json(r.final);
            e["iterations"] = r.result->iterations;
            e["converged"] = r.result->converged;
            e["truncated"] = r.result->truncated;
            e["stop_reason"] = r.result->stop_reason;
            e["elapsed_s"] = r.result->elapsed_s;
        } else {
            e["error"] = r.error;
        }
        runs_j.push_back(std::move(e));
    }
    std::vector<std::string> algs;
    for (auto a : spec.algorithms) algs.push_back(to_string(a));
    return json{{"build_stamp", kBuildStamp},
                {"seed", spec.scenario.seed},
                {"child_seeds", child_seeds},
                {"trials", spec.trials},
                {"algorithms", algs},
                {"config", config_to_json(spec.scenario)},
                {"solver", solver_to_json(spec.solver)},
                {"any_truncated",
                 std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.result && r.result->truncated; })},
                {"runs", runs_j}};
}

inline void ensure_dir(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::string trace_file_name(int trial, Algorithm a) {
    return "trace_t" + std::to_string(trial) + "_" + to_string(a) + ".csv";
}

/// Runs every algorithm on every trial from one shared starting point per trial.
/// Writes trace CSVs and summary.json when `spec.output_dir` is nonempty.
/// Numerical failures are recorded per run; other trials continue.
inline ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ensure_dir(spec.output_dir);
    ExperimentSummary summary;
    const Weights weights = Weights::from(spec.scenario);
    for (int t = 0; t < spec.trials; ++t) {
        const TrialSetup setup = setup_trial(spec.scenario, spec.solver.init, t);
        summary.child_seeds.push_back(setup.seed);
        const std::uint64_t h = hash_beamformers(setup.W0);
        for (Algorithm a : spec.algorithms) {
            RunRecord rec;
            rec.trial = t;
            rec.algorithm = a;
            rec.seed = setup.seed;
            rec.init_hash = h;
            SolverOptions opts = spec.solver;
            opts.algorithm = a;
            try {
                rec.result = run(setup.scenario.ch, weights, opts, setup.W0);
                rec.final = objective(setup.scenario.ch, rec.result->W, weights);
                if (!spec.output_dir.empty()) {
                    rec.trace_file = trace_file_name(t, a);
                    write_trace_csv(rec.result->trace, (std::filesystem::path(spec.output_dir) / rec.trace_file).string());
                }
            } catch (const NumericalError& e) {
                rec.error = e.what();
            }
            summary.runs.push_back(std::move(rec));
        }
    }
    if (!spec.output_dir.empty())
        write_json_file((std::filesystem::path(spec.output_dir) / "summary.json").string(), summary.to_json(spec));
    return summary;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    std::string parameter;
    double value = 0.0;
    int trial = 0;
    Algorithm algorithm = Algorithm::conventional;
    double objective = 0.0;
    double sum_rate = 0.0;
    double sum_fisher = 0.0;
    int iterations = 0;
    bool truncated = false;
    std::string error;
};

inline NetworkConfig apply_sweep_value(NetworkConfig c, const std::string& parameter, double v) {
    if (parameter == "omega") {
        for (auto& row : c.rate_weights)
            for (auto& w : row) w = v;
    } else if (parameter == "beta") {
        for (auto& b : c.sensing_weights) b = v;
    } else if (parameter == "P_dbm") {
        for (auto& p : c.power_budget_dbm) p = v;
    } else if (parameter == "N_t") {
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("N_t sweep values must be positive integers");
        c.tx_antennas = static_cast<int>(v);
    } else {
        throw ConfigError("unknown sweep parameter '" + parameter + "'");
    }
    c.validate();
    return c;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "parameter,value,trial,algorithm,objective,sum_rate_nats,sum_fisher,iterations,truncated\n";
    for (const auto& r : rows)
        out += r.parameter + ',' + format_double(r.value) + ',' + std::to_string(r.trial) + ',' +
               to_string(r.algorithm) + ',' + format_double(r.objective) + ',' + format_double(r.sum_rate) + ',' +
               format_double(r.sum_fisher) + ',' + std::to_string(r.iterations) + ',' +
               (r.truncated ? "1" : "0") + '\n';
    return out;
}

/// One row per (value, trial, algorithm); trials share child seeds across values.
inline std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.sweep) throw ConfigError("sweep specification missing");
    std::vector<SweepRow> rows;
    for (double v : spec.sweep->values) {
        ExperimentSpec point = spec;
        point.scenario = apply_sweep_value(spec.scenario, spec.sweep->parameter, v);
        point.output_dir.clear();
        point.sweep.reset();
        const auto summary = run_experiment(point);
        for (const auto& rec : summary.runs) {
            SweepRow row;
            row.parameter = spec.sweep->parameter;
            row.value = v;
            row.trial = rec.trial;
            row.algorithm = rec.algorithm;
            if (rec.result) {
                row.objective = rec.result->final_objective;
                row.sum_rate = rec.final.sum_rate;
                row.sum_fisher = rec.final.sum_fisher;
                row.iterations = rec.result->iterations;
                row.truncated = rec.result->truncated;
            } else {
                row.error = rec.error;
            }
            rows.push_back(std::move(row));
        }
    }
    if (!spec.output_dir.empty()) {
        ensure_dir(spec.output_dir);
        write_text_file((std::filesystem::path(spec.output_dir) / "sweep.csv").string(), sweep_to_csv(rows));
    }
    return rows;
}

/// Rate/sensing tradeoff over the rate weight omega.
inline std::vector<SweepRow> sweep_tradeoff(const ExperimentSpec& spec) {
    if (!spec.sweep || spec.sweep->parameter != "omega") throw ConfigError("tradeoff sweep requires parameter omega");
    return run_sweep(spec);
}

// ---------------------------------------------------------------------------
// Races

/// Time at which the trace first reaches `threshold`, linearly interpolated between rows.
inline std::optional<double> time_to_threshold(const IterationTrace& t, double threshold) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].objective < threshold) continue;
        if (i == 0) return t.rows[0].elapsed_s;
        const auto& a = t.rows[i - 1];
        const auto& b = t.rows[i];
        const double frac = (threshold - a.objective) / (b.objective - a.objective);
        return a.elapsed_s + frac * (b.elapsed_s - a.elapsed_s);
    }
    return std::nullopt;
}

/// First recorded iteration whose objective reaches `threshold`.
inline std::optional<int> iterations_to_threshold(const IterationTrace& t, double threshold) {
    for (const auto& r : t.rows)
        if (r.objective >= threshold) return r.iter;
    return std::nullopt;
}

struct RaceRow {
    int trial = 0;
    double fraction = 0.0;
    double threshold = 0.0;
    Algorithm algorithm = Algorithm::conventional;
    std::optional<double> time_s;
    std::optional<int> iterations;
};

inline const std::vector<double>& race_fractions() {
    static const std::vector<double> f{0.9, 0.95, 0.99, 0.999};
    return f;
}

/// Races the algorithms under the spec's limits; thresholds are fractions of the best final
/// objective reached by any algorithm in the trial.
inline std::vector<RaceRow> run_race(const ExperimentSpec& spec, ExperimentSummary* summary_out = nullptr) {
    ExperimentSpec s = spec;
    const auto summary = run_experiment(s);
    std::vector<RaceRow> rows;
    for (int t = 0; t < spec.trials; ++t) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& r : summary.runs)
            if (r.trial == t && r.result) best = std::max(best, r.result->final_objective);
        for (double f : race_fractions())
            for (const auto& r : summary.runs) {
                if (r.trial != t || !r.result) continue;
                RaceRow row{t, f, f * best, r.algorithm, time_to_threshold(r.result->trace, f * best),
                            iterations_to_threshold(r.result->trace, f * best)};
                rows.push_back(row);
            }
    }
    if (!spec.output_dir.empty()) {
        std::string csv = "trial,fraction,threshold,algorithm,time_s,iterations\n";
        for (const auto& r : rows)
            csv += std::to_string(r.trial) + ',' + format_double(r.fraction) + ',' + format_double(r.threshold) + ',' +
                   to_string(r.algorithm) + ',' + (r.time_s ? format_double(*r.time_s) : std::string("")) + ',' +
                   (r.iterations ? std::to_string(*r.iterations) : std::string("")) + '\n';
        write_text_file((std::filesystem::path(spec.output_dir) / "race.csv").string(), csv);
    }
    if (summary_out) *summary_out = summary;
    return rows;
}

// ---------------------------------------------------------------------------
// Estimation experiments

struct EstimationRow {
    std::string algorithm;  // solver name or "rough"
    std::string position;
    double mse = 0.0;
    double maxse = 0.0;
};

inline std::string position_label(const NetworkConfig& c) {
    return format_double(c.target_x_m) + ":" + format_double(c.target_y_m);
}

/// Designs beamformers from the rough DoAs, synthesizes echoes through the true responses and
/// estimates each DoA around its rough value. Errors are averaged over trials.
/// The first row is the rough prior itself.
inline std::vector<EstimationRow> run_estimation(const ExperimentSpec& spec, const DoaGrid& grid = {}) {
    spec.validate();
    const Weights weights = Weights::from(spec.scenario);
    const std::string pos = position_label(spec.scenario);
    std::vector<EstimationRow> rows;
    rows.push_back({"rough", pos, 0.0, 0.0});
    for (Algorithm a : spec.algorithms) rows.push_back({to_string(a), pos, 0.0, 0.0});
    for (int t = 0; t < spec.trials; ++t) {
        TrialSetup setup = setup_trial(spec.scenario, spec.solver.init, t);
        const ChannelSet& truth = setup.scenario.ch;
        const ChannelSet design = with_response_at(truth, truth.theta_rough);
        Rng init_rng = make_stream(setup.seed, 0, StreamTag::init);
        const BeamformerSet W0 = init_beamformers(design, spec.solver.init, init_rng);
        const auto rough = rough_prior_report(truth);
        rows[0].mse += rough.mean_sq_err / spec.trials;
        rows[0].maxse += rough.max_sq_err / spec.trials;
        for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
            SolverOptions opts = spec.solver;
            opts.algorithm = spec.algorithms[i];
            const auto res = run(design, weights, opts, W0);
            Rng echo_rng = make_stream(setup.seed, 0, StreamTag::echo_noise);
            const auto obs = synthesize_echo(truth, res.W, echo_rng);
            const auto rep = estimate_theta(obs, truth, grid);
            rows[i + 1].mse += rep.mean_sq_err / spec.trials;
            rows[i + 1].maxse += rep.max_sq_err / spec.trials;
        }
    }
    if (!spec.output_dir.empty()) {
        ensure_dir(spec.output_dir);
        std::string csv = "algorithm,position,mse,maxse\n";
        for (const auto& r : rows)
            csv += r.algorithm + ',' + r.position + ',' + format_double(r.mse) + ',' + format_double(r.maxse) + '\n';
        write_text_file((std::filesystem::path(spec.output_dir) / "estimation.csv").string(), csv);
    }
    return rows;
}

}  // namespace isacfp
