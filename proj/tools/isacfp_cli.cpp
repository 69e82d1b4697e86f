#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isacfp/harness.hpp"

using namespace isacfp;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    for (const auto& v : split_csv(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(v, &used));
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw ConfigError("not a number in --values: '" + v + "'");
        }
    }
    if (out.empty()) throw ConfigError("--values must list at least one number");
    return out;
}

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iters;
    std::optional<double> time_limit_s;
    std::optional<double> tol;
    std::optional<std::string> lambda_strategy;
    std::optional<int> trials;

    ExperimentSpec load() const {
        ExperimentSpec spec = experiment_from_json(read_json_file(config));
        if (seed) spec.scenario.seed = *seed;
        if (max_iters) spec.solver.max_iters = *max_iters;
        if (time_limit_s) spec.solver.time_limit_s = *time_limit_s;
        if (tol) spec.solver.rel_tol = *tol;
        if (lambda_strategy) spec.solver.lambda_strategy.kind = parse_majorant_kind(*lambda_strategy);
        if (trials) spec.trials = *trials;
        spec.output_dir = out;
        spec.validate();
        return spec;
    }
};

void add_common(CLI::App* app, CommonFlags& f, bool solver_flags) {
    app->add_option("--config", f.config, "Scenario or experiment JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--out", f.out, "Output directory")->required();
    app->add_option("--seed", f.seed, "Override the scenario seed");
    app->add_option("--trials", f.trials, "Number of seeded trials");
    if (solver_flags) {
        app->add_option("--max-iters", f.max_iters, "Iteration cap");
        app->add_option("--tol", f.tol, "Relative objective tolerance");
        app->add_option("--lambda-strategy", f.lambda_strategy, "max|trace|frobenius");
    }
}

void print_summary(const ExperimentSummary& s) {
    for (const auto& r : s.runs) {
        std::cout << "trial " << r.trial << ' ' << to_string(r.algorithm) << ": ";
        if (!r.result) {
            std::cout << "error: " << r.error << '\n';
            continue;
        }
        std::cout << "objective " << format_double(r.result->final_objective) << ", " << r.result->iterations
                  << " iterations, " << r.result->stop_reason << '\n';
    }
}

int cmd_run(const CommonFlags& f, const std::string& algorithm, bool design_rough) {
    ExperimentSpec spec = f.load();
    spec.algorithms = {parse_algorithm(algorithm)};
    if (!design_rough) {
        const auto summary = run_experiment(spec);
        print_summary(summary);
        for (const auto& r : summary.runs) {
            if (!r.result) throw NumericalError(r.error);
            write_json_file((fs::path(spec.output_dir) / ("beamformers_t" + std::to_string(r.trial) + "_" +
                                                         to_string(r.algorithm) + ".json"))
                                .string(),
                            beamformers_to_json(r.result->W));
            write_json_file((fs::path(spec.output_dir) / ("objective_t" + std::to_string(r.trial) + "_" +
                                                         to_string(r.algorithm) + ".json"))
                                .string(),
                            objective_to_json(r.final));
        }
        return 0;
    }
    // design against the rough DoA responses, as done before sensing
    ensure_dir(spec.output_dir);
    const Weights weights = Weights::from(spec.scenario);
    for (int t = 0; t < spec.trials; ++t) {
        const TrialSetup setup = setup_trial(spec.scenario, spec.solver.init, t);
        const ChannelSet design = with_response_at(setup.scenario.ch, setup.scenario.ch.theta_rough);
        Rng rng = make_stream(setup.seed, 0, StreamTag::init);
        SolverOptions opts = spec.solver;
        opts.algorithm = spec.algorithms.front();
        const auto res = run(design, weights, opts, init_beamformers(design, opts.init, rng));
        const std::string tag = "_t" + std::to_string(t) + "_" + to_string(opts.algorithm);
        write_trace_csv(res.trace, (fs::path(spec.output_dir) / ("trace" + tag + ".csv")).string());
        write_json_file((fs::path(spec.output_dir) / ("beamformers" + tag + ".json")).string(), beamformers_to_json(res.W));
        std::cout << "trial " << t << ' ' << to_string(opts.algorithm) << ": objective "
                  << format_double(res.final_objective) << ", " << res.iterations << " iterations, " << res.stop_reason
                  << '\n';
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& param, const std::string& values, const std::string& algs) {
    ExperimentSpec spec = f.load();
    if (!algs.empty()) {
        spec.algorithms.clear();
        for (const auto& a : split_csv(algs)) spec.algorithms.push_back(parse_algorithm(a));
    }
    spec.sweep = SweepSpec{param, parse_values(values)};
    const auto rows = run_sweep(spec);
    std::cout << sweep_to_csv(rows);
    return 0;
}

int cmd_estimate(const CommonFlags& f, const std::string& bf_path, const std::string& label) {
    ExperimentSpec spec = f.load();
    const BeamformerSet W = beamformers_from_json(read_json_file(bf_path));
    const TrialSetup setup = setup_trial(spec.scenario, spec.solver.init, 0);
    const ChannelSet& ch = setup.scenario.ch;
    if (W.L != ch.sys.L || W.K != ch.sys.K || W(0, 0).rows() != ch.sys.Nt || W(0, 0).cols() != ch.sys.d)
        throw ConfigError("beamformer shape does not match the scenario");
    if (!check_feasible(W, ch.sys).feasible) throw ConfigError("beamformers violate the power budget");
    Rng rng = make_stream(setup.seed, 0, StreamTag::echo_noise);
    const auto obs = synthesize_echo(ch, W, rng);
    const auto rep = estimate_theta(obs, ch);
    const auto rough = rough_prior_report(ch);
    ensure_dir(spec.output_dir);
    write_json_file((fs::path(spec.output_dir) / "estimation.json").string(), estimation_to_json(rep));
    const std::string pos = position_label(spec.scenario);
    std::string csv = "algorithm,position,mse,maxse\n";
    csv += "rough," + pos + ',' + format_double(rough.mean_sq_err) + ',' + format_double(rough.max_sq_err) + '\n';
    csv += label + ',' + pos + ',' + format_double(rep.mean_sq_err) + ',' + format_double(rep.max_sq_err) + '\n';
    write_text_file((fs::path(spec.output_dir) / "estimation.csv").string(), csv);
    std::cout << csv;
    return 0;
}

int cmd_estimation_table(const CommonFlags& f, const std::string& algs) {
    ExperimentSpec spec = f.load();
    if (!algs.empty()) {
        spec.algorithms.clear();
        for (const auto& a : split_csv(algs)) spec.algorithms.push_back(parse_algorithm(a));
    }
    const auto rows = run_estimation(spec);
    std::cout << "algorithm,position,mse,maxse\n";
    for (const auto& r : rows)
        std::cout << r.algorithm << ',' << r.position << ',' << format_double(r.mse) << ',' << format_double(r.maxse)
                  << '\n';
    return 0;
}

int cmd_race(const CommonFlags& f, const std::string& algs) {
    ExperimentSpec spec = f.load();
    spec.algorithms.clear();
    for (const auto& a : split_csv(algs)) spec.algorithms.push_back(parse_algorithm(a));
    if (spec.algorithms.empty()) throw ConfigError("--algorithms must name at least one algorithm");
    ExperimentSummary summary;
    const auto rows = run_race(spec, &summary);
    print_summary(summary);
    std::cout << "fraction,algorithm,time_s\n";
    for (const auto& r : rows)
        std::cout << format_double(r.fraction) << ',' << to_string(r.algorithm) << ','
                  << (r.time_s ? format_double(*r.time_s) : std::string("not reached")) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-cell ISAC beamforming by fractional programming"};
    app.require_subcommand(1);

    CommonFlags run_f, sweep_f, est_f, table_f, race_f;
    std::string algorithm = "fast", param = "omega", values, sweep_algs, bf_path, label = "beamformers", table_algs,
                race_algs;
    bool design_rough = false;

    auto* run_c = app.add_subcommand("run", "Run one algorithm on seeded trials");
    add_common(run_c, run_f, true);
    run_c->add_option("--algorithm", algorithm, "conventional|nonhomogeneous|fast")->required();
    run_c->add_option("--time-limit-s", run_f.time_limit_s, "Wall-clock budget per run");
    run_c->add_flag("--design-rough-doa", design_rough, "Design against the rough DoA responses");

    auto* sweep_c = app.add_subcommand("sweep", "Sweep one parameter");
    add_common(sweep_c, sweep_f, true);
    sweep_c->add_option("--param", param, "omega|beta|P_dbm|N_t")->required();
    sweep_c->add_option("--values", values, "Comma-separated values")->required();
    sweep_c->add_option("--algorithms", sweep_algs, "Comma-separated algorithms (default: all)");
    sweep_c->add_option("--time-limit-s", sweep_f.time_limit_s, "Wall-clock budget per run");

    auto* est_c = app.add_subcommand("estimate", "Estimate DoAs from echoes under given beamformers");
    add_common(est_c, est_f, false);
    est_c->add_option("--beamformers", bf_path, "Beamformer JSON")->required()->check(CLI::ExistingFile);
    est_c->add_option("--label", label, "Algorithm label for the CSV row");

    auto* table_c = app.add_subcommand("estimation-table", "Design, sense and estimate for every algorithm");
    add_common(table_c, table_f, true);
    table_c->add_option("--algorithms", table_algs, "Comma-separated algorithms (default: all)");
    table_c->add_option("--time-limit-s", table_f.time_limit_s, "Wall-clock budget per run");

    auto* race_c = app.add_subcommand("race", "Race algorithms from a common start");
    add_common(race_c, race_f, true);
    race_c->add_option("--algorithms", race_algs, "Comma-separated algorithms")->required();
    race_c->add_option("--time-limit-s", race_f.time_limit_s, "Wall-clock budget per run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_c) return cmd_run(run_f, algorithm, design_rough);
        if (*sweep_c) return cmd_sweep(sweep_f, param, values, sweep_algs);
        if (*est_c) return cmd_estimate(est_f, bf_path, label);
        if (*table_c) return cmd_estimation_table(table_f, table_algs);
        if (*race_c) return cmd_race(race_f, race_algs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
