#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isacfp/errors.hpp"
#include "isacfp/estimator.hpp"
#include "isacfp/metrics.hpp"
#include "isacfp/scenario.hpp"
#include "isacfp/solvers.hpp"

namespace isacfp {

using json = nlohmann::json;

/// Shortest decimal form that round-trips a double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// NetworkConfig

namespace detail {

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

/// Scalar broadcast to `n` entries, or a list of exactly `n`.
inline std::vector<double> per_bs(const json& j, const std::string& key, int n) {
    if (j.is_number()) return std::vector<double>(static_cast<std::size_t>(n), j.get<double>());
    auto v = get_as<std::vector<double>>(j, key);
    if (v.size() != static_cast<std::size_t>(n))
        throw ConfigError("config field '" + key + "' must have " + std::to_string(n) + " entries");
    return v;
}

/// Scalar, per-BS list (broadcast over users), or full [L][K] matrix.
inline std::vector<std::vector<double>> per_user(const json& j, const std::string& key, int L, int K) {
    const auto Ls = static_cast<std::size_t>(L), Ks = static_cast<std::size_t>(K);
    if (j.is_number()) return std::vector<std::vector<double>>(Ls, std::vector<double>(Ks, j.get<double>()));
    if (!j.is_array() || j.size() != Ls) throw ConfigError("config field '" + key + "' must have num_cells rows");
    std::vector<std::vector<double>> out;
    for (const auto& row : j) {
        if (row.is_number()) out.emplace_back(Ks, row.get<double>());
        else out.push_back(per_bs(row, key, K));
    }
    return out;
}

}  // namespace detail

inline NetworkConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    NetworkConfig c;
    static const std::vector<std::string> known = {
        "num_cells", "users_per_cell", "tx_antennas", "echo_rx_antennas", "user_antennas", "streams",
        "block_length", "power_budget_dbm", "noise_user_dbm", "noise_bs_dbm", "reflection_coeff", "rate_weights",
        "sensing_weights", "bs_spacing_m", "shadowing_std_db", "pathloss_offset_db", "pathloss_slope",
        "user_radius_min_fraction", "user_radius_max_fraction", "target_x_m", "target_y_m",
        "rough_doa_max_error_rad", "seed"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown scenario config field '" + key + "'");

    auto geti = [&](const char* k, int& dst) {
        if (j.contains(k)) dst = detail::get_as<int>(j.at(k), k);
    };
    auto getd = [&](const char* k, double& dst) {
        if (j.contains(k)) dst = detail::get_as<double>(j.at(k), k);
    };
    geti("num_cells", c.num_cells);
    geti("users_per_cell", c.users_per_cell);
    geti("tx_antennas", c.tx_antennas);
    geti("echo_rx_antennas", c.echo_rx_antennas);
    geti("user_antennas", c.user_antennas);
    geti("streams", c.streams);
    geti("block_length", c.block_length);
    getd("noise_user_dbm", c.noise_user_dbm);
    getd("noise_bs_dbm", c.noise_bs_dbm);
    getd("bs_spacing_m", c.bs_spacing_m);
    getd("shadowing_std_db", c.shadowing_std_db);
    getd("pathloss_offset_db", c.pathloss_offset_db);
    getd("pathloss_slope", c.pathloss_slope);
    getd("user_radius_min_fraction", c.user_radius_min_fraction);
    getd("user_radius_max_fraction", c.user_radius_max_fraction);
    getd("target_x_m", c.target_x_m);
    getd("target_y_m", c.target_y_m);
    getd("rough_doa_max_error_rad", c.rough_doa_max_error_rad);
    if (j.contains("seed")) c.seed = detail::get_as<std::uint64_t>(j.at("seed"), "seed");

    const int L = c.num_cells, K = c.users_per_cell;
    if (L < 1 || K < 1) throw ConfigError("invalid network config: num_cells and users_per_cell must be >= 1");
    c.power_budget_dbm = detail::per_bs(j.value("power_budget_dbm", json(20.0)), "power_budget_dbm", L);
    c.reflection_coeff = detail::per_bs(j.value("reflection_coeff", json(1e-3)), "reflection_coeff", L);
    c.sensing_weights = detail::per_bs(j.value("sensing_weights", json(1e-14)), "sensing_weights", L);
    c.rate_weights = detail::per_user(j.value("rate_weights", json(1.0)), "rate_weights", L, K);
    c.validate();
    return c;
}

inline json config_to_json(const NetworkConfig& c) {
    return json{{"num_cells", c.num_cells},
                {"users_per_cell", c.users_per_cell},
                {"tx_antennas", c.tx_antennas},
                {"echo_rx_antennas", c.echo_rx_antennas},
                {"user_antennas", c.user_antennas},
                {"streams", c.streams},
                {"block_length", c.block_length},
                {"power_budget_dbm", c.power_budget_dbm},
                {"noise_user_dbm", c.noise_user_dbm},
                {"noise_bs_dbm", c.noise_bs_dbm},
                {"reflection_coeff", c.reflection_coeff},
                {"rate_weights", c.rate_weights},
                {"sensing_weights", c.sensing_weights},
                {"bs_spacing_m", c.bs_spacing_m},
                {"shadowing_std_db", c.shadowing_std_db},
                {"pathloss_offset_db", c.pathloss_offset_db},
                {"pathloss_slope", c.pathloss_slope},
                {"user_radius_min_fraction", c.user_radius_min_fraction},
                {"user_radius_max_fraction", c.user_radius_max_fraction},
                {"target_x_m", c.target_x_m},
                {"target_y_m", c.target_y_m},
                {"rough_doa_max_error_rad", c.rough_doa_max_error_rad},
                {"seed", c.seed}};
}

// ---------------------------------------------------------------------------
// SolverOptions

inline SolverOptions solver_from_json(const json& j, SolverOptions o = {}) {
    if (!j.is_object()) throw ConfigError("solver options must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "algorithm") o.algorithm = parse_algorithm(detail::get_as<std::string>(v, key));
        else if (key == "lambda_strategy")
            o.lambda_strategy.kind = parse_majorant_kind(detail::get_as<std::string>(v, key));
        else if (key == "power_iters") o.lambda_strategy.power_iters = detail::get_as<int>(v, key);
        else if (key == "power_tol") o.lambda_strategy.power_tol = detail::get_as<double>(v, key);
        else if (key == "safety_factor") o.lambda_strategy.safety_factor = detail::get_as<double>(v, key);
        else if (key == "rel_tol") o.rel_tol = detail::get_as<double>(v, key);
        else if (key == "max_iters") o.max_iters = detail::get_as<int>(v, key);
        else if (key == "time_limit_s") {
            if (v.is_null()) o.time_limit_s.reset();
            else o.time_limit_s = detail::get_as<double>(v, key);
        } else if (key == "bisection_tol") o.bisection_tol = detail::get_as<double>(v, key);
        else if (key == "bisection_max_iters") o.bisection_max_iters = detail::get_as<int>(v, key);
        else if (key == "init") o.init = parse_init_mode(detail::get_as<std::string>(v, key));
        else if (key == "record_every") o.record_every = detail::get_as<int>(v, key);
        else if (key == "restart_on_decrease") o.restart_on_decrease = detail::get_as<bool>(v, key);
        else throw ConfigError("unknown solver option '" + key + "'");
    }
    o.validate();
    return o;
}

inline json solver_to_json(const SolverOptions& o) {
    json j{{"algorithm", to_string(o.algorithm)},
           {"lambda_strategy", to_string(o.lambda_strategy.kind)},
           {"power_iters", o.lambda_strategy.power_iters},
           {"power_tol", o.lambda_strategy.power_tol},
           {"safety_factor", o.lambda_strategy.safety_factor},
           {"rel_tol", o.rel_tol},
           {"max_iters", o.max_iters},
           {"bisection_tol", o.bisection_tol},
           {"bisection_max_iters", o.bisection_max_iters},
           {"init", to_string(o.init)},
           {"record_every", o.record_every},
           {"restart_on_decrease", o.restart_on_decrease}};
    j["time_limit_s"] = o.time_limit_s ? json(*o.time_limit_s) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Results

inline json objective_to_json(const ObjectiveBreakdown& ob) {
    constexpr double kLn2 = 0.69314718055994530942;
    std::vector<std::vector<double>> bits = ob.rates;
    for (auto& row : bits)
        for (auto& r : row) r /= kLn2;
    return json{{"sum_rate_nats", ob.sum_rate}, {"sum_rate_bits", ob.sum_rate / kLn2},
                {"sum_fisher", ob.sum_fisher},  {"weighted_sum", ob.weighted_sum},
                {"rates_nats", ob.rates},       {"rates_bits", bits},
                {"fisher", ob.fisher}};
}

/// Column-major interleaved [re, im, re, im, ...] per block with shape metadata.
inline json beamformers_to_json(const BeamformerSet& W) {
    json blocks = json::array();
    for (int l = 0; l < W.L; ++l)
        for (int k = 0; k < W.K; ++k) {
            const CMat& b = W(l, k);
            std::vector<double> data;
            data.reserve(static_cast<std::size_t>(2 * b.size()));
            for (Eigen::Index c = 0; c < b.cols(); ++c)
                for (Eigen::Index r = 0; r < b.rows(); ++r) {
                    data.push_back(b(r, c).real());
                    data.push_back(b(r, c).imag());
                }
            blocks.push_back({{"cell", l}, {"user", k}, {"rows", b.rows()}, {"cols", b.cols()}, {"data", data}});
        }
    return json{{"num_cells", W.L}, {"users_per_cell", W.K}, {"layout", "column_major_interleaved"},
                {"blocks", blocks}};
}

inline BeamformerSet beamformers_from_json(const json& j) {
    try {
        const int L = j.at("num_cells").get<int>();
        const int K = j.at("users_per_cell").get<int>();
        if (L < 1 || K < 1) throw ConfigError("beamformers: num_cells and users_per_cell must be >= 1");
        BeamformerSet W;
        W.L = L;
        W.K = K;
        W.blocks.resize(static_cast<std::size_t>(L * K));
        const auto& blocks = j.at("blocks");
        if (blocks.size() != static_cast<std::size_t>(L * K)) throw ConfigError("beamformers: wrong block count");
        for (const auto& b : blocks) {
            const int l = b.at("cell").get<int>(), k = b.at("user").get<int>();
            const auto rows = b.at("rows").get<Eigen::Index>(), cols = b.at("cols").get<Eigen::Index>();
            const auto data = b.at("data").get<std::vector<double>>();
            if (l < 0 || l >= L || k < 0 || k >= K) throw ConfigError("beamformers: block index out of range");
            if (data.size() != static_cast<std::size_t>(2 * rows * cols))
                throw ConfigError("beamformers: data length does not match shape");
            CMat m(rows, cols);
            std::size_t p = 0;
            for (Eigen::Index c = 0; c < cols; ++c)
                for (Eigen::Index r = 0; r < rows; ++r, p += 2) m(r, c) = cplx(data[p], data[p + 1]);
            W(l, k) = std::move(m);
        }
        return W;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("beamformers JSON: ") + e.what());
    }
}

inline json estimation_to_json(const EstimationReport& r) {
    return json{{"theta_hat", r.theta_hat},         {"theta_true", r.theta_true},
                {"per_bs_sq_err", r.per_bs_sq_err}, {"mean_sq_err", r.mean_sq_err},
                {"max_sq_err", r.max_sq_err},       {"grid_resolution", r.grid_resolution}};
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline constexpr const char* kTraceHeader = "iter,elapsed_s,objective,sum_rate_nats,sum_fisher";

inline std::string trace_to_csv(const IterationTrace& t) {
    std::string out = std::string(kTraceHeader) + "\n";
    for (const auto& r : t.rows)
        out += std::to_string(r.iter) + ',' + format_double(r.elapsed_s) + ',' + format_double(r.objective) + ',' +
               format_double(r.sum_rate) + ',' + format_double(r.sum_fisher) + '\n';
    return out;
}

inline IterationTrace trace_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) throw ConfigError("trace CSV: unexpected header");
    IterationTrace t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw ConfigError("trace CSV: expected 5 columns in '" + line + "'");
        TraceRow r;
        r.iter = std::stoi(cells[0]);
        r.elapsed_s = std::stod(cells[1]);
        r.objective = std::stod(cells[2]);
        r.sum_rate = std::stod(cells[3]);
        r.sum_fisher = std::stod(cells[4]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline void write_trace_csv(const IterationTrace& t, const std::string& path) { write_text_file(path, trace_to_csv(t)); }

inline IterationTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return trace_from_csv(ss.str());
}

}  // namespace isacfp
