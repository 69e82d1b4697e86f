#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isacfp/errors.hpp"
#include "isacfp/linalg.hpp"
#include "isacfp/random.hpp"

namespace isacfp {

using Vec2 = Eigen::Vector2d;

/// Declarative description of the multi-cell ISAC network. Powers and noise
/// levels are in dBm; everything downstream works in linear units (watts).
struct NetworkConfig {
    int num_cells = 1;
    int users_per_cell = 1;
    int tx_antennas = 4;
    int echo_rx_antennas = 4;
    int user_antennas = 2;
    int streams = 2;
    int block_length = 30;

    std::vector<double> power_budget_dbm{20.0};  // per BS
    double noise_user_dbm = -80.0;
    double noise_bs_dbm = -70.0;
    std::vector<double> reflection_coeff{1e-3};        // per BS
    std::vector<std::vector<double>> rate_weights{{1.0}};  // [cell][user]
    std::vector<double> sensing_weights{1e-14};        // per BS

    double bs_spacing_m = 800.0;
    double shadowing_std_db = 8.0;
    double pathloss_offset_db = 15.3;
    double pathloss_slope = 37.6;

    // Users are dropped at radius uniform in [min, max] x (inscribed cell radius).
    double user_radius_min_fraction = 0.8;
    double user_radius_max_fraction = 1.0;

    double target_x_m = 500.0;
    double target_y_m = -1000.0;
    // theta_rough = theta_true + U(-e, e)
    double rough_doa_max_error_rad = 0.05;

    std::uint64_t seed = 1;

    /// Throws ConfigError on the first violated invariant.
    void validate() const {
        auto fail = [](const std::string& m) { throw ConfigError("invalid network config: " + m); };
        if (num_cells < 1) fail("num_cells must be >= 1");
        if (users_per_cell < 1) fail("users_per_cell must be >= 1");
        if (tx_antennas < 1) fail("tx_antennas must be >= 1");
        if (echo_rx_antennas < 1) fail("echo_rx_antennas must be >= 1");
        if (user_antennas < 1) fail("user_antennas must be >= 1");
        if (block_length < 1) fail("block_length must be >= 1");
        if (streams < 1 || streams > user_antennas) fail("streams must satisfy 1 <= d <= user_antennas");
        const auto L = static_cast<std::size_t>(num_cells);
        const auto K = static_cast<std::size_t>(users_per_cell);
        if (power_budget_dbm.size() != L) fail("power_budget_dbm must have num_cells entries");
        if (reflection_coeff.size() != L) fail("reflection_coeff must have num_cells entries");
        if (sensing_weights.size() != L) fail("sensing_weights must have num_cells entries");
        if (rate_weights.size() != L) fail("rate_weights must have num_cells rows");
        for (const auto& row : rate_weights) {
            if (row.size() != K) fail("rate_weights rows must have users_per_cell entries");
            for (double w : row)
                if (!(w >= 0.0) || !std::isfinite(w)) fail("rate_weights must be finite and >= 0");
        }
        for (double p : power_budget_dbm)
            if (!std::isfinite(p)) fail("power_budget_dbm must be finite");
        for (double x : reflection_coeff)
            if (!(x >= 0.0) || !std::isfinite(x)) fail("reflection_coeff must be finite and >= 0");
        for (double b : sensing_weights)
            if (!(b >= 0.0) || !std::isfinite(b)) fail("sensing_weights must be finite and >= 0");
        if (!std::isfinite(noise_user_dbm) || !std::isfinite(noise_bs_dbm)) fail("noise levels must be finite");
        if (!(bs_spacing_m > 0.0)) fail("bs_spacing_m must be positive");
        if (!(shadowing_std_db >= 0.0)) fail("shadowing_std_db must be >= 0");
        if (!std::isfinite(pathloss_offset_db) || !std::isfinite(pathloss_slope)) fail("pathloss coefficients must be finite");
        if (!(user_radius_min_fraction > 0.0) || user_radius_max_fraction < user_radius_min_fraction ||
            user_radius_max_fraction > 1.0)
            fail("user radius fractions must satisfy 0 < min <= max <= 1");
        if (!(rough_doa_max_error_rad >= 0.0)) fail("rough_doa_max_error_rad must be >= 0");
        if (num_cells > 7) fail("hexagonal layout supports num_cells in [1, 7]");
    }
};

/// Config with uniform per-BS/per-user values.
inline NetworkConfig uniform_config(int cells, int users, int nt, int nr, int m, int d, double power_dbm = 20.0,
                                    double omega = 1.0, double beta = 1e-14, double xi = 1e-3) {
    NetworkConfig c;
    c.num_cells = cells;
    c.users_per_cell = users;
    c.tx_antennas = nt;
    c.echo_rx_antennas = nr;
    c.user_antennas = m;
    c.streams = d;
    c.power_budget_dbm.assign(static_cast<std::size_t>(cells), power_dbm);
    c.reflection_coeff.assign(static_cast<std::size_t>(cells), xi);
    c.sensing_weights.assign(static_cast<std::size_t>(cells), beta);
    c.rate_weights.assign(static_cast<std::size_t>(cells), std::vector<double>(static_cast<std::size_t>(users), omega));
    return c;
}

struct Topology {
    std::vector<Vec2> bs_positions;
    std::vector<Vec2> user_positions;  // index cell * K + user
    std::vector<Vec2> target_positions;
    std::vector<std::vector<Vec2>> wraparound_images;  // [bs][image], image 0 is the BS itself
    int users_per_cell = 0;

    const Vec2& user(int cell, int k) const {
        return user_positions[static_cast<std::size_t>(cell * users_per_cell + k)];
    }

    /// Distance from `p` to the closest wrap-around image of BS `bs`.
    double wrap_distance(const Vec2& p, int bs) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& img : wraparound_images[static_cast<std::size_t>(bs)]) best = std::min(best, (p - img).norm());
        return best;
    }
};

/// Linear-unit system parameters shared by every evaluation and update kernel.
struct SystemParams {
    int L = 1, K = 1, Nt = 1, Nr = 1, M = 1, d = 1, T = 1;
    double noise_user = 1.0;  // sigma^2 [W]
    double noise_bs = 1.0;    // sigma~^2 [W]
    std::vector<double> power;  // P_l [W]
    std::vector<double> xi;

    int users() const { return L * K; }
};

/// All channels of one realization.
/// H(l, k, i): BS i -> user (l, k), M x Nt.
/// Gcross(l, i): BS i -> echo array of BS l (i != l), Nr x Nt.
/// Gresp[l] = xi_l a_r(theta) a_t(theta)^T, Gdot[l] = d Gresp[l] / d theta.
struct ChannelSet {
    SystemParams sys;
    std::vector<CMat> H;
    std::vector<CMat> Gcross;
    std::vector<CMat> Gresp;
    std::vector<CMat> Gdot;
    std::vector<double> theta_true;
    std::vector<double> theta_rough;

    const CMat& h(int l, int k, int i) const { return H[index_h(l, k, i)]; }
    CMat& h(int l, int k, int i) { return H[index_h(l, k, i)]; }
    const CMat& gcross(int l, int i) const { return Gcross[static_cast<std::size_t>(l * sys.L + i)]; }
    CMat& gcross(int l, int i) { return Gcross[static_cast<std::size_t>(l * sys.L + i)]; }

    /// Echo-path channel from BS i into the array of BS l: the response matrix when i == l.
    const CMat& g(int l, int i) const { return l == i ? Gresp[static_cast<std::size_t>(l)] : gcross(l, i); }

    std::size_t index_h(int l, int k, int i) const {
        return static_cast<std::size_t>((l * sys.K + k) * sys.L + i);
    }
};

inline double pathloss_db(double distance_m, double shadow_db, double offset_db = 15.3, double slope = 37.6) {
    if (!(distance_m > 0.0)) throw std::domain_error("pathloss_db: distance must be positive");
    return offset_db + slope * std::log10(distance_m) + shadow_db;
}

/// ULA steering vector, entry m = exp(-j pi m sin(theta)).
inline CVec steering_vector(double theta, int n) {
    if (n < 1) throw std::domain_error("steering_vector: n must be >= 1");
    CVec a(n);
    const double s = std::sin(theta);
    for (int m = 0; m < n; ++m) a(m) = std::polar(1.0, -kPi * m * s);
    return a;
}

/// d/dtheta of steering_vector: entry m = -j pi m cos(theta) exp(-j pi m sin(theta)).
inline CVec steering_derivative(double theta, int n) {
    if (n < 1) throw std::domain_error("steering_derivative: n must be >= 1");
    CVec a = steering_vector(theta, n);
    const double c = std::cos(theta);
    for (int m = 0; m < n; ++m) a(m) *= cplx(0.0, -kPi * m * c);
    return a;
}

struct Response {
    CMat G;
    CMat Gdot;
};

inline Response build_response(double xi, double theta, int n_r, int n_t) {
    if (!(xi >= 0.0)) throw std::domain_error("build_response: reflection coefficient must be >= 0");
    const CVec ar = steering_vector(theta, n_r);
    const CVec at = steering_vector(theta, n_t);
    const CVec dar = steering_derivative(theta, n_r);
    const CVec dat = steering_derivative(theta, n_t);
    Response r;
    r.G = xi * ar * at.transpose();
    r.Gdot = xi * (dar * at.transpose() + ar * dat.transpose());
    return r;
}

/// Broadside angle of `target` seen from a ULA at `bs`, folded into [-pi/2, pi/2]
/// (the array cannot distinguish theta from pi - theta).
inline double doa_from_geometry(const Vec2& bs, const Vec2& target) {
    const Vec2 v = target - bs;
    double theta = std::atan2(v.x(), v.y());
    if (theta > kPi / 2) theta = kPi - theta;
    if (theta < -kPi / 2) theta = -kPi - theta;
    return theta;
}

namespace detail {
inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}
}  // namespace detail

/// Shift vectors that tile the plane with copies of the 7-cell cluster.
inline std::vector<Vec2> cluster_shifts(double spacing) {
    std::vector<Vec2> out;
    const Vec2 base(2.5 * spacing, std::sqrt(3.0) / 2.0 * spacing);
    for (int m = 0; m < 6; ++m) out.push_back(detail::rotate(base, m * kPi / 3.0));
    return out;
}

inline Topology build_topology(const NetworkConfig& cfg, Rng& rng) {
    cfg.validate();
    Topology topo;
    const int L = cfg.num_cells;
    const int K = cfg.users_per_cell;
    const double D = cfg.bs_spacing_m;
    topo.users_per_cell = K;

    topo.bs_positions.emplace_back(0.0, 0.0);
    // 2..6 cells: center plus the first neighbors, no wrap-around; 7 cells: full wrapped cluster
    for (int m = 0; m < L - 1; ++m) topo.bs_positions.push_back(detail::rotate(Vec2(D, 0.0), m * kPi / 3.0));

    const auto shifts = L == 7 ? cluster_shifts(D) : std::vector<Vec2>{};
    for (const auto& bs : topo.bs_positions) {
        std::vector<Vec2> images{bs};
        for (const auto& s : shifts) images.push_back(bs + s);
        topo.wraparound_images.push_back(std::move(images));
    }

    const double inscribed = D / 2.0;
    for (int l = 0; l < L; ++l) {
        for (int k = 0; k < K; ++k) {
            const double r = inscribed * uniform(rng, cfg.user_radius_min_fraction, cfg.user_radius_max_fraction);
            const double phi = uniform(rng, -kPi, kPi);
            topo.user_positions.push_back(topo.bs_positions[static_cast<std::size_t>(l)] +
                                          Vec2(r * std::cos(phi), r * std::sin(phi)));
        }
    }
    topo.target_positions.emplace_back(cfg.target_x_m, cfg.target_y_m);
    return topo;
}

inline SystemParams system_params(const NetworkConfig& cfg) {
    SystemParams s;
    s.L = cfg.num_cells;
    s.K = cfg.users_per_cell;
    s.Nt = cfg.tx_antennas;
    s.Nr = cfg.echo_rx_antennas;
    s.M = cfg.user_antennas;
    s.d = cfg.streams;
    s.T = cfg.block_length;
    s.noise_user = dbm_to_watts(cfg.noise_user_dbm);
    s.noise_bs = dbm_to_watts(cfg.noise_bs_dbm);
    for (double p : cfg.power_budget_dbm) s.power.push_back(dbm_to_watts(p));
    s.xi = cfg.reflection_coeff;
    return s;
}

/// Rayleigh fading scaled by distance-dependent pathloss with log-normal shadowing.
inline ChannelSet generate_channels(const NetworkConfig& cfg, const Topology& topo, Rng& rng) {
    cfg.validate();
    ChannelSet ch;
    ch.sys = system_params(cfg);
    const auto& s = ch.sys;
    std::normal_distribution<double> shadow(0.0, cfg.shadowing_std_db);

    auto draw_link = [&](double distance, int rows, int cols) {
        const double kappa = cfg.shadowing_std_db > 0.0 ? shadow(rng) : 0.0;
        const double gain = std::pow(10.0, -pathloss_db(distance, kappa, cfg.pathloss_offset_db, cfg.pathloss_slope) / 10.0);
        return CMat(std::sqrt(gain) * complex_normal_matrix(rows, cols, rng));
    };

    ch.H.resize(static_cast<std::size_t>(s.L * s.K * s.L));
    for (int l = 0; l < s.L; ++l)
        for (int k = 0; k < s.K; ++k)
            for (int i = 0; i < s.L; ++i) ch.h(l, k, i) = draw_link(topo.wrap_distance(topo.user(l, k), i), s.M, s.Nt);

    ch.Gcross.resize(static_cast<std::size_t>(s.L * s.L));
    for (int l = 0; l < s.L; ++l)
        for (int i = 0; i < s.L; ++i)
            if (i != l)
                ch.gcross(l, i) =
                    draw_link(topo.wrap_distance(topo.bs_positions[static_cast<std::size_t>(l)], i), s.Nr, s.Nt);

    const Vec2& target = topo.target_positions.front();
    for (int l = 0; l < s.L; ++l) {
        const double theta = doa_from_geometry(topo.bs_positions[static_cast<std::size_t>(l)], target);
        ch.theta_true.push_back(theta);
        const double e = cfg.rough_doa_max_error_rad;
        ch.theta_rough.push_back(e > 0.0 ? theta + uniform(rng, -e, e) : theta);
        auto r = build_response(s.xi[static_cast<std::size_t>(l)], theta, s.Nr, s.Nt);
        ch.Gresp.push_back(std::move(r.G));
        ch.Gdot.push_back(std::move(r.Gdot));
    }
    return ch;
}

/// Copy of `ch` whose response matrices are built at `theta` instead of the true DoAs
/// (beamformer design from rough DoA knowledge).
inline ChannelSet with_response_at(const ChannelSet& ch, const std::vector<double>& theta) {
    if (theta.size() != static_cast<std::size_t>(ch.sys.L))
        throw std::domain_error("with_response_at: need one angle per BS");
    ChannelSet out = ch;
    for (int l = 0; l < ch.sys.L; ++l) {
        auto r = build_response(ch.sys.xi[static_cast<std::size_t>(l)], theta[static_cast<std::size_t>(l)], ch.sys.Nr,
                                ch.sys.Nt);
        out.Gresp[static_cast<std::size_t>(l)] = std::move(r.G);
        out.Gdot[static_cast<std::size_t>(l)] = std::move(r.Gdot);
    }
    return out;
}

struct Scenario {
    NetworkConfig cfg;
    Topology topo;
    ChannelSet ch;
};

/// Topology and channels drawn from independent child streams of `cfg.seed`.
inline Scenario make_scenario(const NetworkConfig& cfg, std::uint64_t trial = 0) {
    Rng topo_rng = make_stream(cfg.seed, trial, StreamTag::topology);
    Rng chan_rng = make_stream(cfg.seed, trial, StreamTag::channels);
    Scenario sc{cfg, {}, {}};
    sc.topo = build_topology(cfg, topo_rng);
    sc.ch = generate_channels(cfg, sc.topo, chan_rng);
    return sc;
}

/// CSV with header `entity,type,x_m,y_m`.
inline void write_positions_csv(const Topology& topo, std::ostream& os) {
    os << "entity,type,x_m,y_m\n";
    os.precision(17);
    for (std::size_t b = 0; b < topo.bs_positions.size(); ++b)
        os << "bs" << b << ",bs," << topo.bs_positions[b].x() << ',' << topo.bs_positions[b].y() << '\n';
    const int K = topo.users_per_cell;
    for (std::size_t u = 0; u < topo.user_positions.size(); ++u)
        os << "user_" << static_cast<int>(u) / K << '_' << static_cast<int>(u) % K << ",user,"
           << topo.user_positions[u].x() << ',' << topo.user_positions[u].y() << '\n';
    for (std::size_t t = 0; t < topo.target_positions.size(); ++t)
        os << "target" << t << ",target," << topo.target_positions[t].x() << ',' << topo.target_positions[t].y()
           << '\n';
}

}  // namespace isacfp
