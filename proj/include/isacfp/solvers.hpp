#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isacfp/aux_state.hpp"
#include "isacfp/fpcore.hpp"
#include "isacfp/linalg.hpp"
#include "isacfp/metrics.hpp"
#include "isacfp/random.hpp"
#include "isacfp/scenario.hpp"

namespace isacfp {

enum class Algorithm { conventional, nonhomogeneous, fast };
enum class InitMode { matched_filter, random };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::conventional: return "conventional";
        case Algorithm::nonhomogeneous: return "nonhomogeneous";
        case Algorithm::fast: return "fast";
    }
    return "conventional";
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "conventional" || s == "fp") return Algorithm::conventional;
    if (s == "nonhomogeneous" || s == "nhfp") return Algorithm::nonhomogeneous;
    if (s == "fast" || s == "fastfp") return Algorithm::fast;
    throw ConfigError("unknown algorithm '" + s + "' (expected conventional|nonhomogeneous|fast)");
}

inline std::string to_string(InitMode m) { return m == InitMode::random ? "random" : "matched_filter"; }

inline InitMode parse_init_mode(const std::string& s) {
    if (s == "matched_filter") return InitMode::matched_filter;
    if (s == "random") return InitMode::random;
    throw ConfigError("unknown init mode '" + s + "' (expected matched_filter|random)");
}

struct SolverOptions {
    Algorithm algorithm = Algorithm::fast;
    MajorantStrategy lambda_strategy{};
    double rel_tol = 1e-6;
    int max_iters = 2000;
    std::optional<double> time_limit_s;
    double bisection_tol = 1e-10;
    int bisection_max_iters = 200;
    InitMode init = InitMode::matched_filter;
    int record_every = 1;
    // Reset the extrapolation when the fast variant's objective drops. Off by default.
    bool restart_on_decrease = false;

    void validate() const {
        if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
        if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
        if (time_limit_s && !(*time_limit_s > 0.0)) throw ConfigError("time_limit_s must be > 0");
        if (!(bisection_tol > 0.0)) throw ConfigError("bisection_tol must be > 0");
        if (bisection_max_iters < 1) throw ConfigError("bisection_max_iters must be >= 1");
        if (record_every < 1) throw ConfigError("record_every must be >= 1");
        lambda_strategy.validate();
    }
};

struct TraceRow {
    int iter = 0;
    double elapsed_s = 0.0;
    double objective = 0.0;
    double sum_rate = 0.0;
    double sum_fisher = 0.0;
    std::map<std::string, double> diagnostics;
};

struct IterationTrace {
    std::vector<TraceRow> rows;
};

struct RunResult {
    BeamformerSet W;
    IterationTrace trace;
    int iterations = 0;
    bool converged = false;
    bool truncated = false;
    std::string stop_reason;
    double final_objective = 0.0;
    double elapsed_s = 0.0;
};

// ---------------------------------------------------------------------------
// Initialization

namespace detail {
/// Modified Gram-Schmidt on the columns of `a`; returns at most `cols` orthonormal columns.
inline CMat orthonormal_columns(const CMat& a, Eigen::Index cols) {
    CMat q = CMat::Zero(a.rows(), cols);
    Eigen::Index filled = 0;
    for (Eigen::Index c = 0; c < a.cols() && filled < cols; ++c) {
        CVec v = a.col(c);
        for (Eigen::Index p = 0; p < filled; ++p) v -= q.col(p).dot(v) * q.col(p);
        const double n = v.norm();
        if (n > 1e-12 * a.col(c).norm() && n > 0.0) q.col(filled++) = v / n;
    }
    return q;
}
}  // namespace detail

/// Feasible starting point using exactly P_l at each BS, split equally over its users.
inline BeamformerSet init_beamformers(const ChannelSet& ch, InitMode mode, Rng& rng) {
    const auto& s = ch.sys;
    BeamformerSet W = BeamformerSet::zeros(s);
    for (int l = 0; l < s.L; ++l) {
        const double per_user = s.power[static_cast<std::size_t>(l)] / s.K;
        for (int k = 0; k < s.K; ++k) {
            CMat w = mode == InitMode::matched_filter ? detail::orthonormal_columns(ch.h(l, k, l).adjoint(), s.d)
                                                      : complex_normal_matrix(s.Nt, s.d, rng);
            const double n = w.norm();
            if (n > 0.0) w *= std::sqrt(per_user) / n;
            W(l, k) = std::move(w);
        }
    }
    return W;
}

// ---------------------------------------------------------------------------
// Auxiliary-variable updates

/// Gamma(l,k) = W^H H^H F^-1 H W, clamped onto the PSD cone.
inline std::vector<CMat> update_gamma(const ChannelSet& ch, const BeamformerSet& W) {
    const auto& s = ch.sys;
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(s.users()));
    for (int l = 0; l < s.L; ++l)
        for (int k = 0; k < s.K; ++k) {
            CMat g = sinr_matrix(ch, W, l, k);
            if (g.rows() > 0 && g.squaredNorm() > 0.0) {
                const auto eig = hermitian_eigen(g);
                if (eig.values.minCoeff() < 0.0) g = psd_floor(g);
            }
            out.push_back(std::move(g));
        }
    return out;
}

/// Y(l,k) = U^-1 H W with U the full received covariance (M x M).
inline std::vector<CMat> update_Y(const ChannelSet& ch, const BeamformerSet& W) {
    const auto& s = ch.sys;
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(s.users()));
    for (int l = 0; l < s.L; ++l)
        for (int k = 0; k < s.K; ++k) {
            const CMat U = received_covariance(ch, W, l, k);
            out.push_back(hpd_solve(U, ch.h(l, k, l) * W(l, k)));
        }
    return out;
}

/// Ytilde(l,k) = Q^_l^-1 Gdot_l W(l,k). Solves one Nr x Nr system per BS.
inline std::vector<CMat> update_Ytilde_exact(const ChannelSet& ch, const BeamformerSet& W) {
    const auto& s = ch.sys;
    std::vector<CMat> out(static_cast<std::size_t>(s.users()));
    for (int l = 0; l < s.L; ++l) {
        const CMat Q = sensing_interference(ch, W, l);
        const CMat X = hpd_solve(Q, ch.Gdot[static_cast<std::size_t>(l)] * W.stacked(l));
        for (int k = 0; k < s.K; ++k) out[static_cast<std::size_t>(l * s.K + k)] = X.middleCols(k * s.d, s.d);
    }
    return out;
}

namespace detail {
inline std::vector<double> check_positive(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!(x > 0.0)) throw std::domain_error(std::string(what) + " must be > 0");
    return v;
}

inline std::vector<CMat> ytilde_grad_with(const ChannelSet& ch, const BeamformerSet& W,
                                          const std::vector<CMat>& Ztilde, const std::vector<CMat>& Q,
                                          const std::vector<double>& lambdatilde) {
    const auto& s = ch.sys;
    std::vector<CMat> out(static_cast<std::size_t>(s.users()));
    for (int l = 0; l < s.L; ++l) {
        const double inv = 1.0 / lambdatilde[static_cast<std::size_t>(l)];
        const CMat& Gd = ch.Gdot[static_cast<std::size_t>(l)];
        for (int k = 0; k < s.K; ++k) {
            const auto u = static_cast<std::size_t>(l * s.K + k);
            out[u] = Ztilde[u] + inv * (Gd * W(l, k) - Q[static_cast<std::size_t>(l)] * Ztilde[u]);
        }
    }
    return out;
}

inline std::vector<CMat> sensing_interference_all(const ChannelSet& ch, const BeamformerSet& W) {
    std::vector<CMat> Q;
    for (int l = 0; l < ch.sys.L; ++l) Q.push_back(sensing_interference(ch, W, l));
    return Q;
}
}  // namespace detail

/// Inverse-free Ytilde step: Ztilde + (Gdot W - Q^ Ztilde) / lambdatilde.
inline std::vector<CMat> update_Ytilde_grad(const ChannelSet& ch, const BeamformerSet& W,
                                            const std::vector<CMat>& Ztilde, const std::vector<double>& lambdatilde) {
    detail::check_positive(lambdatilde, "lambdatilde");
    return detail::ytilde_grad_with(ch, W, Ztilde, detail::sensing_interference_all(ch, W), lambdatilde);
}

// ---------------------------------------------------------------------------
// Quadratic-form coefficients

/// Lambda(l,k) = omega H^H Y (I + Gamma) + 2 T beta Gdot^H Ytilde.
inline CMat assemble_Lambda(const ChannelSet& ch, const AuxState& aux, const Weights& weights, int l, int k) {
    const auto& s = ch.sys;
    const auto u = aux.at(l, k);
    const CMat Id = CMat::Identity(s.d, s.d);
    CMat out = weights.w(l, k) * (ch.h(l, k, l).adjoint() * (aux.Y[u] * (Id + aux.Gamma[u])));
    const double b = weights.b(l);
    if (b != 0.0) out += (2.0 * s.T * b) * (ch.Gdot[static_cast<std::size_t>(l)].adjoint() * aux.Ytilde[u]);
    return out;
}

/// All L_l at once; reduction order is lexicographic in (user, BS).
inline std::vector<CMat> assemble_L_all(const ChannelSet& ch, const AuxState& aux, const Weights& weights) {
    const auto& s = ch.sys;
    const CMat Id = CMat::Identity(s.d, s.d);
    std::vector<CMat> L(static_cast<std::size_t>(s.L), CMat::Zero(s.Nt, s.Nt));
    for (int i = 0; i < s.L; ++i)
        for (int j = 0; j < s.K; ++j) {
            const auto u = aux.at(i, j);
            const double w = weights.w(i, j);
            if (w == 0.0) continue;
            const CMat c = w * (Id + aux.Gamma[u]);
            for (int l = 0; l < s.L; ++l) {
                const CMat hy = ch.h(i, j, l).adjoint() * aux.Y[u];
                L[static_cast<std::size_t>(l)].noalias() += hy * c * hy.adjoint();
            }
        }
    // sensing interference BS l causes at the echo array of BS i
    for (int i = 0; i < s.L; ++i) {
        const double b = weights.b(i);
        if (b == 0.0) continue;
        for (int l = 0; l < s.L; ++l) {
            if (l == i) continue;
            for (int j = 0; j < s.K; ++j) {
                const CMat gy = ch.gcross(i, l).adjoint() * aux.Ytilde[aux.at(i, j)];
                L[static_cast<std::size_t>(l)].noalias() += (2.0 * s.T * b) * gy * gy.adjoint();
            }
        }
    }
    for (auto& m : L) symmetrize(m);
    return L;
}

/// L_l: the Hermitian PSD quadratic coefficient of W(l, .) in the quadratic-transform objective.
inline CMat assemble_L(const ChannelSet& ch, const AuxState& aux, const Weights& weights, int l) {
    return assemble_L_all(ch, aux, weights)[static_cast<std::size_t>(l)];
}

// ---------------------------------------------------------------------------
// W updates

/// Per-BS power projection: scale BS l's blocks by sqrt(P_l / power) when over budget.
inline BeamformerSet project_power(const BeamformerSet& Wraw, const SystemParams& s) {
    BeamformerSet W = Wraw;
    for (int l = 0; l < s.L; ++l) {
        const double p = Wraw.bs_power(l);
        const double P = s.power[static_cast<std::size_t>(l)];
        if (p <= P) continue;
        const double scale = std::sqrt(P / p);
        for (int k = 0; k < s.K; ++k) W(l, k) *= scale;
    }
    return W;
}

struct ExactUpdate {
    BeamformerSet W;
    std::vector<double> eta;
    std::vector<int> bisection_iters;
};

/// W(l,k) = (eta_l I + L_l)^-1 Lambda(l,k) with the smallest eta_l >= 0 meeting the power budget.
/// One Nt x Nt eigendecomposition per BS; eta is then found by bisection on the
/// spectral form of sum_k ||W(eta)||^2, bracketed by [0, sqrt(sum |V^H Lambda|^2 / P)].
inline ExactUpdate update_W_exact(const ChannelSet& ch, const AuxState& aux, const Weights& weights,
                                  double bisection_tol = 1e-10, int bisection_max_iters = 200) {
    const auto& s = ch.sys;
    ExactUpdate out{BeamformerSet::zeros(s), std::vector<double>(static_cast<std::size_t>(s.L), 0.0),
                    std::vector<int>(static_cast<std::size_t>(s.L), 0)};
    const auto Ls = assemble_L_all(ch, aux, weights);
    for (int l = 0; l < s.L; ++l) {
        const double P = s.power[static_cast<std::size_t>(l)];
        CMat Lam(s.Nt, s.K * s.d);
        for (int k = 0; k < s.K; ++k) Lam.middleCols(k * s.d, s.d) = assemble_Lambda(ch, aux, weights, l, k);
        const auto eig = hermitian_eigen(Ls[static_cast<std::size_t>(l)]);
        const RVec mu = eig.values.cwiseMax(0.0);
        const CMat B = eig.vectors.adjoint() * Lam;
        const RVec c = B.rowwise().squaredNorm();
        const double c_total = c.sum();
        if (c_total == 0.0) continue;  // Lambda = 0: W = 0

        const double mu_max = mu.maxCoeff();
        const double mu_floor = 1e-12 * std::max(mu_max, std::numeric_limits<double>::min());
        // Components in the numerical null space of L with negligible weight are dropped (minimum-norm solution).
        std::vector<bool> active(static_cast<std::size_t>(mu.size()), true);
        bool singular = false;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            if (mu(i) <= mu_floor) {
                if (c(i) <= 1e-24 * c_total) active[static_cast<std::size_t>(i)] = false;
                else singular = true;
            }
        auto power_at = [&](double eta) {
            double p = 0.0;
            for (Eigen::Index i = 0; i < mu.size(); ++i)
                if (active[static_cast<std::size_t>(i)]) p += c(i) / ((eta + mu(i)) * (eta + mu(i)));
            return p;
        };

        double eta = 0.0;
        if (singular || power_at(0.0) > P) {
            double lo = 0.0;
            double hi = std::sqrt(c_total / P);
            int it = 0;
            for (;; ++it) {
                if (it >= bisection_max_iters)
                    throw NumericalError("power-multiplier bisection did not converge at BS " + std::to_string(l) +
                                         " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
                const double ph = power_at(hi);
                if (hi - lo <= bisection_tol * hi || std::abs(ph - P) <= bisection_tol * P) break;
                const double mid = 0.5 * (lo + hi);
                if (power_at(mid) > P) lo = mid;
                else hi = mid;
            }
            eta = hi;
            out.bisection_iters[static_cast<std::size_t>(l)] = it;
        }
        out.eta[static_cast<std::size_t>(l)] = eta;

        RVec scale(mu.size());
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            scale(i) = active[static_cast<std::size_t>(i)] ? 1.0 / (eta + mu(i)) : 0.0;
        const CMat Wl = eig.vectors * (scale.asDiagonal() * B);
        for (int k = 0; k < s.K; ++k) out.W(l, k) = Wl.middleCols(k * s.d, s.d);
    }
    return out;
}

namespace detail {
inline BeamformerSet projected_step(const ChannelSet& ch, const AuxState& aux, const Weights& weights,
                                    const std::vector<CMat>& Ls) {
    const auto& s = ch.sys;
    BeamformerSet What = BeamformerSet::zeros(s);
    for (int l = 0; l < s.L; ++l) {
        const double lam = aux.lambda[static_cast<std::size_t>(l)];
        if (!(lam > 0.0)) throw std::domain_error("update_W_projected: lambda must be > 0");
        const CMat& Ll = Ls[static_cast<std::size_t>(l)];
        for (int k = 0; k < s.K; ++k) {
            const CMat& Z = aux.Z[aux.at(l, k)];
            What(l, k) = Z + (assemble_Lambda(ch, aux, weights, l, k) - Ll * Z) / lam;
        }
    }
    return project_power(What, s);
}
}  // namespace detail

/// W = P_W(Z + (Lambda - L Z) / lambda). Matrix products and a scalar projection only.
inline BeamformerSet update_W_projected(const ChannelSet& ch, const AuxState& aux, const Weights& weights) {
    return detail::projected_step(ch, aux, weights, assemble_L_all(ch, aux, weights));
}

/// Majorant of L_l per the strategy, floored at 1e-12 P_l so that L_l = 0 stays usable.
inline double guarded_majorant(const CMat& L, const MajorantStrategy& strategy, double power, CVec* warm = nullptr) {
    return std::max(lambda_max(L, strategy, warm), 1e-12 * power);
}

/// Ascent direction of the ISAC objective: d f_o / d conj(W(l,k)) = Lambda - L W at exactly
/// refreshed auxiliaries. For a real perturbation E, d/dt f_o(W + tE) = 2 Re tr(E^H grad).
inline std::vector<CMat> gradient_fo(const ChannelSet& ch, const BeamformerSet& W, const Weights& weights) {
    const auto& s = ch.sys;
    AuxState aux(s);
    aux.Gamma = update_gamma(ch, W);
    aux.Y = update_Y(ch, W);
    aux.Ytilde = update_Ytilde_exact(ch, W);
    const auto Ls = assemble_L_all(ch, aux, weights);
    std::vector<CMat> g;
    for (int l = 0; l < s.L; ++l)
        for (int k = 0; k < s.K; ++k)
            g.push_back(assemble_Lambda(ch, aux, weights, l, k) - Ls[static_cast<std::size_t>(l)] * W(l, k));
    return g;
}

/// Nesterov weight max((tau - 2) / (tau + 1), 0).
inline double extrapolation_weight(int tau) {
    if (tau < 1) throw std::domain_error("extrapolation_weight: tau must be >= 1");
    return std::max(static_cast<double>(tau - 2) / static_cast<double>(tau + 1), 0.0);
}

// ---------------------------------------------------------------------------
// Drivers

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline Eigen::Index user_side_dim(const SystemParams& s) { return std::max<Eigen::Index>(s.M, s.d); }

/// One inverse-free iteration body shared by the nonhomogeneous and fast variants.
/// Updates, in order: Z, Gamma, Y, Ytilde (gradient step), Ztilde, W (projected step).
struct InverseFreeStep {
    std::vector<CVec> warm_L, warm_Q;

    void operator()(const ChannelSet& ch, const Weights& weights, const MajorantStrategy& strategy,
                    BeamformerSet& W, AuxState& aux) {
        const auto& s = ch.sys;
        if (warm_L.empty()) {
            warm_L.resize(static_cast<std::size_t>(s.L));
            warm_Q.resize(static_cast<std::size_t>(s.L));
        }
        aux.Z = W.blocks;
        aux.Gamma = update_gamma(ch, W);
        aux.Y = update_Y(ch, W);
        const auto Q = sensing_interference_all(ch, W);
        for (int l = 0; l < s.L; ++l)
            aux.lambdatilde[static_cast<std::size_t>(l)] =
                lambda_max(Q[static_cast<std::size_t>(l)], strategy, &warm_Q[static_cast<std::size_t>(l)]);
        aux.Ytilde = ytilde_grad_with(ch, W, aux.Ztilde, Q, aux.lambdatilde);
        aux.Ztilde = aux.Ytilde;
        const auto Ls = assemble_L_all(ch, aux, weights);
        for (int l = 0; l < s.L; ++l)
            aux.lambda[static_cast<std::size_t>(l)] =
                guarded_majorant(Ls[static_cast<std::size_t>(l)], strategy, s.power[static_cast<std::size_t>(l)],
                                 &warm_L[static_cast<std::size_t>(l)]);
        W = projected_step(ch, aux, weights, Ls);
    }
};

}  // namespace detail

/// Runs one algorithm from the feasible starting point W0.
///
/// elapsed_s accumulates only the update phase of each iteration; objective
/// evaluation for the trace and the stopping rule is monitoring and is timed
/// separately (diagnostic `monitor_s`). The diagnostic `large_decompositions`
/// counts factorizations larger than max(M, d) performed by the update phase.
inline RunResult run(const ChannelSet& ch, const Weights& weights, const SolverOptions& opts,
                     const BeamformerSet& W0) {
    opts.validate();
    const auto& s = ch.sys;
    const Eigen::Index small_dim = detail::user_side_dim(s);

    RunResult res;
    BeamformerSet W = W0;
    BeamformerSet W_prev = W0;
    AuxState aux(s);
    detail::InverseFreeStep inverse_free;

    double elapsed = 0.0;
    auto record = [&](int iter, const ObjectiveBreakdown& ob, std::map<std::string, double> diag) {
        res.trace.rows.push_back({iter, elapsed, ob.weighted_sum, ob.sum_rate, ob.sum_fisher, std::move(diag)});
    };

    // setup (Ytilde/Ztilde initialization) counts toward elapsed time but is not an iteration
    {
        const auto t0 = detail::Clock::now();
        if (opts.algorithm != Algorithm::conventional) {
            aux.Ytilde = update_Ytilde_exact(ch, W);
            aux.Ztilde = aux.Ytilde;
        }
        elapsed += detail::seconds_since(t0);
    }

    ObjectiveBreakdown ob = objective(ch, W, weights);
    if (!std::isfinite(ob.weighted_sum)) throw NumericalError("objective is not finite", 0);
    record(0, ob, {});
    double f_prev = ob.weighted_sum;
    double best = f_prev;
    BeamformerSet W_best = W;
    bool last_recorded = true;

    int t = 0;
    while (true) {
        ++t;
        const auto t0 = detail::Clock::now();
        DecompositionAudit audit;
        std::map<std::string, double> diag;
        switch (opts.algorithm) {
            case Algorithm::conventional: {
                aux.Gamma = update_gamma(ch, W);
                aux.Y = update_Y(ch, W);
                aux.Ytilde = update_Ytilde_exact(ch, W);
                auto up = update_W_exact(ch, aux, weights, opts.bisection_tol, opts.bisection_max_iters);
                aux.eta = up.eta;
                W = std::move(up.W);
                break;
            }
            case Algorithm::nonhomogeneous: inverse_free(ch, weights, opts.lambda_strategy, W, aux); break;
            case Algorithm::fast: {
                const double v = t >= 2 ? extrapolation_weight(t - 1) : 0.0;
                BeamformerSet V = W;
                for (std::size_t b = 0; b < V.blocks.size(); ++b) V.blocks[b] += v * (W.blocks[b] - W_prev.blocks[b]);
                W_prev = W;
                W = std::move(V);
                inverse_free(ch, weights, opts.lambda_strategy, W, aux);
                diag["extrapolation"] = v;
                break;
            }
        }
        const double step_s = detail::seconds_since(t0);
        elapsed += step_s;
        diag["update_s"] = step_s;
        diag["large_decompositions"] = static_cast<double>(audit.delta().larger_than(small_dim));

        const auto m0 = detail::Clock::now();
        ob = objective(ch, W, weights);
        diag["monitor_s"] = detail::seconds_since(m0);
        const double f = ob.weighted_sum;
        if (!std::isfinite(f)) throw NumericalError("objective is not finite", t);

        if (f > best) {
            best = f;
            W_best = W;
        }
        if (opts.restart_on_decrease && opts.algorithm == Algorithm::fast && f < f_prev) W_prev = W;

        const bool converged = std::abs(f - f_prev) <= opts.rel_tol * std::max(std::abs(f), 1e-300);
        const bool out_of_iters = t >= opts.max_iters;
        const bool out_of_time = opts.time_limit_s && elapsed >= *opts.time_limit_s;
        const bool stop = converged || out_of_iters || out_of_time;
        last_recorded = stop || t % opts.record_every == 0;
        if (last_recorded) record(t, ob, std::move(diag));
        f_prev = f;
        if (stop) {
            res.converged = converged;
            res.truncated = !converged;
            res.stop_reason = converged ? "converged" : (out_of_time ? "time_limit" : "max_iters");
            break;
        }
    }
    res.iterations = t;
    res.elapsed_s = elapsed;
    if (res.truncated) {
        res.W = std::move(W_best);
        res.final_objective = best;
    } else {
        res.W = std::move(W);
        res.final_objective = f_prev;
    }
    return res;
}

/// Initializes from `opts.init` with `rng`, then runs.
inline RunResult run(const ChannelSet& ch, const Weights& weights, const SolverOptions& opts, Rng& rng) {
    return run(ch, weights, opts, init_beamformers(ch, opts.init, rng));
}

}  // namespace isacfp
