#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "isacfp/linalg.hpp"
#include "isacfp/metrics.hpp"
#include "isacfp/random.hpp"
#include "isacfp/scenario.hpp"

namespace isacfp {

/// Per-BS echo data: Psi[l] (Nr x T), X[l] = sum_k W(l,k) S(l,k) (Nt x T), S[l*K+k] (d x T).
struct EchoObservation {
    std::vector<CMat> Psi;
    std::vector<CMat> X;
    std::vector<CMat> S;
};

struct EstimationReport {
    std::vector<double> theta_hat;
    std::vector<double> theta_true;
    std::vector<double> per_bs_sq_err;
    double mean_sq_err = 0.0;
    double max_sq_err = 0.0;
    double grid_resolution = 0.0;
};

struct DoaGrid {
    double halfwidth = 0.1;
    int points = 401;
    int refine_iters = 20;
};

/// i.i.d. QPSK symbols (+-1 +-j)/sqrt(2); E[s s^*] = 1.
inline CMat qpsk_symbols(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    const double a = 1.0 / std::sqrt(2.0);
    CMat S(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) S(r, c) = cplx(bit(rng) ? a : -a, bit(rng) ? a : -a);
    return S;
}

/// Psi[l] = sum_i G(l,i) X[i] + noise with per-entry variance `noise_var` (defaults to sigma~^2).
inline EchoObservation synthesize_echo(const ChannelSet& ch, const BeamformerSet& W, Rng& rng,
                                       std::optional<double> noise_var = std::nullopt) {
    const auto& s = ch.sys;
    const double var = noise_var.value_or(s.noise_bs);
    if (!(var >= 0.0)) throw std::domain_error("synthesize_echo: noise variance must be >= 0");
    EchoObservation obs;
    for (int l = 0; l < s.L; ++l) {
        CMat X = CMat::Zero(s.Nt, s.T);
        for (int k = 0; k < s.K; ++k) {
            CMat S = qpsk_symbols(s.d, s.T, rng);
            X.noalias() += W(l, k) * S;
            obs.S.push_back(std::move(S));
        }
        obs.X.push_back(std::move(X));
    }
    for (int l = 0; l < s.L; ++l) {
        CMat Psi = CMat::Zero(s.Nr, s.T);
        for (int i = 0; i < s.L; ++i) Psi.noalias() += ch.g(l, i) * obs.X[static_cast<std::size_t>(i)];
        if (var > 0.0) Psi += std::sqrt(var) * complex_normal_matrix(s.Nr, s.T, rng);
        obs.Psi.push_back(std::move(Psi));
    }
    return obs;
}

/// |tr(G(theta)^H Psi X^H)|^2 / ||G(theta) X||_F^2 with G(theta) = xi a_r a_t^T.
/// Uses the rank-one structure: tr(G^H Psi X^H) = xi (a_r^H Psi)(X^H conj(a_t)).
inline double doa_objective(const CMat& Psi, const CMat& X, double xi, double theta, int n_r, int n_t) {
    if (Psi.rows() != n_r || X.rows() != n_t || Psi.cols() != X.cols())
        throw std::domain_error("doa_objective: shape mismatch");
    if (!(xi > 0.0)) throw std::domain_error("doa_objective: degenerate input (reflection coefficient is zero)");
    if (X.squaredNorm() == 0.0) throw std::domain_error("doa_objective: degenerate input (X = 0)");
    const CVec ar = steering_vector(theta, n_r);
    const CVec at = steering_vector(theta, n_t);
    const cplx num = xi * (ar.adjoint() * Psi * X.adjoint() * at.conjugate())(0, 0);
    // ||xi a_r a_t^T X||^2 = xi^2 ||a_r||^2 ||X^T a_t||^2
    const double den = xi * xi * ar.squaredNorm() * (X.transpose() * at).squaredNorm();
    if (!(den > 0.0)) throw std::domain_error("doa_objective: degenerate input (zero denominator)");
    return std::norm(num) / den;
}

/// Grid argmax over [center - halfwidth, center + halfwidth] (ties: lowest theta), then
/// golden-section refinement on the neighbouring cells. The refined point replaces the grid
/// point only if it is better by more than a relative 1e-12.
inline double estimate_theta_single(const CMat& Psi, const CMat& X, double xi, int n_r, int n_t, double center,
                                    const DoaGrid& grid) {
    if (grid.points < 2) throw std::domain_error("estimate_theta: grid needs at least 2 points");
    if (!(grid.halfwidth > 0.0)) throw std::domain_error("estimate_theta: halfwidth must be > 0");
    const double lo = center - grid.halfwidth;
    const double step = 2.0 * grid.halfwidth / (grid.points - 1);
    auto at = [&](int i) { return lo + step * i; };
    auto f = [&](double th) { return doa_objective(Psi, X, xi, th, n_r, n_t); };

    int best_i = 0;
    double best_v = f(at(0));
    for (int i = 1; i < grid.points; ++i) {
        const double v = f(at(i));
        if (v > best_v) {
            best_v = v;
            best_i = i;
        }
    }
    double best_theta = at(best_i);
    if (grid.refine_iters <= 0) return best_theta;

    double a = at(std::max(best_i - 1, 0));
    double b = at(std::min(best_i + 1, grid.points - 1));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < grid.refine_iters; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double refined = fc >= fd ? c : d;
    const double fr = std::max(fc, fd);
    if (fr > best_v * (1.0 + 1e-12)) best_theta = refined;
    return best_theta;
}

inline EstimationReport estimate_theta(const EchoObservation& obs, const ChannelSet& ch, const DoaGrid& grid = {},
                                       std::optional<std::vector<double>> centers = std::nullopt) {
    const auto& s = ch.sys;
    EstimationReport rep;
    rep.grid_resolution = 2.0 * grid.halfwidth / (grid.points - 1);
    const auto& c = centers ? *centers : ch.theta_rough;
    for (int l = 0; l < s.L; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const double th = estimate_theta_single(obs.Psi[li], obs.X[li], s.xi[li], s.Nr, s.Nt, c[li], grid);
        const double e = th - ch.theta_true[li];
        rep.theta_hat.push_back(th);
        rep.theta_true.push_back(ch.theta_true[li]);
        rep.per_bs_sq_err.push_back(e * e);
    }
    for (double e : rep.per_bs_sq_err) {
        rep.mean_sq_err += e;
        rep.max_sq_err = std::max(rep.max_sq_err, e);
    }
    rep.mean_sq_err /= static_cast<double>(rep.per_bs_sq_err.size());
    return rep;
}

/// Squared errors of the rough prior itself, in report form.
inline EstimationReport rough_prior_report(const ChannelSet& ch) {
    EstimationReport rep;
    for (std::size_t l = 0; l < ch.theta_true.size(); ++l) {
        const double e = ch.theta_rough[l] - ch.theta_true[l];
        rep.theta_hat.push_back(ch.theta_rough[l]);
        rep.theta_true.push_back(ch.theta_true[l]);
        rep.per_bs_sq_err.push_back(e * e);
        rep.mean_sq_err += e * e;
        rep.max_sq_err = std::max(rep.max_sq_err, e * e);
    }
    rep.mean_sq_err /= static_cast<double>(rep.per_bs_sq_err.size());
    return rep;
}

}  // namespace isacfp
