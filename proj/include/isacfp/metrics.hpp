#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "isacfp/linalg.hpp"
#include "isacfp/scenario.hpp"

namespace isacfp {

/// The primal variable: W(l, k) is the Nt x d precoder of user (l, k) at BS l.
struct BeamformerSet {
    int L = 0;
    int K = 0;
    std::vector<CMat> blocks;

    BeamformerSet() = default;
    BeamformerSet(int cells, int users, Eigen::Index nt, Eigen::Index d)
        : L(cells), K(users), blocks(static_cast<std::size_t>(cells * users), CMat::Zero(nt, d)) {}

    static BeamformerSet zeros(const SystemParams& s) { return BeamformerSet(s.L, s.K, s.Nt, s.d); }

    CMat& operator()(int l, int k) { return blocks[static_cast<std::size_t>(l * K + k)]; }
    const CMat& operator()(int l, int k) const { return blocks[static_cast<std::size_t>(l * K + k)]; }

    /// Sum_k ||W(l, k)||_F^2.
    double bs_power(int l) const {
        double p = 0.0;
        for (int k = 0; k < K; ++k) p += (*this)(l, k).squaredNorm();
        return p;
    }

    /// [W(l,0) ... W(l,K-1)], Nt x Kd.
    CMat stacked(int l) const {
        const auto& first = (*this)(l, 0);
        CMat out(first.rows(), first.cols() * K);
        for (int k = 0; k < K; ++k) out.middleCols(k * first.cols(), first.cols()) = (*this)(l, k);
        return out;
    }
};

/// omega[l][k] weights rates, beta[l] weights Fisher information.
struct Weights {
    std::vector<std::vector<double>> omega;
    std::vector<double> beta;

    double w(int l, int k) const { return omega[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]; }
    double b(int l) const { return beta[static_cast<std::size_t>(l)]; }

    static Weights from(const NetworkConfig& cfg) { return {cfg.rate_weights, cfg.sensing_weights}; }
    static Weights uniform(int L, int K, double omega, double beta) {
        return {std::vector<std::vector<double>>(static_cast<std::size_t>(L),
                                                 std::vector<double>(static_cast<std::size_t>(K), omega)),
                std::vector<double>(static_cast<std::size_t>(L), beta)};
    }
};

struct ObjectiveBreakdown {
    std::vector<std::vector<double>> rates;  // nats
    std::vector<double> fisher;
    double weighted_sum = 0.0;
    double sum_rate = 0.0;
    double sum_fisher = 0.0;
};

/// F(l,k): intra- plus cross-cell interference plus noise at user (l, k), M x M.
inline CMat interference_covariance(const ChannelSet& ch, const BeamformerSet& W, int l, int k) {
    const auto& s = ch.sys;
    if (!(s.noise_user > 0.0)) throw std::domain_error("interference_covariance: noise power must be positive");
    CMat F = s.noise_user * CMat::Identity(s.M, s.M);
    for (int i = 0; i < s.L; ++i) {
        CMat hw = ch.h(l, k, i) * W.stacked(i);
        if (i == l) hw.middleCols(k * s.d, s.d).setZero();
        F.noalias() += hw * hw.adjoint();
    }
    return hermitian_part(F);
}

/// U(l,k) = F(l,k) + H W W^H H^H: the full received covariance.
inline CMat received_covariance(const ChannelSet& ch, const BeamformerSet& W, int l, int k) {
    const auto& s = ch.sys;
    CMat U = s.noise_user * CMat::Identity(s.M, s.M);
    for (int i = 0; i < s.L; ++i) {
        const CMat hw = ch.h(l, k, i) * W.stacked(i);
        U.noalias() += hw * hw.adjoint();
    }
    return hermitian_part(U);
}

/// SINR matrix W^H H^H F^-1 H W (d x d, Hermitian PSD).
inline CMat sinr_matrix(const ChannelSet& ch, const BeamformerSet& W, int l, int k) {
    const CMat F = interference_covariance(ch, W, l, k);
    const CMat A = ch.h(l, k, l) * W(l, k);
    return hermitian_part(A.adjoint() * hpd_solve(F, A));
}

/// ln|I + W^H H^H F^-1 H W| in nats.
inline double user_rate(const ChannelSet& ch, const BeamformerSet& W, int l, int k) {
    const CMat gamma = sinr_matrix(ch, W, l, k);
    const double r = hpd_logdet(CMat::Identity(gamma.rows(), gamma.cols()) + gamma);
    return std::max(r, 0.0);
}

/// Q^(l): cross-BS interference plus noise at the echo array of BS l, Nr x Nr.
inline CMat sensing_interference(const ChannelSet& ch, const BeamformerSet& W, int l) {
    const auto& s = ch.sys;
    if (!(s.noise_bs > 0.0)) throw std::domain_error("sensing_interference: noise power must be positive");
    CMat Q = s.noise_bs * CMat::Identity(s.Nr, s.Nr);
    for (int i = 0; i < s.L; ++i) {
        if (i == l) continue;
        const CMat gw = ch.gcross(l, i) * W.stacked(i);
        Q.noalias() += gw * gw.adjoint();
    }
    return hermitian_part(Q);
}

/// J_l = 2T sum_k tr((Gdot W)^H Q^-1 (Gdot W)), the traced form of the Fisher information.
inline double fisher_information(const ChannelSet& ch, const BeamformerSet& W, int l) {
    const auto& s = ch.sys;
    const CMat B = ch.Gdot[static_cast<std::size_t>(l)] * W.stacked(l);
    if (B.squaredNorm() == 0.0) return 0.0;
    const CMat Q = sensing_interference(ch, W, l);
    const double j = (B.adjoint() * hpd_solve(Q, B)).trace().real();
    return std::max(2.0 * s.T * j, 0.0);
}

inline ObjectiveBreakdown objective(const ChannelSet& ch, const BeamformerSet& W, const Weights& weights) {
    const auto& s = ch.sys;
    ObjectiveBreakdown out;
    out.rates.assign(static_cast<std::size_t>(s.L), std::vector<double>(static_cast<std::size_t>(s.K), 0.0));
    out.fisher.assign(static_cast<std::size_t>(s.L), 0.0);
    for (int l = 0; l < s.L; ++l) {
        for (int k = 0; k < s.K; ++k) {
            const double r = user_rate(ch, W, l, k);
            out.rates[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = r;
            out.sum_rate += r;
            out.weighted_sum += weights.w(l, k) * r;
        }
        const double j = fisher_information(ch, W, l);
        out.fisher[static_cast<std::size_t>(l)] = j;
        out.sum_fisher += j;
        out.weighted_sum += weights.b(l) * j;
    }
    return out;
}

struct Feasibility {
    bool feasible = true;
    std::vector<double> slack;  // P_l - sum_k ||W(l,k)||_F^2
};

inline constexpr double kFeasibilityRelTol = 1e-9;

inline Feasibility check_feasible(const BeamformerSet& W, const SystemParams& s) {
    Feasibility f;
    for (int l = 0; l < s.L; ++l) {
        const double P = s.power[static_cast<std::size_t>(l)];
        const double slack = P - W.bs_power(l);
        f.slack.push_back(slack);
        if (slack < -kFeasibilityRelTol * P) f.feasible = false;
    }
    return f;
}

inline Feasibility check_feasible(const BeamformerSet& W, const NetworkConfig& cfg) {
    return check_feasible(W, system_params(cfg));
}

}  // namespace isacfp
