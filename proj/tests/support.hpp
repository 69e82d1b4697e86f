#pragma once

#include "isacfp/harness.hpp"

namespace isacfp::test {

/// Small seeded multi-cell instance whose sensing and rate terms are of comparable size.
inline Scenario small_instance(std::uint64_t seed, int L = 2, int K = 2, int nt = 8, int nr = 8, int m = 2, int d = 2,
                               double beta = 1e-9, int T = 4) {
    NetworkConfig cfg = uniform_config(L, K, nt, nr, m, d, 20.0, 1.0, beta, 1e-3);
    cfg.block_length = T;
    cfg.seed = seed;
    return make_scenario(cfg);
}

/// Hand-built channel set with every channel set to `h` (no geometry).
inline ChannelSet scalar_channels(int L, int K, cplx h, double noise_user, double noise_bs, double power, int T = 1) {
    ChannelSet ch;
    auto& s = ch.sys;
    s.L = L;
    s.K = K;
    s.Nt = s.Nr = s.M = s.d = 1;
    s.T = T;
    s.noise_user = noise_user;
    s.noise_bs = noise_bs;
    s.power.assign(static_cast<std::size_t>(L), power);
    s.xi.assign(static_cast<std::size_t>(L), 1.0);
    ch.H.assign(static_cast<std::size_t>(L * K * L), CMat::Constant(1, 1, h));
    ch.Gcross.assign(static_cast<std::size_t>(L * L), CMat::Constant(1, 1, h));
    for (int l = 0; l < L; ++l) {
        auto r = build_response(1.0, 0.2, 1, 1);
        ch.Gresp.push_back(r.G);
        ch.Gdot.push_back(r.Gdot);
        ch.theta_true.push_back(0.2);
        ch.theta_rough.push_back(0.2);
    }
    return ch;
}

inline CMat random_psd(Eigen::Index n, Rng& rng, Eigen::Index rank = -1) {
    const CMat a = complex_normal_matrix(n, rank < 0 ? n : rank, rng);
    return hermitian_part(a * a.adjoint());
}

inline BeamformerSet random_feasible(const SystemParams& s, Rng& rng, double fill = 0.7) {
    BeamformerSet W = BeamformerSet::zeros(s);
    for (int l = 0; l < s.L; ++l) {
        for (int k = 0; k < s.K; ++k) W(l, k) = complex_normal_matrix(s.Nt, s.d, rng);
        const double scale = std::sqrt(fill * s.power[static_cast<std::size_t>(l)] / W.bs_power(l));
        for (int k = 0; k < s.K; ++k) W(l, k) *= scale;
    }
    return W;
}

/// Fisher information of BS l from the vectorized echo model: 2 Re v^H (I_T (x) Q)^-1 v with
/// v = vec(Gdot sum_k W_k S_k), where the stacked symbols satisfy S S^H = T I exactly
/// (rows of a scaled DFT matrix, i.e. the expectation of the symbol Gram matrix). Needs K d <= T.
inline double fisher_kronecker_oracle(const ChannelSet& ch, const BeamformerSet& W, int l) {
    const auto& s = ch.sys;
    const int rows = s.K * s.d;
    if (rows > s.T) throw std::domain_error("oracle needs K d <= T");
    CMat S(rows, s.T);
    for (int r = 0; r < rows; ++r)
        for (int t = 0; t < s.T; ++t) S(r, t) = std::polar(1.0, -2.0 * kPi * r * t / s.T);
    CMat Q = s.noise_bs * CMat::Identity(s.Nr, s.Nr);
    for (int i = 0; i < s.L; ++i)
        for (int j = 0; j < s.K; ++j)
            if (i != l) Q += ch.gcross(l, i) * W(i, j) * W(i, j).adjoint() * ch.gcross(l, i).adjoint();
    const CMat dX = ch.Gdot[static_cast<std::size_t>(l)] * W.stacked(l) * S;
    const CVec v = Eigen::Map<const CVec>(dX.data(), dX.size());
    CMat big = CMat::Zero(s.Nr * s.T, s.Nr * s.T);
    for (int t = 0; t < s.T; ++t) big.block(t * s.Nr, t * s.Nr, s.Nr, s.Nr) = Q;
    const CVec x = big.fullPivLu().solve(v);
    return 2.0 * v.dot(x).real();
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace isacfp::test
