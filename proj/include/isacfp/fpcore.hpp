#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "isacfp/aux_state.hpp"
#include "isacfp/linalg.hpp"
#include "isacfp/metrics.hpp"
#include "isacfp/random.hpp"

namespace isacfp {

/// How the spectral majorant lambda >= lambda_max(A) is obtained.
struct MajorantStrategy {
    enum class Kind { exact_lambda_max, trace, frobenius };

    Kind kind = Kind::exact_lambda_max;
    int power_iters = 50;
    double power_tol = 1e-8;
    double safety_factor = 1.0 + 1e-8;
    std::uint64_t seed = 0;  // power-method start vector

    void validate() const {
        if (!(safety_factor >= 1.0)) throw ConfigError("majorant safety_factor must be >= 1");
        if (!(power_tol > 0.0)) throw ConfigError("majorant power_tol must be > 0");
        if (power_iters < 1) throw ConfigError("majorant power_iters must be >= 1");
    }
};

inline std::string to_string(MajorantStrategy::Kind k) {
    switch (k) {
        case MajorantStrategy::Kind::exact_lambda_max: return "max";
        case MajorantStrategy::Kind::trace: return "trace";
        case MajorantStrategy::Kind::frobenius: return "frobenius";
    }
    return "max";
}

inline MajorantStrategy::Kind parse_majorant_kind(const std::string& s) {
    if (s == "max" || s == "exact" || s == "exact_lambda_max") return MajorantStrategy::Kind::exact_lambda_max;
    if (s == "trace") return MajorantStrategy::Kind::trace;
    if (s == "frobenius") return MajorantStrategy::Kind::frobenius;
    throw ConfigError("unknown lambda strategy '" + s + "' (expected max|trace|frobenius)");
}

inline CVec power_start_vector(Eigen::Index n, std::uint64_t seed) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(n), StreamTag::power_method);
    CVec v = complex_normal_matrix(n, 1, rng);
    return v / v.norm();
}

/// Upper bound on lambda_max(A) for Hermitian PSD A.
///
/// exact_lambda_max runs the power method until successive Rayleigh quotients
/// agree to `power_tol` (relative) and returns ||A v|| * safety_factor for the
/// final unit iterate v; ||A v|| >= v^H A v, so this is the tighter of the two
/// lower estimates. `warm`, when given, seeds the iteration and receives the
/// final iterate.
inline double lambda_max(const CMat& A, const MajorantStrategy& strategy, CVec* warm = nullptr) {
    if (A.rows() != A.cols()) throw std::domain_error("lambda_max: matrix must be square");
    if (!is_hermitian(A)) throw std::domain_error("lambda_max: matrix is not Hermitian");
    switch (strategy.kind) {
        case MajorantStrategy::Kind::trace: return A.trace().real();
        case MajorantStrategy::Kind::frobenius: return A.norm();
        case MajorantStrategy::Kind::exact_lambda_max: break;
    }
    if (A.rows() == 0 || A.norm() == 0.0) return 0.0;

    CVec v = (warm != nullptr && warm->size() == A.rows() && warm->norm() > 0.0)
                 ? CVec(*warm / warm->norm())
                 : power_start_vector(A.rows(), strategy.seed);
    double rq_prev = 0.0;
    double estimate = 0.0;
    for (int it = 0; it < strategy.power_iters; ++it) {
        const CVec w = A * v;
        const double rq = v.dot(w).real();
        const double nw = w.norm();
        if (nw == 0.0) return A.norm();  // start vector in the null space; fall back to a valid bound
        estimate = std::max(rq, nw);
        v = w / nw;
        if (it > 0 && std::abs(rq - rq_prev) < strategy.power_tol * std::abs(rq)) break;
        rq_prev = rq;
    }
    if (warm != nullptr) *warm = v;
    return estimate * strategy.safety_factor;
}

/// tr(X^H K X + 2 Re{X^H (L - K) Z} + Z^H (K - L) Z) with K = k_scalar I.
/// Upper-bounds tr(X^H L X) whenever k_scalar >= lambda_max(L); tight at Z = X.
inline double nonhomogeneous_majorant(const CMat& L, double k_scalar, const CMat& X, const CMat& Z) {
    if (X.rows() != Z.rows() || X.cols() != Z.cols() || L.rows() != X.rows() || L.cols() != L.rows())
        throw std::domain_error("nonhomogeneous_majorant: shape mismatch");
    const CMat LmK = L - k_scalar * CMat::Identity(L.rows(), L.cols());
    const double quad = k_scalar * X.squaredNorm();
    const double cross = 2.0 * (X.adjoint() * LmK * Z).trace().real();
    const double tail = -(Z.adjoint() * LmK * Z).trace().real();
    return quad + cross + tail;
}

/// tr(2 Re{sqrtA^H Y C} - Y^H B Y C); maximized over Y at B^-1 sqrtA.
inline double quadratic_transform_value(const CMat& sqrtA, const CMat& B, const CMat& Y, const CMat& C) {
    if (sqrtA.rows() != B.rows() || B.rows() != B.cols() || Y.rows() != sqrtA.rows() || Y.cols() != sqrtA.cols() ||
        C.rows() != sqrtA.cols() || C.cols() != C.rows())
        throw std::domain_error("quadratic_transform_value: shape mismatch");
    return (2.0 * (sqrtA.adjoint() * Y * C).trace().real()) - (Y.adjoint() * B * Y * C).trace().real();
}

/// ln|I + Gamma| - tr(Gamma) + tr((I + Gamma) sqrtA^H (A + B)^-1 sqrtA), A = sqrtA sqrtA^H.
inline double ldt_value(const CMat& Gamma, const CMat& sqrtA, const CMat& B) {
    if (Gamma.rows() != Gamma.cols() || Gamma.rows() != sqrtA.cols() || B.rows() != sqrtA.rows() ||
        B.cols() != B.rows())
        throw std::domain_error("ldt_value: shape mismatch");
    if (!is_hermitian(Gamma)) throw std::domain_error("ldt_value: Gamma is not Hermitian");
    const double scale = std::max(1.0, Gamma.norm());
    if (Gamma.rows() > 0 && hermitian_eigen(hermitian_part(Gamma)).values.minCoeff() < -1e-10 * scale)
        throw std::domain_error("ldt_value: Gamma is not positive semidefinite");
    const auto d = Gamma.rows();
    const CMat I = CMat::Identity(d, d);
    const CMat A = sqrtA * sqrtA.adjoint();
    const CMat ratio = sqrtA.adjoint() * hpd_solve(hermitian_part(A + B), sqrtA);
    return hpd_logdet(hermitian_part(I + Gamma)) - Gamma.trace().real() + ((I + Gamma) * ratio).trace().real();
}

/// The doubly-majorized surrogate g_s(W | aux). Expanded as
///   sum_lk [ 2Re tr(W^H Lambda) - lambda_l ||W - Z||^2 - Re tr((2W - Z)^H D_l Z) ]
/// - sum_lk 2T beta_l Re[ lt_l ||Yt||^2 + 2 tr(Yt^H (Qz_l - lt_l I) Zt) + tr(Zt^H (lt_l I - Qz_l) Zt) ]
/// + sum_lk omega_lk [ ln|I + Gamma| - tr Gamma - sigma^2 tr((I + Gamma) Y^H Y) ]
/// with D_l the communication part of L_l, Qz_l = sum_{i != l, j} G_li Z_ij (2W_ij - Z_ij)^H G_li^H + sigma~^2 I,
/// and lt_l = aux.lambdatilde in the units of Q^_l. Evaluated directly, never inside solver loops.
inline double surrogate_gs_value(const ChannelSet& ch, const BeamformerSet& W, const AuxState& aux,
                                 const Weights& weights) {
    const auto& s = ch.sys;
    const CMat Id = CMat::Identity(s.d, s.d);
    double value = 0.0;

    std::vector<CMat> D(static_cast<std::size_t>(s.L), CMat::Zero(s.Nt, s.Nt));
    for (int i = 0; i < s.L; ++i)
        for (int j = 0; j < s.K; ++j) {
            const auto u = aux.at(i, j);
            for (int l = 0; l < s.L; ++l) {
                const CMat hy = ch.h(i, j, l).adjoint() * aux.Y[u];
                D[static_cast<std::size_t>(l)] += weights.w(i, j) * hy * (Id + aux.Gamma[u]) * hy.adjoint();
            }
        }

    for (int l = 0; l < s.L; ++l) {
        CMat Qz = s.noise_bs * CMat::Identity(s.Nr, s.Nr);
        for (int i = 0; i < s.L; ++i) {
            if (i == l) continue;
            for (int j = 0; j < s.K; ++j) {
                const auto u = aux.at(i, j);
                Qz += ch.gcross(l, i) * aux.Z[u] * (2.0 * W(i, j) - aux.Z[u]).adjoint() * ch.gcross(l, i).adjoint();
            }
        }
        const double lam = aux.lambda[static_cast<std::size_t>(l)];
        const double lt = aux.lambdatilde[static_cast<std::size_t>(l)];
        const CMat QzmL = Qz - lt * CMat::Identity(s.Nr, s.Nr);
        for (int k = 0; k < s.K; ++k) {
            const auto u = aux.at(l, k);
            const double w = weights.w(l, k);
            const double b = weights.b(l);
            const CMat Lambda = w * ch.h(l, k, l).adjoint() * aux.Y[u] * (Id + aux.Gamma[u]) +
                                2.0 * s.T * b * ch.Gdot[static_cast<std::size_t>(l)].adjoint() * aux.Ytilde[u];
            const CMat& Wlk = W(l, k);
            const CMat& Z = aux.Z[u];
            value += 2.0 * (Wlk.adjoint() * Lambda).trace().real();
            value -= lam * (Wlk - Z).squaredNorm();
            value -= ((2.0 * Wlk - Z).adjoint() * D[static_cast<std::size_t>(l)] * Z).trace().real();

            const CMat& Yt = aux.Ytilde[u];
            const CMat& Zt = aux.Ztilde[u];
            const double sensing = lt * Yt.squaredNorm() + 2.0 * (Yt.adjoint() * QzmL * Zt).trace().real() -
                                   (Zt.adjoint() * QzmL * Zt).trace().real();
            value -= 2.0 * s.T * b * sensing;

            if (w != 0.0) {
                const CMat IG = Id + aux.Gamma[u];
                value += w * (hpd_logdet(hermitian_part(IG)) - aux.Gamma[u].trace().real() -
                              s.noise_user * (IG * aux.Y[u].adjoint() * aux.Y[u]).trace().real());
            }
        }
    }
    return value;
}

}  // namespace isacfp
