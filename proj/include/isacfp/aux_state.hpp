#pragma once

#include <vector>

#include "isacfp/linalg.hpp"
#include "isacfp/scenario.hpp"

namespace isacfp {

/// Auxiliary variables of the fractional-programming reformulation.
/// Per user (l, k): Gamma (d x d), Y (M x d), Ytilde (Nr x d), Z (Nt x d), Ztilde (Nr x d).
/// Per BS l: lambda (majorant of L_l), lambdatilde (majorant of Q^_l), eta (power multiplier).
struct AuxState {
    int L = 0;
    int K = 0;
    std::vector<CMat> Gamma, Y, Ytilde, Z, Ztilde;
    std::vector<double> lambda, lambdatilde, eta;

    AuxState() = default;
    explicit AuxState(const SystemParams& s)
        : L(s.L),
          K(s.K),
          Gamma(static_cast<std::size_t>(s.users()), CMat::Zero(s.d, s.d)),
          Y(static_cast<std::size_t>(s.users()), CMat::Zero(s.M, s.d)),
          Ytilde(static_cast<std::size_t>(s.users()), CMat::Zero(s.Nr, s.d)),
          Z(static_cast<std::size_t>(s.users()), CMat::Zero(s.Nt, s.d)),
          Ztilde(static_cast<std::size_t>(s.users()), CMat::Zero(s.Nr, s.d)),
          lambda(static_cast<std::size_t>(s.L), 0.0),
          lambdatilde(static_cast<std::size_t>(s.L), 0.0),
          eta(static_cast<std::size_t>(s.L), 0.0) {}

    std::size_t at(int l, int k) const { return static_cast<std::size_t>(l * K + k); }
};

}  // namespace isacfp
