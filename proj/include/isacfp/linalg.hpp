#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "isacfp/errors.hpp"

namespace isacfp {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Every factorization in the library goes through the helpers below so that
// the number of dense solves/eigendecompositions can be audited by size.
struct DecompositionCounter {
    std::map<Eigen::Index, std::uint64_t> by_dim;

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (const auto& [dim, count] : by_dim) n += count;
        return n;
    }
    // Calls on matrices strictly larger than `dim`.
    std::uint64_t larger_than(Eigen::Index dim) const {
        std::uint64_t n = 0;
        for (const auto& [d, count] : by_dim)
            if (d > dim) n += count;
        return n;
    }
};

inline thread_local DecompositionCounter decomposition_counter;

namespace detail {
inline void count_decomposition(Eigen::Index dim) { ++decomposition_counter.by_dim[dim]; }
}  // namespace detail

/// Snapshot of the counter; `delta()` reports the calls made since construction.
class DecompositionAudit {
public:
    DecompositionAudit() : start_(decomposition_counter) {}

    DecompositionCounter delta() const {
        DecompositionCounter out;
        for (const auto& [dim, count] : decomposition_counter.by_dim) {
            auto it = start_.by_dim.find(dim);
            const std::uint64_t before = it == start_.by_dim.end() ? 0 : it->second;
            if (count > before) out.by_dim[dim] = count - before;
        }
        return out;
    }

private:
    DecompositionCounter start_;
};

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

inline void symmetrize(CMat& a) { a = hermitian_part(a); }

inline bool is_hermitian(const CMat& a, double rel_tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.norm();
    return (a - a.adjoint()).norm() <= rel_tol * (scale > 0.0 ? scale : 1.0);
}

/// Solves A X = B for Hermitian positive definite A.
inline CMat hpd_solve(const CMat& a, const CMat& b) {
    detail::count_decomposition(a.rows());
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("Cholesky factorization failed (matrix not positive definite)");
    return llt.solve(b);
}

inline CMat hpd_inverse(const CMat& a) {
    return hpd_solve(a, CMat::Identity(a.rows(), a.cols()));
}

/// ln|A| for Hermitian positive definite A.
inline double hpd_logdet(const CMat& a) {
    detail::count_decomposition(a.rows());
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("Cholesky factorization failed in log-determinant");
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log(llt.matrixL()(i, i).real());
    return 2.0 * s;
}

struct HermitianEigen {
    RVec values;   // ascending
    CMat vectors;  // columns
};

inline HermitianEigen hermitian_eigen(const CMat& a) {
    detail::count_decomposition(a.rows());
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Projects a Hermitian matrix onto the PSD cone by flooring eigenvalues at zero.
inline CMat psd_floor(const CMat& a) {
    auto eig = hermitian_eigen(hermitian_part(a));
    RVec v = eig.values.cwiseMax(0.0);
    return eig.vectors * v.asDiagonal() * eig.vectors.adjoint();
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace isacfp
