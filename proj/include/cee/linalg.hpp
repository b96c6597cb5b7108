#ifndef CEE_LINALG_HPP
#define CEE_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cee/errors.hpp"

namespace cee {

/// Solves X = A X B^* + Q by vectorization. Sizes here are small by design
/// (n <= 50), so the dense Kronecker system is acceptable.
inline Eigen::MatrixXcd stein_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                    const Eigen::MatrixXcd& Q)
{
    const Eigen::Index m = A.rows(), n = B.rows();
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(m * n, m * n);
    // vec(A X B^*) = (conj(B) kron A) vec(X)
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < n; ++l) {
            const std::complex<double> w = std::conj(B(j, l));
            if (w == std::complex<double>(0.0)) continue;
            K.block(j * m, l * m, m, m) -= w * A;
        }
    Eigen::VectorXcd q(m * n);
    for (Eigen::Index j = 0; j < n; ++j) q.segment(j * m, m) = Q.col(j);
    Eigen::VectorXcd x = K.partialPivLu().solve(q);
    Eigen::MatrixXcd X(m, n);
    for (Eigen::Index j = 0; j < n; ++j) X.col(j) = x.segment(j * m, m);
    return X;
}

/// X = A X A^* + Q, Hermitian Q.
inline Eigen::MatrixXcd stein_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& Q)
{
    Eigen::MatrixXcd X = stein_solve(A, A, Q);
    return 0.5 * (X + X.adjoint());
}

/// Real X = A X A' + Q, symmetric Q.
inline Eigen::MatrixXd stein_solve_real(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q)
{
    Eigen::MatrixXcd X = stein_solve(A.cast<std::complex<double>>(), Q.cast<std::complex<double>>());
    Eigen::MatrixXd R = X.real();
    return 0.5 * (R + R.transpose());
}

inline double condition_number(const Eigen::MatrixXcd& M)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 0.0) return 1e300;
    return s(0) / s(s.size() - 1);
}

} // namespace cee

#endif
