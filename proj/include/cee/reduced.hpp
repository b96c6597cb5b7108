#ifndef CEE_REDUCED_HPP
#define CEE_REDUCED_HPP

#include <utility>

#include <Eigen/Dense>

#include "cee/errors.hpp"
#include "cee/poly.hpp"

namespace cee {

/// Equation data: the spectral-zero polynomial sigma (monic Schur of degree
/// n, stored as its trailing coefficient vector), the pair (u, U), and
/// Gamma = J - sigma h'.
struct CeeParameters {
    Polynomial sigma;   // monic, degree n
    Eigen::VectorXd u;
    Eigen::MatrixXd U;
    Eigen::VectorXd sigma_vec; // (sigma_1 .. sigma_n)
    Eigen::MatrixXd Gamma;

    int order() const { return static_cast<int>(sigma_vec.size()); }

    static CeeParameters make(const Polynomial& sigma, Eigen::VectorXd u, Eigen::MatrixXd U)
    {
        if (!sigma.is_monic(1e-9))
            fail(ErrorCode::InvalidInput, "sigma must be monic");
        if (!sigma.is_real(1e-9))
            fail(ErrorCode::InvalidInput, "sigma must have real coefficients");
        const int n = sigma.degree();
        if (u.size() != n || U.rows() != n || U.cols() != n)
            fail(ErrorCode::InvalidInput, "u/U dimensions do not match sigma");
        CeeParameters out;
        out.sigma = Polynomial::from_real(sigma.real_coefficients());
        out.u = std::move(u);
        out.U = std::move(U);
        out.sigma_vec.resize(n);
        for (int i = 0; i < n; ++i) out.sigma_vec(i) = out.sigma.coeff_of(n - 1 - i).real();
        out.Gamma = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) out.Gamma(i, i + 1) = 1.0;
        out.Gamma.col(0) -= out.sigma_vec;
        return out;
    }
};

/// The Hankel-plus-Toeplitz matrix S(a), entries a_{i+j} + a_{j-i} over the
/// coefficient sequence (1, a_1, ..., a_n), indices outside [0, n] zero.
inline Eigen::MatrixXd s_matrix(const Eigen::VectorXd& a_tail)
{
    const int n = static_cast<int>(a_tail.size());
    auto a = [&](int k) -> double {
        if (k < 0 || k > n) return 0.0;
        return k == 0 ? 1.0 : a_tail(k - 1);
    };
    Eigen::MatrixXd S(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) S(i, j) = a(i + j) + a(j - i);
    return S;
}

/// Autocorrelation lags 0..n-1 of (1, sigma_1, ..., sigma_n).
inline Eigen::VectorXd sigma_autocorrelation(const Eigen::VectorXd& sigma_vec)
{
    const int n = static_cast<int>(sigma_vec.size());
    auto sv = [&](int k) -> double { return k == 0 ? 1.0 : sigma_vec(k - 1); };
    Eigen::VectorXd s(n);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i + k <= n; ++i) acc += sv(i) * sv(i + k);
        s(k) = acc;
    }
    return s;
}

/// The n-equation reduction of the matrix equation to the variables p = Ph.
struct ReducedSystem {
    CeeParameters params;
    Eigen::VectorXd s; // autocorrelation lags 0..n-1 of sigma

    static ReducedSystem make(CeeParameters params)
    {
        ReducedSystem sys;
        sys.s = sigma_autocorrelation(params.sigma_vec);
        sys.params = std::move(params);
        return sys;
    }

    int order() const { return params.order(); }

    /// a(p, lambda) and b(p, lambda) coefficient tails, plus g(p, 1).
    struct ABPair {
        Eigen::VectorXd a, b, g1;
    };

    ABPair ab(const Eigen::VectorXd& p, double lambda) const
    {
        ABPair out;
        const Eigen::VectorXd base = params.Gamma * p + params.sigma_vec;
        out.g1 = params.u + params.U * base;
        out.a = base - lambda * out.g1;
        out.b = base + lambda * out.g1;
        return out;
    }

    Polynomial a_polynomial(const Eigen::VectorXd& p, double lambda) const
    {
        return tail_to_monic(ab(p, lambda).a);
    }

    static Polynomial tail_to_monic(const Eigen::VectorXd& tail)
    {
        std::vector<Complex> c(static_cast<std::size_t>(tail.size()) + 1);
        c[0] = 1.0;
        for (Eigen::Index i = 0; i < tail.size(); ++i)
            c[static_cast<std::size_t>(i) + 1] = tail(i);
        return Polynomial(std::move(c));
    }
};

/// H(p, lambda): first n rows of S(a)[1; b] minus 2(1 - p_1) s.
inline Eigen::VectorXd reduced_residual(const Eigen::VectorXd& p, double lambda,
                                        const ReducedSystem& sys)
{
    const int n = sys.order();
    const auto ab = sys.ab(p, lambda);
    Eigen::VectorXd one_b(n + 1);
    one_b(0) = 1.0;
    one_b.tail(n) = ab.b;
    const Eigen::VectorXd full = s_matrix(ab.a) * one_b;
    return full.head(n) - 2.0 * (1.0 - p(0)) * sys.s;
}

struct ReducedJacobians {
    Eigen::MatrixXd dH_dp;
    Eigen::VectorXd dH_dlambda;
};

/// Closed-form partial derivatives of H.
inline ReducedJacobians jacobians(const Eigen::VectorXd& p, double lambda,
                                  const ReducedSystem& sys)
{
    const int n = sys.order();
    const auto ab = sys.ab(p, lambda);
    const Eigen::MatrixXd Sa = s_matrix(ab.a);
    const Eigen::MatrixXd Sb = s_matrix(ab.b);
    const Eigen::MatrixXd& Gamma = sys.params.Gamma;

    Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(n + 1, n);
    stacked.bottomRows(n) = Gamma;
    Eigen::MatrixXd dHdp = ((Sa + Sb) * stacked).topRows(n);
    dHdp += 2.0 * sys.s * Eigen::RowVectorXd::Unit(n, 0);
    stacked.bottomRows(n) = lambda * (sys.params.U * Gamma);
    dHdp += ((Sa - Sb) * stacked).topRows(n);

    Eigen::VectorXd g_ext = Eigen::VectorXd::Zero(n + 1);
    g_ext.tail(n) = ab.g1;
    Eigen::VectorXd dHdl = ((Sa - Sb) * g_ext).head(n);
    return {std::move(dHdp), std::move(dHdl)};
}

} // namespace cee

#endif
