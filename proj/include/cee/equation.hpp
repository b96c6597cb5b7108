#ifndef CEE_EQUATION_HPP
#define CEE_EQUATION_HPP

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cee/errors.hpp"
#include "cee/linalg.hpp"
#include "cee/poly.hpp"
#include "cee/reduced.hpp"

namespace cee {

/// (u, U) of the classical covariance-extension configuration: u from the
/// expansion z^n / (z^n + c_1 z^{n-1} + ... + c_n) = 1 - u_1 z^{-1} - ...,
/// U the strictly lower triangular Toeplitz matrix shifted one step.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> covariance_uU(const std::vector<double>& c)
{
    const int n = static_cast<int>(c.size());
    std::vector<double> r(static_cast<std::size_t>(n) + 1, 0.0);
    r[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int i = 1; i <= std::min(k, n); ++i)
            acc += c[static_cast<std::size_t>(i - 1)] * r[static_cast<std::size_t>(k - i)];
        r[static_cast<std::size_t>(k)] = -acc;
    }
    Eigen::VectorXd u(n);
    for (int k = 1; k <= n; ++k) u(k - 1) = -r[static_cast<std::size_t>(k)];
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) U(i, j) = u(i - j - 1);
    return {std::move(u), std::move(U)};
}

inline Eigen::VectorXd g_of(const Eigen::MatrixXd& P, const CeeParameters& params)
{
    const Eigen::VectorXd p = P.col(0);
    return params.u + params.U * (params.sigma_vec + params.Gamma * p);
}

/// Frobenius norm of P - Gamma (P - P h h' P) Gamma' - g(P) g(P)'.
inline double cee_residual(const Eigen::MatrixXd& P, const CeeParameters& params)
{
    const Eigen::VectorXd p = P.col(0); // P h
    const Eigen::VectorXd g = g_of(P, params);
    const Eigen::MatrixXd rhs =
        params.Gamma * (P - p * p.transpose()) * params.Gamma.transpose() + g * g.transpose();
    return (P - rhs).norm();
}

/// Recovery of the interpolant pieces from the reduced variable p = Ph.
struct RecoveredPair {
    Polynomial a, b;
    double rho;
};

inline RecoveredPair recover_ab(const Eigen::VectorXd& p, const CeeParameters& params)
{
    if (p.size() != params.order())
        fail(ErrorCode::InvalidInput, "p has wrong dimension");
    if (p(0) >= 1.0)
        fail(ErrorCode::Infeasible, "h'Ph >= 1: contractivity violated");
    const Eigen::VectorXd base = params.Gamma * p + params.sigma_vec;
    const Eigen::VectorXd g = params.u + params.U * base;
    RecoveredPair out;
    out.a = ReducedSystem::tail_to_monic(base - g);
    out.b = ReducedSystem::tail_to_monic(base + g);
    out.rho = std::sqrt(1.0 - p(0));
    return out;
}

/// P as the solution of P - Gamma P Gamma' = -Gamma p p' Gamma' + g g'.
inline Eigen::MatrixXd lyapunov_P_from_p(const Eigen::VectorXd& p, const CeeParameters& params)
{
    const Eigen::VectorXd base = params.Gamma * p + params.sigma_vec;
    const Eigen::VectorXd g = params.u + params.U * base;
    const Eigen::MatrixXd Q =
        g * g.transpose() - params.Gamma * p * p.transpose() * params.Gamma.transpose();
    return stein_solve_real(params.Gamma, Q);
}

struct RankReport {
    int rank = 0;
    Eigen::VectorXd singular_values;
};

/// Numerical rank: singular values at least rel_tol times the largest.
inline RankReport positive_degree(const Eigen::MatrixXd& P, double rel_tol)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
    RankReport out;
    out.singular_values = svd.singularValues();
    if (out.singular_values.size() == 0) return out;
    const double cutoff = rel_tol * out.singular_values(0);
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
        if (out.singular_values(i) >= cutoff && out.singular_values(0) > 0.0) ++out.rank;
    return out;
}

/// Full solution bundle for one equation instance.
struct CeeSolution {
    Eigen::VectorXd p;
    Eigen::MatrixXd P;
    Polynomial a, b, sigma;
    double rho = 1.0;
    RationalFunction f; // b / (2 a)
    double equation_residual = 0.0;
    double identity_residual = 0.0;
    Eigen::VectorXd singular_values;

    int degree_estimate(double rel_tol = 1e-6) const
    {
        int r = 0;
        if (singular_values.size() == 0) return 0;
        for (Eigen::Index i = 0; i < singular_values.size(); ++i)
            if (singular_values(i) >= rel_tol * singular_values(0) && singular_values(0) > 0)
                ++r;
        return r;
    }
};

inline CeeSolution assemble_solution(const Eigen::VectorXd& p, const CeeParameters& params)
{
    CeeSolution sol;
    sol.p = p;
    sol.P = lyapunov_P_from_p(p, params);
    const auto rec = recover_ab(p, params);
    sol.a = rec.a;
    sol.b = rec.b;
    sol.sigma = params.sigma;
    sol.rho = rec.rho;
    sol.f = RationalFunction{sol.b, sol.a, 0.5};
    sol.equation_residual = cee_residual(sol.P, params);
    sol.identity_residual = positivity_identity_residual(sol.a, sol.b, params.sigma, sol.rho);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sol.P);
    sol.singular_values = svd.singularValues();

    const double tr = std::max(sol.P.trace(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.P, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(tr, 1.0))
        fail(ErrorCode::PathFailure, "solution P is not positive semidefinite");
    return sol;
}

struct NewtonOptions {
    double tolerance = 1e-10;
    int max_iterations = 50;
    double damping_floor = std::pow(2.0, -20);
};

/// Damped Newton iteration on the reduced equation at lambda = 1. Serves as
/// an independent route to the same solution the continuation solver finds;
/// divergence is an expected outcome on hard problems.
inline CeeSolution solve_direct(const CeeParameters& params,
                                const Eigen::VectorXd& p0 = Eigen::VectorXd(),
                                const NewtonOptions& opts = {})
{
    const ReducedSystem sys = ReducedSystem::make(params);
    const int n = sys.order();
    Eigen::VectorXd p = p0.size() == n ? p0 : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = reduced_residual(p, 1.0, sys);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (r.norm() <= opts.tolerance) return assemble_solution(p, params);
        const auto jac = jacobians(p, 1.0, sys);
        const Eigen::VectorXd step = jac.dH_dp.partialPivLu().solve(-r);
        double t = 1.0;
        while (true) {
            const Eigen::VectorXd cand = p + t * step;
            const Eigen::VectorXd rc = reduced_residual(cand, 1.0, sys);
            if (rc.norm() < (1.0 - 0.5 * t) * r.norm() + opts.tolerance) {
                p = cand;
                r = rc;
                break;
            }
            t *= 0.5;
            if (t < opts.damping_floor)
                fail(ErrorCode::PathFailure, "Newton iteration stalled");
        }
    }
    if (r.norm() <= opts.tolerance) return assemble_solution(p, params);
    fail(ErrorCode::PathFailure, "Newton iteration did not converge");
}

} // namespace cee

#endif
