#ifndef CEE_HOMOTOPY_HPP
#define CEE_HOMOTOPY_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cee/equation.hpp"
#include "cee/errors.hpp"
#include "cee/reduced.hpp"

namespace cee {

struct HomotopyOptions {
    double initial_step = 0.05;
    double min_step = 1e-6;
    double corrector_tolerance = 1e-10;
    int max_corrector_iterations = 10;
    double schur_margin = 1e-9;

    void validate() const
    {
        if (!(min_step > 0.0) || !(min_step <= initial_step) || !(initial_step <= 1.0))
            fail(ErrorCode::InvalidInput, "need 0 < min_step <= initial_step <= 1");
    }
};

struct HomotopyStep {
    double lambda = 0.0;
    Eigen::VectorXd p;
    double residual = 0.0;
    double step = 0.0;
    double jacobian_condition = 0.0;
    std::vector<Complex> poles; // roots of a(p, lambda)
};

struct HomotopyTrace {
    std::vector<HomotopyStep> steps;
    double min_step_taken = 1.0;
    int corrector_iterations_total = 0;
};

namespace detail {

inline double lu_condition_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu)
{
    const auto& m = lu.matrixLU();
    double mx = 0.0, mn = 1e300;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = std::abs(m(i, i));
        mx = std::max(mx, d);
        mn = std::min(mn, d);
    }
    return mn > 0.0 ? mx / mn : 1e300;
}

} // namespace detail

/// Euler predictor / Newton corrector continuation of H(p, lambda) = 0 from
/// the trivial solution at lambda = 0 to lambda = 1. The tangent follows
/// dp/dlambda = -[dH/dp]^{-1} dH/dlambda, the sign fixed by requiring the
/// total derivative of H along the path to vanish.
inline std::pair<Eigen::VectorXd, HomotopyTrace>
continue_path(const ReducedSystem& sys, const HomotopyOptions& opts = {})
{
    opts.validate();
    const int n = sys.order();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    double lambda = 0.0;
    double step = opts.initial_step;

    HomotopyTrace trace;
    auto record = [&](double res, double used_step, double cond) {
        HomotopyStep st;
        st.lambda = lambda;
        st.p = p;
        st.residual = res;
        st.step = used_step;
        st.jacobian_condition = cond;
        st.poles = sys.a_polynomial(p, lambda).roots();
        trace.steps.push_back(std::move(st));
    };
    record(reduced_residual(p, lambda, sys).norm(), 0.0, 0.0);

    auto schur_ok = [&](const Eigen::VectorXd& pp, double ll) {
        const auto ab = sys.ab(pp, ll);
        const double ra = ReducedSystem::tail_to_monic(ab.a).max_root_modulus();
        const double rb = ReducedSystem::tail_to_monic(ab.b).max_root_modulus();
        return ra < 1.0 - opts.schur_margin && rb < 1.0 - opts.schur_margin;
    };

    int ones_in_a_row = 0;
    while (lambda < 1.0) {
        const double dl = std::min(step, 1.0 - lambda);
        const auto jac = jacobians(p, lambda, sys);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac.dH_dp);
        const double cond = detail::lu_condition_estimate(lu);
        if (cond > 1e15)
            fail(ErrorCode::PathFailure, "singular Jacobian on the continuation path");
        const Eigen::VectorXd tangent = -lu.solve(jac.dH_dlambda);

        Eigen::VectorXd cand = p + dl * tangent;
        const double lam_next = lambda + dl;
        bool ok = false;
        int used = 0;
        double res = 0.0;
        for (int it = 0; it < opts.max_corrector_iterations; ++it) {
            const Eigen::VectorXd r = reduced_residual(cand, lam_next, sys);
            res = r.norm();
            ++used;
            if (res <= opts.corrector_tolerance) {
                ok = true;
                break;
            }
            const auto jc = jacobians(cand, lam_next, sys);
            cand -= jc.dH_dp.partialPivLu().solve(r);
        }
        if (ok) ok = cand(0) < 1.0 && schur_ok(cand, lam_next);

        trace.corrector_iterations_total += used;
        if (!ok) {
            step *= 0.5;
            if (step < opts.min_step) {
                Error err(ErrorCode::PathFailure,
                          "continuation failed at lambda = " + std::to_string(lambda));
                throw err;
            }
            continue;
        }
        p = cand;
        lambda = lam_next;
        trace.min_step_taken = std::min(trace.min_step_taken, dl);
        record(res, dl, cond);
        if (used <= 2) {
            if (++ones_in_a_row >= 2) {
                step = std::min(2.0 * step, opts.initial_step);
                ones_in_a_row = 0;
            }
        } else {
            ones_in_a_row = 0;
        }
    }
    return {p, std::move(trace)};
}

/// Continuation plus recovery of the full solution.
inline std::pair<CeeSolution, HomotopyTrace> solve_homotopy(const CeeParameters& params,
                                                            const HomotopyOptions& opts = {})
{
    const ReducedSystem sys = ReducedSystem::make(params);
    auto [p, trace] = continue_path(sys, opts);
    return {assemble_solution(p, params), std::move(trace)};
}

/// Root sets of a(p(lambda), lambda) along the trace, matched between
/// consecutive samples by nearest-neighbour pairing so each column is a
/// continuous trajectory.
inline std::vector<std::vector<Complex>> pole_trajectories(const HomotopyTrace& trace)
{
    std::vector<std::vector<Complex>> out;
    if (trace.steps.empty()) return out;
    out.reserve(trace.steps.size());
    out.push_back(trace.steps.front().poles);
    for (std::size_t k = 1; k < trace.steps.size(); ++k) {
        const auto& prev = out.back();
        std::vector<Complex> cur = trace.steps[k].poles;
        std::vector<Complex> matched(prev.size());
        std::vector<bool> used(cur.size(), false);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            double best = 1e300;
            std::size_t pick = 0;
            for (std::size_t j = 0; j < cur.size(); ++j) {
                if (used[j]) continue;
                const double d = std::abs(cur[j] - prev[i]);
                if (d < best) {
                    best = d;
                    pick = j;
                }
            }
            used[pick] = true;
            matched[i] = cur[pick];
        }
        out.push_back(std::move(matched));
    }
    return out;
}

} // namespace cee

#endif
