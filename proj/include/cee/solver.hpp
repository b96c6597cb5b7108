#ifndef CEE_SOLVER_HPP
#define CEE_SOLVER_HPP

#include <optional>
#include <utility>

#include "cee/equation.hpp"
#include "cee/homotopy.hpp"
#include "cee/problem.hpp"

namespace cee {

struct SolveOptions {
    HomotopyOptions homotopy;
    StructureOptions structure;
    double symmetry_tol = 1e-8;
    std::optional<std::size_t> pivot; // normalization pivot override
};

/// End-to-end result for one interpolation problem.
struct ProblemSolution {
    CeeSolution cee;          // normalized coordinates
    HomotopyTrace trace;
    TransformRecord transform;
    RationalFunction f;       // original coordinates
    SolvabilityReport pick;
    PickStructure structure;
};

/// Largest deviation |f^{(k)}(z_j)/k! - v_jk| over all conditions.
inline double interpolation_error(const RationalFunction& f, const InterpolationProblem& p)
{
    double worst = 0.0;
    for (std::size_t j = 0; j < p.nodes.size(); ++j) {
        const Series got = eval_with_derivatives(f, p.nodes[j], p.multiplicities[j] - 1);
        for (std::size_t k = 0; k < got.size(); ++k)
            worst = std::max(worst, std::abs(got[k] - p.values[j][k]));
    }
    return worst;
}

inline std::tuple<CeeSolution, HomotopyTrace, PickStructure>
solve_caratheodory(const CaratheodoryProblem& cp, const Polynomial& sigma,
                   const SolveOptions& opts = {})
{
    if (sigma.degree() != cp.order())
        fail(ErrorCode::InvalidInput, "sigma degree must equal the problem order");
    if (!schur_test(sigma, 0.0))
        fail(ErrorCode::InvalidInput, "sigma must be a Schur polynomial");
    PickStructure ps = build_structure(cp, opts.structure);
    const SolvabilityReport rep = pick_solvable(ps);
    if (!rep.solvable)
        fail(ErrorCode::Infeasible,
             "Pick matrix not positive definite; smallest eigenvalue = " +
                 std::to_string(rep.min_eigenvalue));
    const UParameters up = w_to_u(ps, opts.symmetry_tol);
    const CeeParameters params = CeeParameters::make(sigma, up.u, up.U);
    auto [sol, trace] = solve_homotopy(params, opts.homotopy);
    return {std::move(sol), std::move(trace), std::move(ps)};
}

/// Normalizes, transforms to Caratheodory form, solves, and pulls the
/// interpolant back to the original coordinates. sigma is given in the
/// normalized frame.
inline ProblemSolution solve_problem(const InterpolationProblem& problem,
                                     const Polynomial& sigma, const SolveOptions& opts = {})
{
    auto [norm, rec] = normalize(problem, opts.pivot);
    const CaratheodoryProblem cp = to_caratheodory(norm);
    ProblemSolution out;
    auto [sol, trace, ps] = solve_caratheodory(cp, sigma, opts);
    out.pick = pick_solvable(ps);
    out.cee = std::move(sol);
    out.trace = std::move(trace);
    out.structure = std::move(ps);
    out.transform = rec;
    out.f = rec.apply(out.cee.f);
    return out;
}

} // namespace cee

#endif
