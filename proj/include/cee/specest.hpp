#ifndef CEE_SPECEST_HPP
#define CEE_SPECEST_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cee/equation.hpp"
#include "cee/errors.hpp"
#include "cee/linalg.hpp"
#include "cee/poly.hpp"
#include "cee/problem.hpp"
#include "cee/solver.hpp"

namespace cee::specest {

/// Shaping filter w(z) = sigma(z)/a(z), both monic of equal degree, driven
/// by unit white noise. Realized as y(t) = h'x(t) + e(t),
/// x(t+1) = F x(t) + k e(t).
struct GeneratingModel {
    Polynomial sigma;
    Polynomial a;

    int degree() const { return a.degree(); }

    void validate() const
    {
        if (a.degree() != sigma.degree() || a.degree() < 1)
            fail(ErrorCode::InvalidInput, "model needs equal positive degrees");
        if (!a.is_real(1e-9) || !sigma.is_real(1e-9))
            fail(ErrorCode::InvalidInput, "model polynomials must be real");
        if (!schur_test(a) || !schur_test(sigma))
            fail(ErrorCode::InvalidInput, "model polynomials must be Schur");
    }

    Eigen::MatrixXd F() const
    {
        const int n = degree();
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) out(i, i + 1) = 1.0;
        for (int i = 0; i < n; ++i) out(i, 0) -= a.coeff_of(n - 1 - i).real();
        return out;
    }

    Eigen::VectorXd k() const
    {
        const int n = degree();
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i)
            out(i) = sigma.coeff_of(n - 1 - i).real() - a.coeff_of(n - 1 - i).real();
        return out;
    }
};

/// Deterministic standard normal (Box-Muller over mt19937_64); the library
/// pins the generator so seeded runs are reproducible across platforms.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : gen_(seed) {}

    double operator()()
    {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform() { return double(gen_() >> 11) * (1.0 / 9007199254740992.0); }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_ = false;
};

/// White noise through the shaping filter; the first `discard` outputs are
/// dropped so the state reaches stationarity.
inline std::vector<double> simulate_series(const GeneratingModel& model, long count,
                                           std::uint64_t seed, long discard = 1000)
{
    model.validate();
    NoiseSource noise(seed);
    const Eigen::MatrixXd F = model.F();
    const Eigen::VectorXd k = model.k();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.degree());
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(count));
    for (long t = 0; t < count + discard; ++t) {
        const double eps = noise();
        const double yt = x(0) + eps;
        if (t >= discard) y.push_back(yt);
        x = F * x + k * eps;
    }
    return y;
}

struct FilterBankOptions {
    long burn_in = 1000;
    long window = 10000; // minimum number of averaged samples
};

struct CovarianceEstimate {
    Eigen::MatrixXcd sigma_hat;
    long samples = 0;
};

/// Runs the bank of node filters u(t) = Z u(t-1) + e y(t) over the series
/// and averages u u^* after the burn-in.
inline CovarianceEstimate run_filter_bank(const std::vector<double>& y,
                                          const PickStructure& structure,
                                          const FilterBankOptions& opts = {})
{
    const long total = static_cast<long>(y.size());
    if (total < opts.burn_in + opts.window)
        fail(ErrorCode::InsufficientData,
             "time series shorter than burn-in plus window");
    const int N = structure.dim();
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(N);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
    long count = 0;
    for (long t = 0; t < total; ++t) {
        u = structure.Z * u + structure.e * y[static_cast<std::size_t>(t)];
        if (t >= opts.burn_in) {
            acc += u * u.adjoint();
            ++count;
        }
    }
    acc /= double(count);
    CovarianceEstimate out;
    out.sigma_hat = 0.5 * (acc + acc.adjoint());
    out.samples = count;
    return out;
}

/// Exact stationary covariance of the bank state when the series comes from
/// the given model: the joint filter-bank/model state solves one Stein
/// equation.
inline Eigen::MatrixXcd analytic_state_covariance(const GeneratingModel& model,
                                                  const PickStructure& structure)
{
    model.validate();
    const int ng = model.degree();
    const int N = structure.dim();
    const int dim = ng + N + 1;
    const Eigen::MatrixXd F = model.F();
    const Eigen::VectorXd k = model.k();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    M.block(0, 0, ng, ng) = F.cast<Complex>();
    M.block(0, ng + N, ng, 1) = k.cast<Complex>();
    // u(t) picks up y(t) = h'x(t) + e(t) with x(t) already advanced
    M.block(ng, 0, N, ng) = structure.e * F.row(0).cast<Complex>();
    M.block(ng, ng, N, N) = structure.Z;
    M.block(ng, ng + N, N, 1) = structure.e * Complex(k(0));
    Eigen::VectorXcd drive = Eigen::VectorXcd::Zero(dim);
    drive.segment(ng, N) = structure.e;
    drive(dim - 1) = 1.0;
    const Eigen::MatrixXcd Pi = stein_solve(M, drive * drive.adjoint());
    return Pi.block(ng, ng, N, N);
}

struct WEstimate {
    Eigen::MatrixXcd W;
    std::vector<Series> values; // per node
    double residual = 0.0;
};

/// Least-squares fit of the structured W from W E + E W^* = Sigma. The free
/// parameters are real: one real sequence per real node, one complex
/// sequence shared (conjugated) across each conjugate node pair, so the
/// estimate is conjugate-symmetric by construction.
inline WEstimate estimate_W(const Eigen::MatrixXcd& sigma_hat, const PickStructure& ps)
{
    const int N = ps.dim();
    const auto& cp = ps.problem;
    const std::size_t nodes = cp.nodes.size();

    // pair up conjugate nodes
    std::vector<int> partner(nodes, -1);
    for (std::size_t j = 0; j < nodes; ++j) {
        if (partner[j] != -1 || std::abs(cp.nodes[j].imag()) < 1e-12) continue;
        for (std::size_t l = j + 1; l < nodes; ++l)
            if (std::abs(cp.nodes[l] - std::conj(cp.nodes[j])) < 1e-9) {
                partner[j] = static_cast<int>(l);
                partner[l] = static_cast<int>(j);
                break;
            }
        if (partner[j] == -1)
            fail(ErrorCode::InvalidInput, "node set not closed under conjugation");
    }

    struct Param {
        std::size_t node;
        int k;
        bool imag_part;
    };
    std::vector<Param> params;
    std::vector<Eigen::MatrixXcd> basis;
    auto block_basis = [&](std::size_t j, int k, Complex v) {
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
        const int o = ps.offsets[j];
        const int m = cp.multiplicities[j];
        for (int i = 0; i + k < m; ++i) B(o + k + i, o + i) = v;
        return B;
    };
    for (std::size_t j = 0; j < nodes; ++j) {
        if (partner[j] != -1 && static_cast<std::size_t>(partner[j]) < j) continue;
        for (int k = 0; k < cp.multiplicities[j]; ++k) {
            if (partner[j] == -1) {
                params.push_back({j, k, false});
                basis.push_back(block_basis(j, k, 1.0));
            } else {
                const std::size_t l = static_cast<std::size_t>(partner[j]);
                params.push_back({j, k, false});
                basis.push_back(block_basis(j, k, 1.0) + block_basis(l, k, 1.0));
                params.push_back({j, k, true});
                basis.push_back(block_basis(j, k, Complex(0, 1)) +
                                block_basis(l, k, Complex(0, -1)));
            }
        }
    }

    const std::size_t P = params.size();
    Eigen::MatrixXd A(2 * N * N, static_cast<Eigen::Index>(P));
    for (std::size_t q = 0; q < P; ++q) {
        const Eigen::MatrixXcd img = basis[q] * ps.E + ps.E * basis[q].adjoint();
        for (int c = 0; c < N; ++c)
            for (int r = 0; r < N; ++r) {
                A(c * N + r, static_cast<Eigen::Index>(q)) = img(r, c).real();
                A(N * N + c * N + r, static_cast<Eigen::Index>(q)) = img(r, c).imag();
            }
    }
    Eigen::VectorXd rhs(2 * N * N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r) {
            rhs(c * N + r) = sigma_hat(r, c).real();
            rhs(N * N + c * N + r) = sigma_hat(r, c).imag();
        }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < static_cast<Eigen::Index>(P))
        fail(ErrorCode::IllConditioned, "structured covariance fit is rank-deficient");
    const Eigen::VectorXd theta = qr.solve(rhs);

    WEstimate out;
    out.values.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j)
        out.values[j].assign(static_cast<std::size_t>(cp.multiplicities[j]), Complex(0.0));
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t q = 0; q < P; ++q) {
        W += theta(static_cast<Eigen::Index>(q)) * basis[q];
        const auto& pr = params[q];
        const Complex inc = pr.imag_part ? Complex(0, theta(static_cast<Eigen::Index>(q)))
                                         : Complex(theta(static_cast<Eigen::Index>(q)));
        out.values[pr.node][static_cast<std::size_t>(pr.k)] += inc;
        if (partner[pr.node] != -1)
            out.values[static_cast<std::size_t>(partner[pr.node])]
                      [static_cast<std::size_t>(pr.k)] += std::conj(inc);
    }
    out.W = W;
    out.residual = (W * ps.E + ps.E * W.adjoint() - sigma_hat).norm();
    return out;
}

/// Turns a W estimate into a normalized Caratheodory problem; returns the
/// normalizing constant c0 = 2 Re w_00 so densities can be rescaled.
inline std::pair<CaratheodoryProblem, double> to_problem(const WEstimate& west,
                                                         const PickStructure& ps)
{
    const double c0 = 2.0 * west.values[0][0].real();
    if (!(c0 > 0.0))
        fail(ErrorCode::Infeasible, "estimated zero-node value is not positive");
    CaratheodoryProblem cp = ps.problem;
    cp.values = west.values;
    for (auto& vs : cp.values)
        for (auto& v : vs) v /= c0;
    cp.values[0][0] = 0.5;
    return {std::move(cp), c0};
}

struct SpectrumSample {
    double theta;
    double density;
};

/// rho^2 |sigma|^2 / |a|^2 on a uniform grid over [0, 2 pi).
inline std::vector<SpectrumSample> estimate_spectrum(const CeeSolution& sol, int grid,
                                                     double scale = 1.0)
{
    if (grid < 2) fail(ErrorCode::InvalidInput, "grid too small");
    std::vector<SpectrumSample> out;
    out.reserve(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double th = 2.0 * M_PI * i / grid;
        const Complex z = std::polar(1.0, th);
        const double num = std::norm(sol.sigma(z));
        const double den = std::norm(sol.a(z));
        out.push_back({th, scale * sol.rho * sol.rho * num / den});
    }
    return out;
}

/// The same density through the boundary values of f; agrees with
/// estimate_spectrum pointwise on valid solutions.
inline std::vector<SpectrumSample> spectrum_from_interpolant(const CeeSolution& sol, int grid,
                                                             double scale = 1.0)
{
    std::vector<SpectrumSample> out;
    out.reserve(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double th = 2.0 * M_PI * i / grid;
        const Complex z = std::polar(1.0, th);
        out.push_back({th, scale * 2.0 * sol.f(z).real()});
    }
    return out;
}

/// Restriction of the data to a lower order: leading block values for a
/// single node, whole leading nodes otherwise. The value budget must come
/// out exactly.
inline CaratheodoryProblem restrict_problem(const CaratheodoryProblem& cp, int new_order)
{
    if (new_order >= cp.order())
        fail(ErrorCode::InvalidInput, "reduced order must be smaller");
    CaratheodoryProblem out;
    int budget = new_order + 1;
    for (std::size_t j = 0; j < cp.nodes.size() && budget > 0; ++j) {
        const int take = std::min(cp.multiplicities[j], budget);
        out.nodes.push_back(cp.nodes[j]);
        out.multiplicities.push_back(take);
        out.values.push_back(Series(cp.values[j].begin(), cp.values[j].begin() + take));
        budget -= take;
    }
    out.validate();
    // conjugate closure must survive the truncation
    for (std::size_t j = 0; j < out.nodes.size(); ++j) {
        if (std::abs(out.nodes[j].imag()) < 1e-12) continue;
        bool ok = false;
        for (std::size_t l = 0; l < out.nodes.size(); ++l)
            if (l != j && std::abs(out.nodes[l] - std::conj(out.nodes[j])) < 1e-9 &&
                out.multiplicities[l] == out.multiplicities[j])
                ok = true;
        if (!ok)
            fail(ErrorCode::InvalidInput,
                 "restriction breaks conjugate symmetry of the node set");
    }
    return out;
}

struct ReductionReport {
    CeeSolution full;
    CeeSolution reduced;
    Eigen::VectorXd full_singular_values;
    Eigen::VectorXd reduced_singular_values;
};

/// Re-solves with the kept spectral zeros at the correspondingly reduced
/// order; returns both solutions and both singular value sets.
inline ReductionReport model_reduce(const CaratheodoryProblem& cp, const Polynomial& sigma_full,
                                    const std::vector<Complex>& kept_zeros,
                                    const SolveOptions& opts = {})
{
    ReductionReport rep;
    {
        auto [sol, trace, ps] = solve_caratheodory(cp, sigma_full, opts);
        (void)trace;
        (void)ps;
        rep.full = std::move(sol);
    }
    const Polynomial sigma_red = Polynomial::from_roots(kept_zeros, true);
    if (sigma_red.degree() == cp.order()) {
        rep.reduced = rep.full;
    } else {
        const CaratheodoryProblem small = restrict_problem(cp, sigma_red.degree());
        auto [sol, trace, ps] = solve_caratheodory(small, sigma_red, opts);
        (void)trace;
        (void)ps;
        rep.reduced = std::move(sol);
    }
    rep.full_singular_values = rep.full.singular_values;
    rep.reduced_singular_values = rep.reduced.singular_values;
    return rep;
}

} // namespace cee::specest

#endif
