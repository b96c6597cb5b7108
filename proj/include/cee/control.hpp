#ifndef CEE_CONTROL_HPP
#define CEE_CONTROL_HPP

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cee/errors.hpp"
#include "cee/poly.hpp"
#include "cee/problem.hpp"
#include "cee/solver.hpp"

namespace cee::control {

/// Continuous-time SISO plant num(s)/den(s), real coefficients.
struct Plant {
    Polynomial num;
    Polynomial den;

    void validate() const
    {
        if (num.is_zero() || den.is_zero())
            fail(ErrorCode::InvalidInput, "plant must be nonzero");
        if (!num.is_real(1e-9) || !den.is_real(1e-9))
            fail(ErrorCode::InvalidInput, "plant coefficients must be real");
        if (num.degree() > den.degree())
            fail(ErrorCode::InvalidInput, "plant must be proper");
    }

    int relative_degree() const { return den.degree() - num.degree(); }
};

/// One interpolation requirement on the sensitivity: the Taylor coefficients
/// of S in the local chart of the node (1/s at infinity).
struct Constraint {
    Node s;
    Series values;
};

namespace detail {

/// Groups close roots into (root, multiplicity) clusters.
inline std::vector<std::pair<Complex, int>> cluster_roots(const std::vector<Complex>& roots,
                                                          double tol)
{
    std::vector<std::pair<Complex, int>> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        Complex acc = roots[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(roots[j] - roots[i]) <= tol * std::max(1.0, std::abs(roots[i]))) {
                acc += roots[j];
                ++count;
                used[j] = true;
            }
        }
        out.push_back({acc / double(count), count});
    }
    return out;
}

} // namespace detail

/// Interpolation constraints the sensitivity must satisfy: S vanishes to the
/// multiplicity at every closed-right-half-plane plant pole, S is 1 (with
/// vanishing derivatives) at every such zero, and the conditions at infinity
/// are extended by the requested controller relative degree.
inline std::vector<Constraint> sensitivity_constraints(const Plant& plant,
                                                       int controller_relative_degree = 1,
                                                       double boundary_tol = 1e-9,
                                                       double cluster_tol = 1e-6)
{
    plant.validate();
    const auto poles = detail::cluster_roots(plant.den.roots(), cluster_tol);
    const auto zeros = detail::cluster_roots(plant.num.roots(), cluster_tol);
    std::vector<Constraint> out;
    for (const auto& [p, m] : poles) {
        if (p.real() < -boundary_tol) continue;
        for (const auto& [q, mq] : zeros) {
            (void)mq;
            if (q.real() >= -boundary_tol &&
                std::abs(p - q) < cluster_tol * std::max(1.0, std::abs(p)))
                fail(ErrorCode::InvalidInput,
                     "unstable pole/zero coincidence: plant is degenerate");
        }
        out.push_back({Node::finite(p), Series(static_cast<std::size_t>(m), Complex(0.0))});
    }
    for (const auto& [q, m] : zeros) {
        if (q.real() < -boundary_tol) continue;
        Series vals(static_cast<std::size_t>(m), Complex(0.0));
        vals[0] = 1.0;
        out.push_back({Node::finite(q), std::move(vals)});
    }
    const int inf_count = plant.relative_degree() + controller_relative_degree;
    if (inf_count > 0) {
        Series vals(static_cast<std::size_t>(inf_count), Complex(0.0));
        vals[0] = 1.0;
        out.push_back({Node::infinity(), std::move(vals)});
    }
    return out;
}

/// Where the user names the spectral zeros.
enum class ZeroDomain {
    HalfPlane, // s-plane points, mapped through the bilinear map
    Disc,      // points in the normalized disc coordinate (reflected inside)
};

struct SensitivitySpec {
    double gamma = 0.0;
    std::vector<Constraint> constraints;
    std::vector<Node> spectral_zeros;
    ZeroDomain zero_domain = ZeroDomain::HalfPlane;
    // s -> z map; default pushes the half-plane boundary to |z| = 10/9
    MobiusMap mobius{Complex(10.0 / 9.0), Complex(10.0 / 9.0), Complex(-1.0), Complex(1.0)};
};

/// Transforms the sensitivity constraints into positive-real interpolation
/// conditions on f = (gamma + S)/(gamma - S) over the exterior of the disc.
inline InterpolationProblem build_disc_problem(const SensitivitySpec& spec)
{
    if (!(spec.gamma > 1.0))
        fail(ErrorCode::Infeasible, "gamma must exceed 1");
    InterpolationProblem out;
    for (const auto& cons : spec.constraints) {
        if (std::abs(cons.values[0]) >= spec.gamma)
            fail(ErrorCode::Infeasible,
                 "constraint magnitude reaches gamma; no admissible sensitivity");
        const std::size_t len = cons.values.size();
        // S series in the z chart
        const auto [img, inner] =
            spec.mobius.inverse().local_series(spec.mobius.apply(cons.s),
                                               static_cast<int>(len) - 1);
        (void)img;
        const Series s_z = series::compose(cons.values, inner, len);
        // f = (gamma + S)/(gamma - S)
        Series num = s_z;
        num[0] += spec.gamma;
        Series den(len);
        for (std::size_t k = 0; k < len; ++k) den[k] = -s_z[k];
        den[0] += spec.gamma;
        const Series f_vals = series::divide(num, den, len);
        out.nodes.push_back(spec.mobius.apply(cons.s));
        out.multiplicities.push_back(static_cast<int>(len));
        out.values.push_back(f_vals);
    }
    out.validate();
    return out;
}

/// Spectral zeros mapped into the normalized solver frame: half-plane points
/// go through the bilinear map and the normalizing record; anything outside
/// the unit disc is replaced by its mirror 1/conj(z), infinity by 0.
inline Polynomial sigma_from_spec(const SensitivitySpec& spec, const TransformRecord& rec)
{
    std::vector<Complex> roots;
    auto push = [&](const Node& nd) {
        if (nd.at_infinity) {
            roots.push_back(Complex(0.0));
            return;
        }
        Complex z = nd.z;
        if (std::abs(z) > 1.0) z = 1.0 / std::conj(z);
        roots.push_back(z);
    };
    for (const auto& zr : spec.spectral_zeros) {
        if (spec.zero_domain == ZeroDomain::HalfPlane)
            push(rec.map.apply(spec.mobius.apply(zr)));
        else
            push(zr);
    }
    return Polynomial::from_roots(roots, true, 1e-6);
}

/// Controller in s together with its closed-loop diagnostics.
struct Controller {
    Polynomial num;
    Polynomial den; // monic
    Polynomial sensitivity_num;
    Polynomial sensitivity_den;
    std::vector<Complex> closed_loop_poles;
};

namespace detail {

inline Polynomial deflate(const Polynomial& p, Complex root, double rel_tol,
                          const char* what)
{
    const auto& c = p.coefficients();
    if (c.size() < 2) fail(ErrorCode::IllConditioned, what);
    std::vector<Complex> q(c.size() - 1);
    Complex rem = c[0];
    for (std::size_t i = 1; i < c.size(); ++i) {
        q[i - 1] = rem;
        rem = c[i] + rem * root;
    }
    double big = 0.0;
    for (const auto& x : c) big = std::max(big, std::abs(x));
    const double growth = std::pow(std::max(1.0, std::abs(root)), double(p.degree()));
    if (std::abs(rem) > rel_tol * big * growth)
        fail(ErrorCode::IllConditioned,
             std::string(what) + "; cancellation residual " + std::to_string(std::abs(rem)));
    return Polynomial(std::move(q));
}

} // namespace detail

/// Recovers the controller C = (1 - S)/(S P) with exact cancellation of the
/// constructed common factors (unstable plant poles and zeros).
inline Controller recover_controller(const RationalFunction& f, const SensitivitySpec& spec,
                                     const Plant& plant, double cancel_tol = 1e-6,
                                     double boundary_tol = 1e-9)
{
    // S(z) = gamma (f - 1)/(f + 1), then S(s) = S_z(mobius(s))
    const int common = std::max(f.num.degree(), f.den.degree());
    const Polynomial fn = f.scale * f.num;
    const Polynomial fd = f.den;
    const Polynomial sz_num = spec.gamma * (fn - fd);
    const Polynomial sz_den = fn + fd;
    Polynomial Sn = compose_mobius(sz_num, spec.mobius, common);
    Polynomial Sd = compose_mobius(sz_den, spec.mobius, common);
    if (Sn.is_real(1e-9)) Sn = Polynomial::from_real(Sn.real_coefficients());
    if (Sd.is_real(1e-9)) Sd = Polynomial::from_real(Sd.real_coefficients());

    // 1 - S vanishes to the order of the conditions at infinity, so the
    // leading coefficients of Sd - Sn are zero up to roundoff
    int inf_order = 0;
    for (const auto& cons : spec.constraints)
        if (cons.s.at_infinity) inf_order = static_cast<int>(cons.values.size());
    Polynomial diff = Sd - Sn;
    if (inf_order > 0 && !diff.is_zero()) {
        const double scale = std::max(Sd.coeff_norm(), Sn.coeff_norm());
        const int expected_degree = Sd.degree() - inf_order;
        for (int k = diff.degree(); k > expected_degree; --k)
            if (std::abs(diff.coeff_of(k)) > cancel_tol * scale)
                fail(ErrorCode::IllConditioned,
                     "conditions at infinity violated by the solved sensitivity");
        std::vector<Complex> trimmed;
        for (int k = expected_degree; k >= 0; --k) trimmed.push_back(diff.coeff_of(k));
        diff = Polynomial(std::move(trimmed));
        if (diff.coeff_norm() <= 1e-14 * scale) diff = Polynomial::zero();
    }
    if (diff.is_zero()) {
        Controller open;
        open.num = Polynomial::zero();
        open.den = Polynomial::from_real({1.0});
        open.sensitivity_num = Sn;
        open.sensitivity_den = Sd;
        open.closed_loop_poles = plant.den.roots();
        return open;
    }

    Polynomial cn = diff * plant.den;
    Polynomial cd = Sn * plant.num;
    // cancel the factors the interpolation conditions built in
    for (const auto& [p, m] : detail::cluster_roots(plant.den.roots(), 1e-6)) {
        if (p.real() < -boundary_tol) continue;
        for (int i = 0; i < m; ++i) {
            cn = detail::deflate(cn, p, cancel_tol, "unstable pole fails to cancel");
            cd = detail::deflate(cd, p, cancel_tol, "unstable pole fails to cancel");
        }
    }
    for (const auto& [q, m] : detail::cluster_roots(plant.num.roots(), 1e-6)) {
        if (q.real() < -boundary_tol) continue;
        for (int i = 0; i < m; ++i) {
            cn = detail::deflate(cn, q, cancel_tol, "unstable zero fails to cancel");
            cd = detail::deflate(cd, q, cancel_tol, "unstable zero fails to cancel");
        }
    }
    Controller out;
    const Complex lead = cd.leading();
    out.num = (1.0 / lead) * cn;
    out.den = (1.0 / lead) * cd;
    if (out.num.is_real(1e-8)) out.num = Polynomial::from_real(out.num.real_coefficients());
    if (out.den.is_real(1e-8)) out.den = Polynomial::from_real(out.den.real_coefficients());
    out.sensitivity_num = Sn;
    out.sensitivity_den = Sd;

    const Polynomial closed_loop = plant.den * out.den + plant.num * out.num;
    out.closed_loop_poles = closed_loop.roots();
    for (const auto& r : out.closed_loop_poles)
        if (r.real() >= 0.0)
            fail(ErrorCode::Infeasible, "closed loop is not internally stable");
    return out;
}

struct SimulationOptions {
    double horizon = 20.0;
    double dt = 1e-3;
    double settling_band = 0.02;
};

struct StepMetrics {
    double settling_time = 0.0;
    double overshoot_percent = 0.0;
    double max_control = 0.0;
    bool settled = false;
    std::vector<double> time, output, control;
};

namespace detail {

struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;
};

/// Controllable canonical realization of num/den (strictly proper part).
inline StateSpace realize(const Polynomial& num, const Polynomial& den)
{
    const int n = den.degree();
    const double lead = den.leading().real();
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(n, n);
    ss.B = Eigen::VectorXd::Zero(n);
    ss.C = Eigen::RowVectorXd::Zero(n);
    ss.D = !num.is_zero() && num.degree() == den.degree() ? num.leading().real() / lead : 0.0;
    if (n == 0) return ss;
    for (int i = 0; i + 1 < n; ++i) ss.A(i + 1, i) = 1.0;
    for (int i = 0; i < n; ++i) ss.A(0, i) = -den.coeff_of(n - 1 - i).real() / lead;
    ss.B(0) = 1.0;
    // strictly proper remainder num - D * den
    const Polynomial rem = num - ss.D * den;
    for (int i = 0; i < n; ++i) ss.C(i) = rem.coeff_of(n - 1 - i).real() / lead;
    return ss;
}

} // namespace detail

/// Unit-step reference response of the unity feedback loop, integrated by
/// exact discretization of the closed-loop realization.
inline StepMetrics step_metrics(const Plant& plant, const Controller& ctrl,
                                const SimulationOptions& opts = {})
{
    plant.validate();
    const auto sp = detail::realize(plant.num, plant.den);
    const auto sc = detail::realize(ctrl.num, ctrl.den);
    if (sp.D != 0.0)
        fail(ErrorCode::InvalidInput, "simulation needs a strictly proper plant");
    const int np = sp.A.rows(), nc = sc.A.rows();
    const int n = np + nc;
    // e = r - y, y = Cp xp, u = Cc xc + Dc e
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
    A.topLeftCorner(np, np) = sp.A - sp.B * sc.D * sp.C;
    A.topRightCorner(np, nc) = sp.B * sc.C;
    A.bottomLeftCorner(nc, np) = -sc.B * sp.C;
    A.bottomRightCorner(nc, nc) = sc.A;
    B.head(np) = sp.B * sc.D;
    B.tail(nc) = sc.B;

    // exact step over dt via the augmented exponential
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A * opts.dt;
    aug.topRightCorner(n, 1) = B * opts.dt;
    const Eigen::MatrixXd expm = aug.exp();
    const Eigen::MatrixXd Ad = expm.topLeftCorner(n, n);
    const Eigen::VectorXd Bd = expm.topRightCorner(n, 1);

    const long steps = static_cast<long>(std::ceil(opts.horizon / opts.dt));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    StepMetrics metrics;
    metrics.time.reserve(static_cast<std::size_t>(steps) + 1);
    metrics.output.reserve(static_cast<std::size_t>(steps) + 1);
    metrics.control.reserve(static_cast<std::size_t>(steps) + 1);
    double last_violation = 0.0;
    for (long k = 0; k <= steps; ++k) {
        const double t = k * opts.dt;
        const double y = (sp.C * x.head(np))(0);
        const double e = 1.0 - y;
        const double u = (sc.C * x.tail(nc))(0) + sc.D * e;
        metrics.time.push_back(t);
        metrics.output.push_back(y);
        metrics.control.push_back(u);
        if (std::abs(y) > 1e6)
            fail(ErrorCode::Infeasible, "closed-loop step response diverges");
        metrics.overshoot_percent = std::max(metrics.overshoot_percent, (y - 1.0) * 100.0);
        metrics.max_control = std::max(metrics.max_control, std::abs(u));
        if (std::abs(y - 1.0) > opts.settling_band) last_violation = t;
        x = Ad * x + Bd;
    }
    metrics.settling_time = last_violation;
    metrics.settled = std::abs(metrics.output.back() - 1.0) <= opts.settling_band &&
                      last_violation < opts.horizon;
    return metrics;
}

struct FrequencySample {
    double omega;
    double magnitude;
};

/// |num(i w)/den(i w)| over a logarithmic grid.
inline std::vector<FrequencySample> frequency_response(const Polynomial& num,
                                                       const Polynomial& den, double omega_lo,
                                                       double omega_hi, int count)
{
    std::vector<FrequencySample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double w =
            omega_lo * std::pow(omega_hi / omega_lo, double(i) / double(count - 1));
        const Complex s(0.0, w);
        out.push_back({w, std::abs(num(s) / den(s))});
    }
    return out;
}

inline double peak_magnitude(const std::vector<FrequencySample>& resp)
{
    double m = 0.0;
    for (const auto& s : resp) m = std::max(m, s.magnitude);
    return m;
}

/// Everything the design pipeline produces for one specification.
struct DesignResult {
    InterpolationProblem problem; // exterior conditions on f
    TransformRecord transform;
    Polynomial sigma;
    CeeSolution cee;
    RationalFunction f;
    Controller controller;
    StepMetrics metrics;
};

inline DesignResult design(const Plant& plant, const SensitivitySpec& spec,
                           const SimulationOptions& sim = {}, const SolveOptions& solve = {})
{
    DesignResult out;
    out.problem = build_disc_problem(spec);
    auto [norm, rec] = normalize(out.problem, solve.pivot);
    out.transform = rec;
    out.sigma = sigma_from_spec(spec, rec);
    const CaratheodoryProblem cp = to_caratheodory(norm);
    auto [sol, trace, ps] = solve_caratheodory(cp, out.sigma, solve);
    (void)trace;
    (void)ps;
    out.cee = std::move(sol);
    out.f = rec.apply(out.cee.f);
    out.controller = recover_controller(out.f, spec, plant);
    out.metrics = step_metrics(plant, out.controller, sim);
    return out;
}

} // namespace cee::control

#endif
