#ifndef CEE_PROBLEM_HPP
#define CEE_PROBLEM_HPP

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cee/errors.hpp"
#include "cee/linalg.hpp"
#include "cee/poly.hpp"
#include "cee/series.hpp"

namespace cee {

/// Fractional linear map (a z + b)/(c z + d) on the Riemann sphere.
struct MobiusMap {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static MobiusMap identity() { return {}; }

    bool is_identity() const
    {
        return b == Complex(0.0) && c == Complex(0.0) && a == d && a != Complex(0.0);
    }

    MobiusMap inverse() const { return {d, -b, -c, a}; }

    Node apply(const Node& p, double inf_tol = 1e-13) const
    {
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (p.at_infinity) {
            if (std::abs(c) <= inf_tol * scale) return Node::infinity();
            return Node::finite(a / c);
        }
        const Complex den = c * p.z + d;
        if (std::abs(den) <= inf_tol * scale * std::max(1.0, std::abs(p.z)))
            return Node::infinity();
        return Node::finite((a * p.z + b) / den);
    }

    /// Image of `at` together with the series of the image-chart increment in
    /// the source-chart increment (chart at infinity is 1/z). The constant
    /// term is zero by construction.
    std::pair<Node, Series> local_series(const Node& at, int k_max) const
    {
        const std::size_t len = static_cast<std::size_t>(k_max) + 1;
        const Node img = apply(at);
        Series num(2), den(2);
        if (at.at_infinity) {
            // m(1/x) = (a + b x)/(c + d x)
            num = {a, b};
            den = {c, d};
        } else {
            // m(z0 + t) = (A + a t)/(B + c t)
            num = {a * at.z + b, a};
            den = {c * at.z + d, c};
        }
        Series s;
        if (img.at_infinity) {
            std::swap(num, den); // chart 1/m
            s = series::divide(num, den, len);
        } else {
            s = series::divide(num, den, len);
            s[0] = 0.0; // subtract the image point
        }
        return {img, s};
    }
};

/// p(m(z)) * (c z + d)^common_deg as a polynomial, common_deg >= deg(p).
inline Polynomial compose_mobius(const Polynomial& p, const MobiusMap& m, int common_deg)
{
    const Polynomial up{std::vector<Complex>{m.a, m.b}};
    const Polynomial low{std::vector<Complex>{m.c, m.d}};
    Polynomial out = Polynomial::zero();
    for (int k = 0; k <= common_deg; ++k) {
        const Complex ck = p.coeff_of(k); // coefficient of z^k
        if (ck == Complex(0.0)) continue;
        Polynomial term = Polynomial::constant(ck);
        for (int i = 0; i < k; ++i) term = term * up;
        for (int i = 0; i < common_deg - k; ++i) term = term * low;
        out = out + term;
    }
    return out;
}

/// Interpolation data for a function analytic outside the closed unit disc:
/// values[j][k] = f^{(k)}(z_j)/k!. Values at the infinity node are the
/// coefficients of the expansion in 1/z.
struct InterpolationProblem {
    std::vector<Node> nodes;
    std::vector<int> multiplicities;
    std::vector<Series> values;

    int order() const
    {
        int n = -1;
        for (int m : multiplicities) n += m;
        return n;
    }

    bool is_normalized(double tol = 1e-10) const
    {
        return !nodes.empty() && nodes[0].at_infinity &&
               std::abs(values[0][0] - Complex(0.5)) <= tol;
    }

    void validate() const
    {
        if (nodes.empty() || nodes.size() != multiplicities.size() ||
            nodes.size() != values.size())
            fail(ErrorCode::InvalidInput, "inconsistent problem arrays");
        int n_inf = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (multiplicities[j] < 1 ||
                values[j].size() != static_cast<std::size_t>(multiplicities[j]))
                fail(ErrorCode::InvalidInput, "bad multiplicity or value count");
            if (nodes[j].at_infinity) {
                ++n_inf;
            } else if (std::abs(nodes[j].z) <= 1.0) {
                fail(ErrorCode::InvalidInput,
                     "interpolation nodes must lie strictly outside the unit circle");
            }
            for (std::size_t l = j + 1; l < nodes.size(); ++l)
                if (nodes[j] == nodes[l])
                    fail(ErrorCode::InvalidInput, "duplicate interpolation node");
        }
        if (n_inf > 1) fail(ErrorCode::InvalidInput, "more than one node at infinity");
        check_conjugate_closure();
    }

    void check_conjugate_closure(double tol = 1e-9) const
    {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (nodes[j].is_real(tol)) {
                for (const auto& v : values[j])
                    if (std::abs(v.imag()) > tol * std::max(1.0, std::abs(v)))
                        fail(ErrorCode::InvalidInput,
                             "real node carries non-real values");
                continue;
            }
            bool found = false;
            for (std::size_t l = 0; l < nodes.size(); ++l) {
                if (l == j || nodes[l].at_infinity) continue;
                if (std::abs(nodes[l].z - std::conj(nodes[j].z)) >
                    tol * std::max(1.0, std::abs(nodes[j].z)))
                    continue;
                found = true;
                if (multiplicities[l] != multiplicities[j])
                    fail(ErrorCode::InvalidInput, "conjugate nodes with unequal multiplicity");
                for (std::size_t k = 0; k < values[j].size(); ++k)
                    if (std::abs(values[l][k] - std::conj(values[j][k])) >
                        tol * std::max(1.0, std::abs(values[j][k])))
                        fail(ErrorCode::InvalidInput, "values not conjugate-symmetric");
                break;
            }
            if (!found)
                fail(ErrorCode::InvalidInput, "node set not closed under conjugation");
        }
    }
};

/// Same data after z -> 1/z: nodes inside the unit disc, z_0 = 0.
struct CaratheodoryProblem {
    std::vector<Complex> nodes;
    std::vector<int> multiplicities;
    std::vector<Series> values;

    int order() const
    {
        int n = -1;
        for (int m : multiplicities) n += m;
        return n;
    }

    void validate() const
    {
        if (nodes.empty() || nodes.size() != multiplicities.size() ||
            nodes.size() != values.size())
            fail(ErrorCode::InvalidInput, "inconsistent problem arrays");
        if (std::abs(nodes[0]) != 0.0)
            fail(ErrorCode::InvalidInput, "first Caratheodory node must be 0");
        if (std::abs(values[0][0] - Complex(0.5)) > 1e-9)
            fail(ErrorCode::InvalidInput, "value at 0 must be 1/2 (normalize first)");
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (std::abs(nodes[j]) >= 1.0)
                fail(ErrorCode::InvalidInput, "Caratheodory nodes must lie inside the unit disc");
            if (values[j].size() != static_cast<std::size_t>(multiplicities[j]))
                fail(ErrorCode::InvalidInput, "bad value count");
        }
    }
};

/// Record of the normalizing change of variables: f(z) = scale * g(map(z))
/// where g is the normalized interpolant.
struct TransformRecord {
    MobiusMap map;
    double scale = 1.0;
    std::size_t pivot_index = 0;

    bool is_identity() const { return map.is_identity() && scale == 1.0; }

    /// Pulls a solution of the normalized problem back to the original
    /// coordinates.
    RationalFunction apply(const RationalFunction& g) const
    {
        if (map.is_identity()) {
            RationalFunction f = g;
            f.scale *= scale;
            return f;
        }
        const int common = std::max(g.num.degree(), g.den.degree());
        RationalFunction f;
        f.num = compose_mobius(g.num, map, common);
        f.den = compose_mobius(g.den, map, common);
        f.scale = g.scale * scale;
        if (f.num.is_real(1e-9) && f.den.is_real(1e-9)) {
            f.num = Polynomial::from_real(f.num.real_coefficients());
            f.den = Polynomial::from_real(f.den.real_coefficients());
        }
        return f;
    }
};

namespace detail {

/// Transports every node and value list through m; new value series are the
/// old ones composed with the local series of m^{-1}, then scaled.
inline InterpolationProblem transport(const InterpolationProblem& p, const MobiusMap& m,
                                      double value_scale)
{
    const MobiusMap minv = m.inverse();
    InterpolationProblem out;
    out.multiplicities = p.multiplicities;
    out.nodes.resize(p.nodes.size());
    out.values.resize(p.nodes.size());
    for (std::size_t j = 0; j < p.nodes.size(); ++j) {
        const Node img = m.apply(p.nodes[j]);
        auto [back, inner] = minv.local_series(img, p.multiplicities[j] - 1);
        (void)back;
        Series s = series::compose(p.values[j], inner,
                                   static_cast<std::size_t>(p.multiplicities[j]));
        for (auto& v : s) v *= value_scale;
        out.nodes[j] = img;
        out.values[j] = std::move(s);
    }
    return out;
}

} // namespace detail

/// Default pivot: the node at infinity when present, otherwise the real node
/// of largest multiplicity (first among ties).
inline std::size_t default_pivot(const InterpolationProblem& p)
{
    for (std::size_t j = 0; j < p.nodes.size(); ++j)
        if (p.nodes[j].at_infinity) return j;
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < p.nodes.size(); ++j) {
        if (!p.nodes[j].is_real()) continue;
        if (!best || p.multiplicities[j] > p.multiplicities[*best]) best = j;
    }
    if (!best)
        fail(ErrorCode::InvalidInput, "no real node available as normalization pivot");
    return *best;
}

/// Moves the pivot node to infinity and rescales values so the pivot value
/// becomes 1/2. The pivot must be a real node with positive real value.
inline std::pair<InterpolationProblem, TransformRecord>
normalize(const InterpolationProblem& problem, std::optional<std::size_t> pivot_opt = {})
{
    problem.validate();
    const std::size_t pivot = pivot_opt.value_or(default_pivot(problem));
    if (pivot >= problem.nodes.size()) fail(ErrorCode::InvalidInput, "pivot out of range");
    for (std::size_t j = 0; j < problem.nodes.size(); ++j)
        if (problem.values[j][0].real() <= 0.0)
            fail(ErrorCode::Infeasible, "value with non-positive real part; no positive "
                                        "real interpolant exists");
    const Node& zp = problem.nodes[pivot];
    if (!zp.is_real())
        fail(ErrorCode::InvalidInput, "normalization pivot must be a real node");
    const Complex vp = problem.values[pivot][0];
    if (std::abs(vp.imag()) > 1e-9 * std::max(1.0, std::abs(vp)))
        fail(ErrorCode::InvalidInput, "pivot value must be real");

    // pivot first, everything else in original order
    InterpolationProblem reordered;
    reordered.nodes.push_back(problem.nodes[pivot]);
    reordered.multiplicities.push_back(problem.multiplicities[pivot]);
    reordered.values.push_back(problem.values[pivot]);
    for (std::size_t j = 0; j < problem.nodes.size(); ++j) {
        if (j == pivot) continue;
        reordered.nodes.push_back(problem.nodes[j]);
        reordered.multiplicities.push_back(problem.multiplicities[j]);
        reordered.values.push_back(problem.values[j]);
    }

    TransformRecord rec;
    rec.scale = 2.0 * vp.real();
    rec.pivot_index = pivot;
    if (zp.at_infinity) {
        rec.map = MobiusMap::identity();
        InterpolationProblem out = reordered;
        for (auto& vs : out.values)
            for (auto& v : vs) v /= rec.scale;
        return {out, rec};
    }
    // (1 - zp z)/(z - zp): real coefficients, unit circle to itself, zp -> inf
    const double zpr = zp.z.real();
    rec.map = MobiusMap{Complex(-zpr), Complex(1.0), Complex(1.0), Complex(-zpr)};
    InterpolationProblem out = detail::transport(reordered, rec.map, 1.0 / rec.scale);
    return {out, rec};
}

/// Inverse of normalize on the data (maps a normalized problem back through
/// the record); used to audit round trips.
inline InterpolationProblem denormalize(const InterpolationProblem& normalized,
                                        const TransformRecord& rec)
{
    if (rec.map.is_identity()) {
        InterpolationProblem out = normalized;
        for (auto& vs : out.values)
            for (auto& v : vs) v *= rec.scale;
        return out;
    }
    return detail::transport(normalized, rec.map.inverse(), rec.scale);
}

/// z -> 1/z: exterior problem to Caratheodory form. Requires a normalized
/// problem; the node at infinity becomes 0 and keeps its values verbatim.
inline CaratheodoryProblem to_caratheodory(const InterpolationProblem& problem)
{
    if (!problem.is_normalized())
        fail(ErrorCode::InvalidInput, "problem must be normalized before transformation");
    const MobiusMap inv{Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
    InterpolationProblem t = detail::transport(problem, inv, 1.0);
    CaratheodoryProblem cp;
    cp.multiplicities = t.multiplicities;
    cp.values = std::move(t.values);
    cp.nodes.resize(t.nodes.size());
    for (std::size_t j = 0; j < t.nodes.size(); ++j) {
        if (t.nodes[j].at_infinity)
            fail(ErrorCode::InvalidInput, "unexpected node at infinity after inversion");
        cp.nodes[j] = t.nodes[j].z;
    }
    cp.nodes[0] = 0.0;
    cp.validate();
    return cp;
}

struct StructureOptions {
    double condition_bound = 1e12;
    double stein_residual_tol = 1e-10;
};

/// The matrices W, Z, e, E, V and the generalized Pick matrix for one
/// Caratheodory data set.
struct PickStructure {
    CaratheodoryProblem problem;
    std::vector<int> offsets; // block start per node
    Eigen::MatrixXcd W, Z, E, V, Sigma;
    Eigen::VectorXcd e;
    double v_condition = 0.0;

    int order() const { return problem.order(); }
    int dim() const { return order() + 1; }
};

inline PickStructure build_structure(const CaratheodoryProblem& cp,
                                     const StructureOptions& opts = {})
{
    cp.validate();
    const int N = cp.order() + 1;
    PickStructure ps;
    ps.problem = cp;
    ps.W = Eigen::MatrixXcd::Zero(N, N);
    ps.Z = Eigen::MatrixXcd::Zero(N, N);
    ps.e = Eigen::VectorXcd::Zero(N);
    int pos = 0;
    for (std::size_t j = 0; j < cp.nodes.size(); ++j) {
        const int m = cp.multiplicities[j];
        ps.offsets.push_back(pos);
        ps.e(pos) = 1.0;
        for (int i = 0; i < m; ++i) {
            ps.Z(pos + i, pos + i) = cp.nodes[j];
            if (i > 0) ps.Z(pos + i, pos + i - 1) = 1.0;
            for (int k = 0; i + k < m; ++k)
                ps.W(pos + k + i, pos + i) = cp.values[j][static_cast<std::size_t>(k)];
        }
        pos += m;
    }
    ps.E = stein_solve(ps.Z, ps.e * ps.e.adjoint());
    const double res = (ps.E - ps.Z * ps.E * ps.Z.adjoint() - ps.e * ps.e.adjoint()).norm();
    if (res > opts.stein_residual_tol * std::max(1.0, ps.E.norm()))
        fail(ErrorCode::IllConditioned, "Stein equation residual too large");
    ps.V.resize(N, N);
    Eigen::VectorXcd acc = ps.e;
    for (int k = 0; k < N; ++k) {
        ps.V.col(k) = acc;
        acc = ps.Z * acc;
    }
    ps.v_condition = condition_number(ps.V);
    if (!(ps.v_condition < opts.condition_bound))
        fail(ErrorCode::IllConditioned,
             "node configuration too ill-conditioned: cond(V) = " +
                 std::to_string(ps.v_condition));
    ps.Sigma = ps.W * ps.E + ps.E * ps.W.adjoint();
    ps.Sigma = 0.5 * (ps.Sigma + ps.Sigma.adjoint()).eval();
    return ps;
}

struct SolvabilityReport {
    bool solvable = false;
    double min_eigenvalue = 0.0;
};

/// Positive definiteness of the generalized Pick matrix.
inline SolvabilityReport pick_solvable(const PickStructure& ps)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ps.Sigma, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    return {mn > 0.0, mn};
}

/// Parameters of the data-to-equation map: u and the matrix U = L(u),
/// together with the intermediates d and M used by the inverse map.
struct UParameters {
    Eigen::VectorXd u;
    Eigen::MatrixXd U;
    Eigen::VectorXcd d;
    Eigen::MatrixXcd M; // V^{-1} with first row and column removed
};

namespace detail {

inline Eigen::MatrixXcd lower_toeplitz(const Eigen::VectorXcd& first_col)
{
    const Eigen::Index m = first_col.size();
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) T(i, j) = first_col(i - j);
    return T;
}

/// Block-diagonal D = (W + I/2)^{-1}(W - I/2), block by block.
inline Eigen::MatrixXcd d_matrix(const PickStructure& ps)
{
    const int N = ps.dim();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t j = 0; j < ps.problem.nodes.size(); ++j) {
        const int m = ps.problem.multiplicities[j];
        const int o = ps.offsets[j];
        const Eigen::MatrixXcd Wj = ps.W.block(o, o, m, m);
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
        D.block(o, o, m, m) = (Wj + 0.5 * I).partialPivLu().solve(Wj - 0.5 * I);
    }
    return D;
}

/// Stacks the first columns of the D blocks, dropping the leading d_00.
inline Eigen::VectorXcd d_vector(const PickStructure& ps, const Eigen::MatrixXcd& D)
{
    const int n = ps.order();
    Eigen::VectorXcd d(n);
    int pos = 0;
    for (std::size_t j = 0; j < ps.problem.nodes.size(); ++j) {
        const int m = ps.problem.multiplicities[j];
        const int o = ps.offsets[j];
        const int start = (j == 0) ? 1 : 0;
        for (int i = start; i < m; ++i) d(pos++) = D(o + i, o);
    }
    return d;
}

} // namespace detail

/// The forward map from Caratheodory data to the equation parameters (u, U).
/// Conjugate-symmetric data gives real u, U up to roundoff; the imaginary
/// parts are checked against rel_tol and truncated.
inline UParameters w_to_u(const PickStructure& ps, double rel_tol = 1e-8)
{
    const int n = ps.order();
    const Eigen::MatrixXcd D = detail::d_matrix(ps);
    const Eigen::MatrixXcd Vinv = ps.V.partialPivLu().inverse();
    const Eigen::MatrixXcd uU = (Vinv * D * ps.V).bottomRows(n);
    UParameters out;
    out.d = detail::d_vector(ps, D);
    out.M = Vinv.bottomRightCorner(n, n);
    const Eigen::VectorXcd uc = uU.col(0);
    const Eigen::MatrixXcd Uc = uU.rightCols(n);
    const double scale = std::max({1.0, uc.norm(), Uc.norm()});
    if (uc.imag().norm() > rel_tol * scale || Uc.imag().norm() > rel_tol * scale)
        fail(ErrorCode::InvalidInput,
             "imaginary residue in (u, U); data not conjugate-symmetric");
    out.u = uc.real();
    out.U = Uc.real();
    return out;
}

/// The linear map u -> U realized through the block recipe: d = M^{-1} u,
/// D assembled block-wise from d, then U read back off V^{-1} D V.
inline Eigen::MatrixXd u_to_U(const Eigen::VectorXd& u, const PickStructure& ps)
{
    const int n = ps.order();
    const int N = n + 1;
    const Eigen::MatrixXcd Vinv = ps.V.partialPivLu().inverse();
    const Eigen::MatrixXcd M = Vinv.bottomRightCorner(n, n);
    const Eigen::VectorXcd d = M.partialPivLu().solve(u.cast<Complex>());
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
    int pos = 0;
    for (std::size_t j = 0; j < ps.problem.nodes.size(); ++j) {
        const int m = ps.problem.multiplicities[j];
        const int o = ps.offsets[j];
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(m);
        const int start = (j == 0) ? 1 : 0;
        for (int i = start; i < m; ++i) col(i) = d(pos++);
        D.block(o, o, m, m) = detail::lower_toeplitz(col);
    }
    return ((Vinv * D * ps.V).bottomRows(n).rightCols(n)).real();
}

/// d = M^{-1} u in complex arithmetic.
inline Eigen::VectorXcd u_to_d(const Eigen::VectorXd& u, const PickStructure& ps)
{
    const int n = ps.order();
    const Eigen::MatrixXcd Vinv = ps.V.partialPivLu().inverse();
    const Eigen::MatrixXcd M = Vinv.bottomRightCorner(n, n);
    return M.partialPivLu().solve(u.cast<Complex>());
}

/// Inverse of w_to_u: recovers the Caratheodory values from u using the
/// node layout of the supplied structure.
inline CaratheodoryProblem u_to_w(const Eigen::VectorXd& u, const PickStructure& ps,
                                  double singular_tol = 1e-12)
{
    const int n = ps.order();
    if (u.size() != n) fail(ErrorCode::InvalidInput, "u has wrong dimension");
    const Eigen::VectorXcd d = u_to_d(u, ps);
    CaratheodoryProblem out;
    out.nodes = ps.problem.nodes;
    out.multiplicities = ps.problem.multiplicities;
    out.values.resize(out.nodes.size());
    int pos = 0;
    for (std::size_t j = 0; j < out.nodes.size(); ++j) {
        const int m = out.multiplicities[j];
        Complex dj0 = 0.0;
        if (j > 0) dj0 = d(pos++);
        Eigen::VectorXcd dj(m - 1);
        for (int i = 0; i + 1 < m; ++i) dj(i) = d(pos++);
        if (std::abs(Complex(1.0) - dj0) <= singular_tol)
            fail(ErrorCode::InvalidInput, "singular block: d_j0 = 1");
        const Complex wj0 = 0.5 * (Complex(1.0) + dj0) / (Complex(1.0) - dj0);
        Series vs(static_cast<std::size_t>(m));
        vs[0] = (j == 0) ? Complex(0.5) : wj0;
        if (m > 1) {
            Eigen::VectorXcd sj_col(m - 1);
            sj_col(0) = dj0;
            for (int i = 1; i + 1 < m; ++i) sj_col(i) = dj(i - 1);
            const Eigen::MatrixXcd Sj = detail::lower_toeplitz(sj_col);
            const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m - 1, m - 1);
            const Eigen::VectorXcd wj =
                (I - Sj).partialPivLu().solve(dj) / (Complex(1.0) - dj0);
            for (int i = 0; i + 1 < m; ++i) vs[static_cast<std::size_t>(i) + 1] = wj(i);
        }
        out.values[j] = std::move(vs);
    }
    return out;
}

} // namespace cee

#endif
