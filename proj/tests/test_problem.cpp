#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cee/equation.hpp"
#include "cee/problem.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"

using cee::CaratheodoryProblem;
using cee::Complex;
using cee::InterpolationProblem;
using cee::Node;
using cee::Polynomial;

namespace {

InterpolationProblem simple_problem(std::vector<Complex> nodes, std::vector<Complex> vals)
{
    InterpolationProblem p;
    p.nodes.push_back(Node::infinity());
    p.values.push_back({Complex(0.5)});
    p.multiplicities.push_back(1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        p.nodes.push_back(Node::finite(nodes[i]));
        p.values.push_back({vals[i]});
        p.multiplicities.push_back(1);
    }
    return p;
}

} // namespace

TEST_CASE("normalize is the identity on normalized problems")
{
    const auto p = golden::degree7_problem();
    auto [out, rec] = cee::normalize(p);
    CHECK(rec.is_identity());
    CHECK(out.is_normalized());
    for (std::size_t j = 0; j < p.nodes.size(); ++j)
        CHECK(std::abs(out.values[j][0] - p.values[j][0]) < 1e-15);
}

TEST_CASE("normalize rescales a lone infinity value")
{
    InterpolationProblem p;
    p.nodes.push_back(Node::infinity());
    p.values.push_back({Complex(1.0)});
    p.multiplicities.push_back(1);
    auto [out, rec] = cee::normalize(p);
    CHECK(rec.map.is_identity());
    CHECK(rec.scale == Catch::Approx(2.0));
    CHECK(std::abs(out.values[0][0] - Complex(0.5)) < 1e-15);
}

TEST_CASE("normalize with a finite pivot round-trips the data")
{
    // f(z) = (z + 0.5)/(2(z + 0.2)) sampled at a finite pivot and two more nodes
    const cee::RationalFunction f{cee::Polynomial::from_real({1.0, 0.5}),
                                  cee::Polynomial::from_real({1.0, 0.2}), 0.5};
    InterpolationProblem p;
    p.nodes = {Node::finite({2.0, 0.0}), Node::finite({1.4, 1.1}), Node::finite({1.4, -1.1}),
               Node::infinity()};
    p.multiplicities = {1, 2, 2, 1};
    for (std::size_t j = 0; j < p.nodes.size(); ++j)
        p.values.push_back(cee::eval_with_derivatives(f, p.nodes[j], p.multiplicities[j] - 1));

    auto [norm, rec] = cee::normalize(p, std::size_t{0});
    CHECK(norm.is_normalized());
    CHECK(norm.nodes[0].at_infinity);
    norm.validate();

    // every transported value list equals the sampled values of the pulled-back f
    const InterpolationProblem back = cee::denormalize(norm, rec);
    REQUIRE(back.nodes.size() == p.nodes.size());
    // order: pivot first, then the rest in original order
    const std::vector<std::size_t> perm = {0, 1, 2, 3};
    for (std::size_t j = 0; j < back.nodes.size(); ++j) {
        const auto& orig = p.values[perm[j]];
        for (std::size_t k = 0; k < orig.size(); ++k)
            CHECK(std::abs(back.values[j][k] - orig[k]) < 1e-10);
    }

    // the normalized data is consistent: it interpolates f_tilde = f(mu^{-1})/scale
    const cee::RationalFunction ft = rec.apply(cee::RationalFunction{
        cee::Polynomial::from_real({1.0}), cee::Polynomial::from_real({1.0}), 1.0});
    (void)ft;
    for (std::size_t j = 0; j < norm.nodes.size(); ++j) {
        // pull each normalized node back and evaluate f there
        const Node zj = norm.nodes[j];
        const auto [src, inner] = rec.map.inverse().local_series(zj, norm.multiplicities[j] - 1);
        const auto direct = cee::eval_with_derivatives(f, src, norm.multiplicities[j] - 1);
        cee::Series expect = cee::series::compose(direct, inner,
                                                  static_cast<std::size_t>(norm.multiplicities[j]));
        for (std::size_t k = 0; k < expect.size(); ++k)
            CHECK(std::abs(norm.values[j][k] - expect[k] / rec.scale) < 1e-11);
    }
}

TEST_CASE("normalize rejects non-positive-real data")
{
    auto p = simple_problem({Complex(2.0, 0.0)}, {Complex(-0.25, 0.0)});
    CHECK_THROWS_AS(cee::normalize(p), cee::Error);
}

TEST_CASE("to_caratheodory keeps order-zero values and flips nodes")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const CaratheodoryProblem cp = cee::to_caratheodory(norm);
    REQUIRE(cp.nodes.size() == p.nodes.size());
    CHECK(cp.nodes[0] == Complex(0.0));
    for (std::size_t j = 1; j < cp.nodes.size(); ++j) {
        CHECK(std::abs(cp.nodes[j] - 1.0 / p.nodes[j].z) < 1e-14);
        CHECK(std::abs(cp.values[j][0] - p.values[j][0]) < 1e-14);
    }
}

TEST_CASE("to_caratheodory sends constant data to constant data")
{
    InterpolationProblem p;
    p.nodes = {Node::infinity(), Node::finite({2.0, 0.0})};
    p.multiplicities = {2, 3};
    p.values = {{Complex(0.5), Complex(0.0)}, {Complex(0.5), Complex(0.0), Complex(0.0)}};
    const CaratheodoryProblem cp = cee::to_caratheodory(p);
    for (std::size_t j = 0; j < cp.values.size(); ++j) {
        CHECK(std::abs(cp.values[j][0] - Complex(0.5)) < 1e-14);
        for (std::size_t k = 1; k < cp.values[j].size(); ++k)
            CHECK(std::abs(cp.values[j][k]) < 1e-14);
    }
}

TEST_CASE("derivative transform agrees with a closed-form composition")
{
    // f(z) = (z+0.5)/(2(z+0.2)); phi(zeta) = f(1/zeta) = (1+0.5 zeta)/(2(1+0.2 zeta))
    const cee::RationalFunction f{cee::Polynomial::from_real({1.0, 0.5}),
                                  cee::Polynomial::from_real({1.0, 0.2}), 0.5};
    const cee::RationalFunction phi{cee::Polynomial::from_real({0.5, 1.0}),
                                    cee::Polynomial::from_real({0.2, 1.0}), 0.5};
    InterpolationProblem p;
    p.nodes = {Node::infinity(), Node::finite({2.0, 0.0})};
    p.multiplicities = {1, 3};
    p.values = {cee::eval_with_derivatives(f, p.nodes[0], 0),
                cee::eval_with_derivatives(f, p.nodes[1], 2)};
    const CaratheodoryProblem cp = cee::to_caratheodory(p);
    const auto expect = cee::eval_with_derivatives(phi, Node::finite({0.5, 0.0}), 2);
    for (int k = 0; k <= 2; ++k)
        CHECK(std::abs(cp.values[1][static_cast<std::size_t>(k)] -
                       expect[static_cast<std::size_t>(k)]) < 1e-10);
}

TEST_CASE("published derivative-value recursion matches the series transform")
{
    // w_jk from the triangular-coefficient recursion, checked against the
    // composition route for k <= 4
    oracle::Gaussian rng(5150);
    for (int trial = 0; trial < 6; ++trial) {
        const Complex zj(rng.uniform(1.3, 2.5), rng.uniform(0.2, 1.5));
        const int K = 4;
        cee::Series v(static_cast<std::size_t>(K) + 1);
        for (auto& x : v) x = Complex(rng(), rng());

        // composition route: inner series of 1/zeta at 1/zj
        cee::MobiusMap invmap{Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0)};
        const auto [img, inner] = invmap.local_series(Node::finite(1.0 / zj), K);
        REQUIRE(!img.at_infinity);
        const cee::Series got = cee::series::compose(v, inner, K + 1);

        // s-coefficient recursion
        std::vector<std::vector<double>> s(K + 1, std::vector<double>(K + 1, 0.0));
        for (int k = 1; k <= K; ++k) {
            s[k][1] = 1.0;
            s[k][k] = 1.0;
        }
        for (int k = 1; k + 1 <= K; ++k)
            for (int l = 2; l <= k; ++l)
                s[k + 1][l] = (2.0 * k - l + 2.0) / l * s[k][l - 1] + s[k][l];
        auto factorial = [](int m) {
            double r = 1.0;
            for (int i = 2; i <= m; ++i) r *= i;
            return r;
        };
        for (int k = 1; k <= K; ++k) {
            Complex acc(0.0);
            for (int l = 1; l <= k; ++l) {
                const double coef = factorial(l) * factorial(k - l + 1) / factorial(k);
                acc += coef * s[k][l] * v[static_cast<std::size_t>(k - l + 1)] *
                       std::pow(-1.0, k + 2) * std::pow(zj, 2 * k - l + 1);
            }
            CHECK(std::abs(acc - got[static_cast<std::size_t>(k)]) <
                  1e-9 * std::max(1.0, std::abs(got[static_cast<std::size_t>(k)])));
        }
    }
}

TEST_CASE("structure for a single node at zero")
{
    CaratheodoryProblem cp;
    cp.nodes = {Complex(0.0)};
    cp.multiplicities = {4};
    cp.values = {{Complex(0.5), Complex(0.3), Complex(-0.1), Complex(0.05)}};
    const auto ps = cee::build_structure(cp);
    CHECK((ps.E - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
    CHECK((ps.V - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
    CHECK(std::abs(ps.Z(1, 0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(ps.Z(0, 0)) < 1e-15);
    CHECK(std::abs(ps.e(0) - Complex(1.0)) < 1e-15);
}

TEST_CASE("structure for distinct simple nodes reproduces the Pick kernel")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto cp = cee::to_caratheodory(norm);
    const auto ps = cee::build_structure(cp);
    for (int i = 0; i < ps.dim(); ++i)
        for (int j = 0; j < ps.dim(); ++j) {
            const Complex zi = ps.Z(i, i), zj = ps.Z(j, j);
            CHECK(std::abs(ps.E(i, j) - 1.0 / (1.0 - zi * std::conj(zj))) < 1e-10);
        }
    // Stein residual, relative
    const double res = (ps.E - ps.Z * ps.E * ps.Z.adjoint() - ps.e * ps.e.adjoint()).norm();
    CHECK(res <= 1e-10 * ps.E.norm());
}

TEST_CASE("constant data gives Sigma = E")
{
    CaratheodoryProblem cp;
    cp.nodes = {Complex(0.0), Complex(0.4, 0.3), Complex(0.4, -0.3)};
    cp.multiplicities = {1, 2, 2};
    cp.values = {{Complex(0.5)},
                 {Complex(0.5), Complex(0.0)},
                 {Complex(0.5), Complex(0.0)}};
    const auto ps = cee::build_structure(cp);
    CHECK((ps.Sigma - ps.E).norm() < 1e-12);
    const auto rep = cee::pick_solvable(ps);
    CHECK(rep.solvable);
}

TEST_CASE("pick matrix of the degree-7 data is positive definite")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    const auto rep = cee::pick_solvable(ps);
    CHECK(rep.solvable);
    CHECK(rep.min_eigenvalue > 0.0);
}

TEST_CASE("oversized values break solvability")
{
    // scale one conjugate value pair up until the Pick matrix goes indefinite
    auto p = golden::degree7_problem();
    p.values[6][0] = Complex(0.7693, 40.0);
    p.values[7][0] = Complex(0.7693, -40.0);
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    const auto rep = cee::pick_solvable(ps);
    CHECK_FALSE(rep.solvable);
    CHECK(rep.min_eigenvalue < 0.0);
}

TEST_CASE("w_to_u sends constant data to zero")
{
    CaratheodoryProblem cp;
    cp.nodes = {Complex(0.0), Complex(-0.5, 0.0), Complex(0.3, 0.4), Complex(0.3, -0.4)};
    cp.multiplicities = {2, 1, 1, 1};
    cp.values = {{Complex(0.5), Complex(0.0)}, {Complex(0.5)}, {Complex(0.5)}, {Complex(0.5)}};
    const auto ps = cee::build_structure(cp);
    const auto up = cee::w_to_u(ps);
    CHECK(up.u.norm() < 1e-12);
    CHECK(up.U.norm() < 1e-12);
}

TEST_CASE("single node at zero reduces to the covariance expansion")
{
    oracle::Gaussian rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + static_cast<int>(rng.bits() % 5);
        std::vector<double> c(static_cast<std::size_t>(n));
        for (auto& x : c) x = 0.3 * rng();
        CaratheodoryProblem cp;
        cp.nodes = {Complex(0.0)};
        cp.multiplicities = {n + 1};
        cee::Series vals(static_cast<std::size_t>(n) + 1);
        vals[0] = 0.5;
        for (int k = 1; k <= n; ++k) vals[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)];
        cp.values = {vals};
        const auto ps = cee::build_structure(cp);
        const auto up = cee::w_to_u(ps);
        auto [u2, U2] = cee::covariance_uU(c);
        CHECK((up.u - u2).norm() < 1e-11 * std::max(1.0, u2.norm()));
        CHECK((up.U - U2).norm() < 1e-11 * std::max(1.0, U2.norm()));

        // independent long-division oracle
        const auto series = oracle::series_inversion(c, n);
        for (int k = 1; k <= n; ++k)
            CHECK(up.u(k - 1) == Catch::Approx(-series[static_cast<std::size_t>(k)]).margin(1e-12));
    }
}

TEST_CASE("u_to_w at zero gives constant data")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    const auto w = cee::u_to_w(Eigen::VectorXd::Zero(ps.order()), ps);
    for (std::size_t j = 0; j < w.values.size(); ++j) {
        CHECK(std::abs(w.values[j][0] - Complex(0.5)) < 1e-12);
        for (std::size_t k = 1; k < w.values[j].size(); ++k)
            CHECK(std::abs(w.values[j][k]) < 1e-12);
    }
}

TEST_CASE("w_to_u and u_to_w are mutually inverse")
{
    oracle::Gaussian rng(417);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.bits() % 7);
        const auto model = oracle::random_positive_real(std::max(n, 1), rng);
        const auto prob = oracle::sample_problem(model, n, rng);
        auto [norm, rec] = cee::normalize(prob);
        (void)rec;
        const auto cp = cee::to_caratheodory(norm);
        const auto ps = cee::build_structure(cp);
        const auto up = cee::w_to_u(ps);

        const auto w_back = cee::u_to_w(up.u, ps);
        for (std::size_t j = 0; j < cp.values.size(); ++j)
            for (std::size_t k = 0; k < cp.values[j].size(); ++k)
                CHECK(std::abs(w_back.values[j][k] - cp.values[j][k]) <
                      1e-9 * std::max(1.0, std::abs(cp.values[j][k])));

        // and the opposite direction from a random u
        Eigen::VectorXd u_rand(ps.order());
        for (int i = 0; i < u_rand.size(); ++i) u_rand(i) = 0.2 * rng();
        const auto w_rand = cee::u_to_w(u_rand, ps);
        const auto ps2 = cee::build_structure(w_rand);
        const auto up2 = cee::w_to_u(ps2);
        CHECK((up2.u - u_rand).norm() < 1e-9 * std::max(1.0, u_rand.norm()));
    }
}

TEST_CASE("U is reproduced from u through the block recipe")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    const auto up = cee::w_to_u(ps);
    const Eigen::MatrixXd L_of_u = cee::u_to_U(up.u, ps);
    CHECK((L_of_u - up.U).norm() < 1e-10 * std::max(1.0, up.U.norm()));
}

TEST_CASE("the u -> U map is linear")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    oracle::Gaussian rng(8);
    const int n = ps.order();
    Eigen::VectorXd u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
        u1(i) = rng();
        u2(i) = rng();
    }
    const double al = 0.37, be = -1.2;
    const Eigen::MatrixXd lhs = cee::u_to_U(al * u1 + be * u2, ps);
    const Eigen::MatrixXd rhs = al * cee::u_to_U(u1, ps) + be * cee::u_to_U(u2, ps);
    CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
}

TEST_CASE("deformed Pick matrix stays positive definite")
{
    const auto p = golden::degree7_problem();
    auto [norm, rec] = cee::normalize(p);
    (void)rec;
    const auto ps = cee::build_structure(cee::to_caratheodory(norm));
    const Eigen::MatrixXcd D = cee::detail::d_matrix(ps);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(ps.dim(), ps.dim());
    for (int k = 0; k <= 10; ++k) {
        const double lam = k / 10.0;
        const Eigen::MatrixXcd Wl = (I - lam * D).partialPivLu().inverse() - 0.5 * I;
        Eigen::MatrixXcd Sl = Wl * ps.E + ps.E * Wl.adjoint();
        Sl = 0.5 * (Sl + Sl.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Sl, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("ill-conditioned node sets are rejected with diagnostics")
{
    CaratheodoryProblem cp;
    cp.nodes = {Complex(0.0), Complex(0.8, 0.0), Complex(0.8 + 4e-14, 0.0)};
    cp.multiplicities = {1, 1, 1};
    cp.values = {{Complex(0.5)}, {Complex(0.5)}, {Complex(0.5)}};
    CHECK_THROWS_AS(cee::build_structure(cp), cee::Error);
}
