#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cee/poly.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"

using cee::Complex;
using cee::Polynomial;
using cee::RationalFunction;

TEST_CASE("schur_test basic roots")
{
    CHECK(cee::schur_test(Polynomial::from_real({1.0, -0.5}), 0.0));        // z - 0.5
    CHECK_FALSE(cee::schur_test(Polynomial::from_real({1.0, 1.0}), 0.0));   // root on the circle
    CHECK_FALSE(cee::schur_test(Polynomial::from_real({1.0, -0.5}), 0.6));  // margin excludes it
    CHECK(cee::schur_test(golden::degree7_sigma(), 0.0));
    CHECK_THROWS_AS(cee::schur_test(Polynomial::zero(), 0.0), cee::Error);
}

TEST_CASE("from_roots basics")
{
    const Polynomial p = Polynomial::from_roots({Complex(0.5, 0.0)}, false);
    CHECK(std::abs(p.coeff_of(1) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(p.coeff_of(0) - Complex(-0.5)) < 1e-15);

    const Polynomial q = Polynomial::from_roots({Complex(0, 1), Complex(0, -1)}, true);
    CHECK(q.degree() == 2);
    CHECK(std::abs(q.coeff_of(2) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(q.coeff_of(1)) < 1e-15);
    CHECK(std::abs(q.coeff_of(0) - Complex(1.0)) < 1e-15);

    const Polynomial empty = Polynomial::from_roots({}, true);
    CHECK(empty.degree() == 0);
    CHECK(std::abs(empty.coeff_of(0) - Complex(1.0)) < 1e-15);

    CHECK_THROWS_AS(Polynomial::from_roots({Complex(0, 1)}, true), cee::Error);
}

TEST_CASE("from_roots then root extraction recovers the roots")
{
    oracle::Gaussian rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const int deg = 1 + static_cast<int>(rng.bits() % 10);
        std::vector<Complex> roots;
        while (static_cast<int>(roots.size()) < deg) {
            const Complex cand(rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95));
            bool ok = true;
            for (const auto& r : roots)
                if (std::abs(r - cand) < 1e-2) ok = false;
            if (ok) roots.push_back(cand);
        }
        const Polynomial p = Polynomial::from_roots(roots, false);
        auto found = p.roots();
        REQUIRE(found.size() == roots.size());
        for (const auto& r : roots) {
            double best = 1e300;
            for (const auto& f : found) best = std::min(best, std::abs(f - r));
            CHECK(best < 1e-8);
        }
    }
}

TEST_CASE("reversed")
{
    const Polynomial p = Polynomial::from_real({1.0, 2.0, 3.0});
    const Polynomial r = cee::reversed(p);
    CHECK(std::abs(r.coeff_of(2) - Complex(3.0)) < 1e-15);
    CHECK(std::abs(r.coeff_of(1) - Complex(2.0)) < 1e-15);
    CHECK(std::abs(r.coeff_of(0) - Complex(1.0)) < 1e-15);

    const Polynomial mono = Polynomial::from_real({1.0, 0.0, 0.0, 0.0}); // z^3
    CHECK(cee::reversed(mono).degree() == 0);
    CHECK(std::abs(cee::reversed(mono).coeff_of(0) - Complex(1.0)) < 1e-15);

    const Polynomial palin = Polynomial::from_real({1.0, 2.0, 1.0});
    const Polynomial rp = cee::reversed(palin);
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(rp.coeff_of(k) - palin.coeff_of(k)) < 1e-15);
}

TEST_CASE("reversed is an involution away from zero constant term")
{
    oracle::Gaussian rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int deg = 1 + static_cast<int>(rng.bits() % 8);
        std::vector<Complex> c(static_cast<std::size_t>(deg) + 1);
        for (auto& x : c) x = Complex(rng(), rng());
        if (std::abs(c.back()) < 0.1) c.back() += 1.0;
        const Polynomial p{std::vector<Complex>(c)};
        const Polynomial rr = cee::reversed(cee::reversed(p));
        REQUIRE(rr.degree() == p.degree());
        for (int k = 0; k <= p.degree(); ++k)
            CHECK(std::abs(rr.coeff_of(k) - p.coeff_of(k)) < 1e-14);
    }
}

TEST_CASE("eval_with_derivatives examples")
{
    const RationalFunction half{Polynomial::from_real({1.0}), Polynomial::from_real({1.0}), 0.5};
    const auto c = cee::eval_with_derivatives(half, cee::Node::finite({1.7, 0.3}), 2);
    CHECK(std::abs(c[0] - Complex(0.5)) < 1e-15);
    CHECK(std::abs(c[1]) < 1e-15);
    CHECK(std::abs(c[2]) < 1e-15);

    const RationalFunction inv{Polynomial::from_real({1.0}), Polynomial::from_real({1.0, 0.0}), 1.0}; // 1/z
    const auto d = cee::eval_with_derivatives(inv, cee::Node::finite({2.0, 0.0}), 1);
    CHECK(std::abs(d[0] - Complex(0.5)) < 1e-15);
    CHECK(std::abs(d[1] - Complex(-0.25)) < 1e-15);

    // published degree-7 solution evaluated at 1.1 (coefficients are printed
    // to four digits, so the tolerance is loose)
    const RationalFunction f{Polynomial::from_real(golden::degree7_b()),
                             Polynomial::from_real(golden::degree7_a()), 0.5};
    const auto v = cee::eval_with_derivatives(f, cee::Node::finite({1.1, 0.0}), 0);
    CHECK(std::abs(v[0] - Complex(0.7693)) < 2e-3);
}

TEST_CASE("eval at infinity uses the reversed representation")
{
    // f(z) = (z + 2)/(2z - 1): expansion 1/2 + (5/4) z^{-1} + ...
    const RationalFunction f{Polynomial::from_real({1.0, 2.0}), Polynomial::from_real({2.0, -1.0}), 1.0};
    const auto v = cee::eval_with_derivatives(f, cee::Node::infinity(), 2);
    CHECK(std::abs(v[0] - Complex(0.5)) < 1e-15);
    CHECK(std::abs(v[1] - Complex(1.25)) < 1e-15);
    // next term: f(1/x) = (1+2x)/(2-x) = 1/2 + (5/4)x + (5/8)x^2 + ...
    CHECK(std::abs(v[2] - Complex(0.625)) < 1e-15);
}

TEST_CASE("evaluation at a pole reports the offending root")
{
    const RationalFunction f{Polynomial::from_real({1.0}), Polynomial::from_real({1.0, -1.5}), 1.0};
    try {
        cee::eval_with_derivatives(f, cee::Node::finite({1.5, 0.0}), 0);
        FAIL("expected a pole error");
    } catch (const cee::PoleError& e) {
        CHECK(std::abs(e.pole() - Complex(1.5)) < 1e-12);
    }
}

TEST_CASE("taylor coefficients agree with high-order finite differences")
{
    oracle::Gaussian rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const int dn = 2 + static_cast<int>(rng.bits() % 4);
        const int dd = 2 + static_cast<int>(rng.bits() % 4);
        std::vector<Complex> nc(static_cast<std::size_t>(dn) + 1), dc(static_cast<std::size_t>(dd) + 1);
        for (auto& x : nc) x = Complex(rng(), rng());
        for (auto& x : dc) x = Complex(rng(), rng());
        const RationalFunction f{Polynomial{nc}, Polynomial{dc}, 1.0};
        const Complex z0(rng.uniform(1.2, 2.5), rng.uniform(-1.0, 1.0));
        if (std::abs(f.den(z0)) < 1e-3) continue;
        const auto tay = cee::eval_with_derivatives(f, cee::Node::finite(z0), 1);
        const Complex fd = oracle::central_derivative([&](Complex z) { return f(z); }, z0, 1e-4);
        CHECK(std::abs(tay[1] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("positivity identity residual")
{
    const Polynomial lin = Polynomial::from_real({1.0, -0.3});
    CHECK(cee::positivity_identity_residual(lin, lin, lin, 1.0) < 1e-14);

    const Polynomial z = Polynomial::from_real({1.0, 0.0});
    CHECK(cee::positivity_identity_residual(z, z, z, 2.0) == Catch::Approx(6.0).margin(1e-12));

    CHECK_THROWS_AS(
        cee::positivity_identity_residual(z, Polynomial::from_real({1.0}), z, 1.0), cee::Error);
}

TEST_CASE("positivity identity on the published degree-7 solution")
{
    const Polynomial a = Polynomial::from_real(golden::degree7_a());
    const Polynomial b = Polynomial::from_real(golden::degree7_b());
    const Polynomial sigma = golden::degree7_sigma();
    // rho from the lag-0 coefficient
    const double num = (cee::detail::laurent_lag(a, b, 7, 0)).real();
    const double den = (cee::detail::laurent_lag(sigma, sigma, 7, 0)).real();
    const double rho = std::sqrt(num / den);
    // four printed digits per coefficient leave a residual of a few 1e-3
    CHECK(cee::positivity_identity_residual(a, b, sigma, rho) < 5e-3);
}

TEST_CASE("rational reduction cancels clustered roots")
{
    const Polynomial common = Polynomial::from_roots({Complex(0.4, 0.0)}, false);
    const Polynomial n0 = Polynomial::from_roots({Complex(0.1, 0.2), Complex(0.1, -0.2)}, false);
    const Polynomial d0 = Polynomial::from_roots({Complex(-0.5, 0.0), Complex(0.8, 0.0)}, false);
    const RationalFunction f{n0 * common, d0 * common, 2.0};
    const RationalFunction r = f.reduced(1e-7);
    CHECK(r.num.degree() == 2);
    CHECK(r.den.degree() == 2);
    const Complex z(1.7, 0.4);
    CHECK(std::abs(f(z) - r(z)) < 1e-12);
}
