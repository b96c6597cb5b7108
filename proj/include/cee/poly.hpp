#ifndef CEE_POLY_HPP
#define CEE_POLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cee/errors.hpp"
#include "cee/series.hpp"

namespace cee {

inline constexpr double default_root_cluster_tol = 1e-7;

/// Dense univariate polynomial with complex coefficients, highest power
/// first. An empty coefficient list is the zero polynomial.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<Complex> coef) : coef_(std::move(coef))
    {
        strip_exact_leading_zeros();
    }

    static Polynomial zero() { return Polynomial(); }

    static Polynomial constant(Complex c)
    {
        return Polynomial(std::vector<Complex>{c});
    }

    static Polynomial from_real(const std::vector<double>& coef)
    {
        std::vector<Complex> c(coef.begin(), coef.end());
        return Polynomial(std::move(c));
    }

    /// Monic polynomial with the given roots. With realify set, the root set
    /// must be closed under conjugation and the result has exactly real
    /// coefficients.
    static Polynomial from_roots(const std::vector<Complex>& roots, bool realify,
                                 double sym_tol = 1e-9);

    bool is_zero() const { return coef_.empty(); }
    int degree() const { return coef_.empty() ? 0 : static_cast<int>(coef_.size()) - 1; }

    const std::vector<Complex>& coefficients() const { return coef_; }

    Complex leading() const { return coef_.empty() ? Complex(0.0) : coef_.front(); }

    /// Coefficient of z^k (0 for k above the degree).
    Complex coeff_of(int k) const
    {
        if (k < 0 || is_zero() || k > degree()) return Complex(0.0);
        return coef_[static_cast<std::size_t>(degree() - k)];
    }

    bool is_monic(double tol = 1e-12) const
    {
        return !coef_.empty() && std::abs(coef_.front() - Complex(1.0)) <= tol;
    }

    double coeff_norm() const
    {
        double s = 0.0;
        for (const auto& c : coef_) s += std::norm(c);
        return std::sqrt(s);
    }

    bool is_real(double tol = 1e-12) const
    {
        const double scale = std::max(coeff_norm(), 1e-300);
        for (const auto& c : coef_)
            if (std::abs(c.imag()) > tol * scale) return false;
        return true;
    }

    std::vector<double> real_coefficients() const
    {
        std::vector<double> out(coef_.size());
        for (std::size_t i = 0; i < coef_.size(); ++i) out[i] = coef_[i].real();
        return out;
    }

    Complex operator()(Complex z) const
    {
        Complex acc(0.0);
        for (const auto& c : coef_) acc = acc * z + c;
        return acc;
    }

    Polynomial derivative() const
    {
        if (coef_.size() <= 1) return zero();
        std::vector<Complex> out(coef_.size() - 1);
        const int n = degree();
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = coef_[static_cast<std::size_t>(i)] * double(n - i);
        return Polynomial(std::move(out));
    }

    Polynomial conjugated() const
    {
        std::vector<Complex> out(coef_.size());
        for (std::size_t i = 0; i < coef_.size(); ++i) out[i] = std::conj(coef_[i]);
        return Polynomial(std::move(out));
    }

    /// Taylor coefficients around z0: entry k is p^{(k)}(z0)/k!, k = 0..k_max.
    Series taylor_at(Complex z0, int k_max) const
    {
        Series out(static_cast<std::size_t>(k_max) + 1, Complex(0.0));
        std::vector<Complex> work(coef_);
        for (int k = 0; k <= k_max; ++k) {
            if (work.empty()) break;
            // synthetic division by (z - z0); remainder is the next coefficient
            Complex rem(0.0);
            for (auto& c : work) {
                c += rem * z0;
                rem = c;
            }
            out[static_cast<std::size_t>(k)] = work.back();
            work.pop_back();
        }
        return out;
    }

    /// Roots via eigenvalues of the companion matrix.
    std::vector<Complex> roots() const
    {
        if (degree() < 1) return {};
        const int n = degree();
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i)
            companion(i, n - 1) = -coef_[static_cast<std::size_t>(n - i)] / coef_[0];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
        std::vector<Complex> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        return out;
    }

    double max_root_modulus() const
    {
        double m = 0.0;
        for (const auto& r : roots()) m = std::max(m, std::abs(r));
        return m;
    }

    /// Drops leading coefficients smaller than tol relative to the largest.
    Polynomial trimmed(double rel_tol) const
    {
        if (coef_.empty()) return zero();
        double big = 0.0;
        for (const auto& c : coef_) big = std::max(big, std::abs(c));
        std::size_t first = 0;
        while (first + 1 < coef_.size() && std::abs(coef_[first]) <= rel_tol * big) ++first;
        return Polynomial(std::vector<Complex>(coef_.begin() + static_cast<std::ptrdiff_t>(first),
                                               coef_.end()));
    }

    friend Polynomial operator*(const Polynomial& x, const Polynomial& y)
    {
        if (x.is_zero() || y.is_zero()) return zero();
        std::vector<Complex> out(x.coef_.size() + y.coef_.size() - 1, Complex(0.0));
        for (std::size_t i = 0; i < x.coef_.size(); ++i)
            for (std::size_t j = 0; j < y.coef_.size(); ++j)
                out[i + j] += x.coef_[i] * y.coef_[j];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator*(Complex s, const Polynomial& p)
    {
        std::vector<Complex> out(p.coef_);
        for (auto& c : out) c *= s;
        return Polynomial(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& x, const Polynomial& y)
    {
        return combine(x, y, 1.0);
    }

    friend Polynomial operator-(const Polynomial& x, const Polynomial& y)
    {
        return combine(x, y, -1.0);
    }

private:
    static Polynomial combine(const Polynomial& x, const Polynomial& y, Complex sign)
    {
        const std::size_t len = std::max(x.coef_.size(), y.coef_.size());
        std::vector<Complex> out(len, Complex(0.0));
        const std::size_t ox = len - x.coef_.size(), oy = len - y.coef_.size();
        for (std::size_t i = 0; i < x.coef_.size(); ++i) out[ox + i] += x.coef_[i];
        for (std::size_t i = 0; i < y.coef_.size(); ++i) out[oy + i] += sign * y.coef_[i];
        return Polynomial(std::move(out));
    }

    void strip_exact_leading_zeros()
    {
        std::size_t first = 0;
        while (first < coef_.size() && coef_[first] == Complex(0.0)) ++first;
        coef_.erase(coef_.begin(), coef_.begin() + static_cast<std::ptrdiff_t>(first));
    }

    std::vector<Complex> coef_;
};

inline Polynomial Polynomial::from_roots(const std::vector<Complex>& roots, bool realify,
                                         double sym_tol)
{
    std::vector<Complex> coef{1.0};
    for (const auto& r : roots) {
        coef.push_back(0.0);
        for (std::size_t i = coef.size() - 1; i > 0; --i) coef[i] -= r * coef[i - 1];
    }
    Polynomial p{std::move(coef)};
    if (!realify) return p;

    // conjugate closure: every root must have a partner
    std::vector<bool> used(roots.size(), false);
    double scale = 1.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i] || std::abs(roots[i].imag()) <= sym_tol * scale) continue;
        bool found = false;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i || used[j]) continue;
            if (std::abs(roots[j] - std::conj(roots[i])) <= sym_tol * scale) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            fail(ErrorCode::InvalidInput,
                 "root set is not closed under conjugation; cannot realify");
    }
    std::vector<Complex> rc(p.coefficients().size());
    for (std::size_t i = 0; i < rc.size(); ++i) rc[i] = p.coefficients()[i].real();
    return Polynomial(std::move(rc));
}

/// Conjugate reversal z^n * conj(p)(1/z); plain coefficient reversal for
/// real polynomials.
inline Polynomial reversed(const Polynomial& p)
{
    std::vector<Complex> out(p.coefficients().rbegin(), p.coefficients().rend());
    for (auto& c : out) c = std::conj(c);
    return Polynomial(std::move(out));
}

/// True iff every root has modulus < 1 - margin.
inline bool schur_test(const Polynomial& p, double margin = 0.0)
{
    if (p.is_zero()) fail(ErrorCode::InvalidInput, "schur_test of zero polynomial");
    if (p.degree() == 0) return true;
    return p.max_root_modulus() < 1.0 - margin;
}

namespace detail {

/// Symmetric Laurent coefficient at lag k of x(z) y(1/z) + y(z) x(1/z),
/// both of declared degree n (missing high coefficients treated as zero).
inline Complex laurent_lag(const Polynomial& x, const Polynomial& y, int n, int k)
{
    Complex acc(0.0);
    for (int i = 0; i + k <= n; ++i)
        acc += x.coeff_of(i) * y.coeff_of(i + k) + y.coeff_of(i) * x.coeff_of(i + k);
    return acc;
}

} // namespace detail

/// Largest coefficient mismatch between a(z)b(1/z)+b(z)a(1/z) and
/// 2 rho^2 sigma(z)sigma(1/z), over all lags.
inline double positivity_identity_residual(const Polynomial& a, const Polynomial& b,
                                           const Polynomial& sigma, double rho)
{
    const int n = a.degree();
    if (b.degree() != n || sigma.degree() != n)
        fail(ErrorCode::InvalidInput, "positivity identity needs equal degrees");
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        const Complex lhs = detail::laurent_lag(a, b, n, k);
        const Complex rhs = 2.0 * rho * rho * 0.5 * detail::laurent_lag(sigma, sigma, n, k);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Point on the Riemann sphere: either finite or the point at infinity.
struct Node {
    bool at_infinity = false;
    Complex z{0.0};

    static Node infinity() { return Node{true, Complex(0.0)}; }
    static Node finite(Complex z) { return Node{false, z}; }

    bool is_real(double tol = 1e-12) const
    {
        return at_infinity || std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z));
    }

    Node conj() const { return at_infinity ? *this : finite(std::conj(z)); }

    friend bool operator==(const Node& a, const Node& b)
    {
        if (a.at_infinity != b.at_infinity) return false;
        return a.at_infinity || a.z == b.z;
    }
};

/// Thrown context for evaluation at (or too close to) a denominator root.
class PoleError : public Error {
public:
    PoleError(Complex pole, const std::string& what)
        : Error(ErrorCode::InvalidInput, what), pole_(pole)
    {
    }
    Complex pole() const { return pole_; }

private:
    Complex pole_;
};

/// scale * num/den.
struct RationalFunction {
    Polynomial num;
    Polynomial den;
    double scale = 1.0;

    Complex operator()(Complex z) const { return scale * num(z) / den(z); }

    /// Cancels numerator/denominator roots that agree within tol.
    RationalFunction reduced(double tol = default_root_cluster_tol) const
    {
        auto rn = num.roots();
        auto rd = den.roots();
        double big = 1.0;
        for (const auto& r : rd) big = std::max(big, std::abs(r));
        std::vector<bool> drop_d(rd.size(), false);
        std::vector<Complex> keep_n;
        for (const auto& r : rn) {
            bool cancelled = false;
            for (std::size_t j = 0; j < rd.size(); ++j) {
                if (drop_d[j]) continue;
                if (std::abs(rd[j] - r) <= tol * big) {
                    drop_d[j] = true;
                    cancelled = true;
                    break;
                }
            }
            if (!cancelled) keep_n.push_back(r);
        }
        std::vector<Complex> keep_d;
        for (std::size_t j = 0; j < rd.size(); ++j)
            if (!drop_d[j]) keep_d.push_back(rd[j]);
        RationalFunction out;
        out.num = num.leading() * Polynomial::from_roots(keep_n, false);
        out.den = den.leading() * Polynomial::from_roots(keep_d, false);
        out.scale = scale;
        if (out.num.is_real(1e-9) && out.den.is_real(1e-9)) {
            out.num = Polynomial::from_real(out.num.real_coefficients());
            out.den = Polynomial::from_real(out.den.real_coefficients());
        }
        return out;
    }
};

/// Taylor coefficients of r around the node: entry k equals r^{(k)}(z)/k!.
/// Values at infinity are coefficients of the expansion in 1/z, obtained by
/// evaluating the reversed representation at 0.
inline Series eval_with_derivatives(const RationalFunction& r, const Node& node, int k_max,
                                    double pole_tol = 1e-12)
{
    const std::size_t len = static_cast<std::size_t>(k_max) + 1;
    Series num_s, den_s;
    if (node.at_infinity) {
        const int common = std::max(r.num.degree(), r.den.degree());
        auto pad_reverse = [common](const Polynomial& p) {
            std::vector<Complex> c(static_cast<std::size_t>(common) + 1, Complex(0.0));
            const auto& src = p.coefficients();
            // z^common * p(1/z): coefficient of z^k in source lands at index k
            for (int k = 0; k <= p.degree(); ++k)
                c[static_cast<std::size_t>(k)] = p.coeff_of(k);
            return Polynomial(std::move(c));
        };
        num_s = pad_reverse(r.num).taylor_at(0.0, k_max);
        den_s = pad_reverse(r.den).taylor_at(0.0, k_max);
    } else {
        num_s = r.num.taylor_at(node.z, k_max);
        den_s = r.den.taylor_at(node.z, k_max);
    }
    const double dscale = std::max(r.den.coeff_norm(), 1e-300);
    if (std::abs(den_s[0]) <= pole_tol * dscale) {
        Complex nearest(0.0);
        double best = 1e300;
        for (const auto& root : r.den.roots()) {
            const double d = node.at_infinity ? 1.0 / std::max(std::abs(root), 1e-300)
                                              : std::abs(root - node.z);
            if (d < best) {
                best = d;
                nearest = root;
            }
        }
        throw PoleError(nearest, "evaluation at a pole of the rational function");
    }
    Series out = series::divide(num_s, den_s, len);
    for (auto& c : out) c *= r.scale;
    return out;
}

} // namespace cee

#endif
