#ifndef CEE_SERIES_HPP
#define CEE_SERIES_HPP

#include <complex>
#include <vector>

#include "cee/errors.hpp"

namespace cee {

using Complex = std::complex<double>;

/// Truncated local power series in an increment variable; entry k is the
/// coefficient of delta^k. Used for chain-rule transport of interpolation
/// values through coordinate changes.
using Series = std::vector<Complex>;

namespace series {

inline Series truncated(Series s, std::size_t len)
{
    s.resize(len, Complex(0.0));
    return s;
}

inline Series multiply(const Series& x, const Series& y, std::size_t len)
{
    Series out(len, Complex(0.0));
    for (std::size_t i = 0; i < x.size() && i < len; ++i) {
        if (x[i] == Complex(0.0)) continue;
        for (std::size_t j = 0; j < y.size() && i + j < len; ++j)
            out[i + j] += x[i] * y[j];
    }
    return out;
}

/// num/den as power series; den[0] must be nonzero.
inline Series divide(const Series& num, const Series& den, std::size_t len)
{
    if (den.empty() || den[0] == Complex(0.0))
        fail(ErrorCode::InvalidInput, "series division by series with zero constant term");
    Series out(len, Complex(0.0));
    for (std::size_t k = 0; k < len; ++k) {
        Complex acc = k < num.size() ? num[k] : Complex(0.0);
        for (std::size_t j = 1; j <= k && j < den.size(); ++j)
            acc -= den[j] * out[k - j];
        out[k] = acc / den[0];
    }
    return out;
}

/// outer(inner(delta)) truncated; inner must have zero constant term.
inline Series compose(const Series& outer, const Series& inner, std::size_t len)
{
    if (!inner.empty() && inner[0] != Complex(0.0))
        fail(ErrorCode::InvalidInput, "series composition needs inner constant term zero");
    Series out(len, Complex(0.0));
    Series power(len, Complex(0.0));
    if (!power.empty()) power[0] = 1.0;
    for (std::size_t p = 0; p < outer.size(); ++p) {
        if (p > 0) power = multiply(power, inner, len);
        if (p >= len && p > 0) break;
        for (std::size_t k = 0; k < len; ++k)
            out[k] += outer[p] * power[k];
    }
    return out;
}

} // namespace series
} // namespace cee

#endif
