#include "mim/exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mim/errors.hpp"

namespace mim::exact {

namespace {

void require_small(std::int64_t n, const char* who) {
    if (n > 64) {
        throw refusal_error(std::string(who) + ": exact path refuses n > 64");
    }
}

// C(x,2) in exact integers.
std::int64_t choose2_int(std::int64_t x) { return x * (x - 1) / 2; }

}  // namespace

BigRat rational_of_double(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("rational_of_double: needs a finite nonnegative double");
    }
    if (x == 0.0) return BigRat(0);
    int exp2 = 0;
    const double mant = std::frexp(x, &exp2);  // x = mant * 2^exp2, mant in [0.5, 1)
    const auto mant_bits = static_cast<std::int64_t>(std::ldexp(mant, 53));
    const int shift = exp2 - 53;
    BigInt num = mant_bits;
    BigInt den = 1;
    if (shift >= 0) {
        num <<= shift;
    } else {
        den <<= -shift;
    }
    return BigRat(num, den);
}

BigRat pow_rat(const BigRat& base, std::int64_t e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("pow_rat: zero to a negative power");
        return BigRat(1) / pow_rat(base, -e);
    }
    BigRat acc = 1;
    BigRat b = base;
    std::uint64_t u = static_cast<std::uint64_t>(e);
    while (u) {
        if (u & 1) acc *= b;
        b *= b;
        u >>= 1;
    }
    return acc;
}

BigInt factorial(std::int64_t x) {
    if (x < 0) throw std::domain_error("factorial: negative argument");
    BigInt f = 1;
    for (std::int64_t i = 2; i <= x; ++i) f *= i;
    return f;
}

namespace {

double log_big(const BigInt& x) {
    if (x <= 0) throw std::domain_error("log_big: needs a positive integer");
    const std::size_t bits = boost::multiprecision::msb(x) + 1;
    if (bits <= 900) return std::log(x.convert_to<double>());
    const std::size_t shift = bits - 512;
    const BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) +
           static_cast<double>(shift) * std::numbers::ln2;
}

}  // namespace

double log_of(const BigRat& r) {
    if (r <= 0) throw std::domain_error("log_of: needs a positive rational");
    return log_big(boost::multiprecision::numerator(r)) -
           log_big(boost::multiprecision::denominator(r));
}

BigRat expected_matchings(std::int64_t n, double p, std::int64_t r) {
    require_small(n, "expected_matchings");
    if (r < 0 || 2 * r > n) throw std::domain_error("expected_matchings: needs 0 <= 2r <= n");
    if (r == 0) return BigRat(1);
    const BigRat pr = rational_of_double(p);
    // n! / ((n-2r)! r! 2^r) placements, each with probability
    // p^r (1-p)^(C(2r,2)-r).
    BigRat count = BigRat(factorial(n), factorial(n - 2 * r) * factorial(r));
    count /= pow_rat(BigRat(2), r);
    return count * pow_rat(pr, r) * pow_rat(BigRat(1) - pr, choose2_int(2 * r) - r);
}

BigRat count_compatible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s) {
    require_small(n, "count_compatible");
    if (k < 0 || l < 0 || s < 0) throw std::domain_error("count_compatible: negative index");
    if (l + s > k) return BigRat(0);
    if (n < 2 * k || n - 4 * k + 2 * l + s < 0) {
        throw std::domain_error("count_compatible: negative factorial argument");
    }
    BigRat v = pow_rat(BigRat(2), l + 2 * s - k);
    v *= BigRat(factorial(k), factorial(l) * factorial(s) * factorial(k - l - s) *
                                  factorial(k - l - s));
    v *= BigRat(factorial(n - 2 * k), factorial(n - 4 * k + 2 * l + s));
    return v;
}

BigRat conditional_expectation(const ModelParams& params, std::int64_t l, std::int64_t s) {
    require_small(params.n, "conditional_expectation");
    if (l < 0 || s < 0 || l + s > params.k) {
        throw std::domain_error("conditional_expectation: indices outside the grid");
    }
    const BigRat pr = rational_of_double(params.p);
    const std::int64_t e1mp = choose2_int(2 * params.k) - params.k -
                              (choose2_int(2 * l + s) - l);
    return pow_rat(pr, params.k - l) * pow_rat(BigRat(1) - pr, e1mp);
}

BigRat a_term(const ModelParams& params, std::int64_t l, std::int64_t s) {
    return count_compatible(params.n, params.k, l, s) *
           exact::conditional_expectation(params, l, s);
}

BigRat b_term(const ModelParams& params, std::int64_t l, std::int64_t s) {
    const std::int64_t n = params.n;
    const std::int64_t k = params.k;
    require_small(n, "b_term");
    if (l < 0 || s < 0) throw std::domain_error("b_term: negative index");
    if (l + s > k) return BigRat(0);
    if (n < 2 * k || n - 4 * k + 2 * l + s < 0) {
        throw std::domain_error("b_term: negative factorial argument");
    }
    const BigRat pr = rational_of_double(params.p);
    BigRat v = pow_rat(BigRat(2), l + 2 * s);
    v *= BigRat(factorial(k) * factorial(k),
                factorial(l) * factorial(s) * factorial(k - l - s) * factorial(k - l - s));
    v *= BigRat(factorial(n - 2 * k) * factorial(n - 2 * k),
                factorial(n) * factorial(n - 4 * k + 2 * l + s));
    v *= pow_rat(pr, -l);
    v *= pow_rat(BigRat(1) - pr, -(choose2_int(2 * l + s) - l));
    return v;
}

BigRat second_moment_ratio(const ModelParams& params) {
    require_small(params.n, "second_moment_ratio");
    BigRat acc = 0;
    for (std::int64_t l = 0; l <= params.k; ++l) {
        for (std::int64_t s = 0; s + l <= params.k; ++s) {
            if (!grid_cell_feasible(params.n, params.k, l, s)) continue;
            acc += exact::b_term(params, l, s);
        }
    }
    return acc;
}

BigRat pz_lower_bound(const ModelParams& params) {
    return BigRat(1) / exact::second_moment_ratio(params);
}

}  // namespace mim::exact
