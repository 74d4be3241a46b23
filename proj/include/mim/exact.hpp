#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "mim/moments.hpp"

// Second implementation of the moment formulas in exact big-integer rational
// arithmetic, used to cross-validate the log-gamma path. The double p is
// converted to its exact dyadic rational, so both paths evaluate the same
// mathematical object. Every entry point refuses n > 64: beyond that the
// exact path stops being a practical oracle and the log path stands alone.
namespace mim::exact {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Exact value of a finite nonnegative double (dyadic rational).
BigRat rational_of_double(double x);

// Integer power with negative exponents allowed (base != 0 for those).
BigRat pow_rat(const BigRat& base, std::int64_t e);

BigInt factorial(std::int64_t x);

// Natural log of a positive rational, cancellation-aware for numerators and
// denominators far beyond double range. Absolute error ~1e-12.
double log_of(const BigRat& r);

BigRat expected_matchings(std::int64_t n, double p, std::int64_t r);
BigRat count_compatible(std::int64_t n, std::int64_t k, std::int64_t l, std::int64_t s);
BigRat conditional_expectation(const ModelParams& params, std::int64_t l, std::int64_t s);
BigRat a_term(const ModelParams& params, std::int64_t l, std::int64_t s);
BigRat b_term(const ModelParams& params, std::int64_t l, std::int64_t s);
BigRat second_moment_ratio(const ModelParams& params);
BigRat pz_lower_bound(const ModelParams& params);

}  // namespace mim::exact
