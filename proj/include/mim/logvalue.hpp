#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mim {

// Nonnegative real carried as sign in {0,+1} plus the natural log of the
// magnitude. log = -inf encodes zero. Factorial-sized quantities at n ~ 1e8
// overflow any fixed-width float in linear space; all moment formulas are
// therefore evaluated on this type and only exponentiated at the edges.
class LogValue {
public:
    // Default-constructed value is zero.
    constexpr LogValue() = default;

    static constexpr LogValue zero() { return LogValue(); }
    static constexpr LogValue one() { return from_log(0.0); }

    static constexpr LogValue from_log(double log_magnitude) {
        LogValue v;
        v.log_ = log_magnitude;
        return v;
    }

    static LogValue from_value(double value) {
        if (value < 0.0 || std::isnan(value)) {
            throw std::domain_error("LogValue::from_value: needs a value >= 0");
        }
        return value == 0.0 ? zero() : from_log(std::log(value));
    }

    int sign() const { return is_zero() ? 0 : +1; }
    bool is_zero() const { return log_ == -kInf; }

    // Natural log of the magnitude; -inf for zero.
    double log() const { return log_; }

    // Linear-space value; underflows to 0 / overflows to +inf as doubles do.
    double value() const { return std::exp(log_); }

    LogValue& operator*=(LogValue rhs) {
        log_ = (is_zero() || rhs.is_zero()) ? -kInf : log_ + rhs.log_;
        return *this;
    }
    LogValue& operator/=(LogValue rhs) {
        if (rhs.is_zero()) throw std::domain_error("LogValue: division by zero");
        if (!is_zero()) log_ -= rhs.log_;
        return *this;
    }
    friend LogValue operator*(LogValue a, LogValue b) { return a *= b; }
    friend LogValue operator/(LogValue a, LogValue b) { return a /= b; }

    // log-sum-exp: hi + log1p(exp(lo - hi)) keeps full precision for wildly
    // different magnitudes and never overflows.
    friend LogValue operator+(LogValue a, LogValue b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const double hi = a.log_ > b.log_ ? a.log_ : b.log_;
        const double lo = a.log_ > b.log_ ? b.log_ : a.log_;
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }
    LogValue& operator+=(LogValue rhs) { return *this = *this + rhs; }

    friend bool operator==(LogValue a, LogValue b) { return a.log_ == b.log_; }
    friend bool operator!=(LogValue a, LogValue b) { return !(a == b); }
    friend bool operator<(LogValue a, LogValue b) { return a.log_ < b.log_; }
    friend bool operator<=(LogValue a, LogValue b) { return a.log_ <= b.log_; }
    friend bool operator>(LogValue a, LogValue b) { return b < a; }
    friend bool operator>=(LogValue a, LogValue b) { return b <= a; }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    double log_ = -kInf;
};

}  // namespace mim
