#pragma once

#include <limits>

namespace udw {

// Signed number stored as (ln|x|, sign). sign == 0 iff the value is exactly zero.
struct LogValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogValue zero() { return {}; }
    static LogValue from_log(double log_magnitude, int sign = 1);
    static LogValue from_double(double x);

    bool is_zero() const { return sign == 0; }
    // exp(log_magnitude) * sign; may underflow to 0 or overflow to inf
    double value() const;
};

LogValue operator*(const LogValue& a, const LogValue& b);
LogValue operator/(const LogValue& a, const LogValue& b);
LogValue operator+(const LogValue& a, const LogValue& b);
LogValue operator-(const LogValue& a, const LogValue& b);
LogValue operator-(const LogValue& a);

// a + b through the max-factored log-sum rule. When the operands have opposite
// signs and the result keeps less than 1e-8 of the larger magnitude,
// *precision_loss is set to true.
LogValue log_sum(const LogValue& a, const LogValue& b, bool* precision_loss = nullptr);
LogValue log_difference(const LogValue& a, const LogValue& b, bool* precision_loss = nullptr);

LogValue abs(const LogValue& a);
LogValue square(const LogValue& a);
// |a|^p for a >= 0
LogValue pow(const LogValue& a, double p);

inline constexpr double cancellation_threshold = 1e-8;

// ln I_nu(x) for nu >= 0, x >= 0.
LogValue log_bessel_i(double nu, double x);

// e^{-x} I_nu(x)
double bessel_i_scaled(double nu, double x);

// coth(u) - 1/u, u >= 0. Lies in [0, 1).
double pole_removed_coth(double u);

// Integral of e^{a cos(theta)} over the unit sphere S^{n-1} in R^n, n >= 2.
LogValue angular_exp_integral(int n, double a);

// Surface area of S^{n-1}, n >= 1 (n = 1 gives the two-point "sphere", 2).
double sphere_area(int n);

// Fourier transform of the switching e^{-t^2/T^2}: sqrt(pi) T exp(-eps^2 T^2 / 4)
double gaussian_window(double epsilon, double T);

}  // namespace udw
