#include "udw/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace udw {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Power series sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)), accumulated relative to
// the k = 0 term and rescaled whenever the partial sum grows large.
double log_bessel_i_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double log_scale = 0.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000000; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term < 1e-17 * sum && k > 0.5 * x) break;
        if (sum > 1e250) {
            log_scale += std::log(sum);
            term /= sum;
            sum = 1.0;
        }
    }
    return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) + log_scale + std::log(sum);
}

// Hankel expansion e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k.
// Returns false if the terms start growing before reaching double precision.
bool log_bessel_i_asymptotic(double nu, double x, double& out) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double previous = 1.0;
    bool converged = false;
    for (int k = 1; k <= 400; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        if (term == 0.0) {
            converged = true;
            break;
        }
        if (std::fabs(term) > previous) break;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            converged = true;
            break;
        }
        previous = std::fabs(term);
    }
    if (!converged || sum <= 0.0) return false;
    out = x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
    return true;
}

}  // namespace

LogValue LogValue::from_log(double log_magnitude, int sign) {
    if (sign == 0 || log_magnitude == -inf) return zero();
    return {log_magnitude, sign > 0 ? 1 : -1};
}

LogValue LogValue::from_double(double x) {
    if (x == 0.0) return zero();
    return {std::log(std::fabs(x)), x > 0.0 ? 1 : -1};
}

double LogValue::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
}

LogValue operator*(const LogValue& a, const LogValue& b) {
    if (a.is_zero() || b.is_zero()) return LogValue::zero();
    return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

LogValue operator/(const LogValue& a, const LogValue& b) {
    if (b.is_zero()) throw std::domain_error("LogValue division by zero");
    if (a.is_zero()) return LogValue::zero();
    return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
}

LogValue log_sum(const LogValue& a, const LogValue& b, bool* precision_loss) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const LogValue& hi = a.log_magnitude >= b.log_magnitude ? a : b;
    const LogValue& lo = a.log_magnitude >= b.log_magnitude ? b : a;
    const double r = std::exp(lo.log_magnitude - hi.log_magnitude);
    if (hi.sign == lo.sign) return {hi.log_magnitude + std::log1p(r), hi.sign};
    if (precision_loss && 1.0 - r < cancellation_threshold) *precision_loss = true;
    if (r == 1.0) return LogValue::zero();
    return {hi.log_magnitude + std::log1p(-r), hi.sign};
}

LogValue log_difference(const LogValue& a, const LogValue& b, bool* precision_loss) {
    return log_sum(a, -b, precision_loss);
}

LogValue operator+(const LogValue& a, const LogValue& b) { return log_sum(a, b); }
LogValue operator-(const LogValue& a, const LogValue& b) { return log_sum(a, -b); }
LogValue operator-(const LogValue& a) { return {a.log_magnitude, -a.sign}; }

LogValue abs(const LogValue& a) {
    if (a.is_zero()) return a;
    return {a.log_magnitude, 1};
}

LogValue square(const LogValue& a) {
    if (a.is_zero()) return a;
    return {2.0 * a.log_magnitude, 1};
}

LogValue pow(const LogValue& a, double p) {
    if (a.is_zero()) {
        if (p == 0.0) return LogValue::from_log(0.0);
        return a;
    }
    return {p * a.log_magnitude, 1};
}

LogValue log_bessel_i(double nu, double x) {
    if (!(nu >= 0.0)) throw std::invalid_argument("log_bessel_i: negative order " + std::to_string(nu));
    if (!(x >= 0.0)) throw std::invalid_argument("log_bessel_i: negative argument " + std::to_string(x));
    if (x == 0.0) return nu == 0.0 ? LogValue::from_log(0.0) : LogValue::zero();
    if (std::isinf(x)) return LogValue::from_log(inf);

    if (x >= 25.0 + nu * nu) {
        double out = 0.0;
        if (log_bessel_i_asymptotic(nu, x, out)) return LogValue::from_log(out);
    }
    return LogValue::from_log(log_bessel_i_series(nu, x));
}

double bessel_i_scaled(double nu, double x) {
    const LogValue v = log_bessel_i(nu, x);
    if (v.is_zero()) return 0.0;
    return std::exp(v.log_magnitude - x);
}

double pole_removed_coth(double u) {
    if (!(u >= 0.0)) throw std::invalid_argument("pole_removed_coth: negative argument " + std::to_string(u));
    if (u < 1e-2) {
        const double u2 = u * u;
        return u * (1.0 / 3.0 - u2 * (1.0 / 45.0 - u2 * (2.0 / 945.0 - u2 / 4725.0)));
    }
    if (u > 20.0) return 1.0 - 1.0 / u;
    return 1.0 / std::tanh(u) - 1.0 / u;
}

double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere_area: dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

LogValue angular_exp_integral(int n, double a) {
    if (n < 2) throw std::invalid_argument("angular_exp_integral: n must be >= 2, got " + std::to_string(n));
    a = std::fabs(a);
    const double half_n = 0.5 * n;
    const double log_two_pi_half_n = std::log(2.0) + half_n * std::log(std::numbers::pi);
    if (a == 0.0) return LogValue::from_log(log_two_pi_half_n - std::lgamma(half_n));
    const LogValue bessel = log_bessel_i(half_n - 1.0, a);
    return LogValue::from_log(log_two_pi_half_n + (1.0 - half_n) * std::log(0.5 * a)) * bessel;
}

double gaussian_window(double epsilon, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("gaussian_window: T must be positive");
    const double z = epsilon * T;
    return std::sqrt(std::numbers::pi) * T * std::exp(-0.25 * z * z);
}

}  // namespace udw
