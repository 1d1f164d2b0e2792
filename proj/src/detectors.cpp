#include "udw/detectors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace udw {

namespace {

constexpr double pi = std::numbers::pi;

// ln(sinh(x)) - x for x > 0
double log_sinh_shifted(double x) { return std::log(-std::expm1(-2.0 * x)) - std::log(2.0); }

// ln(cosh(x)) - x
double log_cosh_shifted(double x) { return std::log1p(std::exp(-2.0 * x)) - std::log(2.0); }

double radial_momentum(double omega, double m) { return std::sqrt((omega - m) * (omega + m)); }

ClosedFormResult gated_result(double omega0) {
    ClosedFormResult r;
    r.gated = true;
    r.resonance_omega = omega0;
    return r;
}

ClosedFormResult finish(LogValue p, double omega0) {
    ClosedFormResult r;
    r.probability = p;
    r.resonance_omega = omega0;
    r.underflow = !p.is_zero() && p.value() == 0.0;
    return r;
}

void check_wavepacket(const WavepacketSpec& wp) {
    if (!(wp.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(wp.k0 > 0.0)) throw std::invalid_argument("k0 must be positive");
}

WavepacketSpec without_amplitudes(WavepacketSpec wp) {
    wp.alpha = {};
    wp.beta = {};
    return wp;
}

void check_vector(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    if (wp.m != 0.0) throw std::invalid_argument("vector model requires a massless field");
    validate(det, FieldModel::vector());
    validate(wp, FieldModel::vector());
}

// lambda^2 Delta^2 |alpha_1|^2 as a LogValue
LogValue vector_coupling(const DetectorSpec& det, const WavepacketSpec& wp) {
    return LogValue::from_double(det.lambda * det.lambda * det.delta * det.delta * std::norm(wp.alpha[0]));
}

}  // namespace

ClosedFormResult prob_real_scalar(int n, const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    validate(wp, FieldModel::real_scalar(n));
    validate(det, FieldModel::real_scalar(n));
    const double omega0 = dispersion(wp.k0, wp.m);
    const double omega = det.omega;
    if (omega <= wp.m) return gated_result(omega0);

    const double kappa = radial_momentum(omega, wp.m);
    const double s2 = wp.sigma * wp.sigma;
    const double x = wp.k0 * kappa / s2;
    const double nu = 0.5 * (n - 2);

    // ln I_nu(x) - x; n = 1 has order -1/2 with I_{-1/2}(x) = sqrt(2/(pi x)) cosh(x)
    double log_bessel_shifted;
    if (n == 1) {
        log_bessel_shifted = 0.5 * std::log(2.0 / (pi * x)) + log_cosh_shifted(x);
    } else {
        const LogValue bessel = log_bessel_i(nu, x);
        if (bessel.is_zero()) return finish(LogValue::zero(), omega0);
        log_bessel_shifted = bessel.log_magnitude - x;
    }

    const double dk = wp.k0 - kappa;
    const double log_rest = (n - 2) * std::log(kappa) - (0.5 * n - 2.0) * std::log(pi) -
                            (4 - n) * std::log(wp.sigma) - (n - 2) * std::log(wp.k0) - dk * dk / s2 +
                            2.0 * log_bessel_shifted;
    const LogValue prefactor = LogValue::from_double(2.0 * det.lambda * det.lambda * omega);
    return finish(prefactor * LogValue::from_log(log_rest), omega0);
}

ClosedFormResult prob_real_scalar_3d(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    validate(wp, FieldModel::real_scalar(3));
    validate(det, FieldModel::real_scalar(3));
    const double omega0 = dispersion(wp.k0, wp.m);
    const double omega = det.omega;
    if (omega <= wp.m) return gated_result(omega0);

    const double kappa = radial_momentum(omega, wp.m);
    const double s2 = wp.sigma * wp.sigma;
    const double x = wp.k0 * kappa / s2;
    const double dk = wp.k0 - kappa;
    const LogValue prefactor =
        LogValue::from_double(4.0 * det.lambda * det.lambda * wp.sigma * omega / std::sqrt(pi));
    const double log_rest = -2.0 * std::log(wp.k0) - dk * dk / s2 + 2.0 * log_sinh_shifted(x);
    return finish(prefactor * LogValue::from_log(log_rest), omega0);
}

ClosedFormResult prob_real_scalar_peak(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    validate(wp, FieldModel::real_scalar(3));
    validate(det, FieldModel::real_scalar(3));
    const double omega0 = dispersion(wp.k0, wp.m);
    const double x = wp.k0 * wp.k0 / (wp.sigma * wp.sigma);
    const LogValue prefactor =
        LogValue::from_double(4.0 * det.lambda * det.lambda * wp.sigma * omega0 / std::sqrt(pi));
    const double log_rest = -2.0 * std::log(wp.k0) + 2.0 * log_sinh_shifted(x);
    return finish(prefactor * LogValue::from_log(log_rest), omega0);
}

ClosedFormResult prob_vector_parallel(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_vector(det, wp);
    const double omega = det.omega;
    if (omega <= 0.0) return gated_result(wp.k0);
    const double s2 = wp.sigma * wp.sigma;
    const double b = omega * wp.k0 / s2;
    const double dk = wp.k0 - omega;
    const LogValue bessel = log_bessel_i(1.0, b);
    const LogValue prefactor = vector_coupling(det, wp) *
                               LogValue::from_double(std::pow(pi, 1.5) * wp.sigma * omega * omega * omega /
                                                     (wp.k0 * wp.k0));
    return finish(prefactor * LogValue::from_log(-dk * dk / s2 + 2.0 * (bessel.log_magnitude - b)), wp.k0);
}

ClosedFormResult prob_vector_perp(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_vector(det, wp);
    const double omega = det.omega;
    if (omega <= 0.0) return gated_result(wp.k0);
    const double s2 = wp.sigma * wp.sigma;
    const double h = 0.5 * omega * wp.k0 / s2;
    const double i0 = bessel_i_scaled(0.0, h);
    const double i1 = bessel_i_scaled(1.0, h);
    const double dk = wp.k0 - omega;
    const LogValue prefactor =
        vector_coupling(det, wp) *
        LogValue::from_double(std::pow(pi, 1.5) * std::pow(omega, 5) / (4.0 * s2 * wp.sigma));
    return finish(prefactor * LogValue::from_log(-dk * dk / s2 + 2.0 * std::log(i0 * i0 + i1 * i1)), wp.k0);
}

ClosedFormResult prob_vector_general(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_vector(det, wp);
    const double omega = det.omega;
    if (omega <= 0.0) return gated_result(wp.k0);
    const double s2 = wp.sigma * wp.sigma;
    const double b = omega * wp.k0 / s2;
    const double s = std::pow(std::sin(0.5 * det.theta), 2);
    const double c = std::pow(std::cos(0.5 * det.theta), 2);
    const double cos_t = std::cos(det.theta);
    const double sin2_t = std::pow(std::sin(det.theta), 2);

    // Bessel combination with the common factor e^{b} removed (b s + b c = b).
    const double i0s = bessel_i_scaled(0.0, b * s);
    const double i1s = bessel_i_scaled(1.0, b * s);
    const double i0c = bessel_i_scaled(0.0, b * c);
    const double i1c = bessel_i_scaled(1.0, b * c);
    const double braces = 2.0 * i0s * c * (i1c * cos_t + 2.0 * b * s * i0c) +
                          i1s * (b * sin2_t * i1c - 2.0 * s * cos_t * i0c);
    if (braces == 0.0) return finish(LogValue::zero(), wp.k0);

    const double dk = wp.k0 - omega;
    const LogValue prefactor = vector_coupling(det, wp) *
                               LogValue::from_double(std::pow(pi, 1.5) * wp.sigma * omega * omega * omega /
                                                     (4.0 * wp.k0 * wp.k0));
    return finish(prefactor * LogValue::from_log(-dk * dk / s2 + 2.0 * std::log(std::fabs(braces))), wp.k0);
}

cplx gamma_plus(const Spinor4& spinor, const std::array<cplx, 2>& beta, double omega, double m, double k0,
                double sigma) {
    if (!(omega >= m)) throw std::invalid_argument("gamma_plus: requires omega >= m");
    if (!(sigma > 0.0)) throw std::invalid_argument("gamma_plus: sigma must be positive");
    const cplx& a1 = spinor[0];
    const cplx& a2 = spinor[1];
    const cplx& b1 = spinor[2];
    const cplx& b2 = spinor[3];
    double ratio = 0.0;
    if (omega > m) {
        const double x = k0 * radial_momentum(omega, m) / (sigma * sigma);
        ratio = std::sqrt((omega - m) / (omega + m)) * pole_removed_coth(x);
    }
    return beta[0] * std::conj(b1) + beta[1] * std::conj(b2) +
           (beta[0] * std::conj(a1) - beta[1] * std::conj(a2)) * ratio;
}

cplx gamma_plus(const DetectorSpec& det, const WavepacketSpec& wp) {
    return gamma_plus(det.spinor, wp.beta, det.omega, wp.m, wp.k0, wp.sigma);
}

ClosedFormResult prob_fermion(const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    validate(wp, FieldModel::fermion());
    validate(det, FieldModel::fermion());
    const double omega0 = dispersion(wp.k0, wp.m);
    const double omega = det.omega;
    if (omega <= wp.m) return gated_result(omega0);

    const double g2 = std::norm(gamma_plus(det, wp));
    const double kappa = radial_momentum(omega, wp.m);
    const double s2 = wp.sigma * wp.sigma;
    const double x = wp.k0 * kappa / s2;
    const double dk = wp.k0 - kappa;
    const LogValue prefactor = LogValue::from_double(4.0 * det.lambda * det.lambda * wp.sigma * omega *
                                                     std::pow(det.delta, 3) * (omega + wp.m) / std::sqrt(pi)) *
                               LogValue::from_double(g2);
    const double log_rest = -2.0 * std::log(wp.k0) - dk * dk / s2 + 2.0 * log_sinh_shifted(x);
    return finish(prefactor * LogValue::from_log(log_rest), omega0);
}

ClosedFormResult prob_complex(int n, Statistics statistics, const DetectorSpec& det, const WavepacketSpec& wp) {
    check_wavepacket(wp);
    validate(wp, FieldModel::complex_scalar(n, statistics));
    ClosedFormResult r = prob_real_scalar(n, det, without_amplitudes(wp));
    r.probability = r.probability * LogValue::from_double(std::norm(wp.beta[0]));
    r.underflow = !r.probability.is_zero() && r.value() == 0.0;
    return r;
}

ClosedFormResult closed_form(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp) {
    switch (model.kind) {
        case FieldKind::RealScalar: return prob_real_scalar(model.n, det, wp);
        case FieldKind::Vector: return prob_vector_general(det, wp);
        case FieldKind::Fermion: return prob_fermion(det, wp);
        case FieldKind::ComplexScalar: return prob_complex(model.n, model.statistics, det, wp);
    }
    throw std::invalid_argument("unknown field model");
}

}  // namespace udw
