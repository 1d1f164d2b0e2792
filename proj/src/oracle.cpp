#include "udw/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "udw/specfun.hpp"

namespace udw {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double angle_tolerance = 1e-12;

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double integrate_panels(const F& f, const std::vector<double>& points, const QuadratureConfig& q,
                        double& error_total, const std::string& what) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i];
        const double b = points[i + 1];
        if (!(b > a)) continue;
        double err = 0.0;
        double l1 = 0.0;
        const double v = GaussKronrod::integrate(f, a, b, q.max_depth, q.relative_tolerance, &err, &l1);
        if (!std::isfinite(v) || (err > 4.0 * q.relative_tolerance * l1 && err > 1e-300)) {
            throw NonConvergenceError(what + ": quadrature did not converge on [" + std::to_string(a) + ", " +
                                      std::to_string(b) + "] (error " + std::to_string(err) + ", L1 " +
                                      std::to_string(l1) + ")");
        }
        sum += v;
        error_total += err;
    }
    return sum;
}

std::vector<double> sorted_points(std::vector<double> pts, double lo, double hi) {
    std::vector<double> out{lo, hi};
    for (double p : pts)
        if (p > lo && p < hi) out.push_back(p);
    std::sort(out.begin(), out.end());
    // merge breakpoints that coincide up to rounding; degenerate panels upset the rule
    const double eps = 1e-12 * std::max(std::fabs(lo), std::fabs(hi));
    std::vector<double> merged{out.front()};
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] - merged.back() > eps) merged.push_back(out[i]);
    if (merged.size() > 1) merged.back() = hi;
    else merged.push_back(hi);
    return merged;
}

double k_of_omega(double w, double m) { return w <= m ? 0.0 : std::sqrt((w - m) * (w + m)); }

// Panels in k covering the window support |w - centre| <= c/T, optionally cut
// to the Gaussian support |k - k0| <= c sigma. Empty when nothing survives.
std::vector<double> radial_panels(const WavepacketSpec& wp, double centre, double T, double c, bool gaussian) {
    const double m = wp.m;
    const double w_hi = centre + c / T;
    if (w_hi <= m) return {};
    const double w_lo = std::max(m, centre - c / T);
    double k_lo = k_of_omega(w_lo, m);
    double k_hi = k_of_omega(w_hi, m);
    if (gaussian) {
        k_lo = std::max(k_lo, wp.k0 - c * wp.sigma);
        k_hi = std::min(k_hi, wp.k0 + c * wp.sigma);
    }
    if (!(k_hi > k_lo)) return {};
    std::vector<double> pts;
    for (double j : {-6.0, -2.0, 0.0, 2.0, 6.0}) {
        const double w = centre + j / T;
        if (w > m) pts.push_back(k_of_omega(w, m));
        if (gaussian) pts.push_back(wp.k0 + j * wp.sigma);
    }
    return sorted_points(pts, k_lo, k_hi);
}

// Breakpoints for an angular integrand peaked at theta0 with width 1/sqrt(a).
std::vector<double> angular_panels(double a, double theta0) {
    std::vector<double> pts;
    if (a > 1.0) {
        const double w = 1.0 / std::sqrt(a);
        for (double j : {-20.0, -6.0, -2.0, 0.0, 2.0, 6.0, 20.0}) pts.push_back(theta0 + j * w);
    }
    return sorted_points(pts, 0.0, pi);
}

QuadratureConfig inner_config(const QuadratureConfig& q) {
    QuadratureConfig inner = q;
    inner.relative_tolerance = q.relative_tolerance * 0.1;
    return inner;
}

// e^{-a} times the integral of e^{a cos(theta)} over S^{n-1}
double angular_scaled_numeric(int n, double a, const QuadratureConfig& q) {
    if (n == 1) return 1.0 + std::exp(-2.0 * a);
    double err = 0.0;
    auto f = [&](double t) { return std::exp(a * (std::cos(t) - 1.0)) * std::pow(std::sin(t), n - 2); };
    return sphere_area(n - 1) * integrate_panels(f, angular_panels(a, 0.0), q, err, "angular integral");
}

double angular_scaled(int n, double a, const QuadratureConfig& q) {
    if (q.tier == OracleTier::FullyNumeric) return angular_scaled_numeric(n, a, inner_config(q));
    if (n == 1) return 1.0 + std::exp(-2.0 * a);
    const LogValue v = angular_exp_integral(n, a);
    return std::exp(v.log_magnitude - a);
}

// Vector model: e^{-a} times the integral of sin(theta) e^{a khat0.n} over the sphere,
// theta measured from the dipole and khat0 at angle vartheta from it.
double vector_angular_numeric(double a, double vartheta, const QuadratureConfig& q) {
    const double sv = std::sin(vartheta);
    const double cv = std::cos(vartheta);
    auto f = [&](double t) {
        const double st = std::sin(t);
        const double ct = std::cos(t);
        const double c = a * sv * st;
        // periodic trapezoid rule in phi; converges geometrically once N >> sqrt(c)
        const int npts = 32 + 2 * static_cast<int>(std::ceil(4.0 * std::sqrt(c)));
        double sum = 0.0;
        for (int j = 0; j < npts; ++j) sum += std::exp(c * (std::cos(two_pi * j / npts) - 1.0));
        return st * st * std::exp(a * (sv * st + cv * ct - 1.0)) * sum * two_pi / npts;
    };
    double err = 0.0;
    return integrate_panels(f, angular_panels(a, vartheta), q, err, "vector angular integral");
}

double vector_angular(double a, double vartheta, const QuadratureConfig& q) {
    if (q.tier == OracleTier::FullyNumeric) return vector_angular_numeric(a, vartheta, inner_config(q));
    if (std::fabs(vartheta) <= angle_tolerance) {
        if (a == 0.0) return pi * pi;
        return 2.0 * pi * pi * bessel_i_scaled(1.0, a) / a;
    }
    const double i0 = bessel_i_scaled(0.0, 0.5 * a);
    const double i1 = bessel_i_scaled(1.0, 0.5 * a);
    return pi * pi * (i0 * i0 + i1 * i1);
}

// e^{-a} * 4 pi sinh(a) / a and e^{-a} * 4 pi (cosh(a) - sinh(a)/a) / a
void spinor_angular(double a, const QuadratureConfig& q, double& s_out, double& c_out) {
    if (q.tier == OracleTier::FullyNumeric) {
        const QuadratureConfig inner = inner_config(q);
        double err = 0.0;
        auto fs = [&](double t) { return std::exp(a * (std::cos(t) - 1.0)) * std::sin(t); };
        auto fc = [&](double t) { return std::exp(a * (std::cos(t) - 1.0)) * std::sin(t) * std::cos(t); };
        s_out = two_pi * integrate_panels(fs, angular_panels(a, 0.0), inner, err, "spinor angular integral");
        c_out = two_pi * integrate_panels(fc, angular_panels(a, 0.0), inner, err, "spinor angular integral");
        return;
    }
    if (a == 0.0) {
        s_out = 4.0 * pi;
        c_out = 0.0;
        return;
    }
    s_out = -two_pi * std::expm1(-2.0 * a) / a;
    if (a >= 0.5) {
        c_out = two_pi * ((1.0 + std::exp(-2.0 * a)) + std::expm1(-2.0 * a) / a) / a;
    } else {
        // cosh(a) - sinh(a)/a = sum_j 2j a^{2j} / (2j+1)!
        double term = a / 3.0;
        double sum = term;
        for (int j = 2; j < 30; ++j) {
            term *= a * a * j / ((j - 1.0) * (2.0 * j) * (2.0 * j + 1.0));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        c_out = 4.0 * pi * std::exp(-a) * sum;
    }
}

double gaussian_factor(double k, const WavepacketSpec& wp) {
    const double d = (k - wp.k0) / wp.sigma;
    return std::exp(-0.5 * d * d);
}

double amplitude_prefactor(int n, double sigma) {
    return std::pow(pi * sigma * sigma, -0.25 * n) * std::pow(two_pi, -0.5 * n);
}

void check_T(const SwitchingSpec& sw) {
    if (!(sw.T > 0.0) || !std::isfinite(sw.T)) throw std::invalid_argument("switching time T must be positive");
}

// Real scalar amplitude with window(Omega - sign * w): sign = +1 co-rotating, -1 counter-rotating.
double real_scalar_amplitude(int n, const DetectorSpec& det, const WavepacketSpec& wp, double T, int sign,
                             const QuadratureConfig& q, double& err) {
    const double centre = sign * det.omega;
    const auto pts = radial_panels(wp, centre, T, q.radial_cutoff_multiplier, true);
    if (pts.empty()) return 0.0;
    const double inv_s2 = 1.0 / (wp.sigma * wp.sigma);
    auto f = [&](double k) {
        const double w = dispersion(k, wp.m);
        const double ang = angular_scaled(n, k * wp.k0 * inv_s2, q);
        return std::pow(k, n - 1) * gaussian_factor(k, wp) * ang * gaussian_window(det.omega - sign * w, T) /
               std::sqrt(2.0 * w);
    };
    return amplitude_prefactor(n, wp.sigma) * integrate_panels(f, pts, q, err, "real scalar amplitude");
}

double vector_amplitude(const DetectorSpec& det, const WavepacketSpec& wp, double T, int sign,
                        const QuadratureConfig& q, double& err) {
    const double centre = sign * det.omega;
    const auto pts = radial_panels(wp, centre, T, q.radial_cutoff_multiplier, true);
    if (pts.empty()) return 0.0;
    const double inv_s2 = 1.0 / (wp.sigma * wp.sigma);
    auto f = [&](double k) {
        const double ang = vector_angular(k * wp.k0 * inv_s2, det.theta, q);
        return k * k * gaussian_factor(k, wp) * ang * gaussian_window(det.omega - sign * k, T) * std::sqrt(0.5 * k);
    };
    return amplitude_prefactor(3, wp.sigma) * integrate_panels(f, pts, q, err, "vector amplitude");
}

struct SpinorIntegrals {
    double s = 0.0;  // against the upper (sinh) angular weight
    double c = 0.0;  // against the cos(theta) weight, times p/(w+m)
};

SpinorIntegrals fermion_integrals(const DetectorSpec& det, const WavepacketSpec& wp, double T, int sign,
                                  const QuadratureConfig& q, double& err) {
    const double centre = sign * det.omega;
    const auto pts = radial_panels(wp, centre, T, q.radial_cutoff_multiplier, true);
    if (pts.empty()) return {};
    const double inv_s2 = 1.0 / (wp.sigma * wp.sigma);
    auto common = [&](double p) {
        const double w = dispersion(p, wp.m);
        return p * p * gaussian_factor(p, wp) * gaussian_window(det.omega - sign * w, T) *
               std::sqrt((w + wp.m) / (2.0 * w));
    };
    auto fs = [&](double p) {
        double s = 0.0, c = 0.0;
        spinor_angular(p * wp.k0 * inv_s2, q, s, c);
        return common(p) * s;
    };
    auto fc = [&](double p) {
        double s = 0.0, c = 0.0;
        spinor_angular(p * wp.k0 * inv_s2, q, s, c);
        return common(p) * c * p / (dispersion(p, wp.m) + wp.m);
    };
    const double pre = amplitude_prefactor(3, wp.sigma);
    return {pre * integrate_panels(fs, pts, q, err, "fermion amplitude"),
            pre * integrate_panels(fc, pts, q, err, "fermion amplitude")};
}

// Integral over k of k^{n-1} window^2 weight(k, w), window centred at w = centre.
template <class Weight>
double vacuum_radial(const WavepacketSpec& wp, double centre, double T, const QuadratureConfig& q, double& err,
                     const Weight& weight, int n) {
    if (n == 1 && wp.m == 0.0)
        throw std::invalid_argument("vacuum term is infrared divergent for a massless field in one dimension");
    const auto pts = radial_panels(wp, centre, T, q.radial_cutoff_multiplier, false);
    if (pts.empty()) return 0.0;
    auto f = [&](double k) {
        const double w = dispersion(k, wp.m);
        const double win = gaussian_window(w - centre, T);
        return std::pow(k, n - 1) * win * win * weight(k, w);
    };
    return integrate_panels(f, pts, q, err, "vacuum term");
}

double fermion_spinor_imbalance(const DetectorSpec& det) {
    return std::norm(det.spinor[0]) + std::norm(det.spinor[1]) - std::norm(det.spinor[2]) -
           std::norm(det.spinor[3]);
}

double vacuum_unscaled(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp,
                       Transition transition, double T, const QuadratureConfig& q, double& err) {
    // excitation pairs the detector with window(Omega + w), deexcitation with window(w - Omega)
    const double centre = transition == Transition::Excitation ? -det.omega : det.omega;
    const int n = model.n;
    switch (model.kind) {
        case FieldKind::RealScalar:
        case FieldKind::ComplexScalar: {
            auto weight = [](double, double w) { return 0.5 / w; };
            return sphere_area(n) * std::pow(two_pi, -n) * vacuum_radial(wp, centre, T, q, err, weight, n);
        }
        case FieldKind::Vector: {
            // sum over polarizations of |eps.e_z|^2 = sin^2 theta; its solid-angle integral is 8 pi / 3
            auto weight = [](double k, double) { return 0.5 * k; };
            return (8.0 * pi / 3.0) * std::pow(two_pi, -3) * vacuum_radial(wp, centre, T, q, err, weight, 3);
        }
        case FieldKind::Fermion: {
            const double mass_term = (transition == Transition::Excitation ? 1.0 : -1.0) * wp.m *
                                     fermion_spinor_imbalance(det);
            auto weight = [&](double, double w) { return (w + mass_term) / (2.0 * w); };
            return 4.0 * pi * std::pow(two_pi, -3) * vacuum_radial(wp, centre, T, q, err, weight, 3);
        }
    }
    throw std::invalid_argument("unknown field model");
}

void finish_total(ProbabilityBreakdown& b) {
    if (b.statistics_sign == 0)
        b.total = b.vacuum + b.co_rotating + b.counter_rotating;
    else
        b.total = b.vacuum + b.co_rotating + b.statistics_sign * b.counter_rotating;
}

WavepacketSpec without_amplitudes(WavepacketSpec wp) {
    wp.alpha = {};
    wp.beta = {};
    return wp;
}

bool is_parallel(double theta) { return std::fabs(theta) <= angle_tolerance; }
bool is_perpendicular(double theta) { return std::fabs(theta - 0.5 * pi) <= angle_tolerance; }

}  // namespace

ProbabilityBreakdown finite_t_real_scalar(int n, const DetectorSpec& det, const WavepacketSpec& wp,
                                          const SwitchingSpec& sw, const QuadratureConfig& q) {
    const FieldModel model = FieldModel::real_scalar(n);
    validate(wp, model);
    validate(det, model);
    check_T(sw);
    ProbabilityBreakdown b;
    double err = 0.0;
    const double l2 = det.lambda * det.lambda;
    b.vacuum = l2 * vacuum_unscaled(model, det, wp, Transition::Excitation, sw.T, q, err);
    const double co = real_scalar_amplitude(n, det, wp, sw.T, +1, q, err);
    const double counter = real_scalar_amplitude(n, det, wp, sw.T, -1, q, err);
    b.co_rotating = l2 * co * co;
    b.counter_rotating = l2 * counter * counter;
    b.quadrature_error = err;
    finish_total(b);
    return b;
}

ProbabilityBreakdown finite_t_vector(const DetectorSpec& det, const WavepacketSpec& wp, const SwitchingSpec& sw,
                                     const QuadratureConfig& q) {
    const FieldModel model = FieldModel::vector();
    validate(wp, model);
    validate(det, model);
    check_T(sw);
    if (q.tier == OracleTier::AnalyticAngular && !is_parallel(det.theta) && !is_perpendicular(det.theta))
        throw std::invalid_argument("vector oracle with analytic angular integrals needs theta = 0 or pi/2");
    ProbabilityBreakdown b;
    double err = 0.0;
    const double coupling = det.lambda * det.lambda * det.delta * det.delta;
    b.vacuum = coupling * vacuum_unscaled(model, det, wp, Transition::Excitation, sw.T, q, err);
    // only polarization 1 has a component along the dipole
    const double weight = coupling * std::norm(wp.alpha[0]);
    if (weight > 0.0) {
        const double co = vector_amplitude(det, wp, sw.T, +1, q, err);
        const double counter = vector_amplitude(det, wp, sw.T, -1, q, err);
        b.co_rotating = weight * co * co;
        b.counter_rotating = weight * counter * counter;
    }
    b.quadrature_error = err;
    finish_total(b);
    return b;
}

ProbabilityBreakdown finite_t_fermion(const DetectorSpec& det, const WavepacketSpec& wp, const SwitchingSpec& sw,
                                      const QuadratureConfig& q) {
    const FieldModel model = FieldModel::fermion();
    validate(wp, model);
    validate(det, model);
    check_T(sw);
    ProbabilityBreakdown b;
    b.statistics_sign = -1;
    double err = 0.0;
    const double coupling = det.lambda * det.lambda * std::pow(det.delta, 3);
    b.vacuum = coupling * vacuum_unscaled(model, det, wp, Transition::Excitation, sw.T, q, err);

    const cplx a1 = std::conj(det.spinor[0]);
    const cplx a2 = std::conj(det.spinor[1]);
    const cplx b1 = std::conj(det.spinor[2]);
    const cplx b2 = std::conj(det.spinor[3]);
    if (std::norm(wp.beta[0]) + std::norm(wp.beta[1]) > 0.0) {
        const SpinorIntegrals g = fermion_integrals(det, wp, sw.T, +1, q, err);
        const cplx amp = wp.beta[0] * (b1 * g.s + a1 * g.c) + wp.beta[1] * (b2 * g.s - a2 * g.c);
        b.co_rotating = coupling * std::norm(amp);
    }
    if (std::norm(wp.alpha[0]) + std::norm(wp.alpha[1]) > 0.0) {
        const SpinorIntegrals f = fermion_integrals(det, wp, sw.T, -1, q, err);
        const cplx amp = wp.alpha[0] * (a1 * f.s + b1 * f.c) + wp.alpha[1] * (a2 * f.s - b2 * f.c);
        b.counter_rotating = coupling * std::norm(amp);
    }
    b.quadrature_error = err;
    finish_total(b);
    return b;
}

ProbabilityBreakdown finite_t_complex(int n, Statistics statistics, const DetectorSpec& det,
                                      const WavepacketSpec& wp, const SwitchingSpec& sw,
                                      const QuadratureConfig& q) {
    validate(wp, FieldModel::complex_scalar(n, statistics));
    const WavepacketSpec bare = without_amplitudes(wp);
    validate(det, FieldModel::real_scalar(n));
    check_T(sw);
    ProbabilityBreakdown b;
    b.statistics_sign = statistics == Statistics::Bose ? 1 : -1;
    double err = 0.0;
    const double l2 = det.lambda * det.lambda;
    b.vacuum = l2 * vacuum_unscaled(FieldModel::real_scalar(n), det, bare, Transition::Excitation, sw.T, q, err);
    const double beta2 = std::norm(wp.beta[0]);
    const double alpha2 = std::norm(wp.alpha[0]);
    if (beta2 > 0.0) {
        const double co = real_scalar_amplitude(n, det, bare, sw.T, +1, q, err);
        b.co_rotating = l2 * beta2 * co * co;
    }
    if (alpha2 > 0.0) {
        const double counter = real_scalar_amplitude(n, det, bare, sw.T, -1, q, err);
        b.counter_rotating = l2 * alpha2 * counter * counter;
    }
    b.quadrature_error = err;
    finish_total(b);
    return b;
}

ProbabilityBreakdown finite_t(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp,
                              const SwitchingSpec& sw, const QuadratureConfig& q) {
    switch (model.kind) {
        case FieldKind::RealScalar: return finite_t_real_scalar(model.n, det, wp, sw, q);
        case FieldKind::Vector: return finite_t_vector(det, wp, sw, q);
        case FieldKind::Fermion: return finite_t_fermion(det, wp, sw, q);
        case FieldKind::ComplexScalar: return finite_t_complex(model.n, model.statistics, det, wp, sw, q);
    }
    throw std::invalid_argument("unknown field model");
}

double vacuum_term(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp, Transition transition,
                   const SwitchingSpec& sw, const QuadratureConfig& q) {
    validate(det, model);
    check_T(sw);
    if (wp.n != model.n) throw std::invalid_argument("wavepacket dimension does not match the model");
    if (!(wp.m >= 0.0)) throw std::invalid_argument("mass must be non-negative");
    double err = 0.0;
    const double v = vacuum_unscaled(model, det, wp, transition, sw.T, q, err);
    double coupling = det.lambda * det.lambda;
    if (model.kind == FieldKind::Vector) coupling *= det.delta * det.delta;
    if (model.kind == FieldKind::Fermion) coupling *= std::pow(det.delta, 3);
    return coupling * v;
}

double delta_limit(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp) {
    validate(wp, model);
    validate(det, model);
    const double omega = det.omega;
    if (omega <= wp.m) return 0.0;
    const double kappa = k_of_omega(omega, wp.m);
    const double a = kappa * wp.k0 / (wp.sigma * wp.sigma);
    const double g = gaussian_factor(kappa, wp);
    // 2 pi delta(Omega - w) integrated against k^{n-1} dk gives 2 pi (Omega / kappa) kappa^{n-1}
    const QuadratureConfig analytic{};
    switch (model.kind) {
        case FieldKind::RealScalar:
        case FieldKind::ComplexScalar: {
            const int n = model.n;
            const double amp = amplitude_prefactor(n, wp.sigma) * two_pi * omega * std::pow(kappa, n - 2) * g *
                               angular_scaled(n, a, analytic) / std::sqrt(2.0 * omega);
            double p = det.lambda * det.lambda * amp * amp;
            if (model.kind == FieldKind::ComplexScalar) p *= std::norm(wp.beta[0]);
            return p;
        }
        case FieldKind::Vector: {
            if (!is_parallel(det.theta) && !is_perpendicular(det.theta))
                throw std::invalid_argument("vector delta limit needs theta = 0 or pi/2");
            const double amp = amplitude_prefactor(3, wp.sigma) * two_pi * omega * kappa * g *
                               vector_angular(a, det.theta, analytic) * std::sqrt(0.5 * kappa);
            return det.lambda * det.lambda * det.delta * det.delta * std::norm(wp.alpha[0]) * amp * amp;
        }
        case FieldKind::Fermion: {
            double s = 0.0, c = 0.0;
            spinor_angular(a, analytic, s, c);
            const double common = amplitude_prefactor(3, wp.sigma) * two_pi * omega * kappa * g *
                                  std::sqrt((omega + wp.m) / (2.0 * omega));
            const double gs = common * s;
            const double gc = common * c * kappa / (omega + wp.m);
            const cplx amp = wp.beta[0] * (std::conj(det.spinor[2]) * gs + std::conj(det.spinor[0]) * gc) +
                             wp.beta[1] * (std::conj(det.spinor[3]) * gs - std::conj(det.spinor[1]) * gc);
            return det.lambda * det.lambda * std::pow(det.delta, 3) * std::norm(amp);
        }
    }
    throw std::invalid_argument("unknown field model");
}

AdiabaticResult adiabatic_limit(const std::function<ProbabilityBreakdown(double)>& evaluate, double start_T,
                                double tol, int max_doublings) {
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("adiabatic_limit: tol must lie in (0, 1)");
    if (!(start_T > 0.0)) throw std::invalid_argument("adiabatic_limit: start_T must be positive");
    AdiabaticResult r;
    double T = start_T;
    ProbabilityBreakdown previous = evaluate(T);
    r.T_sequence.push_back(T);
    r.totals.push_back(previous.total);
    for (int i = 0; i < max_doublings; ++i) {
        T *= 2.0;
        ProbabilityBreakdown current = evaluate(T);
        r.T_sequence.push_back(T);
        r.totals.push_back(current.total);
        const double scale = std::fabs(current.total);
        const bool settled = std::fabs(current.total - previous.total) <= tol * scale;
        const bool transients_gone = current.vacuum + current.counter_rotating <= tol * scale;
        if (settled && transients_gone) {
            r.probability = current.total;
            r.last = current;
            r.richardson = (4.0 * current.total - previous.total) / 3.0;
            return r;
        }
        previous = current;
    }
    throw NonConvergenceError("adiabatic limit not reached after " + std::to_string(max_doublings) +
                              " doublings (last T = " + std::to_string(T) + ")");
}

double default_start_T(const WavepacketSpec& wp) {
    return 20.0 / wp.sigma * std::max(1.0, wp.k0 / wp.sigma);
}

double angular_integral_numeric(int n, double a, const QuadratureConfig& q) {
    if (n < 2 || n > 6) throw std::invalid_argument("angular_integral_numeric: n must lie in [2, 6]");
    a = std::fabs(a);
    return std::exp(a) * angular_scaled_numeric(n, a, q);
}

}  // namespace udw
