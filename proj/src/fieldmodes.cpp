#include "udw/fieldmodes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace udw {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

double norm2(const cplx& z) { return std::norm(z); }

void require_normalized(double sum, const std::string& what) {
    require(std::fabs(sum - 1.0) <= normalization_tolerance,
            what + " must have unit squared norm (got " + std::to_string(sum) + ")");
}

}  // namespace

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::RealScalar: return "real";
        case FieldKind::Vector: return "vector";
        case FieldKind::Fermion: return "fermion";
        case FieldKind::ComplexScalar: return "complex";
    }
    return "unknown";
}

std::string to_string(Statistics statistics) {
    return statistics == Statistics::Bose ? "bose" : "fermi";
}

FieldKind parse_field_kind(const std::string& name) {
    if (name == "real" || name == "real-scalar") return FieldKind::RealScalar;
    if (name == "vector") return FieldKind::Vector;
    if (name == "fermion") return FieldKind::Fermion;
    if (name == "complex" || name == "complex-scalar") return FieldKind::ComplexScalar;
    throw std::invalid_argument("unknown model '" + name + "'");
}

Statistics parse_statistics(const std::string& name) {
    if (name == "bose") return Statistics::Bose;
    if (name == "fermi" || name == "grassmann") return Statistics::Fermi;
    throw std::invalid_argument("unknown statistics '" + name + "'");
}

void validate(const WavepacketSpec& wp, const FieldModel& model) {
    require(wp.n >= 1, "spatial dimension must be >= 1");
    require(std::isfinite(wp.m) && wp.m >= 0.0, "mass must be finite and non-negative");
    require(std::isfinite(wp.k0) && wp.k0 > 0.0, "k0 must be positive");
    require(std::isfinite(wp.sigma) && wp.sigma > 0.0, "sigma must be positive");
    require(wp.n == model.n, "wavepacket dimension does not match the model");

    const auto& a = wp.alpha;
    const auto& b = wp.beta;
    switch (model.kind) {
        case FieldKind::RealScalar:
            require(norm2(a[0]) + norm2(a[1]) + norm2(b[0]) + norm2(b[1]) == 0.0,
                    "real scalar wavepackets carry no amplitudes");
            break;
        case FieldKind::Vector:
            require(wp.n == 3, "vector model is 3+1 dimensional");
            require(wp.m == 0.0, "vector model is massless");
            require(norm2(b[0]) + norm2(b[1]) == 0.0, "vector wavepackets use alpha only");
            require_normalized(norm2(a[0]) + norm2(a[1]), "polarization amplitudes");
            break;
        case FieldKind::Fermion:
            require(wp.n == 3, "fermion model is 3+1 dimensional");
            require_normalized(norm2(a[0]) + norm2(a[1]) + norm2(b[0]) + norm2(b[1]),
                               "particle/anti-particle amplitudes");
            break;
        case FieldKind::ComplexScalar:
            require(norm2(a[1]) + norm2(b[1]) == 0.0, "complex scalar uses alpha[0] and beta[0] only");
            require_normalized(norm2(a[0]) + norm2(b[0]), "particle/anti-particle amplitudes");
            break;
    }
}

void validate(const DetectorSpec& det, const FieldModel& model) {
    require(std::isfinite(det.omega), "gap must be finite");
    require(std::isfinite(det.lambda), "coupling must be finite");
    if (model.kind == FieldKind::Vector || model.kind == FieldKind::Fermion)
        require(std::isfinite(det.delta) && det.delta > 0.0, "delta must be positive");
    if (model.kind == FieldKind::Vector) require(std::isfinite(det.theta), "theta must be finite");
    if (model.kind == FieldKind::Fermion) {
        double sum = 0.0;
        for (const auto& c : det.spinor) sum += norm2(c);
        require_normalized(sum, "detector spinor");
    }
}

double dispersion(double k, double m) {
    require(k >= 0.0 && m >= 0.0, "dispersion: k and m must be non-negative");
    if (m == 0.0) return k;
    return std::hypot(k, m);
}

double log_gaussian_spectrum(double k, const WavepacketSpec& wp) {
    const double s2 = wp.sigma * wp.sigma;
    return -0.25 * wp.n * std::log(std::numbers::pi * s2) - (k * k + wp.k0 * wp.k0) / (2.0 * s2);
}

double gaussian_spectrum(double k, const WavepacketSpec& wp) {
    return std::exp(log_gaussian_spectrum(k, wp));
}

double gaussian_profile(const Vec3& k, const WavepacketSpec& wp) {
    const double s2 = wp.sigma * wp.sigma;
    const double dz = k[2] - wp.k0;
    const double d2 = k[0] * k[0] + k[1] * k[1] + dz * dz;
    return std::pow(std::numbers::pi * s2, -0.75) * std::exp(-d2 / (2.0 * s2));
}

namespace {

struct SpinorParts {
    double norm;
    cplx pz, plus, minus;  // each divided by (w + m)
};

SpinorParts spinor_parts(const Vec3& p, int s, double m) {
    require(s == 1 || s == 2, "spin index must be 1 or 2");
    require(m >= 0.0, "mass must be non-negative");
    const double pp = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    const double w = dispersion(pp, m);
    require(w > 0.0, "massless spinor at zero momentum is undefined");
    const double wm = w + m;
    const double norm = std::pow(2.0 * std::numbers::pi, -1.5) * std::sqrt(wm / (2.0 * w));
    return {norm, cplx(p[2] / wm), cplx(p[0], p[1]) / wm, cplx(p[0], -p[1]) / wm};
}

}  // namespace

Spinor4 spinor_mode_u(const Vec3& p, int s, double m) {
    const auto q = spinor_parts(p, s, m);
    if (s == 1) return {cplx(q.norm), cplx(0.0), q.norm * q.pz, q.norm * q.plus};
    return {cplx(0.0), cplx(q.norm), q.norm * q.minus, -q.norm * q.pz};
}

Spinor4 spinor_mode_v(const Vec3& p, int s, double m) {
    const auto q = spinor_parts(p, s, m);
    if (s == 1) return {q.norm * q.pz, q.norm * q.plus, cplx(q.norm), cplx(0.0)};
    return {q.norm * q.minus, -q.norm * q.pz, cplx(0.0), cplx(q.norm)};
}

PolarizationPair polarization_basis(const Vec3& k) {
    const double rho = std::hypot(k[0], k[1]);
    require(rho > 0.0 || k[2] != 0.0, "polarization_basis: zero momentum");
    const double theta = std::atan2(rho, k[2]);
    const double phi = std::atan2(k[1], k[0]);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    return {{ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

}  // namespace udw
