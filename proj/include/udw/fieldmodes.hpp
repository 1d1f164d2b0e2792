#pragma once

#include <array>
#include <complex>
#include <string>

namespace udw {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

enum class FieldKind { RealScalar, Vector, Fermion, ComplexScalar };
enum class Statistics { Bose, Fermi };

struct FieldModel {
    FieldKind kind = FieldKind::RealScalar;
    int n = 3;  // spatial dimension; forced to 3 for Vector and Fermion
    Statistics statistics = Statistics::Bose;  // ComplexScalar only

    static FieldModel real_scalar(int n = 3) { return {FieldKind::RealScalar, n, Statistics::Bose}; }
    static FieldModel vector() { return {FieldKind::Vector, 3, Statistics::Bose}; }
    static FieldModel fermion() { return {FieldKind::Fermion, 3, Statistics::Fermi}; }
    static FieldModel complex_scalar(int n, Statistics s) { return {FieldKind::ComplexScalar, n, s}; }
};

std::string to_string(FieldKind kind);
std::string to_string(Statistics statistics);
FieldKind parse_field_kind(const std::string& name);
Statistics parse_statistics(const std::string& name);

// Gaussian one-particle state centred on k0 * e_z.
// Amplitude usage by model:
//   real scalar     none
//   vector          alpha[0], alpha[1]           (polarizations 1, 2)
//   fermion         alpha[0..1], beta[0..1]      (particle / anti-particle spin components)
//   complex scalar  alpha[0], beta[0]            (particle / anti-particle)
struct WavepacketSpec {
    int n = 3;
    double m = 0.0;
    double k0 = 1.0;
    double sigma = 0.5;
    std::array<cplx, 2> alpha{};
    std::array<cplx, 2> beta{};
};

// Spinor components (A1, A2, B1, B2) in the Dirac basis.
using Spinor4 = std::array<cplx, 4>;

struct DetectorSpec {
    double omega = 1.0;   // gap, negative values allowed
    double lambda = 1.0;
    double delta = 1.0;   // length scale of the vector / fermion smearing
    double theta = 0.0;   // angle between the dipole and k0 (vector)
    Spinor4 spinor{cplx(0.0), cplx(0.0), cplx(1.0), cplx(0.0)};
};

inline constexpr double normalization_tolerance = 1e-12;

// Throw std::invalid_argument on violated preconditions.
void validate(const WavepacketSpec& wp, const FieldModel& model);
void validate(const DetectorSpec& det, const FieldModel& model);

double dispersion(double k, double m);

// (pi sigma^2)^{-n/4} exp(-(k^2 + k0^2) / (2 sigma^2)); the angular factor
// exp(k k0 cos(theta) / sigma^2) is left to the caller.
double gaussian_spectrum(double k, const WavepacketSpec& wp);
double log_gaussian_spectrum(double k, const WavepacketSpec& wp);

// Full profile (pi sigma^2)^{-n/4} exp(-|k - k0 e_z|^2 / (2 sigma^2)) in three dimensions.
double gaussian_profile(const Vec3& k, const WavepacketSpec& wp);

// Dirac-basis plane-wave spinors with the (2 pi)^{-3/2} sqrt((w+m)/(2w)) prefactor;
// the e^{+-i p.x} phase is left out.
Spinor4 spinor_mode_u(const Vec3& p, int s, double m);
Spinor4 spinor_mode_v(const Vec3& p, int s, double m);

struct PolarizationPair {
    Vec3 first;
    Vec3 second;
};

// Transverse pair parametrised by the polar angles of k about e_z.
PolarizationPair polarization_basis(const Vec3& k);

}  // namespace udw
