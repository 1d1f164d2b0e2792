#pragma once

#include "udw/fieldmodes.hpp"
#include "udw/specfun.hpp"

namespace udw {

// Adiabatic (T -> infinity) excitation probability of an inertial pointlike detector.
struct ClosedFormResult {
    LogValue probability;
    bool gated = false;           // Theta(Omega - m) set the result to zero
    double resonance_omega = 0.0; // sqrt(k0^2 + m^2)
    bool underflow = false;       // probability nonzero but exp() underflows in double

    double value() const { return probability.value(); }
};

ClosedFormResult prob_real_scalar(int n, const DetectorSpec& det, const WavepacketSpec& wp);
ClosedFormResult prob_real_scalar_3d(const DetectorSpec& det, const WavepacketSpec& wp);
ClosedFormResult prob_real_scalar_peak(const DetectorSpec& det, const WavepacketSpec& wp);

// Vector model: massless field, dipole of length delta along e_z, k0 at angle det.theta.
ClosedFormResult prob_vector_general(const DetectorSpec& det, const WavepacketSpec& wp);
ClosedFormResult prob_vector_parallel(const DetectorSpec& det, const WavepacketSpec& wp);
ClosedFormResult prob_vector_perp(const DetectorSpec& det, const WavepacketSpec& wp);

// Overlap between the detector spinor and the anti-particle amplitudes.
cplx gamma_plus(const Spinor4& spinor, const std::array<cplx, 2>& beta, double omega, double m,
                double k0, double sigma);
cplx gamma_plus(const DetectorSpec& det, const WavepacketSpec& wp);

ClosedFormResult prob_fermion(const DetectorSpec& det, const WavepacketSpec& wp);

// |beta|^2 times the real scalar result; statistics does not enter the adiabatic limit.
ClosedFormResult prob_complex(int n, Statistics statistics, const DetectorSpec& det, const WavepacketSpec& wp);

// Dispatch on the model (vector uses prob_vector_general).
ClosedFormResult closed_form(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp);

}  // namespace udw
