#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "udw/fieldmodes.hpp"

namespace udw {

struct ProbabilityBreakdown {
    double vacuum = 0.0;
    double co_rotating = 0.0;       // anti-particle / G sector
    double counter_rotating = 0.0;  // particle / F sector, magnitude
    int statistics_sign = 0;        // +1, -1, or 0 when the sign does not apply
    double total = 0.0;
    double quadrature_error = 0.0;  // summed absolute error estimate of the radial integrals
};

struct SwitchingSpec {
    double T = 1.0;
};

enum class OracleTier {
    AnalyticAngular,  // angular integrals in closed form, radial integral numeric
    FullyNumeric,     // angular integrals by quadrature as well
};

struct QuadratureConfig {
    // Integration ranges extend this many widths beyond the Gaussian spectrum (in sigma)
    // and the switching window (in 1/T); the integrands there are below e^{-c^2/4}.
    double radial_cutoff_multiplier = 20.0;
    double relative_tolerance = 1e-9;
    unsigned max_depth = 18;  // bisection depth per panel
    OracleTier tier = OracleTier::AnalyticAngular;
};

enum class Transition { Excitation, Deexcitation };

class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite-time response with Gaussian switching exp(-t^2/T^2). The adiabatic
// delta functions 2 pi delta(Omega +- w) are replaced by gaussian_window(Omega +- w, T).
ProbabilityBreakdown finite_t_real_scalar(int n, const DetectorSpec& det, const WavepacketSpec& wp,
                                          const SwitchingSpec& sw, const QuadratureConfig& q = {});
ProbabilityBreakdown finite_t_vector(const DetectorSpec& det, const WavepacketSpec& wp, const SwitchingSpec& sw,
                                     const QuadratureConfig& q = {});
ProbabilityBreakdown finite_t_fermion(const DetectorSpec& det, const WavepacketSpec& wp, const SwitchingSpec& sw,
                                      const QuadratureConfig& q = {});
ProbabilityBreakdown finite_t_complex(int n, Statistics statistics, const DetectorSpec& det,
                                      const WavepacketSpec& wp, const SwitchingSpec& sw,
                                      const QuadratureConfig& q = {});
ProbabilityBreakdown finite_t(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp,
                              const SwitchingSpec& sw, const QuadratureConfig& q = {});

// Vacuum contribution alone. Deexcitation starts from the excited level with gap
// det.omega. Only wp.n and wp.m are used.
double vacuum_term(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp, Transition transition,
                   const SwitchingSpec& sw, const QuadratureConfig& q = {});

// Co-rotating term with the window replaced by 2 pi delta(Omega - w) and the
// radial integral done analytically.
double delta_limit(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp);

struct AdiabaticResult {
    double probability = 0.0;
    ProbabilityBreakdown last;
    std::vector<double> T_sequence;
    std::vector<double> totals;
    double richardson = 0.0;  // (4 p(2T) - p(T)) / 3 from the last two totals
};

// Doubles T from start_T until successive totals differ by less than tol (relative)
// and vacuum + counter-rotating < tol * total. Throws NonConvergenceError when the
// doubling budget runs out.
AdiabaticResult adiabatic_limit(const std::function<ProbabilityBreakdown(double)>& evaluate, double start_T,
                                double tol, int max_doublings = 12);

// 20/sigma * max(1, k0/sigma)
double default_start_T(const WavepacketSpec& wp);

// Brute-force quadrature of the integral of e^{a cos(theta)} over S^{n-1}, n in [2, 6].
double angular_integral_numeric(int n, double a, const QuadratureConfig& q = {});

}  // namespace udw
