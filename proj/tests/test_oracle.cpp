#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_support.hpp"
#include "udw/detectors.hpp"
#include "udw/oracle.hpp"

using namespace udw;
using testsupport::rel;

namespace {

constexpr double pi = std::numbers::pi;

WavepacketSpec packet(int n, double m, double k0, double sigma) {
    WavepacketSpec wp;
    wp.n = n;
    wp.m = m;
    wp.k0 = k0;
    wp.sigma = sigma;
    return wp;
}

DetectorSpec gap(double omega) {
    DetectorSpec det;
    det.omega = omega;
    return det;
}

AdiabaticResult converge(const FieldModel& model, const DetectorSpec& det, const WavepacketSpec& wp,
                         double tol = 1e-3, const QuadratureConfig& q = {}) {
    return adiabatic_limit([&](double T) { return finite_t(model, det, wp, SwitchingSpec{T}, q); },
                           default_start_T(wp), tol);
}

}  // namespace

TEST_CASE("numeric angular integral") {
    CHECK(angular_integral_numeric(3, 0.0) == doctest::Approx(4.0 * pi).epsilon(1e-10));
    CHECK(angular_integral_numeric(3, 2.0) == doctest::Approx(4.0 * pi * std::sinh(2.0) / 2.0).epsilon(1e-8));
    CHECK(rel(angular_integral_numeric(5, 10.0), angular_exp_integral(5, 10.0).value()) < 1e-8);
    for (int n = 2; n <= 6; ++n)
        for (double a : {0.0, 0.5, 3.0, 20.0, 50.0}) {
            CAPTURE(n);
            CAPTURE(a);
            CHECK(rel(angular_integral_numeric(n, a), angular_exp_integral(n, a).value()) < 1e-8);
        }
    CHECK_THROWS_AS(angular_integral_numeric(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(angular_integral_numeric(7, 1.0), std::invalid_argument);
}

TEST_CASE("real scalar oracle converges to the closed form") {
    const auto wp = packet(3, 0.0, 1.0, 0.5);
    const auto r = converge(FieldModel::real_scalar(3), gap(1.0), wp);
    const double closed = prob_real_scalar_3d(gap(1.0), wp).value();
    CHECK(rel(r.probability, closed) < 1e-3);
    CHECK(r.last.vacuum < 1e-3 * r.last.co_rotating);
    CHECK(r.last.counter_rotating < 1e-3 * r.last.co_rotating);

    // the gap to the closed form shrinks with every doubling after the first
    for (std::size_t i = 1; i < r.totals.size(); ++i) {
        const double gap_prev = std::fabs(r.totals[i - 1] - closed), gap_now = std::fabs(r.totals[i] - closed);
        MESSAGE("T = " << r.T_sequence[i] << ": |oracle - closed| = " << gap_now);
        if (i >= 2) CHECK(gap_now <= gap_prev);
    }
}

TEST_CASE("real scalar oracle in other dimensions") {
    for (int n : {2, 4, 5}) {
        CAPTURE(n);
        const auto wp = packet(n, 0.3, 1.0, 0.4);
        const auto r = converge(FieldModel::real_scalar(n), gap(1.1), wp);
        CHECK(rel(r.probability, prob_real_scalar(n, gap(1.1), wp).value()) < 1e-3);
    }
}

TEST_CASE("transients vanish and stay below the vacuum term") {
    const auto wp = packet(3, 0.0, 1.0, 0.5);
    for (double T : {0.5, 1.0, 2.0, 5.0, 20.0, 80.0, 160.0}) {
        const auto b = finite_t_real_scalar(3, gap(1.0), wp, SwitchingSpec{T});
        CAPTURE(T);
        CHECK(b.counter_rotating <= b.vacuum);
        CHECK(b.total >= 0.0);
    }
    const auto late = finite_t_real_scalar(3, gap(1.0), wp, SwitchingSpec{2560.0});
    CHECK(late.vacuum < 1e-6 * late.co_rotating);
    CHECK(late.counter_rotating < 1e-6 * late.co_rotating);
}

TEST_CASE("delta limit equals the closed forms") {
    for (int n = 1; n <= 5; ++n) {
        const auto wp = packet(n, 0.3, 1.0, 0.4);
        CAPTURE(n);
        CHECK(rel(delta_limit(FieldModel::real_scalar(n), gap(1.1), wp), prob_real_scalar(n, gap(1.1), wp).value()) <
              1e-12);
    }
    WavepacketSpec v = packet(3, 0.0, 1.0, 0.3);
    v.alpha = {cplx(0.8), cplx(0.0, 0.6)};
    for (double theta : {0.0, pi / 2}) {
        DetectorSpec det = gap(0.9);
        det.theta = theta;
        CHECK(rel(delta_limit(FieldModel::vector(), det, v), prob_vector_general(det, v).value()) < 1e-12);
    }

    std::mt19937_64 rng(29);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        DetectorSpec det = gap(1.2);
        double ns = 0.0;
        for (auto& c : det.spinor) {
            c = cplx(N(rng), N(rng));
            ns += std::norm(c);
        }
        for (auto& c : det.spinor) c /= std::sqrt(ns);
        WavepacketSpec f = packet(3, 0.4, 1.0, 0.35);
        std::array<cplx, 4> amp;
        double na = 0.0;
        for (auto& c : amp) {
            c = cplx(N(rng), N(rng));
            na += std::norm(c);
        }
        for (auto& c : amp) c /= std::sqrt(na);
        f.alpha = {amp[0], amp[1]};
        f.beta = {amp[2], amp[3]};
        CHECK(rel(delta_limit(FieldModel::fermion(), det, f), prob_fermion(det, f).value()) < 1e-12);
    }

    WavepacketSpec c = packet(2, 0.2, 1.0, 0.4);
    c.alpha[0] = 0.6;
    c.beta[0] = 0.8;
    const auto model = FieldModel::complex_scalar(2, Statistics::Fermi);
    CHECK(rel(delta_limit(model, gap(1.0), c), prob_complex(2, Statistics::Fermi, gap(1.0), c).value()) < 1e-12);
}

TEST_CASE("vector oracle") {
    WavepacketSpec wp = packet(3, 0.0, 1.0, 0.3);
    wp.alpha[0] = 1.0;
    for (double theta : {0.0, pi / 2}) {
        DetectorSpec det = gap(1.1);
        det.theta = theta;
        CAPTURE(theta);
        const auto r = converge(FieldModel::vector(), det, wp);
        CHECK(rel(r.probability, prob_vector_general(det, wp).value()) < 1e-3);
    }

    WavepacketSpec off = wp;
    off.alpha = {cplx(0.0), cplx(1.0)};
    for (double T : {1.0, 10.0, 100.0}) {
        const auto b = finite_t_vector(gap(1.0), off, SwitchingSpec{T});
        CHECK(b.co_rotating == 0.0);
        CHECK(b.counter_rotating == 0.0);
    }

    DetectorSpec oblique = gap(1.0);
    oblique.theta = pi / 4;
    CHECK_THROWS_AS(finite_t_vector(oblique, wp, SwitchingSpec{10.0}), std::invalid_argument);
}

TEST_CASE("fully numeric angular integration agrees with the analytic tier") {
    QuadratureConfig numeric;
    numeric.tier = OracleTier::FullyNumeric;
    const SwitchingSpec sw{6.0};
    for (int n : {2, 3, 4}) {
        const auto wp = packet(n, 0.2, 1.0, 0.4);
        const auto a = finite_t_real_scalar(n, gap(1.0), wp, sw);
        const auto b = finite_t_real_scalar(n, gap(1.0), wp, sw, numeric);
        CAPTURE(n);
        CHECK(rel(b.co_rotating, a.co_rotating) < 1e-7);
        CHECK(rel(b.counter_rotating, a.counter_rotating) < 1e-7);
    }
    WavepacketSpec v = packet(3, 0.0, 1.0, 0.4);
    v.alpha[0] = 1.0;
    for (double theta : {0.0, pi / 2}) {
        DetectorSpec det = gap(1.0);
        det.theta = theta;
        const auto a = finite_t_vector(det, v, sw);
        const auto b = finite_t_vector(det, v, sw, numeric);
        CHECK(rel(b.co_rotating, a.co_rotating) < 1e-7);
        CHECK(rel(b.counter_rotating, a.counter_rotating) < 1e-7);
    }
    WavepacketSpec f = packet(3, 0.3, 1.0, 0.4);
    f.beta = {cplx(0.6), cplx(0.0)};
    f.alpha = {cplx(0.0), cplx(0.8)};
    DetectorSpec det = gap(1.0);
    det.spinor = {cplx(0.5), cplx(0.5), cplx(0.5), cplx(0.0, 0.5)};
    const auto a = finite_t_fermion(det, f, sw);
    const auto b = finite_t_fermion(det, f, sw, numeric);
    CHECK(rel(b.co_rotating, a.co_rotating) < 1e-7);
    CHECK(rel(b.counter_rotating, a.counter_rotating) < 1e-7);
}

TEST_CASE("numeric tier validates the general-angle vector closed form") {
    QuadratureConfig numeric;
    numeric.tier = OracleTier::FullyNumeric;
    WavepacketSpec wp = packet(3, 0.0, 1.0, 0.3);
    wp.alpha[0] = 1.0;
    for (double theta : {pi / 4, pi / 3}) {
        DetectorSpec det = gap(1.0);
        det.theta = theta;
        CAPTURE(theta);
        const auto r = converge(FieldModel::vector(), det, wp, 1e-3, numeric);
        CHECK(rel(r.probability, prob_vector_general(det, wp).value()) < 1e-3);
    }
}

TEST_CASE("fermion oracle") {
    WavepacketSpec wp = packet(3, 0.0, 1.0, 0.2);
    wp.beta[0] = 1.0;
    const auto r = converge(FieldModel::fermion(), gap(1.0), wp);
    CHECK(rel(r.probability, prob_fermion(gap(1.0), wp).value()) < 1e-3);

    WavepacketSpec massive = packet(3, 0.5, 1.0, 0.5);
    massive.beta = {cplx(0.6), cplx(0.0, 0.48)};
    massive.alpha = {cplx(0.64), cplx(0.0)};
    DetectorSpec det = gap(1.3);
    det.spinor = {cplx(0.5), cplx(0.0, 0.5), cplx(0.5), cplx(-0.5)};
    const auto rm = converge(FieldModel::fermion(), det, massive);
    CHECK(rel(rm.probability, prob_fermion(det, massive).value()) < 1e-3);

    WavepacketSpec particles = packet(3, 0.5, 1.0, 0.5);
    particles.alpha = {cplx(0.6), cplx(0.0, 0.8)};
    for (double T : {0.5, 2.0, 10.0, 50.0}) {
        const auto b = finite_t_fermion(det, particles, SwitchingSpec{T});
        CAPTURE(T);
        CHECK(b.co_rotating == 0.0);
        CHECK(b.statistics_sign == -1);
        CHECK(b.total == doctest::Approx(b.vacuum - b.counter_rotating));
        CHECK(b.total >= 0.0);
    }
}

TEST_CASE("fermion vacuum contraction matches the explicit spinor sum") {
    // angle-averaged sum_s |u_s^dagger L|^2 (excitation) and |v_s^dagger L|^2 (deexcitation);
    // the +-p pair cancels the term linear in p exactly
    const double m = 0.7, omega = 1.1, T = 3.0;
    DetectorSpec det = gap(omega);
    det.spinor = {cplx(0.6), cplx(0.0, 0.3), cplx(0.5), cplx(0.0, -std::sqrt(1.0 - 0.36 - 0.09 - 0.25))};
    auto spinor_sum = [&](double p, bool particle) {
        long double s = 0.0L;
        for (double sign : {1.0, -1.0})
            for (int spin : {1, 2}) {
                const Vec3 pv{0.0, 0.0, sign * p};
                const Spinor4 u = particle ? spinor_mode_u(pv, spin, m) : spinor_mode_v(pv, spin, m);
                cplx d = 0.0;
                for (int i = 0; i < 4; ++i) d += std::conj(u[i]) * det.spinor[i];
                s += std::norm(d);
            }
        return 0.5L * s;
    };
    for (auto transition : {Transition::Excitation, Transition::Deexcitation}) {
        const bool excite = transition == Transition::Excitation;
        const double centre = excite ? -omega : omega;
        auto integrand = [&](long double p) {
            const double w = std::sqrt(static_cast<double>(p * p) + m * m);
            const double win = gaussian_window(w - centre, T);
            return 4.0L * std::numbers::pi_v<long double> * p * p * win * win *
                   spinor_sum(static_cast<double>(p), excite);
        };
        const double ref = static_cast<double>(testsupport::simpson(integrand, 0.0L, 12.0L, 20000));
        const double got = vacuum_term(FieldModel::fermion(), det, packet(3, m, 1.0, 0.5), transition, SwitchingSpec{T});
        CAPTURE(excite);
        CHECK(rel(got, ref) < 1e-8);
    }
}

TEST_CASE("excitation and deexcitation vacuum terms") {
    const SwitchingSpec sw{2.0};
    const auto wp = packet(3, 0.4, 1.0, 0.5);
    for (double omega : {0.3, 1.0, 2.0}) {
        const double ex = vacuum_term(FieldModel::real_scalar(3), gap(omega), wp, Transition::Excitation, sw);
        const double de = vacuum_term(FieldModel::real_scalar(3), gap(-omega), wp, Transition::Deexcitation, sw);
        CHECK(rel(ex, de) < 1e-12);
    }
    DetectorSpec det = gap(1.0);
    det.spinor = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0)};
    const double ex = vacuum_term(FieldModel::fermion(), det, wp, Transition::Excitation, sw);
    det.omega = -1.0;
    const double de = vacuum_term(FieldModel::fermion(), det, wp, Transition::Deexcitation, sw);
    CHECK(rel(ex, de) > 1e-3);
}

TEST_CASE("complex scalar oracle") {
    const auto bare = packet(3, 0.2, 1.0, 0.4);
    for (auto st : {Statistics::Bose, Statistics::Fermi}) {
        WavepacketSpec wp = bare;
        wp.beta[0] = std::sqrt(0.3);
        wp.alpha[0] = std::sqrt(0.7);
        const auto model = FieldModel::complex_scalar(3, st);
        const auto r = converge(model, gap(1.1), wp);
        CHECK(rel(r.probability, prob_complex(3, st, gap(1.1), wp).value()) < 1e-3);
    }

    WavepacketSpec particles = bare;
    particles.alpha[0] = 1.0;
    for (double T : {0.5, 1.0, 3.0, 10.0}) {
        const SwitchingSpec sw{T};
        const auto fermi = finite_t_complex(3, Statistics::Fermi, gap(1.1), particles, sw);
        const auto bose = finite_t_complex(3, Statistics::Bose, gap(1.1), particles, sw);
        CAPTURE(T);
        CHECK(fermi.total == doctest::Approx(fermi.vacuum - fermi.counter_rotating));
        CHECK(fermi.total >= 0.0);
        CHECK(fermi.total < bose.total);
    }

    WavepacketSpec anti = bare;
    anti.beta[0] = 1.0;
    for (double T : {1.0, 10.0}) {
        const SwitchingSpec sw{T};
        const auto fermi = finite_t_complex(3, Statistics::Fermi, gap(1.1), anti, sw);
        const auto bose = finite_t_complex(3, Statistics::Bose, gap(1.1), anti, sw);
        const auto real = finite_t_real_scalar(3, gap(1.1), bare, sw);
        CHECK(fermi.total == bose.total);
        CHECK(fermi.vacuum == real.vacuum);
        CHECK(fermi.co_rotating == real.co_rotating);
        // no particle content, so nothing enters with the statistics sign
        CHECK(fermi.counter_rotating == 0.0);
    }
}

TEST_CASE("adiabatic limit edge cases") {
    const auto wp = packet(3, 1.0, 1.0, 0.5);
    const auto r = converge(FieldModel::real_scalar(3), gap(0.6), wp);
    CHECK(r.probability == doctest::Approx(0.0).epsilon(1e-15));

    auto slow = [](double T) {
        ProbabilityBreakdown b;
        b.co_rotating = 1.0 + 1.0 / T;
        b.total = b.co_rotating;
        return b;
    };
    CHECK_THROWS_AS(adiabatic_limit(slow, 1.0, 1e-12, 3), NonConvergenceError);
    const auto ok = adiabatic_limit(slow, 1.0, 1e-2, 12);
    CHECK(ok.probability == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(ok.T_sequence.size() == ok.totals.size());
    CHECK(ok.richardson == doctest::Approx((4.0 * ok.totals.back() - ok.totals[ok.totals.size() - 2]) / 3.0));
    CHECK_THROWS_AS(adiabatic_limit(slow, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(adiabatic_limit(slow, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(adiabatic_limit(slow, -1.0, 1e-3), std::invalid_argument);
}

TEST_CASE("quadrature failures are reported") {
    QuadratureConfig strict;
    strict.max_depth = 0;
    strict.relative_tolerance = 1e-15;
    const auto wp = packet(3, 0.0, 1.0, 0.05);
    CHECK_THROWS_AS(finite_t_real_scalar(3, gap(1.0), wp, SwitchingSpec{5.0}, strict), NonConvergenceError);
    CHECK_THROWS_AS(finite_t_real_scalar(3, gap(1.0), wp, SwitchingSpec{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(vacuum_term(FieldModel::real_scalar(1), gap(1.0), packet(1, 0.0, 1.0, 0.5),
                                Transition::Excitation, SwitchingSpec{1.0}),
                    std::invalid_argument);
}
