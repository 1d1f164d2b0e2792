#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_support.hpp"
#include "udw/fieldmodes.hpp"

using namespace udw;

namespace {

constexpr double pi = std::numbers::pi;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

Mat4 zero4() {
    Mat4 m{};
    for (auto& r : m) r.fill(cplx(0.0));
    return m;
}

// Dirac basis: gamma0 = diag(1, 1, -1, -1), gamma^i = [[0, s_i], [-s_i, 0]]
std::array<Mat4, 4> dirac_gammas() {
    const cplx I(0.0, 1.0);
    const std::array<std::array<std::array<cplx, 2>, 2>, 3> pauli = {{
        {{{0.0, 1.0}, {1.0, 0.0}}},
        {{{0.0, -I}, {I, 0.0}}},
        {{{1.0, 0.0}, {0.0, -1.0}}},
    }};
    std::array<Mat4, 4> g;
    g[0] = zero4();
    g[0][0][0] = g[0][1][1] = 1.0;
    g[0][2][2] = g[0][3][3] = -1.0;
    for (int i = 0; i < 3; ++i) {
        g[i + 1] = zero4();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                g[i + 1][a][b + 2] = pauli[i][a][b];
                g[i + 1][a + 2][b] = -pauli[i][a][b];
            }
    }
    return g;
}

cplx inner(const Spinor4& a, const Spinor4& b) {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// sum_s psi_s bar(psi_s) with bar(psi) = psi^dagger gamma0
Mat4 spin_sum(const Spinor4& a, const Spinor4& b) {
    const double g0[4] = {1, 1, -1, -1};
    Mat4 m = zero4();
    for (const auto* s : {&a, &b})
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] += (*s)[i] * std::conj((*s)[j]) * g0[j];
    return m;
}

// (p-slash + sign * m) / (2 w (2 pi)^3)
Mat4 projector(const Vec3& p, double m, double sign) {
    const auto g = dirac_gammas();
    const double w = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m);
    Mat4 r = zero4();
    const double scale = 1.0 / (2.0 * w * std::pow(2.0 * pi, 3));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            cplx v = w * g[0][i][j];
            for (int k = 0; k < 3; ++k) v -= p[k] * g[k + 1][i][j];
            if (i == j) v += sign * m;
            r[i][j] = v * scale;
        }
    }
    return r;
}

double max_diff(const Mat4& a, const Mat4& b) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

}  // namespace

TEST_CASE("dispersion") {
    CHECK(dispersion(0.7, 0.0) == 0.7);
    CHECK(dispersion(3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(dispersion(0.0, 2.0) == 2.0);
    double prev = 0.0;
    for (double k = 0.0; k < 5.0; k += 0.25) {
        const double w = dispersion(k, 0.3);
        CHECK(w > prev);
        CHECK(dispersion(k, 0.4) > w);
        prev = w;
    }
    CHECK_THROWS_AS(dispersion(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("model names round trip") {
    for (auto k : {FieldKind::RealScalar, FieldKind::Vector, FieldKind::Fermion, FieldKind::ComplexScalar})
        CHECK(parse_field_kind(to_string(k)) == k);
    CHECK(parse_statistics("grassmann") == Statistics::Fermi);
    CHECK(parse_statistics(to_string(Statistics::Bose)) == Statistics::Bose);
    CHECK_THROWS_AS(parse_field_kind("tensor"), std::invalid_argument);
    CHECK_THROWS_AS(parse_statistics("boltzmann"), std::invalid_argument);
}

TEST_CASE("gaussian spectrum peak value") {
    for (int n : {1, 2, 3, 5}) {
        WavepacketSpec wp;
        wp.n = n;
        wp.k0 = 1.3;
        wp.sigma = 0.4;
        // with the aligned angular factor e^{k k0 / sigma^2} the exponent vanishes at k = k0
        const double aligned = gaussian_spectrum(wp.k0, wp) * std::exp(wp.k0 * wp.k0 / (wp.sigma * wp.sigma));
        CHECK(aligned == doctest::Approx(std::pow(pi * wp.sigma * wp.sigma, -0.25 * n)).epsilon(1e-13));
        CHECK(log_gaussian_spectrum(2.0, wp) == doctest::Approx(std::log(gaussian_spectrum(2.0, wp))).epsilon(1e-14));
    }
}

TEST_CASE("gaussian spectrum is normalized") {
    auto norm_sq = [](const WavepacketSpec& wp) {
        const double s2 = wp.sigma * wp.sigma;
        auto radial = [&](long double k) -> long double {
            if (k == 0.0L) return 0.0L;
            const long double f = gaussian_spectrum(static_cast<double>(k), wp);
            const long double a = 2.0L * k * wp.k0 / s2;
            // |f|^2 carries e^{2 k k0 cos / sigma^2}; integrate the angles numerically
            const long double ang = testsupport::sphere_exp_integral_ld(wp.n, a, 2000);
            return std::pow(k, wp.n - 1) * f * f * ang;
        };
        const long double hi = wp.k0 + 12.0L * wp.sigma;
        return static_cast<double>(testsupport::simpson(radial, 0.0L, hi, 4000));
    };
    WavepacketSpec a;
    a.n = 3;
    a.k0 = 1.0;
    a.sigma = 0.2;
    CHECK(norm_sq(a) == doctest::Approx(1.0).epsilon(1e-9));
    WavepacketSpec b;
    b.n = 2;
    b.k0 = 1.0;
    b.sigma = 1.0;
    CHECK(norm_sq(b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian profile matches the radial spectrum") {
    WavepacketSpec wp;
    wp.k0 = 0.8;
    wp.sigma = 0.3;
    const Vec3 k{0.2, -0.1, 0.7};
    const double kk = std::sqrt(0.04 + 0.01 + 0.49);
    const double expected = gaussian_spectrum(kk, wp) * std::exp(kk * wp.k0 * (0.7 / kk) / (wp.sigma * wp.sigma));
    CHECK(gaussian_profile(k, wp) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("spinor normalization and rest frame") {
    const double c = std::pow(2.0 * pi, -3.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 p{U(rng), U(rng), U(rng)};
        const double m = std::fabs(U(rng));
        for (int s : {1, 2}) {
            CHECK(inner(spinor_mode_u(p, s, m), spinor_mode_u(p, s, m)).real() == doctest::Approx(c).epsilon(1e-13));
            CHECK(inner(spinor_mode_v(p, s, m), spinor_mode_v(p, s, m)).real() == doctest::Approx(c).epsilon(1e-13));
        }
    }
    const Spinor4 rest = spinor_mode_u({0.0, 0.0, 0.0}, 1, 1.0);
    CHECK(rest[0].real() == doctest::Approx(std::pow(2.0 * pi, -1.5)).epsilon(1e-15));
    CHECK(std::abs(rest[1]) == 0.0);
    CHECK(std::abs(rest[2]) == 0.0);
    CHECK(std::abs(rest[3]) == 0.0);

    const Vec3 pz{0.0, 0.0, 1.7};
    CHECK(std::abs(inner(spinor_mode_u(pz, 1, 0.5), spinor_mode_u(pz, 2, 0.5))) < 1e-16);

    CHECK_THROWS_AS(spinor_mode_u(pz, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(spinor_mode_v(pz, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(spinor_mode_u({0.0, 0.0, 0.0}, 1, 0.0), std::invalid_argument);
}

TEST_CASE("spinor completeness") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 p{U(rng), U(rng), U(rng)};
        const double m = std::fabs(U(rng));
        const Mat4 uu = spin_sum(spinor_mode_u(p, 1, m), spinor_mode_u(p, 2, m));
        const Mat4 vv = spin_sum(spinor_mode_v(p, 1, m), spinor_mode_v(p, 2, m));
        CHECK(max_diff(uu, projector(p, m, +1.0)) < 1e-12);
        CHECK(max_diff(vv, projector(p, m, -1.0)) < 1e-12);
    }
}

TEST_CASE("polarization basis") {
    const auto pole = polarization_basis({0.0, 0.0, 2.0});
    CHECK(pole.first[0] == doctest::Approx(1.0));
    CHECK(std::fabs(pole.first[1]) < 1e-15);
    CHECK(std::fabs(pole.first[2]) < 1e-15);
    CHECK(std::fabs(pole.second[0]) < 1e-15);
    CHECK(pole.second[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(polarization_basis({0.0, 0.0, 0.0}), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec3 k{N(rng), N(rng), N(rng)};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const auto e = polarization_basis(k);
        double d1 = 0.0, d2 = 0.0, d12 = 0.0, n1 = 0.0, n2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            d1 += k[i] * e.first[i];
            d2 += k[i] * e.second[i];
            d12 += e.first[i] * e.second[i];
            n1 += e.first[i] * e.first[i];
            n2 += e.second[i] * e.second[i];
        }
        CHECK(std::fabs(d1) < 1e-12 * std::sqrt(k2));
        CHECK(std::fabs(d2) < 1e-12 * std::sqrt(k2));
        CHECK(std::fabs(d12) < 1e-14);
        CHECK(n1 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double sum = e.first[i] * e.first[j] + e.second[i] * e.second[j];
                const double ref = (i == j ? 1.0 : 0.0) - k[i] * k[j] / k2;
                worst = std::max(worst, std::fabs(sum - ref));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("wavepacket and detector validation") {
    WavepacketSpec wp;
    CHECK_NOTHROW(validate(wp, FieldModel::real_scalar(3)));
    CHECK_THROWS_AS(validate(wp, FieldModel::real_scalar(2)), std::invalid_argument);
    wp.alpha[0] = 1.0;
    CHECK_THROWS_AS(validate(wp, FieldModel::real_scalar(3)), std::invalid_argument);
    CHECK_NOTHROW(validate(wp, FieldModel::vector()));
    wp.alpha[1] = 1e-5;
    CHECK_THROWS_AS(validate(wp, FieldModel::vector()), std::invalid_argument);
    wp.alpha = {cplx(std::sqrt(0.5)), cplx(0.0, std::sqrt(0.5))};
    CHECK_NOTHROW(validate(wp, FieldModel::vector()));
    wp.m = 0.1;
    CHECK_THROWS_AS(validate(wp, FieldModel::vector()), std::invalid_argument);

    WavepacketSpec f;
    f.beta[0] = 1.0;
    CHECK_NOTHROW(validate(f, FieldModel::fermion()));
    f.alpha[0] = 0.1;
    CHECK_THROWS_AS(validate(f, FieldModel::fermion()), std::invalid_argument);

    WavepacketSpec c;
    c.beta = {cplx(0.6), cplx(0.0)};
    c.alpha = {cplx(0.0, 0.8), cplx(0.0)};
    CHECK_NOTHROW(validate(c, FieldModel::complex_scalar(3, Statistics::Fermi)));
    c.beta[1] = 0.1;
    CHECK_THROWS_AS(validate(c, FieldModel::complex_scalar(3, Statistics::Fermi)), std::invalid_argument);

    WavepacketSpec bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(validate(bad, FieldModel::real_scalar(3)), std::invalid_argument);
    bad.sigma = 0.5;
    bad.k0 = -1.0;
    CHECK_THROWS_AS(validate(bad, FieldModel::real_scalar(3)), std::invalid_argument);

    DetectorSpec det;
    CHECK_NOTHROW(validate(det, FieldModel::fermion()));
    det.spinor[0] = 0.5;
    CHECK_THROWS_AS(validate(det, FieldModel::fermion()), std::invalid_argument);
    CHECK_NOTHROW(validate(det, FieldModel::real_scalar(3)));
    det.delta = 0.0;
    CHECK_THROWS_AS(validate(det, FieldModel::vector()), std::invalid_argument);
}
