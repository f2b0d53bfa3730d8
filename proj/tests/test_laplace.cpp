#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>

#include "ionmod/errors.hpp"
#include "ionmod/laplace.hpp"

using namespace ionmod;
using namespace ionmod::laplace;

namespace {

using CL = std::complex<long double>;
constexpr long double kPiL = 3.14159265358979323846264338327950288L;

// The same closed form re-evaluated in extended precision.
CL phi_extended(long double A, long double h, long double r_m, long double rho, CL s) {
    const CL q = std::sqrt(s);
    const CL kappa = 1.0L + std::sqrt(s / A);
    const CL den = (h - (h - 1.0L) * A * kappa) * std::sinh(q) - (h + A * kappa) * q * std::cosh(q);
    const CL u2 = -h * rho * std::sinh(q * rho) / (r_m * den);
    return 4.0L * kPiL * r_m * r_m * r_m * A * kappa * u2;
}

// Solves the transformed two-region boundary-value problem directly:
//   U1'' - s U1 = -(rho'/r_m) delta(rho - rho'),  U1(0) = 0,
//   A U2'' - s U2 = 0,  U2 -> 0 at infinity,
//   U1' - U1 = A (U2' - U2),  U1' + (h - 1) U1 = h U2  at rho = 1,
// and returns the outward flux 4 pi r_m^3 A (1 + sqrt(s/A)) U2(1).
CL phi_bvp(long double A, long double h, long double r_m, long double rho, CL s) {
    const CL q = std::sqrt(s);
    const CL p = std::sqrt(s / A);
    // Unknowns: a scales sinh(q rho)/sinh(q rho') below rho'; b and c weight
    // exp(q (rho - 1)) and exp(-q (rho - rho')) between rho' and 1, a basis
    // that stays bounded there; d is the outer amplitude of exp(-p (rho - 1)).
    std::array<std::array<CL, 5>, 4> m{};
    const CL up = std::exp(q * (rho - 1.0L));     // exp(q (rho - 1)) at rho'
    const CL down = std::exp(-q * (1.0L - rho));  // exp(-q (rho - rho')) at 1
    const CL coth = std::cosh(q * rho) / std::sinh(q * rho);
    m[0] = {1.0L, -up, -1.0L, 0.0L, 0.0L};
    m[1] = {-q * coth, q * up, -q, 0.0L, -rho / r_m};
    m[2] = {0.0L, q - 1.0L, (-q - 1.0L) * down, A * (p + 1.0L), 0.0L};
    m[3] = {0.0L, q + h - 1.0L, (h - 1.0L - q) * down, -h, 0.0L};
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const CL f = m[r][col] / m[col][col];
            for (int k = col; k < 5; ++k) m[r][k] -= f * m[col][k];
        }
    }
    const CL d = m[3][4] / m[3][3];
    return 4.0L * kPiL * r_m * r_m * r_m * A * (1.0L + p) * d;
}

double rel(Complex a, CL b) {
    const CL d = CL(a.real(), a.imag()) - b;
    return static_cast<double>(std::abs(d) / std::abs(b));
}

constexpr double kRm = 5e-6;

}  // namespace

TEST_CASE("closed membrane releases nothing") {
    TransferFunction tf{1.0, 0.0, kRm, 0.5};
    for (Complex s : {Complex(1.0), Complex(3.0, 2.0), Complex(1e-4)}) {
        CHECK(phi_star_laplace(tf, s) == Complex(0.0));
    }
}

TEST_CASE("matches an extended-precision evaluation and the direct BVP solve") {
    for (double h : {0.44208, 1.0, 4.9118e4}) {
        for (double A : {1.0, 0.5, 2.0}) {
            for (double rho : {0.1, 0.5, 1.0}) {
                TransferFunction tf{A, h, kRm, rho};
                for (Complex s : {Complex(1.0), Complex(0.3, 7.0), Complex(-20.0, 40.0),
                                  Complex(150.0, -3.0)}) {
                    const Complex v = phi_star_laplace(tf, s);
                    const CL sl(s.real(), s.imag());
                    CHECK(rel(v, phi_extended(A, h, kRm, rho, sl)) < 1e-12);
                    CHECK(rel(v, phi_bvp(A, h, kRm, rho, sl)) < 1e-11);
                }
            }
        }
    }
}

TEST_CASE("small-s limit is the injected amount") {
    for (double h : {0.44208, 4.9118e4}) {
        for (double rho : {0.1, 0.5, 0.9}) {
            TransferFunction tf{1.0, h, kRm, rho};
            const double target = 4.0 * M_PI * kRm * kRm * rho * rho;
            CHECK(phi_star_laplace(tf, 1e-8).real() == doctest::Approx(target).epsilon(1e-6));
            CHECK(phi_star_laplace(tf, 1e-10).real() == doctest::Approx(target).epsilon(1e-8));
        }
    }
}

TEST_CASE("real-axis values approach the limit monotonically from below") {
    TransferFunction tf{1.0, 0.44208, kRm, 0.5};
    const double target = 4.0 * M_PI * kRm * kRm * 0.25;
    double prev = 0.0;
    for (double s = 100.0; s > 1e-9; s /= 3.0) {
        const double v = phi_star_laplace(tf, s).real();
        CHECK(v > 0.0);
        CHECK(v >= prev);
        CHECK(v <= target * (1.0 + 1e-12));
        prev = v;
    }
}

TEST_CASE("vanishes as the source moves to the centre") {
    TransferFunction tf{1.0, 2.0, kRm, 1e-6};
    CHECK(std::abs(phi_star_laplace(tf, Complex(2.0, 1.0))) < 1e-20);
}

TEST_CASE("conjugate symmetry") {
    TransferFunction tf{1.3, 0.7, kRm, 0.4};
    for (Complex s : {Complex(0.5, 2.0), Complex(-30.0, 90.0), Complex(4.0, -0.1)}) {
        const Complex a = phi_star_laplace(tf, std::conj(s));
        const Complex b = std::conj(phi_star_laplace(tf, s));
        CHECK(std::abs(a - b) <= 1e-15 * std::abs(b));
    }
}

TEST_CASE("radius scaling") {
    // phi* carries r_m^3 from its prefactor and 1/r_m from the interior
    // source, so doubling r_m at fixed (A, h, rho') multiplies it by 4.
    TransferFunction a{1.0, 0.9, kRm, 0.3};
    TransferFunction b{1.0, 0.9, 2.0 * kRm, 0.3};
    const Complex s(2.0, 3.0);
    CHECK(std::abs(phi_star_laplace(b, s) / phi_star_laplace(a, s) - 4.0) < 1e-13);
}

TEST_CASE("large |sqrt s| does not overflow") {
    TransferFunction tf{1.0, 4.9e4, kRm, 0.9};
    for (Complex s : {Complex(1e6), Complex(4e6, 1e6), Complex(-1e6, 5e6)}) {
        const Complex v = phi_star_laplace(tf, s);
        CHECK(std::isfinite(v.real()));
        CHECK(std::isfinite(v.imag()));
    }
    CHECK(phi_star_laplace(tf, 1e6).real() > 0.0);
    // sqrt(1e6) = 1000 is beyond the direct sinh range; compare with extended precision.
    CHECK(rel(phi_star_laplace(tf, Complex(1e6, 1e3)), phi_extended(1.0L, 4.9e4L, kRm, 0.9L, CL(1e6L, 1e3L))) < 1e-10);
}

TEST_CASE("branch cut and invalid inputs are rejected") {
    TransferFunction tf{1.0, 1.0, kRm, 0.5};
    CHECK_THROWS_AS(phi_star_laplace(tf, Complex(-1.0, 0.0)), NumericalError);
    CHECK_THROWS_AS(phi_star_laplace(tf, Complex(0.0, 0.0)), NumericalError);
    CHECK_THROWS_AS((TransferFunction{0.0, 1.0, kRm, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((TransferFunction{1.0, -1.0, kRm, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((TransferFunction{1.0, 1.0, kRm, 1.5}.validate()), ConfigError);
}

TEST_CASE("Talbot inversion of standard pairs") {
    TalbotConfig c32{32, 1.0};
    for (double t : {0.01, 0.3, 1.0, 7.0, 100.0}) {
        CHECK(std::abs(talbot_invert([](Complex s) { return 1.0 / s; }, t, c32) - 1.0) < 1e-8);
    }
    for (double t : {0.1, 1.0, 5.0}) {
        const double f = talbot_invert([](Complex s) { return 1.0 / (s + 1.0); }, t);
        CHECK(std::abs(f / std::exp(-t) - 1.0) < 1e-8);
        const double g = talbot_invert([](Complex s) { return 1.0 / (s * s); }, t);
        CHECK(std::abs(g / t - 1.0) < 1e-8);
    }
}

TEST_CASE("node-count convergence on the test pairs") {
    auto rel_change = [](auto F, double t) {
        const double a = talbot_invert(F, t, TalbotConfig{32, 1.0});
        const double b = talbot_invert(F, t, TalbotConfig{64, 1.0});
        return std::abs(a - b) / std::abs(b);
    };
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(rel_change([](Complex s) { return 1.0 / s; }, t) < 1e-9);
        CHECK(rel_change([](Complex s) { return 1.0 / (s * s); }, t) < 1e-9);
        CHECK(rel_change([](Complex s) { return 1.0 / (s + 1.0); }, t) < 1e-9);
    }
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        CHECK(rel_change([](Complex s) { return 1.0 / (s * s + 1.0); }, t) < 1e-9);
    }
    // Faster decay: the absolute floor near 1e-12 dominates the relative change.
    const double d = std::abs(talbot_invert([](Complex s) { return 1.0 / (s + 2.0); }, 5.0, TalbotConfig{32, 1.0}) -
                              talbot_invert([](Complex s) { return 1.0 / (s + 2.0); }, 5.0, TalbotConfig{64, 1.0}));
    CHECK(d < 1e-11);
}

TEST_CASE("Talbot configuration checks") {
    auto F = [](Complex s) { return 1.0 / s; };
    CHECK_THROWS_AS(talbot_invert(F, 0.0), ConfigError);
    CHECK_THROWS_AS(talbot_invert(F, -1.0), ConfigError);
    CHECK_THROWS_AS(talbot_invert(F, 1.0, TalbotConfig{6, 1.0}), ConfigError);
    CHECK_THROWS_AS(talbot_invert(F, 1.0, TalbotConfig{33, 1.0}), ConfigError);
    CHECK_THROWS_AS(talbot_invert([](Complex) { return Complex(NAN); }, 1.0), NumericalError);
    // Deterministic.
    CHECK(talbot_invert(F, 0.7) == talbot_invert(F, 0.7));
}
