#include "ionmod/laplace.hpp"

#include <string>

namespace ionmod::laplace {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Above this Re(sqrt(s)) the hyperbolic functions are evaluated divided by
// e^{sqrt(s)} so that nothing overflows.
constexpr double kRescaleAbove = 300.0;

constexpr double kPoleTolerance = 1e-30;

// The parts of the closed-form solution that depend on s but not on rho'.
// All hyperbolic terms carry a common factor e^{-q} when `scaled` is set,
// which cancels between numerator and denominator.
struct Kernel {
    Complex q;
    Complex kappa;  // 1 + sqrt(s / A)
    Complex den;    // (h - (h-1) A kappa) sinh q - (h + A kappa) q cosh q
    bool scaled;
};

Kernel make_kernel(double A, double h, Complex s) {
    if (s.imag() == 0.0 && s.real() <= 0.0) {
        throw NumericalError("transform evaluated on the branch cut (s <= 0)");
    }
    Kernel k;
    k.q = std::sqrt(s);
    k.kappa = 1.0 + k.q / std::sqrt(A);
    k.scaled = k.q.real() > kRescaleAbove;
    Complex sh, ch;
    if (k.scaled) {
        const Complex e2 = std::exp(-2.0 * k.q);
        sh = 0.5 * (1.0 - e2);
        ch = 0.5 * (1.0 + e2);
    } else {
        sh = std::sinh(k.q);
        ch = std::cosh(k.q);
    }
    k.den = (h - (h - 1.0) * A * k.kappa) * sh - (h + A * k.kappa) * k.q * ch;
    if (std::abs(k.den) < kPoleTolerance) {
        throw PoleProximityError("transfer-function denominator vanishes near s = (" +
                                 std::to_string(s.real()) + ", " + std::to_string(s.imag()) +
                                 ")");
    }
    return k;
}

// rho' sinh(q rho'), times e^{-q} in the scaled regime.
Complex source_shell(const Kernel& k, double rho_prime) {
    if (k.scaled) {
        return rho_prime * 0.5 *
               (std::exp(k.q * (rho_prime - 1.0)) - std::exp(-k.q * (rho_prime + 1.0)));
    }
    return rho_prime * std::sinh(k.q * rho_prime);
}

// Integral over [0, 1] of rho' sinh(q rho'): (q cosh q - sinh q) / q^2.
Complex source_ball(const Kernel& k) {
    const Complex q = k.q;
    if (std::abs(q) < 0.5) {
        // sum_{j>=1} 2j q^{2j-1} / (2j+1)!
        const Complex q2 = q * q;
        Complex power = q;  // q^{2j-1}
        double factorial = 6.0;  // (2j+1)!
        Complex sum = 0.0;
        for (int j = 1; j <= 12; ++j) {
            sum += (2.0 * j) * power / factorial;
            power *= q2;
            factorial *= (2.0 * j + 2.0) * (2.0 * j + 3.0);
        }
        return sum;
    }
    if (k.scaled) {
        const Complex e2 = std::exp(-2.0 * q);
        return (0.5 * q * (1.0 + e2) - 0.5 * (1.0 - e2)) / (q * q);
    }
    return (q * std::cosh(q) - std::sinh(q)) / (q * q);
}

void check_real_axis(Complex s, Complex value, double h) {
    if (s.imag() == 0.0 && s.real() > 0.0 && h > 0.0 && !(value.real() > 0.0)) {
        throw NumericalError("release transform is not positive on the real axis at s = " +
                             std::to_string(s.real()));
    }
}

}  // namespace

void TransferFunction::validate() const {
    if (!(A > 0.0) || !(h >= 0.0) || !(r_m > 0.0) || !(rho_prime > 0.0 && rho_prime <= 1.0)) {
        throw ConfigError("transfer function requires A > 0, h >= 0, r_m > 0, 0 < rho' <= 1");
    }
}

void TalbotConfig::validate() const {
    if (n_nodes < 8 || n_nodes % 2 != 0) {
        throw ConfigError("Talbot node count must be even and at least 8");
    }
    if (!(shift_scale > 0.0)) {
        throw ConfigError("Talbot shift scale must be positive");
    }
}

Complex phi_star_laplace(const TransferFunction& tf, Complex s) {
    tf.validate();
    if (tf.h == 0.0) {
        return 0.0;
    }
    const Kernel k = make_kernel(tf.A, tf.h, s);
    // 4 pi r_m^3 A kappa U2(1, s), U2(1, s) = -(h / r_m) rho' sinh(q rho') / den
    const Complex value =
        -4.0 * kPi * tf.r_m * tf.r_m * tf.A * tf.h * k.kappa * source_shell(k, tf.rho_prime) / k.den;
    check_real_axis(s, value, tf.h);
    return value;
}

Complex phi_star_radial_integral(double A, double h, double r_m, Complex s) {
    TransferFunction{A, h, r_m, 1.0}.validate();
    if (h == 0.0) {
        return 0.0;
    }
    const Kernel k = make_kernel(A, h, s);
    const Complex value = -4.0 * kPi * r_m * r_m * A * h * k.kappa * source_ball(k) / k.den;
    check_real_axis(s, value, h);
    return value;
}

}  // namespace ionmod::laplace
