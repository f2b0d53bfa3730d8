#include "ionmod/bounded.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ionmod/errors.hpp"
#include "ionmod/summation.hpp"

namespace ionmod::bounded {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Bracket {
    double lo;
    double hi;
    int sign_lo;  // sign of root_function just above lo
};

// For h > 0 the n-th root lies in ((n-1) pi, n pi). With h = 0 the root at
// gamma = 0 is excluded and the n-th positive root lies in (n pi, (n+1) pi).
Bracket bracket(double h, std::size_t index) {
    const double n = static_cast<double>(index);
    Bracket b;
    if (h > 0.0) {
        b.lo = (n - 1.0) * kPi;
        b.hi = n * kPi;
    } else {
        b.lo = n * kPi;
        b.hi = (n + 1.0) * kPi;
    }
    if (b.lo == 0.0) {
        b.sign_lo = 1;  // root_function ~ h gamma near 0
    } else {
        b.sign_lo = root_function(h, b.lo) > 0.0 ? 1 : -1;
    }
    const int sign_hi = root_function(h, b.hi) > 0.0 ? 1 : -1;
    if (sign_hi == b.sign_lo) {
        throw NumericalError("root bracket without sign change");
    }
    return b;
}

// Among gamma and its two neighbours, the double with the smallest residual.
double closest_double(double h, double gamma) {
    double best = gamma;
    double best_f = std::abs(root_function(h, gamma));
    for (double cand : {std::nextafter(gamma, 0.0), std::nextafter(gamma, 1e300)}) {
        const double f = std::abs(root_function(h, cand));
        if (f < best_f) {
            best = cand;
            best_f = f;
        }
    }
    return best;
}

double bisect(double h, Bracket b, double width) {
    double lo = b.lo;
    double hi = b.hi;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double f = root_function(h, mid);
        if (f == 0.0) {
            return mid;
        }
        if ((f > 0.0 ? 1 : -1) == b.sign_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double root_function(double h, double gamma) {
    return gamma * std::cos(gamma) + (h - 1.0) * std::sin(gamma);
}

double root_residual(double h, double gamma) {
    return std::abs(gamma * std::cos(gamma) / std::sin(gamma) + h - 1.0);
}

double bisect_root(double h, std::size_t index) {
    if (!(h >= 0.0)) {
        throw ConfigError("h must be non-negative");
    }
    if (index == 0) {
        throw ConfigError("root index starts at 1");
    }
    const Bracket b = bracket(h, index);
    return closest_double(h, bisect(h, b, 0.0));
}

EigenRoots find_roots(double h, std::size_t n) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
        throw ConfigError("h must be non-negative");
    }
    if (n == 0) {
        throw ConfigError("at least one root must be requested");
    }
    EigenRoots roots;
    roots.h = h;
    roots.gammas.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const Bracket b = bracket(h, i);
        double lo = b.lo;
        double hi = b.hi;
        double g = bisect(h, b, 1e-6);
        // Tighten the bracket around the bisection estimate for the Newton stage.
        lo = std::max(lo, g - 1e-6);
        hi = std::min(hi, g + 1e-6);
        for (int iter = 0; iter < 60; ++iter) {
            const double f = root_function(h, g);
            if (f == 0.0) {
                break;
            }
            if ((f > 0.0 ? 1 : -1) == b.sign_lo) {
                lo = g;
            } else {
                hi = g;
            }
            const double df = h * std::cos(g) - g * std::sin(g);
            double next = g - f / df;
            if (!(next > lo && next < hi)) {
                next = 0.5 * (lo + hi);
            }
            const double step = std::abs(next - g);
            g = next;
            if (step <= 2.0 * std::numeric_limits<double>::epsilon() * g) {
                break;
            }
        }
        roots.gammas.push_back(closest_double(h, g));
    }
    return roots;
}

double g_coefficient(double h, double gamma, double r_m) {
    const double g2 = gamma * gamma;
    return 8.0 * kPi * r_m * r_m * h * std::sin(gamma) * (g2 + (h - 1.0) * (h - 1.0)) /
           (g2 + h * (h - 1.0));
}

double g_coefficient_cos_form(double h, double gamma, double r_m) {
    const double g2 = gamma * gamma;
    return -8.0 * kPi * r_m * r_m * (gamma * std::cos(gamma) - std::sin(gamma)) *
           (g2 + (h - 1.0) * (h - 1.0)) / (g2 + h * (h - 1.0));
}

double impulse_response_u(double tau, double rho_prime, const EigenRoots& roots, double r_m,
                          const SeriesTruncation& trunc) {
    if (!(tau > 0.0)) {
        throw ConfigError("impulse response requires tau > 0");
    }
    if (!(rho_prime > 0.0 && rho_prime <= 1.0)) {
        throw ConfigError("source radius must lie in (0, 1]");
    }
    if (roots.h == 0.0) {
        return 0.0;
    }
    // The tail is measured against the larger of the running sum and the
    // largest term, so sums that cancel or underflow still terminate.
    const std::size_t floor_terms = std::min(trunc.n_terms, roots.gammas.size());
    CompensatedSum sum;
    double peak = 0.0;
    for (std::size_t i = 0; i < roots.gammas.size(); ++i) {
        const double g = roots.gammas[i];
        const double G = g_coefficient(roots.h, g, r_m);
        const double envelope = std::abs(G) * rho_prime * std::exp(-g * g * tau);
        sum.add(G * rho_prime * std::exp(-g * g * tau) * std::sin(g * rho_prime));
        peak = std::max(peak, envelope);
        if (i + 1 >= floor_terms &&
            envelope <= trunc.tail_tol * std::max(std::abs(sum.value()), peak)) {
            return sum.value();
        }
    }
    throw NumericalError("impulse series not converged with " +
                             std::to_string(roots.gammas.size()) + " roots at tau = " +
                             std::to_string(tau),
                         tau);
}

UpperBound upper_signal(const physio::TransmitterSpec& spec, const physio::DimensionlessParams& dims,
                        analytic::SourceModel source, const std::vector<double>& grid,
                        const SeriesTruncation& trunc) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("output grid must be positive and strictly increasing");
        }
    }
    const double c = physio::diffusion_time(spec);
    UpperBound out;
    out.w_u.value_unit = "molecules/s";
    out.M_u.value_unit = "molecules";
    out.terms_used = 0;
    if (grid.empty()) {
        return out;
    }
    const double tau_min = grid.front() / c;
    if (tau_min < kMinTau) {
        throw NumericalError("upper-bound series unsupported below tau = 1e-6 (t = " +
                                 std::to_string(grid.front()) + " s)",
                             grid.front());
    }

    const double h = dims.h;
    if (h == 0.0) {
        for (double t : grid) {
            out.w_u.push_back(t, 0.0);
            out.M_u.push_back(t, 0.0);
        }
        return out;
    }

    // Terms decay like exp(-g_n^2 tau) with g_n > (n-1) pi; sum until that
    // factor is below tail_tol with a margin.
    const double decades = -std::log(trunc.tail_tol) + 10.0;
    const auto needed = static_cast<std::size_t>(std::ceil(std::sqrt(decades / tau_min) / kPi)) + 2;
    const std::size_t n = std::max(trunc.n_terms, needed);
    const EigenRoots roots = find_roots(h, n);
    out.terms_used = n;

    const double r_m = spec.r_m;
    const double rho_s = spec.r_s / r_m;
    // Infinite-time sums, from the small-s expansion of the absorbing-outside
    // transform 4 pi r_m^2 h rho' sinh(q rho') / (q cosh q + (h - 1) sinh q):
    //   sum G_n rho_s sin(g rho_s) / g^2 = 4 pi r_s^2
    //   sum G_n rho_s sin(g rho_s) / g^4 = (2 pi / 3) r_m^2 rho_s^2 ((h + 2) / h - rho_s^2)
    //   sum G_n h sin(g) / g^4          = (4 pi / 3) r_m^2
    const double shell_rate = 4.0 * kPi * rho_s * rho_s * r_m * r_m;
    const double shell_delay =
        (2.0 * kPi / 3.0) * r_m * r_m * rho_s * rho_s * ((h + 2.0) / h - rho_s * rho_s);
    const double ball_volume = (4.0 / 3.0) * kPi * r_m * r_m * r_m;

    std::vector<double> coef(n), shell(n), wall(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = roots.gammas[i];
        g2[i] = g * g;
        coef[i] = g_coefficient(h, g, r_m);
        shell[i] = coef[i] * rho_s * std::sin(g * rho_s);
        wall[i] = coef[i] * h * std::sin(g);
    }

    for (double t : grid) {
        const double tau = t / c;
        CompensatedSum shell_w, shell_m, ball_w, ball_m;
        for (std::size_t i = 0; i < n; ++i) {
            const double decay = std::exp(-g2[i] * tau);
            if (decay == 0.0) {
                break;
            }
            shell_w.add(shell[i] * decay / g2[i]);
            shell_m.add(shell[i] * decay / (g2[i] * g2[i]));
            ball_w.add(wall[i] * decay / g2[i]);
            ball_m.add(wall[i] * decay / (g2[i] * g2[i]));
        }
        const double w = source.S_rate * (shell_rate - shell_w.value()) +
                         source.T_conc * spec.D1 / r_m * ball_w.value();
        const double m = source.S_rate * c * (shell_rate * tau - shell_delay + shell_m.value()) +
                         source.T_conc * (ball_volume - r_m * ball_m.value());
        out.w_u.push_back(t, w);
        out.M_u.push_back(t, m);
    }
    return out;
}

}  // namespace ionmod::bounded
