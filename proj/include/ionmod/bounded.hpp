#ifndef IONMOD_BOUNDED_HPP
#define IONMOD_BOUNDED_HPP

#include <cstddef>
#include <vector>

#include "ionmod/analytic.hpp"
#include "ionmod/physio.hpp"
#include "ionmod/time_series.hpp"

namespace ionmod::bounded {

/// Positive roots of gamma cot(gamma) + h - 1 = 0, increasing.
struct EigenRoots {
    double h = 0.0;
    std::vector<double> gammas;
};

struct SeriesTruncation {
    std::size_t n_terms = 200;  ///< minimum number of terms summed
    double tail_tol = 1e-12;    ///< relative size of the first neglected term
};

/// Smallest dimensionless time at which the series are evaluated.
inline constexpr double kMinTau = 1e-6;

/// gamma cos(gamma) + (h - 1) sin(gamma): the root condition multiplied by
/// sin(gamma), which removes the poles of the cotangent.
double root_function(double h, double gamma);

/// |gamma cot(gamma) + h - 1|.
double root_residual(double h, double gamma);

/// First `n` positive roots. Each lies in its own bracket of length pi
/// (((n-1) pi, n pi) for h > 0) and is found by bisection followed by a
/// safeguarded Newton polish to the closest double.
EigenRoots find_roots(double h, std::size_t n);

/// Root number `index` (starting at 1) by plain bisection to the closest
/// double; slower reference for find_roots.
double bisect_root(double h, std::size_t index);

/// G_n = 8 pi r_m^2 h sin(g) (g^2 + (h-1)^2) / (g^2 + h (h-1)), units m^2.
double g_coefficient(double h, double gamma, double r_m);

/// The equivalent form -8 pi r_m^2 (g cos g - sin g)(...), equal on the root locus.
double g_coefficient_cos_form(double h, double gamma, double r_m);

/// Flux impulse response of the absorbing-outside model,
///   sum_n G_n rho' exp(-g_n^2 tau) sin(g_n rho')   (units m^2).
/// Stops after at least min(trunc.n_terms, roots) terms once the envelope
/// |G_n| rho' exp(-g_n^2 tau) drops below tail_tol times the larger of the
/// running sum and the largest envelope seen.
double impulse_response_u(double tau, double rho_prime, const EigenRoots& roots, double r_m,
                          const SeriesTruncation& trunc = {});

struct UpperBound {
    TimeSeries w_u;          ///< molecules/s
    TimeSeries M_u;          ///< molecules
    std::size_t terms_used;  ///< eigenvalues summed
};

/// Closed-form release rate and cumulative release of the absorbing-outside
/// model on `grid` (seconds). The infinite-time parts of the series are
/// summed exactly, so every remaining sum decays like exp(-g_n^2 tau).
/// Grid points below kMinTau (dimensionless) raise NumericalError.
UpperBound upper_signal(const physio::TransmitterSpec& spec, const physio::DimensionlessParams& dims,
                        analytic::SourceModel source, const std::vector<double>& grid,
                        const SeriesTruncation& trunc = {});

}  // namespace ionmod::bounded

#endif  // IONMOD_BOUNDED_HPP
