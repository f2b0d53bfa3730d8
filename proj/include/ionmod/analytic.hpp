#ifndef IONMOD_ANALYTIC_HPP
#define IONMOD_ANALYTIC_HPP

#include <vector>

#include "ionmod/laplace.hpp"
#include "ionmod/physio.hpp"
#include "ionmod/time_series.hpp"

namespace ionmod::analytic {

/// Composite source: constant generation S_rate on the shell r = r_s plus the
/// initial interior concentration T_conc released as an impulse at t = 0.
struct SourceModel {
    double S_rate = 0.0;  ///< molecules / (m^2 s)
    double T_conc = 0.0;  ///< molecules / m^3

    static SourceModel from(const physio::TransmitterSpec& spec) {
        return {spec.S_rate, spec.T_conc};
    }
};

/// Average release rate w(t) (molecules/s) and cumulative release M(t).
struct ModulatedSignal {
    TimeSeries w;
    TimeSeries M;
};

/// Laplace transform of the release rate with respect to the dimensionless
/// time tau = D1 t / r_m^2:
///   W(s) = (S_rate / s) phi*(s | r_s / r_m) + (T_conc D1 / r_m) int_0^1 phi*(s | rho') d rho'.
/// Inverting W at tau gives w(t) in molecules/s.
class ReleaseTransform {
public:
    ReleaseTransform(const physio::TransmitterSpec& spec, const physio::DimensionlessParams& dims,
                     SourceModel source);

    laplace::Complex operator()(laplace::Complex s) const;

    /// Transform of the cumulative count, W(s) / s, scaled so that inversion
    /// at tau yields M(t) in molecules.
    laplace::Complex cumulative(laplace::Complex s) const;

private:
    laplace::TransferFunction shell_;
    double ball_prefactor_;
    double time_unit_;
    SourceModel source_;
};

laplace::Complex w_laplace(const physio::TransmitterSpec& spec,
                           const physio::DimensionlessParams& dims, SourceModel source,
                           laplace::Complex s);

/// w and M on `grid` (seconds, strictly increasing, positive). Each point is
/// an independent contour inversion; M comes from inverting W(s)/s.
/// A failed point raises NumericalError carrying its time.
ModulatedSignal modulated_signal(const physio::TransmitterSpec& spec,
                                 const physio::DimensionlessParams& dims, SourceModel source,
                                 const std::vector<double>& grid,
                                 const laplace::TalbotConfig& cfg = {});

/// Linear interpolation of the cumulative series; t = 0 gives 0.
double released_count(const TimeSeries& M, double t);

/// `n` log-spaced points on [1e-5 T1, T1]; the last point is exactly T1.
std::vector<double> default_grid(double T1, std::size_t n = 200);

/// Impulse response phi*(tau | rho') by inversion (units m^2).
double impulse_response(const laplace::TransferFunction& tf, double tau,
                        const laplace::TalbotConfig& cfg = {});

/// Integral of the impulse response over [0, tau] (units m^2).
double impulse_cumulative(const laplace::TransferFunction& tf, double tau,
                          const laplace::TalbotConfig& cfg = {});

}  // namespace ionmod::analytic

#endif  // IONMOD_ANALYTIC_HPP
