#include "ionmod/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ionmod/errors.hpp"

namespace ionmod::analytic {

using laplace::Complex;

ReleaseTransform::ReleaseTransform(const physio::TransmitterSpec& spec,
                                   const physio::DimensionlessParams& dims, SourceModel source)
    : shell_{dims.A, dims.h, spec.r_m, spec.r_s / spec.r_m},
      ball_prefactor_(source.T_conc * spec.D1 / spec.r_m),
      time_unit_(physio::diffusion_time(spec)),
      source_(source) {
    if (source.S_rate < 0.0 || source.T_conc < 0.0) {
        throw ConfigError("source rates must be non-negative");
    }
    shell_.validate();
}

Complex ReleaseTransform::operator()(Complex s) const {
    Complex value = 0.0;
    if (source_.S_rate != 0.0) {
        value += source_.S_rate / s * laplace::phi_star_laplace(shell_, s);
    }
    if (ball_prefactor_ != 0.0) {
        value += ball_prefactor_ * laplace::phi_star_radial_integral(shell_.A, shell_.h, shell_.r_m, s);
    }
    return value;
}

Complex ReleaseTransform::cumulative(Complex s) const { return time_unit_ * (*this)(s) / s; }

Complex w_laplace(const physio::TransmitterSpec& spec, const physio::DimensionlessParams& dims,
                  SourceModel source, Complex s) {
    return ReleaseTransform(spec, dims, source)(s);
}

ModulatedSignal modulated_signal(const physio::TransmitterSpec& spec,
                                 const physio::DimensionlessParams& dims, SourceModel source,
                                 const std::vector<double>& grid,
                                 const laplace::TalbotConfig& cfg) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("output grid must be positive and strictly increasing");
        }
    }
    const ReleaseTransform transform(spec, dims, source);
    const double c = physio::diffusion_time(spec);

    ModulatedSignal out;
    out.w.value_unit = "molecules/s";
    out.M.value_unit = "molecules";
    for (double t : grid) {
        const double tau = t / c;
        double w = 0.0;
        double m = 0.0;
        try {
            w = laplace::talbot_invert(transform, tau, cfg);
            m = laplace::talbot_invert([&](Complex s) { return transform.cumulative(s); }, tau, cfg);
        } catch (const NumericalError& e) {
            throw NumericalError("inversion failed at t = " + std::to_string(t) + " s: " + e.what(),
                                 t);
        }
        out.w.push_back(t, w);
        out.M.push_back(t, m);
    }
    return out;
}

double released_count(const TimeSeries& M, double t) {
    if (t == 0.0) {
        return 0.0;
    }
    if (M.empty()) {
        throw ConfigError("empty cumulative series");
    }
    // Before the first sample the series is interpolated from M(0) = 0.
    if (t < 0.0 || t > M.t.back()) {
        throw ConfigError("released_count: t = " + std::to_string(t) + " outside series span");
    }
    const auto it = std::lower_bound(M.t.begin(), M.t.end(), t);
    const auto i = static_cast<std::size_t>(it - M.t.begin());
    if (M.t[i] == t) {
        return M.value[i];
    }
    const double t0 = i == 0 ? 0.0 : M.t[i - 1];
    const double m0 = i == 0 ? 0.0 : M.value[i - 1];
    const double frac = (t - t0) / (M.t[i] - t0);
    return m0 + frac * (M.value[i] - m0);
}

std::vector<double> default_grid(double T1, std::size_t n) {
    if (!(T1 > 0.0) || n < 2) {
        throw ConfigError("default grid requires T1 > 0 and at least two points");
    }
    std::vector<double> grid(n);
    const double lo = std::log(1e-5 * T1);
    const double hi = std::log(T1);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    grid.back() = T1;
    return grid;
}

double impulse_response(const laplace::TransferFunction& tf, double tau,
                        const laplace::TalbotConfig& cfg) {
    return laplace::talbot_invert([&](Complex s) { return laplace::phi_star_laplace(tf, s); }, tau,
                                  cfg);
}

double impulse_cumulative(const laplace::TransferFunction& tf, double tau,
                          const laplace::TalbotConfig& cfg) {
    return laplace::talbot_invert(
        [&](Complex s) { return laplace::phi_star_laplace(tf, s) / s; }, tau, cfg);
}

}  // namespace ionmod::analytic
