#ifndef IONMOD_GATING_HPP
#define IONMOD_GATING_HPP

#include <functional>
#include <utility>
#include <vector>

#include "ionmod/time_series.hpp"

namespace ionmod::gating {

/// Closed->open (alpha1) and open->closed (alpha2) transition rates, 1/ms.
struct RatePair {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

struct SteadyState {
    double p_inf = 0.0;  ///< final opening probability
    double t_c_ms = 0.0; ///< time constant, ms
};

/// One piecewise-constant stretch of applied voltage.
struct Segment {
    double duration_s = 0.0;
    double level_mV = 0.0;
};

struct VoltageWaveform {
    std::vector<Segment> segments;

    double total_duration() const;
};

/// Single-gate potassium channel rates. `v_hh` uses the Hodgkin-Huxley
/// convention (depolarization negative); see applied_to_hh().
RatePair potassium_rates(double v_hh);

/// Maps an applied membrane voltage to the Hodgkin-Huxley sign convention.
inline double applied_to_hh(double v_applied) { return -v_applied; }

/// potassium_rates(applied_to_hh(v_applied)).
RatePair rates_at_applied(double v_applied);

SteadyState steady_state(const RatePair& rates);

/// Opening probability under a piecewise-constant waveform, chained exact
/// exponentials. Samples a uniform grid of step `dt_sample` plus every segment
/// boundary; time in ms, value dimensionless.
TimeSeries evolve(double p0, const VoltageWaveform& waveform, double dt_sample);

/// Classical RK4 integration of dP/dt = a1 (1 - P) - a2 P for an arbitrary
/// applied voltage V(t_s) in mV. Used for waveforms that are not piecewise
/// constant; output in ms like evolve().
TimeSeries integrate_rk4(double p0, const std::function<double(double)>& voltage_mV,
                         double t_end_s, double dt_s);

/// On-off keying voltage signals: first = bit 0 (V_off over the slot),
/// second = bit 1 (V_on over [0, T1], V_off over [T1, T_slot]).
std::pair<VoltageWaveform, VoltageWaveform> ook_waveforms(double v_on, double v_off, double T1,
                                                          double T_slot);

}  // namespace ionmod::gating

#endif  // IONMOD_GATING_HPP
