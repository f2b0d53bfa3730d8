#include "ionmod/gating.hpp"

#include <algorithm>
#include <cmath>

#include "ionmod/errors.hpp"

namespace ionmod::gating {

double VoltageWaveform::total_duration() const {
    double total = 0.0;
    for (const auto& s : segments) {
        total += s.duration_s;
    }
    return total;
}

RatePair potassium_rates(double v_hh) {
    const double x = v_hh + 10.0;
    double alpha1 = 0.0;
    if (std::abs(x) < 1e-7) {
        // 0.01 x / (e^{x/10} - 1) = 0.1 (1 - x/20 + ...)
        alpha1 = 0.1 * (1.0 - x / 20.0);
    } else {
        alpha1 = 0.01 * x / std::expm1(x / 10.0);
    }
    return {alpha1, 0.125 * std::exp(v_hh / 80.0)};
}

RatePair rates_at_applied(double v_applied) { return potassium_rates(applied_to_hh(v_applied)); }

SteadyState steady_state(const RatePair& rates) {
    const double total = rates.alpha1 + rates.alpha2;
    if (!(total > 0.0) || rates.alpha1 < 0.0 || rates.alpha2 < 0.0) {
        throw ConfigError("transition rates must be non-negative with positive sum");
    }
    return {rates.alpha1 / total, 1.0 / total};
}

TimeSeries evolve(double p0, const VoltageWaveform& waveform, double dt_sample) {
    if (waveform.segments.empty()) {
        throw ConfigError("empty voltage waveform");
    }
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw ConfigError("initial opening probability must lie in [0, 1]");
    }
    if (!(dt_sample > 0.0)) {
        throw ConfigError("sampling step must be positive");
    }
    for (const auto& s : waveform.segments) {
        if (!(s.duration_s > 0.0)) {
            throw ConfigError("segment durations must be positive");
        }
    }

    TimeSeries out;
    out.time_unit = "ms";
    out.value_unit = "1";

    // Grid points within this distance of a boundary are replaced by it.
    const double snap = 1e-9 * dt_sample;

    double seg_start = 0.0;
    double p_start = p0;
    std::size_t k = 0;
    out.push_back(0.0, p0);
    ++k;
    for (const auto& seg : waveform.segments) {
        const auto ss = steady_state(rates_at_applied(seg.level_mV));
        const double tc_s = ss.t_c_ms * 1e-3;
        const double seg_end = seg_start + seg.duration_s;
        auto value_at = [&](double t) {
            return ss.p_inf + (p_start - ss.p_inf) * std::exp(-(t - seg_start) / tc_s);
        };
        for (;; ++k) {
            const double t = static_cast<double>(k) * dt_sample;
            if (t >= seg_end - snap) {
                break;
            }
            out.push_back(t * 1e3, std::clamp(value_at(t), 0.0, 1.0));
        }
        const double p_end = std::clamp(value_at(seg_end), 0.0, 1.0);
        out.push_back(seg_end * 1e3, p_end);
        if (std::abs(static_cast<double>(k) * dt_sample - seg_end) <= snap) {
            ++k;
        }
        p_start = p_end;
        seg_start = seg_end;
    }
    return out;
}

TimeSeries integrate_rk4(double p0, const std::function<double(double)>& voltage_mV,
                         double t_end_s, double dt_s) {
    if (!(dt_s > 0.0) || !(t_end_s > 0.0)) {
        throw ConfigError("integration step and horizon must be positive");
    }
    // Rates are per ms; integrate in ms.
    const double h = dt_s * 1e3;
    auto rhs = [&](double t_ms, double p) {
        const auto r = rates_at_applied(voltage_mV(t_ms * 1e-3));
        return r.alpha1 * (1.0 - p) - r.alpha2 * p;
    };
    TimeSeries out;
    out.time_unit = "ms";
    out.value_unit = "1";
    const auto steps = static_cast<std::size_t>(std::llround(t_end_s / dt_s));
    double p = p0;
    out.push_back(0.0, p);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const double k1 = rhs(t, p);
        const double k2 = rhs(t + 0.5 * h, p + 0.5 * h * k1);
        const double k3 = rhs(t + 0.5 * h, p + 0.5 * h * k2);
        const double k4 = rhs(t + h, p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back(static_cast<double>(i + 1) * h, p);
    }
    return out;
}

std::pair<VoltageWaveform, VoltageWaveform> ook_waveforms(double v_on, double v_off, double T1,
                                                          double T_slot) {
    if (!(T1 > 0.0 && T1 < T_slot)) {
        throw ConfigError("require 0 < T1 < T_slot");
    }
    VoltageWaveform bit0{{{T_slot, v_off}}};
    VoltageWaveform bit1{{{T1, v_on}, {T_slot - T1, v_off}}};
    return {bit0, bit1};
}

}  // namespace ionmod::gating
