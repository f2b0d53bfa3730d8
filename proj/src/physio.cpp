#include "ionmod/physio.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "ionmod/errors.hpp"

namespace ionmod::physio {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

double parse_double(std::string_view key, std::string_view text) {
    // std::from_chars for double is locale-independent.
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError("cannot parse value '" + std::string(text) + "' for key '" +
                          std::string(key) + "'");
    }
    return v;
}

}  // namespace

void TransmitterSpec::validate() const {
    require(r_m > 0.0 && r_s > 0.0 && r_s < r_m, "require 0 < r_s < r_m");
    require(r_c > 0.0, "require r_c > 0");
    require(N >= 0, "require N >= 0");
    require(D1 > 0.0 && D2 > 0.0, "require D1 > 0 and D2 > 0");
    require(S_rate >= 0.0 && T_conc >= 0.0, "require S_rate >= 0 and T_conc >= 0");
    require(temperature > 0.0 && ion_mass > 0.0, "require temperature > 0 and ion_mass > 0");
    require(T1 > 0.0 && T1 < T_slot, "require 0 < T1 < T_slot");
    require(static_cast<double>(N) * r_c * r_c < 4.0 * r_m * r_m,
            "open-channel area exceeds membrane area");
}

double permeability(const TransmitterSpec& spec, double p_open_final) {
    if (!(p_open_final >= 0.0 && p_open_final <= 1.0)) {
        throw ConfigError("opening probability must lie in [0, 1]");
    }
    spec.validate();
    const double z = p_open_final * static_cast<double>(spec.N) * kPi * spec.r_c * spec.r_c /
                     (4.0 * kPi * spec.r_m * spec.r_m);
    if (z >= 1.0) {
        throw ConfigError("permeability z >= 1 is unphysical");
    }
    return z;
}

double thermal_speed(const TransmitterSpec& spec) {
    return std::sqrt(kBoltzmann * spec.temperature / (2.0 * kPi * spec.ion_mass));
}

double boundary_h(const TransmitterSpec& spec, double z) {
    if (!(z >= 0.0 && z < 1.0)) {
        throw ConfigError("permeability must lie in [0, 1)");
    }
    return (spec.r_m / spec.D1) * (z / (1.0 - z)) * thermal_speed(spec);
}

DimensionlessParams derive(const TransmitterSpec& spec, double p_open_final) {
    DimensionlessParams d;
    d.z = permeability(spec, p_open_final);
    d.A = spec.D2 / spec.D1;
    d.v_thermal = thermal_speed(spec);
    d.h = boundary_h(spec, d.z);
    return d;
}

double diffusion_time(const TransmitterSpec& spec) { return spec.r_m * spec.r_m / spec.D1; }

DimensionlessPoint to_dimensionless(const TransmitterSpec& spec, double t, double r) {
    return {t / diffusion_time(spec), r / spec.r_m};
}

PhysicalPoint to_physical(const TransmitterSpec& spec, double tau, double rho) {
    return {tau * diffusion_time(spec), rho * spec.r_m};
}

namespace {

constexpr std::string_view kKeys[] = {"r_m",    "r_s",         "r_c",      "N",  "D1",
                                      "D2",     "S_rate",      "T_conc",   "temperature",
                                      "ion_mass", "T1",        "T_slot"};

}  // namespace

bool is_spec_key(std::string_view key) {
    for (auto k : kKeys) {
        if (k == key) {
            return true;
        }
    }
    return false;
}

void set_field(TransmitterSpec& spec, std::string_view key, std::string_view value) {
    const double v = parse_double(key, value);
    if (key == "r_m") spec.r_m = v;
    else if (key == "r_s") spec.r_s = v;
    else if (key == "r_c") spec.r_c = v;
    else if (key == "N") {
        if (v < 0.0 || v != std::floor(v) || v > 9.0e15) {
            throw ConfigError("N must be a non-negative integer");
        }
        spec.N = static_cast<std::int64_t>(v);
    }
    else if (key == "D1") spec.D1 = v;
    else if (key == "D2") spec.D2 = v;
    else if (key == "S_rate") spec.S_rate = v;
    else if (key == "T_conc") spec.T_conc = v;
    else if (key == "temperature") spec.temperature = v;
    else if (key == "ion_mass") spec.ion_mass = v;
    else if (key == "T1") spec.T1 = v;
    else if (key == "T_slot") spec.T_slot = v;
    else throw ConfigError("unknown transmitter key '" + std::string(key) + "'");
}

}  // namespace ionmod::physio
