#ifndef IONMOD_PHYSIO_HPP
#define IONMOD_PHYSIO_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace ionmod::physio {

inline constexpr double kPi = 3.14159265358979323846;
/// Boltzmann constant, J/K (exact SI value).
inline constexpr double kBoltzmann = 1.380649e-23;
/// Mass of a K+ ion (39.0983 u), kg.
inline constexpr double kPotassiumMass = 6.4923e-26;
/// 27 degrees Celsius.
inline constexpr double kRoomTemperature = 300.15;

/// Physical description of the transmitter cell. All fields are SI.
/// Defaults reproduce the reference scenario: a 5 um cell with K+ channels
/// in water at 27 C.
struct TransmitterSpec {
    double r_m = 5e-6;            ///< cell radius, m
    double r_s = 0.5e-6;          ///< generator organelle radius, m
    double r_c = 1e-9;            ///< open-channel radius, m
    std::int64_t N = 100;         ///< number of ion channels
    double D1 = 1.14e-9;          ///< diffusivity inside, m^2/s
    double D2 = 1.14e-9;          ///< diffusivity outside, m^2/s
    double S_rate = 3e14;         ///< generation rate at r_s, molecules/(m^2 s)
    double T_conc = 1e18;         ///< initial interior concentration, molecules/m^3
    double temperature = kRoomTemperature;  ///< K
    double ion_mass = kPotassiumMass;       ///< kg
    double T1 = 0.02;             ///< on interval, s
    double T_slot = 0.04;         ///< slot length, s

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

/// Boundary and scaling constants of the dimensionless problem.
struct DimensionlessParams {
    double z = 0.0;          ///< average membrane permeability
    double A = 1.0;          ///< D2 / D1
    double h = 0.0;          ///< membrane boundary constant
    double v_thermal = 0.0;  ///< sqrt(kB T / (2 pi m)), m/s
};

/// Fraction of membrane area covered by open channels,
/// p_open * N * pi r_c^2 / (4 pi r_m^2). Rejects coverage >= 1.
double permeability(const TransmitterSpec& spec, double p_open_final);

/// sqrt(kB T / (2 pi m)), the one-sided mean thermal speed factor.
double thermal_speed(const TransmitterSpec& spec);

/// h = (r_m / D1) * z / (1 - z) * v_thermal.
double boundary_h(const TransmitterSpec& spec, double z);

DimensionlessParams derive(const TransmitterSpec& spec, double p_open_final);

/// r_m^2 / D1, the time unit of the dimensionless problem, s.
double diffusion_time(const TransmitterSpec& spec);

struct DimensionlessPoint {
    double tau;
    double rho;
};

struct PhysicalPoint {
    double t;  ///< s
    double r;  ///< m
};

DimensionlessPoint to_dimensionless(const TransmitterSpec& spec, double t, double r);
PhysicalPoint to_physical(const TransmitterSpec& spec, double tau, double rho);

/// Sets one field from its textual value; key names equal the field names.
/// Throws ConfigError for unknown keys or unparsable values.
void set_field(TransmitterSpec& spec, std::string_view key, std::string_view value);

/// True if `key` names a TransmitterSpec field.
bool is_spec_key(std::string_view key);

}  // namespace ionmod::physio

#endif  // IONMOD_PHYSIO_HPP
