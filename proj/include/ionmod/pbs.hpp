#ifndef IONMOD_PBS_HPP
#define IONMOD_PBS_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ionmod/physio.hpp"
#include "ionmod/time_series.hpp"

namespace ionmod::pbs {

/// Per-trial generator: std::mt19937_64 seeded with base_seed ^ trial_index.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed1b3d2016ULL;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const noexcept { return x * x + y * y + z * z; }
};

struct PbsConfig {
    double dt = 1e-6;            ///< s
    std::size_t n_trials = 1000;
    double bin_width = 5e-4;     ///< s
    double kill_radius = 5e-5;   ///< m; particles beyond are retired
    std::uint64_t base_seed = kDefaultSeed;
    double t_end = 0.0;          ///< s; 0 means spec.T1
    unsigned threads = 0;        ///< 0 means hardware concurrency

    void validate(const physio::TransmitterSpec& spec) const;
};

struct PbsState {
    std::vector<Vec3> inside;
    std::vector<Vec3> outside;
    std::uint64_t initial_count = 0;
    std::uint64_t produced_total = 0;
    std::uint64_t retired = 0;
    std::vector<std::int64_t> crossings_out;  ///< per bin
    std::vector<std::int64_t> crossings_in;   ///< per bin

    /// initial + produced == inside + outside + retired
    bool conserves_mass() const noexcept {
        return initial_count + produced_total == inside.size() + outside.size() + retired;
    }
};

/// Mean release rate, its 95% half-width across trials, and the cumulative
/// net crossings. One sample per bin, stamped with the bin's end time.
struct ReleaseEstimate {
    TimeSeries w_hat;
    TimeSeries M_hat;
    TimeSeries ci_halfwidth;
    TimeSeries M_ci_halfwidth;  ///< 95% half-width of M_hat across trials
    double bin_width = 0.0;
    std::size_t n_trials = 0;
};

/// round(T_conc * 4/3 pi r_m^3) particles uniform in the ball; outside empty.
PbsState init_state(const physio::TransmitterSpec& spec, Rng& rng, std::size_t n_bins = 1);

/// One Brownian step of every particle. Particles whose end position lies
/// across the membrane pass with probability z (tallied in `bin`) or are
/// reflected radially, r -> 2 r_m - r. Outside particles beyond
/// `kill_radius` are retired.
void step(PbsState& state, const physio::TransmitterSpec& spec, double z, double dt,
          std::size_t bin, double kill_radius, Rng& rng);

/// Poisson(4 pi r_s^2 S_rate dt) new particles, uniform on the sphere r = r_s.
void generate(PbsState& state, const physio::TransmitterSpec& spec, double dt, Rng& rng);

struct TrialResult {
    std::vector<std::int64_t> net;  ///< out - in crossings per bin
    PbsState final_state;
    bool mass_conserved = true;     ///< checked after every step
};

TrialResult run_trial(const physio::TransmitterSpec& spec, double z, const PbsConfig& cfg,
                      std::uint64_t trial_index);

/// n_trials independent trials, aggregated in trial order.
ReleaseEstimate run(const physio::TransmitterSpec& spec, double z, const PbsConfig& cfg);

}  // namespace ionmod::pbs

#endif  // IONMOD_PBS_HPP
