#ifndef IONMOD_EXPERIMENTS_HPP
#define IONMOD_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ionmod/bounded.hpp"
#include "ionmod/gating.hpp"
#include "ionmod/laplace.hpp"
#include "ionmod/pbs.hpp"
#include "ionmod/physio.hpp"

namespace ionmod::experiments {

enum class Scenario { Fig3Gating, Fig4Compare, Fig5Bound };

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);

/// Channel counts compared in the release-rate and bound figures.
inline const std::vector<std::int64_t> kChannelPresets = {100, 500, 10'000'000};
/// PBS time steps compared against the analytic release rate.
inline const std::vector<double> kPbsSteps = {1e-5, 1e-6};
/// Applied V_on levels of the gating figure, mV.
inline const std::vector<double> kGatingLevels = {25.0, 50.0, 200.0, -200.0};

struct ExperimentConfig {
    Scenario scenario = Scenario::Fig4Compare;
    physio::TransmitterSpec spec;
    std::map<std::string, std::string> overrides;  ///< every key=value applied so far
    std::filesystem::path output_dir = "out";

    double v_on = 200.0;     ///< mV
    double v_off = -200.0;   ///< mV
    double p_open = 1.0;     ///< opening probability assumed while channels are on
    double gating_p0 = 0.0;
    double gating_dt = 1e-4; ///< s, sampling step of gating traces
    std::size_t grid_points = 200;
    laplace::TalbotConfig talbot;
    bounded::SeriesTruncation truncation;
    pbs::PbsConfig pbs;
    bool quick = false;
};

/// Sets one configuration key. Transmitter fields use their own names; the
/// rest are v_on, v_off, p_open, gating_p0, gating_dt, grid_points,
/// talbot_nodes, talbot_scale, n_terms, tail_tol, pbs_dt, trials, bin_width,
/// kill_radius, seed, threads, output_dir, scenario.
void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key=value" and applies it.
void apply_assignment(ExperimentConfig& cfg, std::string_view assignment);

/// Reads a flat JSON object of configuration keys.
void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Scales trial counts and grid sizes down by about 10x.
void apply_quick(ExperimentConfig& cfg);

/// Validates the combined configuration; throws ConfigError.
void validate(const ExperimentConfig& cfg);

// Single-product writers used by the CLI subcommands. Each returns the path
// it wrote.
std::filesystem::path write_gating(const ExperimentConfig& cfg,
                                   const gating::VoltageWaveform& waveform,
                                   const std::string& file_name = "gating.csv");
std::filesystem::path write_analytic(const ExperimentConfig& cfg,
                                     const std::string& file_name = "analytic.csv");
std::filesystem::path write_bound(const ExperimentConfig& cfg,
                                  const std::string& file_name = "bound.csv");
std::filesystem::path write_pbs(const ExperimentConfig& cfg,
                                const std::string& file_name = "pbs.csv");

/// Opening-probability traces for every V_on in kGatingLevels.
std::vector<std::filesystem::path> run_fig3(const ExperimentConfig& cfg);

/// Analytic release rate per channel preset, PBS estimates for the largest
/// preset at both kPbsSteps, and a per-bin comparison table.
std::vector<std::filesystem::path> run_fig4(const ExperimentConfig& cfg);

/// Cumulative release and its upper bound per preset, plus the relative gap
/// (M_u - M) / M_u at T1.
std::vector<std::filesystem::path> run_fig5(const ExperimentConfig& cfg);

std::vector<std::filesystem::path> run(const ExperimentConfig& cfg);

}  // namespace ionmod::experiments

#endif  // IONMOD_EXPERIMENTS_HPP
