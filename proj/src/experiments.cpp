#include "ionmod/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

#include "ionmod/analytic.hpp"
#include "ionmod/csv.hpp"
#include "ionmod/errors.hpp"

namespace ionmod::experiments {

namespace fs = std::filesystem;

namespace {

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("cannot parse value '" + std::string(text) + "' for key '" +
                          std::string(key) + "'");
    }
    return v;
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
        base = 16;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("cannot parse unsigned value '" + std::string(text) + "' for key '" +
                          std::string(key) + "'");
    }
    return v;
}

std::size_t to_count(std::string_view key, std::string_view text) {
    const double v = to_double(key, text);
    if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("key '" + std::string(key) + "' needs a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

physio::TransmitterSpec with_channels(physio::TransmitterSpec spec, std::int64_t n) {
    spec.N = n;
    return spec;
}

}  // namespace

Scenario parse_scenario(std::string_view name) {
    if (name == "fig3-gating") return Scenario::Fig3Gating;
    if (name == "fig4-compare") return Scenario::Fig4Compare;
    if (name == "fig5-bound") return Scenario::Fig5Bound;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Fig3Gating: return "fig3-gating";
        case Scenario::Fig4Compare: return "fig4-compare";
        case Scenario::Fig5Bound: return "fig5-bound";
    }
    return "?";
}

void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    if (physio::is_spec_key(key)) {
        physio::set_field(cfg.spec, key, value);
    } else if (key == "v_on") {
        cfg.v_on = to_double(key, value);
    } else if (key == "v_off") {
        cfg.v_off = to_double(key, value);
    } else if (key == "p_open") {
        cfg.p_open = to_double(key, value);
    } else if (key == "gating_p0") {
        cfg.gating_p0 = to_double(key, value);
    } else if (key == "gating_dt") {
        cfg.gating_dt = to_double(key, value);
    } else if (key == "grid_points") {
        cfg.grid_points = to_count(key, value);
    } else if (key == "talbot_nodes") {
        cfg.talbot.n_nodes = static_cast<int>(to_count(key, value));
    } else if (key == "talbot_scale") {
        cfg.talbot.shift_scale = to_double(key, value);
    } else if (key == "n_terms") {
        cfg.truncation.n_terms = to_count(key, value);
    } else if (key == "tail_tol") {
        cfg.truncation.tail_tol = to_double(key, value);
    } else if (key == "pbs_dt") {
        cfg.pbs.dt = to_double(key, value);
    } else if (key == "trials") {
        cfg.pbs.n_trials = to_count(key, value);
    } else if (key == "bin_width") {
        cfg.pbs.bin_width = to_double(key, value);
    } else if (key == "kill_radius") {
        cfg.pbs.kill_radius = to_double(key, value);
    } else if (key == "seed") {
        cfg.pbs.base_seed = to_u64(key, value);
    } else if (key == "threads") {
        cfg.pbs.threads = static_cast<unsigned>(to_count(key, value));
    } else if (key == "output_dir") {
        cfg.output_dir = fs::path(std::string(value));
    } else if (key == "scenario") {
        cfg.scenario = parse_scenario(value);
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
    cfg.overrides[std::string(key)] = std::string(value);
}

void apply_assignment(ExperimentConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    }
    apply_override(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void load_config_file(ExperimentConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config file " + path.string() + " must hold a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (value.is_string()) {
            apply_override(cfg, key, value.get<std::string>());
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            // Seeds may exceed 2^53; keep them exact.
            apply_override(cfg, key, value.dump());
        } else if (value.is_number()) {
            apply_override(cfg, key, format_number(value.get<double>()));
        } else {
            throw ConfigError("config key '" + key + "' must be a number or string");
        }
    }
}

void apply_quick(ExperimentConfig& cfg) {
    cfg.quick = true;
    cfg.pbs.n_trials = std::max<std::size_t>(10, cfg.pbs.n_trials / 10);
    cfg.grid_points = std::max<std::size_t>(20, cfg.grid_points / 10);
    cfg.gating_dt *= 10.0;
}

void validate(const ExperimentConfig& cfg) {
    cfg.spec.validate();
    cfg.talbot.validate();
    cfg.pbs.validate(cfg.spec);
    if (!(cfg.p_open >= 0.0 && cfg.p_open <= 1.0)) {
        throw ConfigError("p_open must lie in [0, 1]");
    }
    if (!(cfg.gating_dt > 0.0)) {
        throw ConfigError("gating_dt must be positive");
    }
    if (cfg.grid_points < 2) {
        throw ConfigError("grid_points must be at least 2");
    }
    if (cfg.truncation.n_terms < 1 || !(cfg.truncation.tail_tol > 0.0)) {
        throw ConfigError("series truncation needs n_terms >= 1 and tail_tol > 0");
    }
}

fs::path write_gating(const ExperimentConfig& cfg, const gating::VoltageWaveform& waveform,
                      const std::string& file_name) {
    const TimeSeries trace = gating::evolve(cfg.gating_p0, waveform, cfg.gating_dt);
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        rows.push_back({trace.t[i], trace.value[i]});
    }
    const fs::path path = cfg.output_dir / file_name;
    write_csv(path, {"t_ms", "p_open"}, rows);
    return path;
}

fs::path write_analytic(const ExperimentConfig& cfg, const std::string& file_name) {
    const auto dims = physio::derive(cfg.spec, cfg.p_open);
    const auto grid = analytic::default_grid(cfg.spec.T1, cfg.grid_points);
    const auto sig = analytic::modulated_signal(cfg.spec, dims,
                                                analytic::SourceModel::from(cfg.spec), grid,
                                                cfg.talbot);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back({grid[i], sig.w.value[i], sig.M.value[i]});
    }
    const fs::path path = cfg.output_dir / file_name;
    write_csv(path, {"t_s", "w_mo_per_s", "M_mo"}, rows);
    return path;
}

fs::path write_bound(const ExperimentConfig& cfg, const std::string& file_name) {
    const auto dims = physio::derive(cfg.spec, cfg.p_open);
    const auto grid = analytic::default_grid(cfg.spec.T1, cfg.grid_points);
    const auto ub = bounded::upper_signal(cfg.spec, dims, analytic::SourceModel::from(cfg.spec),
                                          grid, cfg.truncation);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back({grid[i], ub.w_u.value[i], ub.M_u.value[i]});
    }
    const fs::path path = cfg.output_dir / file_name;
    write_csv(path, {"t_s", "w_u_mo_per_s", "M_u_mo"}, rows);
    return path;
}

namespace {

std::vector<std::vector<double>> pbs_rows(const pbs::ReleaseEstimate& est) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < est.w_hat.size(); ++i) {
        rows.push_back({est.w_hat.t[i], est.w_hat.value[i], est.ci_halfwidth.value[i],
                        est.M_hat.value[i]});
    }
    return rows;
}

const std::vector<std::string> kPbsHeader = {"t_s", "w_hat_mo_per_s", "ci_mo_per_s", "M_hat_mo"};

}  // namespace

fs::path write_pbs(const ExperimentConfig& cfg, const std::string& file_name) {
    const auto dims = physio::derive(cfg.spec, cfg.p_open);
    const auto est = pbs::run(cfg.spec, dims.z, cfg.pbs);
    const fs::path path = cfg.output_dir / file_name;
    write_csv(path, kPbsHeader, pbs_rows(est));
    return path;
}

std::vector<fs::path> run_fig3(const ExperimentConfig& cfg) {
    std::vector<fs::path> written;
    for (double v_on : kGatingLevels) {
        const auto [bit0, bit1] = gating::ook_waveforms(v_on, cfg.v_off, cfg.spec.T1, cfg.spec.T_slot);
        (void)bit0;
        const std::string name = "fig3_von_" + format_number(v_on) + "mV.csv";
        written.push_back(write_gating(cfg, bit1, name));
    }
    return written;
}

std::vector<fs::path> run_fig4(const ExperimentConfig& cfg) {
    std::vector<fs::path> written;
    const auto grid = analytic::default_grid(cfg.spec.T1, cfg.grid_points);

    std::vector<std::vector<double>> rows;
    for (std::int64_t n : kChannelPresets) {
        const auto spec = with_channels(cfg.spec, n);
        const auto dims = physio::derive(spec, cfg.p_open);
        const auto sig = analytic::modulated_signal(spec, dims, analytic::SourceModel::from(spec),
                                                    grid, cfg.talbot);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rows.push_back({static_cast<double>(n), grid[i], sig.w.value[i], sig.M.value[i]});
        }
    }
    written.push_back(cfg.output_dir / "fig4_analytic.csv");
    write_csv(written.back(), {"N", "t_s", "w_mo_per_s", "M_mo"}, rows);

    const auto spec = with_channels(cfg.spec, kChannelPresets.back());
    const auto dims = physio::derive(spec, cfg.p_open);
    std::vector<std::vector<double>> joined;
    for (double dt : kPbsSteps) {
        pbs::PbsConfig pcfg = cfg.pbs;
        pcfg.dt = dt;
        const auto est = pbs::run(spec, dims.z, pcfg);
        written.push_back(cfg.output_dir / ("fig4_pbs_dt" + format_number(dt) + ".csv"));
        write_csv(written.back(), kPbsHeader, pbs_rows(est));

        // Analytic bin averages on the PBS bins: (M(t_hi) - M(t_lo)) / width.
        const auto sig = analytic::modulated_signal(spec, dims, analytic::SourceModel::from(spec),
                                                    est.w_hat.t, cfg.talbot);
        double t_lo = 0.0;
        double m_lo = 0.0;
        for (std::size_t i = 0; i < est.w_hat.size(); ++i) {
            const double t_hi = est.w_hat.t[i];
            const double w_bin = (sig.M.value[i] - m_lo) / (t_hi - t_lo);
            const double diff = std::abs(w_bin - est.w_hat.value[i]);
            joined.push_back({dt, t_hi, w_bin, est.w_hat.value[i], est.ci_halfwidth.value[i],
                              diff <= est.ci_halfwidth.value[i] ? 1.0 : 0.0});
            t_lo = t_hi;
            m_lo = sig.M.value[i];
        }
    }
    written.push_back(cfg.output_dir / "fig4_compare.csv");
    write_csv(written.back(),
              {"dt_s", "t_s", "w_analytic_mo_per_s", "w_hat_mo_per_s", "ci_mo_per_s", "within_ci"},
              joined);
    return written;
}

std::vector<fs::path> run_fig5(const ExperimentConfig& cfg) {
    std::vector<fs::path> written;
    const auto grid = analytic::default_grid(cfg.spec.T1, cfg.grid_points);
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> gaps;
    for (std::int64_t n : kChannelPresets) {
        const auto spec = with_channels(cfg.spec, n);
        const auto dims = physio::derive(spec, cfg.p_open);
        const auto source = analytic::SourceModel::from(spec);
        const auto sig = analytic::modulated_signal(spec, dims, source, grid, cfg.talbot);
        const auto ub = bounded::upper_signal(spec, dims, source, grid, cfg.truncation);
        rows.push_back({static_cast<double>(n), 0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rows.push_back({static_cast<double>(n), grid[i], sig.M.value[i], ub.M_u.value[i]});
        }
        const double m = sig.M.value.back();
        const double mu = ub.M_u.value.back();
        gaps.push_back({static_cast<double>(n), grid.back(), (mu - m) / mu});
    }
    written.push_back(cfg.output_dir / "fig5_bound.csv");
    write_csv(written.back(), {"N", "t_s", "M_mo", "M_u_mo"}, rows);
    written.push_back(cfg.output_dir / "fig5_gap.csv");
    write_csv(written.back(), {"N", "t_s", "gap"}, gaps);
    return written;
}

std::vector<fs::path> run(const ExperimentConfig& cfg) {
    validate(cfg);
    switch (cfg.scenario) {
        case Scenario::Fig3Gating: return run_fig3(cfg);
        case Scenario::Fig4Compare: return run_fig4(cfg);
        case Scenario::Fig5Bound: return run_fig5(cfg);
    }
    return {};
}

}  // namespace ionmod::experiments
