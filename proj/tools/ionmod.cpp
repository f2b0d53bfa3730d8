// ionmod: command-line front end for the modulator models.
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ionmod/csv.hpp"
#include "ionmod/errors.hpp"
#include "ionmod/experiments.hpp"
#include "ionmod/gating.hpp"
#include "ionmod/laplace.hpp"
#include "ionmod/physio.hpp"

namespace {

using namespace ionmod;
namespace ex = ionmod::experiments;

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct CommonOptions {
    std::string config_file;
    std::vector<std::string> assignments;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quick = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_file, "flat JSON file of key/value settings");
    cmd->add_option("--set", opts.assignments, "override one setting, key=value")
        ->type_name("KEY=VALUE");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "base seed for the particle simulator");
    cmd->add_flag("--quick", opts.quick, "scale trials and grids down about 10x");
}

std::uint64_t parse_seed_env(const char* text) {
    ex::ExperimentConfig scratch;
    ex::apply_override(scratch, "seed", text);
    return scratch.pbs.base_seed;
}

ex::ExperimentConfig build_config(const CommonOptions& opts) {
    ex::ExperimentConfig cfg;
    if (const char* env = std::getenv("IONMOD_SEED"); env != nullptr && *env != '\0') {
        cfg.pbs.base_seed = parse_seed_env(env);
    }
    if (!opts.config_file.empty()) {
        ex::load_config_file(cfg, opts.config_file);
    }
    for (const auto& a : opts.assignments) {
        ex::apply_assignment(cfg, a);
    }
    if (opts.seed) {
        cfg.pbs.base_seed = *opts.seed;
    }
    if (!opts.out_dir.empty()) {
        cfg.output_dir = opts.out_dir;
    }
    if (opts.quick) {
        ex::apply_quick(cfg);
    }
    return cfg;
}

double parse_double(const std::string& text, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("bad number in segment '" + context + "'");
    }
    return v;
}

gating::VoltageWaveform parse_segments(const std::vector<std::string>& specs) {
    gating::VoltageWaveform wf;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("segment must be <ms>:<mV>, got '" + s + "'");
        }
        const double ms = parse_double(s.substr(0, colon), s);
        const double mv = parse_double(s.substr(colon + 1), s);
        if (!(ms > 0.0)) {
            throw ConfigError("segment duration must be positive, got '" + s + "'");
        }
        wf.segments.push_back({ms * 1e-3, mv});
    }
    return wf;
}

void report(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) {
        std::cout << p.string() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ion-channel modulator: gating, analytic release, bound, particle simulation"};
    app.require_subcommand(1);

    CommonOptions opts;

    auto* gating_cmd = app.add_subcommand("gating", "opening-probability trace (t_ms,p_open)");
    std::vector<std::string> segments;
    std::optional<double> p0;
    std::optional<double> dt_ms;
    gating_cmd->add_option("--segment", segments, "piecewise-constant voltage, repeatable")
        ->type_name("MS:MV");
    gating_cmd->add_option("--p0", p0, "initial opening probability");
    gating_cmd->add_option("--dt-ms", dt_ms, "sampling step in ms");
    add_common(gating_cmd, opts);

    auto* analytic_cmd = app.add_subcommand("analytic", "analytic release rate (t_s,w_mo_per_s,M_mo)");
    add_common(analytic_cmd, opts);

    auto* bound_cmd = app.add_subcommand("bound", "upper bound (t_s,w_u_mo_per_s,M_u_mo)");
    std::optional<std::size_t> n_terms;
    std::optional<double> tail_tol;
    bound_cmd->add_option("--n-terms", n_terms, "minimum number of eigenvalues");
    bound_cmd->add_option("--tail-tol", tail_tol, "relative tail tolerance");
    add_common(bound_cmd, opts);

    auto* pbs_cmd = app.add_subcommand("pbs", "particle simulation (t_s,w_hat_mo_per_s,ci_mo_per_s,M_hat_mo)");
    std::optional<double> pbs_dt;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> bins;
    pbs_cmd->add_option("--dt", pbs_dt, "time step in s");
    pbs_cmd->add_option("--trials", trials, "number of independent trials");
    pbs_cmd->add_option("--bins", bins, "number of histogram bins over [0, T1]");
    add_common(pbs_cmd, opts);

    auto* compare_cmd = app.add_subcommand("compare", "figure pipelines");
    std::string scenario = "fig4-compare";
    compare_cmd->add_option("--scenario", scenario, "fig3-gating | fig4-compare | fig5-bound");
    add_common(compare_cmd, opts);

    auto* dump_cmd = app.add_subcommand("laplace-dump", "");
    dump_cmd->group("");
    double s_min = 1e-3;
    double s_max = 1e3;
    std::size_t points = 61;
    double rho = 1.0;
    dump_cmd->add_option("--s-min", s_min);
    dump_cmd->add_option("--s-max", s_max);
    dump_cmd->add_option("--points", points);
    dump_cmd->add_option("--rho", rho);
    add_common(dump_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        ex::ExperimentConfig cfg = build_config(opts);

        if (gating_cmd->parsed()) {
            if (p0) cfg.gating_p0 = *p0;
            if (dt_ms) cfg.gating_dt = *dt_ms * 1e-3;
            if (!(cfg.gating_p0 >= 0.0 && cfg.gating_p0 <= 1.0)) {
                throw ConfigError("--p0 must lie in [0, 1]");
            }
            ex::validate(cfg);
            const auto wf = segments.empty()
                                ? gating::ook_waveforms(cfg.v_on, cfg.v_off, cfg.spec.T1,
                                                        cfg.spec.T_slot).second
                                : parse_segments(segments);
            report({ex::write_gating(cfg, wf)});
        } else if (analytic_cmd->parsed()) {
            ex::validate(cfg);
            report({ex::write_analytic(cfg)});
        } else if (bound_cmd->parsed()) {
            if (n_terms) cfg.truncation.n_terms = *n_terms;
            if (tail_tol) cfg.truncation.tail_tol = *tail_tol;
            ex::validate(cfg);
            report({ex::write_bound(cfg)});
        } else if (pbs_cmd->parsed()) {
            if (pbs_dt) cfg.pbs.dt = *pbs_dt;
            if (trials) cfg.pbs.n_trials = *trials;
            if (bins) {
                if (*bins == 0) throw ConfigError("--bins must be positive");
                cfg.pbs.bin_width = cfg.spec.T1 / static_cast<double>(*bins);
            }
            ex::validate(cfg);
            report({ex::write_pbs(cfg)});
        } else if (compare_cmd->parsed()) {
            cfg.scenario = ex::parse_scenario(scenario);
            report(ex::run(cfg));
        } else if (dump_cmd->parsed()) {
            ex::validate(cfg);
            if (!(s_min > 0.0 && s_max > s_min) || points < 2) {
                throw ConfigError("laplace-dump needs 0 < s-min < s-max and points >= 2");
            }
            const auto dims = physio::derive(cfg.spec, cfg.p_open);
            const laplace::TransferFunction tf{dims.A, dims.h, cfg.spec.r_m, rho};
            tf.validate();
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < points; ++i) {
                const double s = s_min * std::pow(s_max / s_min, static_cast<double>(i) /
                                                                     static_cast<double>(points - 1));
                rows.push_back({s, laplace::phi_star_laplace(tf, s).real()});
            }
            const auto path = cfg.output_dir / "laplace_dump.csv";
            write_csv(path, {"s", "phi_star_m2"}, rows);
            report({path});
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure";
        if (e.at_time() >= 0.0) std::cerr << " at t = " << e.at_time() << " s";
        std::cerr << ": " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
