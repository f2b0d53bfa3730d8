#include "ionmod/pbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "ionmod/errors.hpp"

namespace ionmod::pbs {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Boost distributions have a fixed algorithm across standard libraries, which
// keeps (seed -> output) stable; the ziggurat normal is also fast.
using Normal = boost::random::normal_distribution<double>;
using Uniform = boost::random::uniform_01<double>;

Vec3 random_direction(Rng& rng) {
    Normal normal;
    for (;;) {
        Vec3 v{normal(rng), normal(rng), normal(rng)};
        const double n2 = v.norm2();
        if (n2 > 1e-300) {
            const double inv = 1.0 / std::sqrt(n2);
            return {v.x * inv, v.y * inv, v.z * inv};
        }
    }
}

std::size_t bin_count(double t_end, double bin_width) {
    return static_cast<std::size_t>(std::ceil(t_end / bin_width - 1e-9));
}

}  // namespace

void PbsConfig::validate(const physio::TransmitterSpec& spec) const {
    if (!(dt > 0.0)) {
        throw ConfigError("PBS time step must be positive");
    }
    if (!(bin_width >= dt)) {
        throw ConfigError("PBS bin width must be at least one time step");
    }
    if (!(kill_radius > spec.r_m)) {
        throw ConfigError("PBS kill radius must exceed the cell radius");
    }
    if (n_trials == 0) {
        throw ConfigError("PBS needs at least one trial");
    }
    if (t_end < 0.0) {
        throw ConfigError("PBS horizon must be non-negative");
    }
}

PbsState init_state(const physio::TransmitterSpec& spec, Rng& rng, std::size_t n_bins) {
    PbsState state;
    const double volume = 4.0 / 3.0 * kPi * spec.r_m * spec.r_m * spec.r_m;
    const auto count = static_cast<std::uint64_t>(std::llround(spec.T_conc * volume));
    state.initial_count = count;
    state.inside.reserve(count + 64);
    Uniform uniform;
    for (std::uint64_t i = 0; i < count; ++i) {
        const Vec3 d = random_direction(rng);
        const double r = spec.r_m * std::cbrt(uniform(rng));
        state.inside.push_back({r * d.x, r * d.y, r * d.z});
    }
    state.crossings_out.assign(n_bins, 0);
    state.crossings_in.assign(n_bins, 0);
    return state;
}

void step(PbsState& state, const physio::TransmitterSpec& spec, double z, double dt,
          std::size_t bin, double kill_radius, Rng& rng) {
    Normal normal;
    Uniform uniform;
    const double r_m = spec.r_m;
    const double r_m2 = r_m * r_m;
    const double kill2 = kill_radius * kill_radius;
    const double sigma_in = std::sqrt(2.0 * spec.D1 * dt);
    const double sigma_out = std::sqrt(2.0 * spec.D2 * dt);

    // Particles that cross outward are appended to `outside` after it has
    // been stepped, so nobody moves twice in one step.
    std::vector<Vec3> exited;
    for (std::size_t i = 0; i < state.inside.size();) {
        Vec3& p = state.inside[i];
        if (sigma_in > 0.0) {
            p.x += sigma_in * normal(rng);
            p.y += sigma_in * normal(rng);
            p.z += sigma_in * normal(rng);
        }
        const double r2 = p.norm2();
        if (r2 > r_m2) {
            if (uniform(rng) < z) {
                exited.push_back(p);
                ++state.crossings_out[bin];
                p = state.inside.back();
                state.inside.pop_back();
                continue;
            }
            const double r = std::sqrt(r2);
            const double scale = std::max(2.0 * r_m - r, 0.0) / r;
            p = {p.x * scale, p.y * scale, p.z * scale};
        }
        ++i;
    }

    std::vector<Vec3> entered;
    for (std::size_t i = 0; i < state.outside.size();) {
        Vec3& p = state.outside[i];
        if (sigma_out > 0.0) {
            p.x += sigma_out * normal(rng);
            p.y += sigma_out * normal(rng);
            p.z += sigma_out * normal(rng);
        }
        const double r2 = p.norm2();
        if (r2 <= r_m2) {
            if (uniform(rng) < z) {
                entered.push_back(p);
                ++state.crossings_in[bin];
                p = state.outside.back();
                state.outside.pop_back();
                continue;
            }
            const double r = std::sqrt(r2);
            const double scale = (2.0 * r_m - r) / r;
            p = {p.x * scale, p.y * scale, p.z * scale};
        } else if (r2 > kill2) {
            ++state.retired;
            p = state.outside.back();
            state.outside.pop_back();
            continue;
        }
        ++i;
    }
    state.outside.insert(state.outside.end(), exited.begin(), exited.end());
    state.inside.insert(state.inside.end(), entered.begin(), entered.end());
}

void generate(PbsState& state, const physio::TransmitterSpec& spec, double dt, Rng& rng) {
    const double mean = 4.0 * kPi * spec.r_s * spec.r_s * spec.S_rate * dt;
    if (!(mean > 0.0)) {
        return;
    }
    boost::random::poisson_distribution<std::uint64_t, double> poisson(mean);
    const std::uint64_t count = poisson(rng);
    for (std::uint64_t i = 0; i < count; ++i) {
        const Vec3 d = random_direction(rng);
        state.inside.push_back({spec.r_s * d.x, spec.r_s * d.y, spec.r_s * d.z});
    }
    state.produced_total += count;
}

TrialResult run_trial(const physio::TransmitterSpec& spec, double z, const PbsConfig& cfg,
                      std::uint64_t trial_index) {
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : spec.T1;
    const std::size_t n_bins = bin_count(t_end, cfg.bin_width);
    const auto n_steps = static_cast<std::uint64_t>(std::llround(t_end / cfg.dt));

    Rng rng(cfg.base_seed ^ trial_index);
    TrialResult result;
    result.final_state = init_state(spec, rng, n_bins);
    PbsState& state = result.final_state;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * cfg.dt;
        const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(t_mid / cfg.bin_width));
        step(state, spec, z, cfg.dt, bin, cfg.kill_radius, rng);
        generate(state, spec, cfg.dt, rng);
        result.mass_conserved = result.mass_conserved && state.conserves_mass();
    }
    result.net.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        result.net[b] = state.crossings_out[b] - state.crossings_in[b];
    }
    return result;
}

ReleaseEstimate run(const physio::TransmitterSpec& spec, double z, const PbsConfig& cfg) {
    spec.validate();
    cfg.validate(spec);
    if (!(z >= 0.0 && z < 1.0)) {
        throw ConfigError("permeability must lie in [0, 1)");
    }
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : spec.T1;
    const std::size_t n_bins = bin_count(t_end, cfg.bin_width);

    std::vector<std::vector<std::int64_t>> nets(cfg.n_trials);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> conserved{true};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.n_trials) {
                return;
            }
            TrialResult r = run_trial(spec, z, cfg, i);
            if (!r.mass_conserved) {
                conserved = false;
            }
            nets[i] = std::move(r.net);
        }
    };
    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_trials));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (!conserved) {
        throw NumericalError("PBS particle bookkeeping lost mass");
    }

    ReleaseEstimate est;
    est.bin_width = cfg.bin_width;
    est.n_trials = cfg.n_trials;
    est.w_hat.value_unit = "molecules/s";
    est.M_hat.value_unit = "molecules";
    est.ci_halfwidth.value_unit = "molecules/s";
    est.M_ci_halfwidth.value_unit = "molecules";
    const double n = static_cast<double>(cfg.n_trials);
    const double z95 = 1.96;
    auto mean_sd = [&](auto&& sample) {
        double mean = 0.0;
        for (std::size_t i = 0; i < cfg.n_trials; ++i) mean += sample(i);
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < cfg.n_trials; ++i) {
            const double d = sample(i) - mean;
            ss += d * d;
        }
        return std::pair{mean, cfg.n_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
    };
    std::vector<double> running(cfg.n_trials, 0.0);
    for (std::size_t b = 0; b < n_bins; ++b) {
        for (std::size_t i = 0; i < cfg.n_trials; ++i) running[i] += static_cast<double>(nets[i][b]);
        const auto [mean, sd] = mean_sd([&](std::size_t i) { return static_cast<double>(nets[i][b]); });
        const auto [m_mean, m_sd] = mean_sd([&](std::size_t i) { return running[i]; });
        const double t_hi = std::min(t_end, static_cast<double>(b + 1) * cfg.bin_width);
        const double width = t_hi - static_cast<double>(b) * cfg.bin_width;
        est.w_hat.push_back(t_hi, mean / width);
        est.ci_halfwidth.push_back(t_hi, z95 * sd / std::sqrt(n) / width);
        est.M_hat.push_back(t_hi, m_mean);
        est.M_ci_halfwidth.push_back(t_hi, z95 * m_sd / std::sqrt(n));
    }
    return est;
}

}  // namespace ionmod::pbs
