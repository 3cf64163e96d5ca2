#include "ecfield/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecfield/errors.hpp"
#include "ecfield/field_sim.hpp"
#include "ecfield/parallel.hpp"
#include "ecfield/special_functions.hpp"

namespace ecfield {

namespace {

struct LevelAccum {
    std::int64_t sum_ec = 0;
    std::int64_t sum_ec2 = 0;
    std::int64_t sum_ind = 0;
    std::int64_t sum_diff2 = 0;

    void add(const LevelAccum& other) {
        sum_ec += other.sum_ec;
        sum_ec2 += other.sum_ec2;
        sum_ind += other.sum_ind;
        sum_diff2 += other.sum_diff2;
    }
};

struct SimulationSummary {
    std::vector<double> u;
    std::vector<LevelAccum> levels;
    std::size_t n_paths = 0;
};

// Paired accumulation over a shared realization stream. Per-chunk partial
// sums are folded in chunk order; all sums are integers, so the result is
// independent of the fold order and of the worker count.
SimulationSummary run_simulation_1d(const GridSampler1D& sampler,
                                    std::span<const double> u_levels,
                                    std::size_t n_paths, std::uint64_t master_seed) {
    const std::size_t m = u_levels.size();
    const std::size_t n_chunks = sampler.chunk_count(n_paths);
    std::vector<std::vector<LevelAccum>> slots(n_chunks);

    parallel_chunks(n_chunks, default_thread_count(), [&](std::size_t c) {
        std::vector<LevelAccum> acc(m);
        std::vector<std::int32_t> ec(m);
        sampler.sample_chunk(master_seed, c, n_paths,
                             [&](std::span<const double> path, const SeedLineage&) {
            const double sup = sup_on_grid(path);
            excursion_ec_1d_multi(path, u_levels, ec);
            for (std::size_t j = 0; j < m; ++j) {
                const std::int64_t chi = ec[j];
                const std::int64_t ind = sup >= u_levels[j] ? 1 : 0;
                if (chi < ind) {
                    throw std::logic_error(
                        "paired simulation: per-path Euler characteristic below the supremum "
                        "indicator in 1D");
                }
                const std::int64_t d = chi - ind;
                acc[j].sum_ec += chi;
                acc[j].sum_ec2 += chi * chi;
                acc[j].sum_ind += ind;
                acc[j].sum_diff2 += d * d;
            }
        });
        slots[c] = std::move(acc);
    });

    SimulationSummary out;
    out.u.assign(u_levels.begin(), u_levels.end());
    out.levels.resize(m);
    out.n_paths = n_paths;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        for (std::size_t j = 0; j < m; ++j) out.levels[j].add(slots[c][j]);
    }
    return out;
}

SimulationSummary run_simulation_2d(const GridSampler2D& sampler,
                                    std::span<const double> u_levels,
                                    std::size_t n_paths, std::uint64_t master_seed) {
    const std::size_t m = u_levels.size();
    const std::size_t n_chunks = sampler.chunk_count(n_paths);
    std::vector<std::vector<LevelAccum>> slots(n_chunks);
    const std::size_t nx = sampler.n_x();
    const std::size_t ny = sampler.n_y();

    parallel_chunks(n_chunks, default_thread_count(), [&](std::size_t c) {
        std::vector<LevelAccum> acc(m);
        sampler.sample_chunk(master_seed, c, n_paths,
                             [&](std::span<const double> field, const SeedLineage&) {
            const double sup = sup_on_grid(field);
            for (std::size_t j = 0; j < m; ++j) {
                const std::int64_t chi = excursion_ec_2d(field, nx, ny, u_levels[j]);
                const std::int64_t ind = sup >= u_levels[j] ? 1 : 0;
                const std::int64_t d = chi - ind;  // may be negative through holes
                acc[j].sum_ec += chi;
                acc[j].sum_ec2 += chi * chi;
                acc[j].sum_ind += ind;
                acc[j].sum_diff2 += d * d;
            }
        });
        slots[c] = std::move(acc);
    });

    SimulationSummary out;
    out.u.assign(u_levels.begin(), u_levels.end());
    out.levels.resize(m);
    out.n_paths = n_paths;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        for (std::size_t j = 0; j < m; ++j) out.levels[j].add(slots[c][j]);
    }
    return out;
}

SimulationSummary run_simulation(const ExperimentConfig& config, const NormalizedSetup& setup) {
    if (config.space.shape == SpaceShape::Interval) {
        GridSampler1D sampler(setup.model, setup.lengths[0], config.grid.n_grid,
                              config.grid.pad_factor);
        return run_simulation_1d(sampler, config.mc.u_levels, config.mc.n_paths,
                                 config.mc.master_seed);
    }
    GridSampler2D sampler(IsotropicModel(setup.model, 2), setup.lengths[0], setup.lengths[1],
                          config.grid.n_x, config.grid.n_y, config.grid.pad_factor);
    return run_simulation_2d(sampler, config.mc.u_levels, config.mc.n_paths,
                             config.mc.master_seed);
}

double sample_se(std::int64_t sum, std::int64_t sum_sq, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double mean = static_cast<double>(sum) / nn;
    const double var =
        (static_cast<double>(sum_sq) - nn * mean * mean) / (nn - 1.0);
    return var > 0.0 ? std::sqrt(var / nn) : 0.0;
}

std::vector<PairedDiffEstimate> estimates_from(const SimulationSummary& s) {
    std::vector<PairedDiffEstimate> out(s.u.size());
    const double n = static_cast<double>(s.n_paths);
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        const LevelAccum& a = s.levels[j];
        PairedDiffEstimate& e = out[j];
        e.u = s.u[j];
        e.ec_mean = static_cast<double>(a.sum_ec) / n;
        e.tail_est = static_cast<double>(a.sum_ind) / n;
        const std::int64_t sum_diff = a.sum_ec - a.sum_ind;
        e.diff_mean = static_cast<double>(sum_diff) / n;
        e.diff_se = sample_se(sum_diff, a.sum_diff2, s.n_paths);
        e.n = s.n_paths;
    }
    return out;
}

ParameterSpace space_of(const NormalizedSetup& setup, const ExperimentConfig& config) {
    if (config.space.shape == SpaceShape::Interval) {
        return ParameterSpace::interval(setup.lengths[0], setup.metric_scale);
    }
    return ParameterSpace::box(setup.lengths, setup.metric_scale);
}

}  // namespace

NormalizedSetup prepare_setup(const ExperimentConfig& config) {
    CovarianceModel model = config.covariance.build();
    std::vector<double> lengths = config.space.lengths;
    if (config.covariance.normalize) {
        model = model.normalize_second_moment();
        for (double& l : lengths) l *= model.scale_factor();
        return {std::move(model), std::move(lengths), 1.0};
    }
    const double metric = std::sqrt(model.second_spectral_moment());
    return {std::move(model), std::move(lengths), metric};
}

std::vector<PairedDiffEstimate> paired_diff(const ExperimentConfig& config) {
    config.validate_for_simulation();
    const NormalizedSetup setup = prepare_setup(config);
    return estimates_from(run_simulation(config, setup));
}

std::vector<MeanEcRow> mean_ec_vs_formula(const ExperimentConfig& config) {
    config.validate_for_simulation();
    const NormalizedSetup setup = prepare_setup(config);
    const SimulationSummary s = run_simulation(config, setup);
    const ParameterSpace space = space_of(setup, config);
    std::vector<MeanEcRow> rows(s.u.size());
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        rows[j].u = s.u[j];
        rows[j].simulated_mean = static_cast<double>(s.levels[j].sum_ec) /
                                 static_cast<double>(s.n_paths);
        rows[j].simulated_se = sample_se(s.levels[j].sum_ec, s.levels[j].sum_ec2, s.n_paths);
        rows[j].formula = ec_approximation(space, s.u[j]).total;
    }
    return rows;
}

std::vector<SimulateRow> simulate_summary(const ExperimentConfig& config) {
    config.validate_for_simulation();
    const NormalizedSetup setup = prepare_setup(config);
    const SimulationSummary s = run_simulation(config, setup);
    std::vector<SimulateRow> rows(s.u.size());
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        const LevelAccum& a = s.levels[j];
        rows[j].u = s.u[j];
        rows[j].mean_ec = static_cast<double>(a.sum_ec) / static_cast<double>(s.n_paths);
        rows[j].se_ec = sample_se(a.sum_ec, a.sum_ec2, s.n_paths);
        rows[j].tail_estimate = static_cast<double>(a.sum_ind) / static_cast<double>(s.n_paths);
        rows[j].se_tail = sample_se(a.sum_ind, a.sum_ind, s.n_paths);  // indicator: sum == sum_sq
        rows[j].n_paths = s.n_paths;
    }
    return rows;
}

DecayFit fit_decay_exponent(std::span<const PairedDiffEstimate> estimates,
                            double min_signal_k) {
    std::vector<double> x, y, w;
    double largest_usable = std::numeric_limits<double>::quiet_NaN();
    for (const PairedDiffEstimate& e : estimates) {
        if (!(e.diff_mean > 0.0)) continue;
        if (!(e.diff_mean > min_signal_k * e.diff_se)) continue;
        x.push_back(0.5 * e.u * e.u);
        y.push_back(std::log(e.diff_mean));
        const double rel = e.diff_se / e.diff_mean;
        w.push_back(1.0 / std::max(rel * rel, 1e-30));
        if (std::isnan(largest_usable) || e.u > largest_usable) largest_usable = e.u;
    }
    if (x.size() < 3) {
        std::ostringstream msg;
        msg << "insufficient signal: only " << x.size() << " of " << estimates.size()
            << " levels have diff_mean > " << min_signal_k << " standard errors";
        if (!std::isnan(largest_usable)) {
            msg << " (largest usable u = " << largest_usable << ")";
        }
        msg << "; increase n_paths or lower the u grid";
        throw InsufficientSignalError(msg.str(), std::isnan(largest_usable) ? 0.0 : largest_usable);
    }
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xb = swx / sw;
    const double yb = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xb) * (x[i] - xb);
        sxy += w[i] * (x[i] - xb) * (y[i] - yb);
    }
    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.slope_se = std::sqrt(1.0 / sxx);
    fit.points_used = x.size();
    return fit;
}

ValidationReport validate_theorem(const ExperimentConfig& config) {
    config.validate_for_simulation();
    if (!config.covariance.normalize) {
        throw ConfigError(
            "validate requires covariance.normalize = true: the critical variance formulas "
            "assume a unit second spectral moment");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const NormalizedSetup setup = prepare_setup(config);

    ValidationReport report;
    if (config.space.shape == SpaceShape::Interval) {
        report.sigma = sigma_critical_interval(setup.model, setup.lengths[0]);
    } else {
        report.sigma = sigma_isotropic_convex(IsotropicModel(setup.model, 2));
    }
    report.superexponential = report.sigma.sigma_c_sq == 0.0;
    report.bound = report.superexponential
                       ? std::numeric_limits<double>::infinity()
                       : 1.0 + 1.0 / report.sigma.sigma_c_sq;

    report.estimates = estimates_from(run_simulation(config, setup));
    const std::vector<PairedDiffEstimate>& estimates = report.estimates;
    try {
        report.fit = fit_decay_exponent(estimates, config.fit.min_signal_k);
    } catch (const InsufficientSignalError&) {
        if (!report.superexponential) throw;
        report.fit = std::nullopt;  // no measurable error at all is consistent
    }

    if (report.superexponential) {
        report.verdict = true;  // any finite fitted slope is consistent with an infinite bound
    } else {
        report.verdict =
            report.fit && (-report.fit->slope >= report.bound * (1.0 - config.fit.tol_exp));
    }
    report.seed = config.mc.master_seed;
    report.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::vector<Eq3Row> eq3_reference_curve(std::size_t n, double theta_c, double C,
                                        std::span<const double> u_levels) {
    std::vector<Eq3Row> rows(u_levels.size());
    for (std::size_t i = 0; i < u_levels.size(); ++i) {
        rows[i].u = u_levels[i];
        rows[i].bound = finite_kl_bound(n, theta_c, u_levels[i], C);
    }
    return rows;
}

}  // namespace ecfield
