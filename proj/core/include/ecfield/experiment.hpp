#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ecfield/config.hpp"
#include "ecfield/critical_variance.hpp"

namespace ecfield {

// Per-level paired Monte Carlo estimate of Diff(u) = E chi - P(sup >= u):
// the difference is averaged per realization over a shared path stream, which
// kills the variance of the two common terms.
struct PairedDiffEstimate {
    double u = 0.0;
    double diff_mean = 0.0;
    double diff_se = 0.0;
    double ec_mean = 0.0;
    double tail_est = 0.0;
    std::size_t n = 0;
};

struct MeanEcRow {
    double u = 0.0;
    double simulated_mean = 0.0;
    double simulated_se = 0.0;
    double formula = 0.0;  // expected Euler characteristic approximation
};

struct SimulateRow {
    double u = 0.0;
    double mean_ec = 0.0;
    double se_ec = 0.0;
    double tail_estimate = 0.0;
    double se_tail = 0.0;
    std::size_t n_paths = 0;
};

struct DecayFit {
    double slope = 0.0;     // fitted slope of log diff on u^2/2
    double slope_se = 0.0;
    std::size_t points_used = 0;
};

struct ValidationReport {
    CriticalVarianceReport sigma;
    double bound = 0.0;  // 1 + 1/sigma_c_sq, +inf when sigma_c_sq = 0
    std::optional<DecayFit> fit;
    bool verdict = false;
    bool superexponential = false;  // sigma_c_sq = 0: any finite slope is consistent
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    std::vector<PairedDiffEstimate> estimates;  // the paired run backing the fit
};

struct Eq3Row {
    double u = 0.0;
    double bound = 0.0;
};

// Normalized model plus the geometry rescaled into normalized time.
struct NormalizedSetup {
    CovarianceModel model;
    std::vector<double> lengths;  // scaled by sqrt(lambda2)
    double metric_scale = 1.0;    // 1 after normalization, sqrt(lambda2) otherwise
};
NormalizedSetup prepare_setup(const ExperimentConfig& config);

std::vector<PairedDiffEstimate> paired_diff(const ExperimentConfig& config);

std::vector<MeanEcRow> mean_ec_vs_formula(const ExperimentConfig& config);

std::vector<SimulateRow> simulate_summary(const ExperimentConfig& config);

// Weighted least squares of log diff_mean on u^2/2, using only levels with
// diff_mean > min_signal_k * diff_se. Throws InsufficientSignalError with
// the largest usable level when fewer than three qualify.
DecayFit fit_decay_exponent(std::span<const PairedDiffEstimate> estimates,
                            double min_signal_k);

ValidationReport validate_theorem(const ExperimentConfig& config);

// Finite-KL reference curve: C * P(chi^2_n >= u^2 / cos^2 theta_c) per level.
std::vector<Eq3Row> eq3_reference_curve(std::size_t n, double theta_c, double C,
                                        std::span<const double> u_levels);

}  // namespace ecfield
