#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecfield/covariance.hpp"
#include "ecfield/ec_heuristic.hpp"

namespace ecfield {

struct CovarianceSpec {
    CovFamily family = CovFamily::SquaredExponential;
    std::vector<double> params;  // SE: {l}; mixture: weights then frequencies; circle: {r}
    bool normalize = true;

    CovarianceModel build() const;
};

struct SpaceSpec {
    SpaceShape shape = SpaceShape::Interval;
    std::vector<double> lengths;  // interval: {T}; box: {a, b}
    double area = 0.0;            // convex_planar only
    double perimeter = 0.0;
};

struct GridSpec {
    std::size_t n_grid = 0;      // 1D
    std::size_t n_x = 0;         // 2D
    std::size_t n_y = 0;
    std::size_t pad_factor = 4;
};

struct McSpec {
    std::size_t n_paths = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> u_levels;
};

struct FitSpec {
    double min_signal_k = 3.0;
    double tol_exp = 0.15;
};

// Experiment configuration, parsed from the sectioned key = value file
// (sections covariance, space, grid, mc, fit). Unknown sections or keys are
// errors.
struct ExperimentConfig {
    CovarianceSpec covariance;
    SpaceSpec space;
    GridSpec grid;
    McSpec mc;
    FitSpec fit;

    // Throws ConfigError on violations: u-levels strictly ascending and
    // positive, n_paths >= 10^4, shape/grid consistency.
    void validate_for_simulation() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace ecfield
