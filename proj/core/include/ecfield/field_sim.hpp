#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ecfield/covariance.hpp"
#include "ecfield/fft.hpp"

namespace ecfield {

// Paths per RNG substream; the (master seed, chunk index) pair determines the
// substream and the within-chunk index fixes the path, independent of how
// chunks are scheduled onto workers.
inline constexpr std::size_t kChunkSize1D = 256;
inline constexpr std::size_t kChunkSize2D = 16;

// Relative tolerance before a negative circulant eigenvalue triggers the
// pad-doubling retries, and the cap on total discarded spectral mass.
inline constexpr double kTolPsd = 1e-12;
inline constexpr double kClampMassCap = 1e-6;

// Construction-time covariance reproduction tolerance (first 16 lags).
inline constexpr double kCovCheckTol = 1e-8;

struct SeedLineage {
    std::uint64_t master_seed = 0;
    std::uint64_t chunk_index = 0;
    std::uint32_t index_in_chunk = 0;
};

struct Realization {
    std::vector<double> values;
    SeedLineage lineage;
};

// Exact sampler for a stationary 1D Gaussian process on the grid
// t_i = i h, h = T/(n_grid - 1), by circulant embedding: the covariance is
// wrapped onto a circle of Ng >= pad_factor * n_grid points and diagonalized
// with the FFT. The circle size is pad_factor * n_grid unless a nearby even
// size gives a dramatically smoother wrap (periodic covariances embed exactly
// on a period multiple); negative eigenvalues first trigger up to three
// pad doublings and are then clamped to zero, failing construction if the
// discarded mass exceeds kClampMassCap.
//
// Each complex synthesis yields two independent real paths; spectral modes
// whose eigenvalue falls below 1e-14 of the maximum carry no randomness.
// When few modes remain active the paths are synthesized directly from them,
// otherwise through the full-size FFT.
class GridSampler1D {
public:
    GridSampler1D(CovarianceModel model, double T, std::size_t n_grid,
                  std::size_t pad_factor);

    std::size_t n_grid() const { return n_grid_; }
    double grid_spacing() const { return h_; }
    double domain_length() const { return T_; }
    std::size_t embedding_size() const { return embedding_size_; }
    std::size_t pad_factor_used() const { return pad_used_; }
    double clamped_mass_fraction() const { return clamped_mass_; }
    std::size_t active_modes() const { return active_k_.size(); }
    std::span<const double> spectrum() const { return spectrum_; }
    const CovarianceModel& model() const { return model_; }

    using PathVisitor =
        std::function<void(std::span<const double>, const SeedLineage&)>;

    std::size_t chunk_count(std::size_t n_paths) const {
        return (n_paths + kChunkSize1D - 1) / kChunkSize1D;
    }

    // Generates the paths of one chunk, in within-chunk order. Thread-safe.
    void sample_chunk(std::uint64_t master_seed, std::uint64_t chunk_index,
                      std::size_t n_paths_total, const PathVisitor& visit) const;

    // All paths in (chunk, index) order on the calling thread.
    void sample(std::size_t n_paths, std::uint64_t master_seed,
                const PathVisitor& visit) const;

private:
    void build_spectrum(std::size_t pad_requested);
    void synthesize_pair(class NormalSampler& rng, std::vector<double>& re,
                         std::vector<double>& im) const;

    CovarianceModel model_;
    double T_ = 0.0;
    double h_ = 0.0;
    std::size_t n_grid_ = 0;
    std::size_t embedding_size_ = 0;
    std::size_t pad_used_ = 0;
    double clamped_mass_ = 0.0;
    std::vector<double> spectrum_;       // clamped eigenvalues, length Ng
    std::vector<std::size_t> active_k_;  // bins with eigenvalue > 1e-14 max
    std::vector<double> active_amp_;     // sqrt(lambda_k / Ng) per active bin
    bool pruned_synthesis_ = false;
    std::shared_ptr<const Fft> fft_;     // engine for the non-pruned path
};

// Isotropic 2D field on the grid of an (a x b) box, synthesized from the
// radial spectral density sampled on a padded torus. Supported for the
// squared-exponential radial family (closed-form density). Weights are
// nonnegative by construction; the realized marginal variance is
// sum of weights and must sit within 1% of 1.
class GridSampler2D {
public:
    GridSampler2D(IsotropicModel model, double a, double b, std::size_t n_x,
                  std::size_t n_y, std::size_t pad_factor);

    std::size_t n_x() const { return nx_; }
    std::size_t n_y() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double variance_bias() const { return variance_bias_; }
    std::size_t active_modes() const { return (2 * kx_max_ + 1) * (2 * ky_max_ + 1); }

    // Field visitor: values row-major, values[iy * n_x + ix].
    using FieldVisitor =
        std::function<void(std::span<const double>, const SeedLineage&)>;

    std::size_t chunk_count(std::size_t n_paths) const {
        return (n_paths + kChunkSize2D - 1) / kChunkSize2D;
    }

    void sample_chunk(std::uint64_t master_seed, std::uint64_t chunk_index,
                      std::size_t n_paths_total, const FieldVisitor& visit) const;

    void sample(std::size_t n_paths, std::uint64_t master_seed,
                const FieldVisitor& visit) const;

private:
    IsotropicModel model_;
    double a_ = 0.0, b_ = 0.0;
    double hx_ = 0.0, hy_ = 0.0;
    std::size_t nx_ = 0, ny_ = 0;
    std::size_t torus_nx_ = 0, torus_ny_ = 0;
    std::size_t kx_max_ = 0, ky_max_ = 0;
    double variance_bias_ = 0.0;
    std::vector<double> amp_;    // sqrt(weight), (2ky+1) x (2kx+1) row-major
    std::vector<double> ex_re_, ex_im_;  // nx x (2kx+1) phase table
    std::vector<double> ey_re_, ey_im_;  // ny x (2ky+1) phase table
};

// Number of connected runs of consecutive grid values >= u; the Euler
// characteristic of a 1D excursion set.
int excursion_ec_1d(std::span<const double> values, double u);

// Run counts for every level of an ascending grid in one pass.
void excursion_ec_1d_multi(std::span<const double> values,
                           std::span<const double> levels_ascending,
                           std::span<std::int32_t> out);

// Euler characteristic V - E + F of the closed cubical complex built from
// all vertices >= u, edges with both endpoints >= u, and cells with all four
// corners >= u (4-connectivity of 2-cells). values row-major [iy][ix].
long excursion_ec_2d(std::span<const double> values, std::size_t nx, std::size_t ny,
                     double u);

// Maximum over the grid; a negatively biased surrogate of the continuous
// supremum, with bias controlled by the grid resolution.
double sup_on_grid(std::span<const double> values);

}  // namespace ecfield
