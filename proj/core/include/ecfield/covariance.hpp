#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ecfield {

enum class CovFamily { SquaredExponential, CosineMixture, LatitudeCircle };

std::string to_string(CovFamily family);

// Sign tolerance for the monotone-nonincreasing derivative scan.
inline constexpr double kTolMono = 1e-12;

// Stationary unit-variance covariance with exact derivatives up to order
// four. R(0) = 1 structurally for every family:
//
//   SquaredExponential(l):   R(t) = exp(-t^2 / (2 l^2))
//   CosineMixture(a, w):     R(t) = sum_i a_i cos(w_i t), a_i >= 0, sum a_i = 1
//   LatitudeCircle(r):       R(t) = 1 - r^2 + r^2 cos(t), r in (0, 1)
//
// A model carries a time-scale multiplier c with R(t) = R_base(c t);
// normalize_second_moment() adjusts c so that -R''(0) = 1. Models are
// immutable after construction and safe to share across threads.
class CovarianceModel {
public:
    static CovarianceModel squared_exponential(double length_scale);
    static CovarianceModel cosine_mixture(std::vector<double> weights,
                                          std::vector<double> frequencies);
    static CovarianceModel latitude_circle(double radius);

    double evaluate(double t) const;

    // 1 - R(t) evaluated without cancellation near t = 0; several critical
    // variance formulas divide by powers of this.
    double one_minus(double t) const;

    // Exact analytic derivative of order 0..4. Throws on higher orders.
    double derivative(std::size_t order, double t) const;

    double second_spectral_moment() const;  // -R''(0)
    double fourth_spectral_moment() const;  // R''''(0)

    // Returns R'(t) = R(t / sqrt(lambda2)) with lambda2 = -R''(0), so the
    // result satisfies -R''(0) = 1. A normalized model is returned unchanged,
    // making the operation bit-level idempotent. The applied scale factor
    // sqrt(lambda2) is recorded on the result.
    CovarianceModel normalize_second_moment() const;

    bool normalized() const { return normalized_; }
    double scale_factor() const { return scale_factor_; }

    // True iff R'(t_k) <= kTolMono on the grid t_k = t_max k / grid_n,
    // k = 1..grid_n. Requires grid_n >= 1000.
    bool is_monotone_nonincreasing(double t_max, std::size_t grid_n = 4096) const;

    CovFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    double time_scale() const { return time_scale_; }

private:
    CovarianceModel(CovFamily family, std::vector<double> params);

    void validate_range() const;  // |R(t)| <= 1 spot check on a grid

    CovFamily family_;
    std::vector<double> params_;   // SE: {l}; mixture: {a_0.., w_0..}; circle: {r}
    double time_scale_ = 1.0;
    double scale_factor_ = 1.0;
    bool normalized_ = false;
};

// Isotropic field on R^m whose covariance is radial(|x|).
class IsotropicModel {
public:
    IsotropicModel(CovarianceModel radial, std::size_t dimension);

    const CovarianceModel& radial() const { return radial_; }
    std::size_t dimension() const { return dimension_; }

    // Var(df/dx_i) for each coordinate, equal to -R''(0) of the radial part.
    double derivative_variance() const { return radial_.second_spectral_moment(); }

    bool is_monotone_nonincreasing(double t_max, std::size_t grid_n = 4096) const {
        return radial_.is_monotone_nonincreasing(t_max, grid_n);
    }

private:
    CovarianceModel radial_;
    std::size_t dimension_;
};

}  // namespace ecfield
