#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "ecfield/covariance.hpp"

namespace ecfield {

// Below this lag the stationary variance ratio is 0/0 and the local value
// sigma_local substitutes for it.
inline constexpr double kEpsDiag = 1e-3;

// Correlations within this band of 1 are excluded from suprema (same 0/0
// degeneracy expressed in rho-space).
inline constexpr double kEpsRho = 1e-6;

// Tolerance for classifying the supremum as attained locally.
inline constexpr double kTolAttain = 1e-6;

enum class SigmaMethod { MonotoneShortcut, GridRefine, FiniteKL };

std::string to_string(SigmaMethod method);

// Critical variance of a field together with the quantities derived from it:
// the decay-exponent bound (1 + 1/sigma^2)/2 and the critical angle
// arccot(sqrt(sigma^2)). sigma_c_sq == 0 degenerates to an infinite exponent.
struct CriticalVarianceReport {
    double sigma_c_sq = 0.0;
    std::optional<double> argmax_t;  // nullopt marks a locally attained supremum
    bool attained_locally = false;
    double exponent = 0.0;           // 0.5 * (1 + 1/sigma_c_sq), +inf at zero
    double theta_c = 0.0;            // arccot(sqrt(sigma_c_sq))
    SigmaMethod method = SigmaMethod::GridRefine;
};

CriticalVarianceReport make_critical_variance_report(double sigma_c_sq,
                                                     std::optional<double> argmax_t,
                                                     bool attained_locally,
                                                     SigmaMethod method);

// Clamp tiny negative variances to zero; values below -1e-10 indicate an
// invalid model and throw.
double clamp_variance(double value, const char* what);

// Interior variance ratio (1 - R(t)^2 - R'(t)^2) / (1 - R(t))^2 for a
// normalized model. Requires t >= kEpsDiag; use sigma_local below that.
double var_fx_interior(const CovarianceModel& model, double t);

// Endpoint variant: the numerator gains max(R'(t), 0)^2, so it dominates the
// interior ratio everywhere.
double var_fx_boundary(const CovarianceModel& model, double t);

// Local critical variance R''''(0) - 1 of a normalized model.
double sigma_local(const CovarianceModel& model);

// Critical variance over [0, T]: max of sigma_local and the supremum of
// var_fx_boundary over (kEpsDiag, T], located by a 4096-point grid plus
// golden-section refinement of the winning bracket.
CriticalVarianceReport sigma_critical_interval(const CovarianceModel& model, double T);

// When R'(t) <= 0 on [0, T] the supremum is attained locally and equals
// sigma_local; otherwise the shortcut does not apply.
std::optional<CriticalVarianceReport> sigma_monotone_shortcut(const CovarianceModel& model,
                                                              double T);

// Isotropic field with monotone nonincreasing radial covariance restricted to
// a compact convex set: the critical variance is attained locally and equals
// the radial sigma_local, independently of the body. Throws if the
// monotonicity hypothesis fails (fall back to the grid methods).
CriticalVarianceReport sigma_isotropic_convex(const IsotropicModel& model);

// Variance (1 + R(t)) / (1 - R(t)) of the raw normalized-difference process;
// diverges as t -> 0. Diagnostic only.
double var_ftilde_diagnostic(const CovarianceModel& model, double t);

}  // namespace ecfield
