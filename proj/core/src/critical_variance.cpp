#include "ecfield/critical_variance.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace ecfield {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;
constexpr std::size_t kCoarseGridPoints = 4096;
constexpr double kGoldenBracketWidth = 1e-10;
constexpr double kIsotropicScanTmax = 50.0;

void require_normalized(const CovarianceModel& model, const char* op) {
    if (!model.normalized()) {
        throw std::invalid_argument(std::string(op) + ": model must be normalized (-R''(0) = 1)");
    }
}

// Shared core of the interior/endpoint ratios. The numerator is assembled
// from 1 - R through one_minus() so the t^4-order cancellation near the
// diagonal happens between accurately computed t^2-order terms.
double var_fx_ratio(const CovarianceModel& model, double t, bool endpoint) {
    const double om = model.one_minus(t);
    if (om <= 0.0) {
        throw std::domain_error("var_fx: correlation equals one at nonzero lag");
    }
    const double rd = model.derivative(1, t);
    double num = om * (2.0 - om) - rd * rd;
    if (endpoint && rd > 0.0) num += rd * rd;
    return clamp_variance(num, "var_fx") / (om * om);
}

// Golden-section maximization keeping the best evaluated point.
void golden_max(const CovarianceModel& model, double lo, double hi,
                double& best_t, double& best_v) {
    constexpr double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = var_fx_boundary(model, c);
    double fd = var_fx_boundary(model, d);
    auto consider = [&](double t, double v) {
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    };
    consider(c, fc);
    consider(d, fd);
    while (b - a > kGoldenBracketWidth) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = var_fx_boundary(model, c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = var_fx_boundary(model, d);
            consider(d, fd);
        }
    }
}

}  // namespace

std::string to_string(SigmaMethod method) {
    switch (method) {
        case SigmaMethod::MonotoneShortcut: return "monotone-shortcut";
        case SigmaMethod::GridRefine: return "grid-refine";
        case SigmaMethod::FiniteKL: return "finite-KL";
    }
    return "unknown";
}

CriticalVarianceReport make_critical_variance_report(double sigma_c_sq,
                                                     std::optional<double> argmax_t,
                                                     bool attained_locally,
                                                     SigmaMethod method) {
    CriticalVarianceReport r;
    r.sigma_c_sq = clamp_variance(sigma_c_sq, "sigma_c_sq");
    r.argmax_t = argmax_t;
    r.attained_locally = attained_locally;
    if (r.sigma_c_sq > 0.0) {
        r.exponent = 0.5 * (1.0 + 1.0 / r.sigma_c_sq);
        r.theta_c = std::atan(1.0 / std::sqrt(r.sigma_c_sq));
    } else {
        r.exponent = std::numeric_limits<double>::infinity();
        r.theta_c = 0.5 * kPi;
    }
    r.method = method;
    return r;
}

double clamp_variance(double value, const char* what) {
    if (value >= 0.0) return value;
    if (value < -1e-10) {
        throw std::domain_error(std::string(what) + ": variance below -1e-10, model invalid");
    }
    std::cerr << "warning: " << what << " clamped to zero (was " << value << ")\n";
    return 0.0;
}

double var_fx_interior(const CovarianceModel& model, double t) {
    require_normalized(model, "var_fx_interior");
    if (t < kEpsDiag) {
        throw std::domain_error("var_fx_interior: t below eps_diag, use sigma_local");
    }
    return var_fx_ratio(model, t, false);
}

double var_fx_boundary(const CovarianceModel& model, double t) {
    require_normalized(model, "var_fx_boundary");
    if (t < kEpsDiag) {
        throw std::domain_error("var_fx_boundary: t below eps_diag, use sigma_local");
    }
    return var_fx_ratio(model, t, true);
}

double sigma_local(const CovarianceModel& model) {
    require_normalized(model, "sigma_local");
    return clamp_variance(model.fourth_spectral_moment() - 1.0, "sigma_local");
}

CriticalVarianceReport sigma_critical_interval(const CovarianceModel& model, double T) {
    require_normalized(model, "sigma_critical_interval");
    if (!(T > 0.0)) throw std::invalid_argument("sigma_critical_interval: T must be positive");

    const double local = sigma_local(model);

    double best_t = kEpsDiag;
    double best_v = -std::numeric_limits<double>::infinity();
    if (T > kEpsDiag) {
        const double lo = kEpsDiag;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k <= kCoarseGridPoints; ++k) {
            const double t = lo + (T - lo) * static_cast<double>(k) /
                                      static_cast<double>(kCoarseGridPoints);
            if (model.one_minus(t) < kEpsRho) continue;  // wrap of a periodic model
            const double v = var_fx_ratio(model, t, true);
            if (v > best_v) {
                best_v = v;
                best_t = t;
                best_k = k;
            }
        }
        if (std::isfinite(best_v)) {
            const double step = (T - lo) / static_cast<double>(kCoarseGridPoints);
            const double bl = std::max(lo, best_t - step);
            const double bh = std::min(T, best_t + step);
            if (model.one_minus(bl) >= kEpsRho && model.one_minus(bh) >= kEpsRho) {
                golden_max(model, bl, bh, best_t, best_v);
            }
        }
        (void)best_k;
    }

    double sigma = std::max(local, best_v);
    const bool attained = std::fabs(sigma - local) <= kTolAttain;
    if (attained) {
        // the analytic local value is exact; grid noise never beats it
        return make_critical_variance_report(local, std::nullopt, true, SigmaMethod::GridRefine);
    }
    return make_critical_variance_report(sigma, best_t, false, SigmaMethod::GridRefine);
}

std::optional<CriticalVarianceReport> sigma_monotone_shortcut(const CovarianceModel& model,
                                                              double T) {
    require_normalized(model, "sigma_monotone_shortcut");
    if (!(T > 0.0)) throw std::invalid_argument("sigma_monotone_shortcut: T must be positive");
    if (!model.is_monotone_nonincreasing(T, kCoarseGridPoints)) {
        return std::nullopt;
    }
    return make_critical_variance_report(sigma_local(model), std::nullopt, true,
                                         SigmaMethod::MonotoneShortcut);
}

CriticalVarianceReport sigma_isotropic_convex(const IsotropicModel& model) {
    require_normalized(model.radial(), "sigma_isotropic_convex");
    if (!model.is_monotone_nonincreasing(kIsotropicScanTmax, 8192)) {
        throw std::domain_error(
            "sigma_isotropic_convex: radial covariance is not monotone nonincreasing; "
            "use the grid-based interval method instead");
    }
    return make_critical_variance_report(sigma_local(model.radial()), std::nullopt, true,
                                         SigmaMethod::MonotoneShortcut);
}

double var_ftilde_diagnostic(const CovarianceModel& model, double t) {
    if (!(t > 0.0)) throw std::domain_error("var_ftilde_diagnostic: t must be positive");
    const double om = model.one_minus(t);
    return (2.0 - om) / om;  // (1 + R) / (1 - R)
}

}  // namespace ecfield
