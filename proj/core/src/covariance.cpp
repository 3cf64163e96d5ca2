#include "ecfield/covariance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecfield {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kNormalizedTol = 1e-12;

// d^k/dx^k cos(x) = cos(x + k pi/2), cycled exactly instead of shifting the
// argument.
double cos_derivative(std::size_t order, double x) {
    switch (order % 4) {
        case 0: return std::cos(x);
        case 1: return -std::sin(x);
        case 2: return -std::cos(x);
        default: return std::sin(x);
    }
}

// Probabilists' Hermite polynomial, used for the Gaussian family derivatives:
// d^k/du^k e^{-u^2/2} = (-1)^k He_k(u) e^{-u^2/2}.
double hermite_he(std::size_t k, double x) {
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = x;
    for (std::size_t j = 1; j < k; ++j) {
        const double next = x * cur - static_cast<double>(j) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

std::string to_string(CovFamily family) {
    switch (family) {
        case CovFamily::SquaredExponential: return "squared_exponential";
        case CovFamily::CosineMixture: return "cosine_mixture";
        case CovFamily::LatitudeCircle: return "latitude_circle";
    }
    return "unknown";
}

CovarianceModel::CovarianceModel(CovFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {}

CovarianceModel CovarianceModel::squared_exponential(double length_scale) {
    if (!(length_scale > 0.0)) {
        throw std::invalid_argument("squared_exponential: length scale must be positive");
    }
    CovarianceModel m(CovFamily::SquaredExponential, {length_scale});
    m.normalized_ = std::fabs(m.second_spectral_moment() - 1.0) <= kNormalizedTol;
    m.validate_range();
    return m;
}

CovarianceModel CovarianceModel::cosine_mixture(std::vector<double> weights,
                                                std::vector<double> frequencies) {
    if (weights.empty() || weights.size() != frequencies.size()) {
        throw std::invalid_argument("cosine_mixture: weights and frequencies must be nonempty and equal length");
    }
    double sum = 0.0;
    for (double a : weights) {
        if (!(a >= 0.0)) throw std::invalid_argument("cosine_mixture: weights must be nonnegative");
        sum += a;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("cosine_mixture: weights must sum to one");
    }
    for (double w : frequencies) {
        if (!(w > 0.0)) throw std::invalid_argument("cosine_mixture: frequencies must be positive");
    }
    std::vector<double> params = weights;
    params.insert(params.end(), frequencies.begin(), frequencies.end());
    CovarianceModel m(CovFamily::CosineMixture, std::move(params));
    m.normalized_ = std::fabs(m.second_spectral_moment() - 1.0) <= kNormalizedTol;
    m.validate_range();
    return m;
}

CovarianceModel CovarianceModel::latitude_circle(double radius) {
    if (!(radius > 0.0 && radius < 1.0)) {
        throw std::invalid_argument("latitude_circle: radius must lie in (0, 1)");
    }
    CovarianceModel m(CovFamily::LatitudeCircle, {radius});
    m.normalized_ = std::fabs(m.second_spectral_moment() - 1.0) <= kNormalizedTol;
    m.validate_range();
    return m;
}

double CovarianceModel::evaluate(double t) const {
    const double c = time_scale_;
    switch (family_) {
        case CovFamily::SquaredExponential: {
            const double x = c * t / params_[0];
            return std::exp(-0.5 * x * x);
        }
        case CovFamily::CosineMixture: {
            const std::size_t m = params_.size() / 2;
            double r = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                r += params_[i] * std::cos(params_[m + i] * c * t);
            }
            return r;
        }
        case CovFamily::LatitudeCircle: {
            const double r2 = params_[0] * params_[0];
            const double theta = std::remainder(c * t, kTwoPi);
            return 1.0 - r2 + r2 * std::cos(theta);
        }
    }
    return 0.0;
}

double CovarianceModel::one_minus(double t) const {
    const double c = time_scale_;
    switch (family_) {
        case CovFamily::SquaredExponential: {
            const double x = c * t / params_[0];
            return -std::expm1(-0.5 * x * x);
        }
        case CovFamily::CosineMixture: {
            const std::size_t m = params_.size() / 2;
            double r = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double s = std::sin(0.5 * params_[m + i] * c * t);
                r += params_[i] * 2.0 * s * s;
            }
            return r;
        }
        case CovFamily::LatitudeCircle: {
            const double s = std::sin(std::remainder(0.5 * c * t, kTwoPi));
            return 2.0 * params_[0] * params_[0] * s * s;
        }
    }
    return 0.0;
}

double CovarianceModel::derivative(std::size_t order, double t) const {
    if (order > 4) throw std::invalid_argument("derivative: order must be at most 4");
    if (order == 0) return evaluate(t);
    const double c = time_scale_;
    switch (family_) {
        case CovFamily::SquaredExponential: {
            const double alpha = c / params_[0];
            const double x = alpha * t;
            const double sign = (order % 2 == 0) ? 1.0 : -1.0;
            double a = alpha;
            for (std::size_t k = 1; k < order; ++k) a *= alpha;
            return sign * a * hermite_he(order, x) * std::exp(-0.5 * x * x);
        }
        case CovFamily::CosineMixture: {
            const std::size_t m = params_.size() / 2;
            double r = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double v = params_[m + i] * c;
                double vk = v;
                for (std::size_t k = 1; k < order; ++k) vk *= v;
                r += params_[i] * vk * cos_derivative(order, v * t);
            }
            return r;
        }
        case CovFamily::LatitudeCircle: {
            const double r2 = params_[0] * params_[0];
            double ck = c;
            for (std::size_t k = 1; k < order; ++k) ck *= c;
            const double theta = std::remainder(c * t, kTwoPi);
            return r2 * ck * cos_derivative(order, theta);
        }
    }
    return 0.0;
}

double CovarianceModel::second_spectral_moment() const {
    return -derivative(2, 0.0);
}

double CovarianceModel::fourth_spectral_moment() const {
    return derivative(4, 0.0);
}

CovarianceModel CovarianceModel::normalize_second_moment() const {
    if (normalized_) return *this;
    const double lambda2 = second_spectral_moment();
    if (!(lambda2 > 0.0)) {
        throw std::domain_error("normalize_second_moment: degenerate model with -R''(0) <= 0");
    }
    const double scale = std::sqrt(lambda2);
    CovarianceModel out = *this;
    out.time_scale_ = time_scale_ / scale;
    out.scale_factor_ = scale;
    const double check = out.second_spectral_moment();
    if (std::fabs(check - 1.0) > kNormalizedTol) {
        throw std::logic_error("normalize_second_moment: rescaled moment out of tolerance");
    }
    out.normalized_ = true;
    return out;
}

bool CovarianceModel::is_monotone_nonincreasing(double t_max, std::size_t grid_n) const {
    if (grid_n < 1000) {
        throw std::invalid_argument("is_monotone_nonincreasing: grid_n must be at least 1000");
    }
    if (!(t_max > 0.0)) {
        throw std::invalid_argument("is_monotone_nonincreasing: t_max must be positive");
    }
    for (std::size_t k = 1; k <= grid_n; ++k) {
        const double t = t_max * static_cast<double>(k) / static_cast<double>(grid_n);
        if (derivative(1, t) > kTolMono) return false;
    }
    return true;
}

void CovarianceModel::validate_range() const {
    const double r0 = evaluate(0.0);
    if (r0 != 1.0) throw std::logic_error("covariance: R(0) != 1");
    double t_check;
    switch (family_) {
        case CovFamily::SquaredExponential:
            t_check = 10.0 * params_[0] / time_scale_;
            break;
        case CovFamily::CosineMixture: {
            const std::size_t m = params_.size() / 2;
            double wmin = params_[m];
            for (std::size_t i = 1; i < m; ++i) wmin = std::min(wmin, params_[m + i]);
            t_check = 2.0 * kTwoPi / (wmin * time_scale_);
            break;
        }
        case CovFamily::LatitudeCircle:
        default:
            t_check = kTwoPi / time_scale_;
            break;
    }
    for (std::size_t k = 0; k <= 2048; ++k) {
        const double t = t_check * static_cast<double>(k) / 2048.0;
        if (std::fabs(evaluate(t)) > 1.0 + 1e-12) {
            throw std::logic_error("covariance: |R(t)| > 1 on the construction grid");
        }
    }
}

IsotropicModel::IsotropicModel(CovarianceModel radial, std::size_t dimension)
    : radial_(std::move(radial)), dimension_(dimension) {
    if (dimension_ < 1) throw std::invalid_argument("IsotropicModel: dimension must be at least 1");
}

}  // namespace ecfield
