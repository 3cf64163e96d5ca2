#include "ecfield/ec_heuristic.hpp"

#include <cmath>
#include <stdexcept>

#include "ecfield/special_functions.hpp"

namespace ecfield {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ParameterSpace ParameterSpace::interval(double length, double metric_scale) {
    if (!(length > 0.0)) throw std::invalid_argument("interval: length must be positive");
    if (!(metric_scale > 0.0)) throw std::invalid_argument("interval: metric scale must be positive");
    ParameterSpace s;
    s.shape_ = SpaceShape::Interval;
    s.dim_ = 1;
    s.metric_scale_ = metric_scale;
    s.lengths_ = {length};
    return s;
}

ParameterSpace ParameterSpace::box(std::vector<double> sides, double metric_scale) {
    if (sides.empty()) throw std::invalid_argument("box: at least one side required");
    for (double a : sides) {
        if (!(a > 0.0)) throw std::invalid_argument("box: side lengths must be positive");
    }
    if (!(metric_scale > 0.0)) throw std::invalid_argument("box: metric scale must be positive");
    ParameterSpace s;
    s.shape_ = SpaceShape::Box;
    s.dim_ = sides.size();
    s.metric_scale_ = metric_scale;
    s.lengths_ = std::move(sides);
    return s;
}

ParameterSpace ParameterSpace::convex_planar(double area, double perimeter,
                                             double metric_scale) {
    if (!(area > 0.0) || !(perimeter > 0.0)) {
        throw std::invalid_argument("convex_planar: area and perimeter must be positive");
    }
    if (!(metric_scale > 0.0)) throw std::invalid_argument("convex_planar: metric scale must be positive");
    ParameterSpace s;
    s.shape_ = SpaceShape::ConvexPlanar;
    s.dim_ = 2;
    s.metric_scale_ = metric_scale;
    s.area_ = area;
    s.perimeter_ = perimeter;
    return s;
}

std::vector<double> ParameterSpace::lk_curvatures() const {
    std::vector<double> lk(dim_ + 1, 0.0);
    const double s = metric_scale_;
    switch (shape_) {
        case SpaceShape::Interval:
            lk[0] = 1.0;
            lk[1] = s * lengths_[0];
            break;
        case SpaceShape::Box: {
            // elementary symmetric polynomials of the scaled side lengths
            lk[0] = 1.0;
            for (double a : lengths_) {
                for (std::size_t j = dim_; j >= 1; --j) {
                    lk[j] += lk[j - 1] * s * a;
                }
            }
            break;
        }
        case SpaceShape::ConvexPlanar:
            lk[0] = 1.0;
            lk[1] = s * perimeter_ / 2.0;
            lk[2] = s * s * area_;
            break;
    }
    return lk;
}

double hermite(std::size_t j, double x) {
    double prev = 1.0;
    if (j == 0) return prev;
    double cur = x;
    for (std::size_t k = 1; k < j; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double ec_density(std::size_t j, double u) {
    if (j == 0) return gaussian_upper_tail(u);
    const double norm = std::pow(kTwoPi, -0.5 * static_cast<double>(j + 1));
    return norm * hermite(j - 1, u) * std::exp(-0.5 * u * u);
}

EcApproximation ec_approximation(const ParameterSpace& space, double u) {
    const std::vector<double> lk = space.lk_curvatures();
    EcApproximation out;
    out.level = u;
    out.terms.resize(lk.size());
    double total = 0.0;
    for (std::size_t j = 0; j < lk.size(); ++j) {
        out.terms[j] = lk[j] * ec_density(j, u);
        total += out.terms[j];
    }
    out.total = total;
    return out;
}

double finite_kl_bound(std::size_t n, double theta_c, double u, double C) {
    if (n < 1) throw std::invalid_argument("finite_kl_bound: n must be at least 1");
    if (!(theta_c > 0.0) || !(theta_c < 1.5707963267948966)) {
        throw std::invalid_argument("finite_kl_bound: theta_c must lie in (0, pi/2)");
    }
    if (u < 0.0) throw std::invalid_argument("finite_kl_bound: u must be nonnegative");
    if (!(C > 0.0)) throw std::invalid_argument("finite_kl_bound: C must be positive");
    const double c = std::cos(theta_c);
    const double arg = (u / c) * (u / c);
    return C * chisq_upper_tail(n, arg);
}

}  // namespace ecfield
