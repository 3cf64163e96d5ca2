#pragma once

#include <cstddef>
#include <vector>

namespace ecfield {

enum class SpaceShape { Interval, Box, ConvexPlanar };

// Parameter space carrying its Lipschitz-Killing curvatures under the metric
// induced by the field. metric_scale is sqrt(lambda2) per coordinate, so
// L_j scales as metric_scale^j.
class ParameterSpace {
public:
    static ParameterSpace interval(double length, double metric_scale = 1.0);
    static ParameterSpace box(std::vector<double> sides, double metric_scale = 1.0);
    static ParameterSpace convex_planar(double area, double perimeter,
                                        double metric_scale = 1.0);

    SpaceShape shape() const { return shape_; }
    std::size_t dim() const { return dim_; }
    double metric_scale() const { return metric_scale_; }
    const std::vector<double>& lengths() const { return lengths_; }
    double area() const { return area_; }
    double perimeter() const { return perimeter_; }

    // Intrinsic volumes (L_0, ..., L_dim):
    //   Interval(T)        -> (1, s T)
    //   Box(a_1..a_m)      -> L_j = s^j e_j(a_1..a_m), elementary symmetric
    //   ConvexPlanar(A, P) -> (1, s P / 2, s^2 A)
    // with s = metric_scale.
    std::vector<double> lk_curvatures() const;

private:
    ParameterSpace() = default;

    SpaceShape shape_ = SpaceShape::Interval;
    std::size_t dim_ = 1;
    double metric_scale_ = 1.0;
    std::vector<double> lengths_;
    double area_ = 0.0;
    double perimeter_ = 0.0;
};

// Probabilists' Hermite polynomial H_j: H_0 = 1, H_1 = x,
// H_{j+1}(x) = x H_j(x) - j H_{j-1}(x).
double hermite(std::size_t j, double x);

// Density of the j-th term of the expected Euler characteristic expansion:
// (2 pi)^{-(j+1)/2} Int_u^inf H_j(r) e^{-r^2/2} dr. For j = 0 this is the
// Gaussian upper tail; for j >= 1 the integral collapses to the closed form
// (2 pi)^{-(j+1)/2} H_{j-1}(u) e^{-u^2/2}.
double ec_density(std::size_t j, double u);

struct EcApproximation {
    double level = 0.0;
    std::vector<double> terms;  // L_j * ec_density(j, u), j = 0..dim
    double total = 0.0;
};

// Expected Euler characteristic approximation to P(sup f >= u):
// sum_j L_j(M) ec_density(j, u), with the per-term breakdown.
EcApproximation ec_approximation(const ParameterSpace& space, double u);

// Finite Karhunen-Loeve error bound: C * P(chi^2_n >= u^2 / cos^2 theta_c).
// The constant C is a required caller parameter; the conventional default is
// 1.0 as no value is prescribed.
double finite_kl_bound(std::size_t n, double theta_c, double u, double C);

}  // namespace ecfield
