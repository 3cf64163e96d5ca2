#include <doctest.h>

#include <cmath>

#include "ecfield/covariance.hpp"
#include "ecfield/ec_heuristic.hpp"
#include "ecfield/special_functions.hpp"
#include "test_helpers.hpp"

using namespace ecfield;
namespace oracle = ecfield::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double ec_density_quadrature(std::size_t j, double u) {
    auto integrand = [&](double r) { return hermite(j, r) * std::exp(-0.5 * r * r); };
    const double hi = std::max(u, 0.0) + 14.0;
    return std::pow(kTwoPi, -0.5 * static_cast<double>(j + 1)) *
           oracle::integrate(integrand, u, hi, 1e-13);
}

double chisq_density(std::size_t n, double x) {
    const double a = 0.5 * static_cast<double>(n);
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

}  // namespace

TEST_CASE("hermite: explicit low-order polynomials") {
    CHECK(hermite(0, 3.7) == 1.0);
    CHECK(hermite(1, 3.7) == 3.7);
    CHECK(hermite(2, 0.0) == -1.0);
    CHECK(hermite(3, 1.0) == -2.0);
    // H_4 = x^4 - 6 x^2 + 3
    const double x = 2.0;
    CHECK(hermite(4, x) == doctest::Approx(x * x * x * x - 6.0 * x * x + 3.0).epsilon(1e-15));
    CHECK(hermite(4, 2.0) == -5.0);
}

TEST_CASE("ec_density: closed-form values") {
    CHECK(ec_density(0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ec_density(1, 0.0) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-15));
    CHECK(ec_density(2, 1.0) ==
          doctest::Approx(std::pow(kTwoPi, -1.5) * std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("ec_density: convention lock against quadrature") {
    // verifies the probabilists' Hermite convention across orders and levels
    for (std::size_t j = 0; j <= 5; ++j) {
        for (int i = 0; i < 25; ++i) {
            const double u = -3.0 + 8.0 * static_cast<double>(i) / 24.0;
            CHECK(std::fabs(ec_density(j, u) - ec_density_quadrature(j, u)) <= 1e-10);
        }
    }
}

TEST_CASE("lk_curvatures: intervals, boxes, convex bodies") {
    const auto interval = ParameterSpace::interval(5.0, 1.0).lk_curvatures();
    REQUIRE(interval.size() == 2);
    CHECK(interval[0] == 1.0);
    CHECK(interval[1] == doctest::Approx(5.0).epsilon(1e-15));

    const auto box = ParameterSpace::box({2.0, 3.0}, 1.0).lk_curvatures();
    REQUIRE(box.size() == 3);
    CHECK(box[0] == 1.0);
    CHECK(box[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(box[2] == doctest::Approx(6.0).epsilon(1e-15));

    // metric scaling: L_j multiplies by lambda2^{j/2}
    const auto scaled = ParameterSpace::interval(5.0, 2.0).lk_curvatures();
    CHECK(scaled[1] == doctest::Approx(10.0).epsilon(1e-15));

    const auto convex = ParameterSpace::convex_planar(6.0, 10.0, 1.0).lk_curvatures();
    CHECK(convex[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(convex[2] == doctest::Approx(6.0).epsilon(1e-15));

    const auto box3 = ParameterSpace::box({2.0, 3.0, 4.0}, 1.0).lk_curvatures();
    REQUIRE(box3.size() == 4);
    CHECK(box3[1] == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(box3[2] == doctest::Approx(26.0).epsilon(1e-15));
    CHECK(box3[3] == doctest::Approx(24.0).epsilon(1e-15));
}

TEST_CASE("lk_curvatures: Steiner tube-volume oracle") {
    // 1D: |tube([0,T], r)| = T + 2r, so the linear coefficient fixes L_0 and
    // the constant fixes L_1.
    const double T = 5.0;
    const double len1 = oracle::tube_length_1d(T, 0.25);
    const double len2 = oracle::tube_length_1d(T, 0.5);
    const double slope = (len2 - len1) / 0.25;
    const double intercept = len1 - slope * 0.25;
    const auto lk1 = ParameterSpace::interval(T, 1.0).lk_curvatures();
    CHECK(intercept == doctest::Approx(lk1[1]).epsilon(2e-3));
    CHECK(0.5 * slope == doctest::Approx(lk1[0]).epsilon(2e-3));

    // 2D rectangle: area(r) = A + P r + pi r^2; match all three coefficients.
    const double a = 2.0, b = 3.0;
    const double r1 = 0.2, r2 = 0.4, r3 = 0.6;
    const double s1 = oracle::tube_area_rectangle(a, b, r1);
    const double s2 = oracle::tube_area_rectangle(a, b, r2);
    const double s3 = oracle::tube_area_rectangle(a, b, r3);
    // solve the 3x3 Vandermonde for (c0, c1, c2)
    const double d21 = (s2 - s1) / (r2 - r1);
    const double d32 = (s3 - s2) / (r3 - r2);
    const double c2 = (d32 - d21) / (r3 - r1);
    const double c1 = d21 - c2 * (r1 + r2);
    const double c0 = s1 - c1 * r1 - c2 * r1 * r1;
    const auto lk2 = ParameterSpace::box({a, b}, 1.0).lk_curvatures();
    CHECK(c0 == doctest::Approx(lk2[2]).epsilon(5e-3));        // area = L_2
    CHECK(0.5 * c1 == doctest::Approx(lk2[1]).epsilon(5e-3));  // perimeter / 2 = L_1
    CHECK(c2 / kPi == doctest::Approx(lk2[0]).epsilon(5e-3));  // pi coefficient = L_0
}

TEST_CASE("ec_approximation: closed forms and structure") {
    const auto space = ParameterSpace::interval(5.0, 1.0);
    const auto approx = ec_approximation(space, 2.0);
    CHECK(approx.total ==
          doctest::Approx(gaussian_upper_tail(2.0) + 5.0 / kTwoPi * std::exp(-2.0))
              .epsilon(1e-15));
    CHECK(approx.terms[0] == doctest::Approx(gaussian_upper_tail(2.0)).epsilon(1e-15));
    double sum = 0.0;
    for (double t : approx.terms) sum += t;
    CHECK(approx.total == doctest::Approx(sum).epsilon(1e-15));

    const auto box = ParameterSpace::box({2.0, 3.0}, 1.0);
    const double u = 2.0;  // H_1(u) = u
    const double expect = gaussian_upper_tail(u) + 5.0 / kTwoPi * std::exp(-0.5 * u * u) +
                          6.0 * std::pow(kTwoPi, -1.5) * u * std::exp(-0.5 * u * u);
    CHECK(ec_approximation(box, u).total == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("ec_approximation: tail decreases and stays positive") {
    for (const auto& space :
         {ParameterSpace::interval(5.0, 1.0), ParameterSpace::box({2.0, 3.0}, 1.0),
          ParameterSpace::convex_planar(6.0, 10.0, 1.0)}) {
        double prev = ec_approximation(space, 1.0).total;
        CHECK(prev > 0.0);
        for (double u = 1.25; u <= 8.0; u += 0.25) {
            const double cur = ec_approximation(space, u).total;
            CHECK(cur > 0.0);
            CHECK(cur < prev);
            prev = cur;
        }
        CHECK(ec_approximation(space, 10.0).total < 1e-10);
    }
}

TEST_CASE("ec_approximation: Rice consistency for the interval") {
    // with unit second moment the j = 1 term is (T / 2 pi) e^{-u^2/2} exactly
    const double T = 7.3;
    const auto space = ParameterSpace::interval(T, 1.0);
    for (double u : {0.5, 1.0, 2.0, 3.5}) {
        CHECK(ec_approximation(space, u).terms[1] ==
              doctest::Approx(T / kTwoPi * std::exp(-0.5 * u * u)).epsilon(1e-15));
    }
}

TEST_CASE("ec_approximation: joint rescaling invariance") {
    // replacing R(t) by R(t/s) and T by s T leaves the approximation unchanged
    const double T = 5.0;
    const auto base_model = CovarianceModel::squared_exponential(1.0);
    const double base_lambda2 = base_model.second_spectral_moment();
    const auto base =
        ec_approximation(ParameterSpace::interval(T, std::sqrt(base_lambda2)), 2.0);
    for (double s : {0.5, 2.0, 10.0}) {
        const auto model = CovarianceModel::squared_exponential(s);
        const double lambda2 = model.second_spectral_moment();
        const auto scaled =
            ec_approximation(ParameterSpace::interval(s * T, std::sqrt(lambda2)), 2.0);
        CHECK(scaled.total == doctest::Approx(base.total).epsilon(1e-12));
    }
}

TEST_CASE("finite_kl_bound: chi-square identities") {
    const double theta_tiny = 1e-9;  // cos rounds to exactly 1
    CHECK(finite_kl_bound(2, theta_tiny, 2.0, 1.0) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    for (double u : {0.5, 1.0, 2.0, 3.0}) {
        CHECK(finite_kl_bound(1, theta_tiny, u, 1.0) ==
              doctest::Approx(2.0 * gaussian_upper_tail(u)).epsilon(1e-13));
    }
    CHECK(finite_kl_bound(7, 0.7, 0.0, 2.5) == 2.5);
    // decreasing in u
    double prev = finite_kl_bound(3, 0.5, 0.0, 1.0);
    for (double u = 0.25; u <= 4.0; u += 0.25) {
        const double cur = finite_kl_bound(3, 0.5, u, 1.0);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS(finite_kl_bound(3, 0.0, 1.0, 1.0));
    CHECK_THROWS(finite_kl_bound(3, 2.0, 1.0, 1.0));
    CHECK_THROWS(finite_kl_bound(0, 0.5, 1.0, 1.0));
}

TEST_CASE("chisq_upper_tail matches quadrature of the density") {
    for (std::size_t n : {1, 2, 3, 5, 8}) {
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            auto f = [&](double t) { return chisq_density(n, t); };
            const double quad = oracle::integrate(f, x, x + 80.0, 1e-13);
            CHECK(std::fabs(chisq_upper_tail(n, x) - quad) <= 1e-10);
        }
    }
    CHECK(chisq_upper_tail(4, 2.0) ==
          doctest::Approx((1.0 + 1.0) * std::exp(-1.0)).epsilon(1e-14));
}
