#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ecfield/covariance.hpp"
#include "ecfield/critical_variance.hpp"
#include "ecfield/finite_kl.hpp"

using namespace ecfield;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Regression fixture: a two-component cosine mixture whose endpoint variance
// exceeds the local value on the rising branch of R. Frozen from a dense-grid
// search over blend parameters.
const double kBlendWeights[] = {0.3, 0.7};
const double kBlendFreqs[] = {1.0, 3.0};
constexpr double kBlendT = 4.0;  // in normalized time units
constexpr double kBlendSigma = 0.9515450000107042;
constexpr double kBlendSigmaLocal = 0.30853994490358127;

CovarianceModel blend_model() {
    return CovarianceModel::cosine_mixture({kBlendWeights[0], kBlendWeights[1]},
                                           {kBlendFreqs[0], kBlendFreqs[1]})
        .normalize_second_moment();
}

// Latitude circle embedding phi(x) = (r cos x, r sin x, sqrt(1 - r^2)).
FiniteKLModel latitude_embedding(double r, std::size_t n) {
    std::vector<double> phi;
    std::vector<double> dphi;
    phi.reserve(3 * n);
    dphi.reserve(3 * n);
    const double z = std::sqrt(1.0 - r * r);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        phi.push_back(r * std::cos(x));
        phi.push_back(r * std::sin(x));
        phi.push_back(z);
        dphi.push_back(-r * std::sin(x));
        dphi.push_back(r * std::cos(x));
        dphi.push_back(0.0);
    }
    return FiniteKLModel::with_jacobian(n, 3, std::move(phi), std::move(dphi));
}

}  // namespace

TEST_CASE("var_fx_interior: limits and the degenerate cosine") {
    const auto se = CovarianceModel::squared_exponential(1.0);
    CHECK(var_fx_interior(se, 8.0) == doctest::Approx(1.0).epsilon(1e-10));
    // single cosine: 1 - cos^2 - sin^2 vanishes identically
    const auto cosine = CovarianceModel::cosine_mixture({1.0}, {1.0});
    CHECK(std::fabs(var_fx_interior(cosine, 1.0)) <= 1e-12);
    // near the diagonal the ratio approaches sigma_local = 2
    CHECK(var_fx_interior(se, 1e-3) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK_THROWS(var_fx_interior(se, 0.5e-3));
    CHECK_THROWS(var_fx_interior(CovarianceModel::latitude_circle(0.5), 1.0));  // unnormalized
}

TEST_CASE("var_fx_boundary: endpoint term and dominance") {
    const auto se = CovarianceModel::squared_exponential(1.0);
    for (double t = 0.01; t <= 6.0; t += 0.37) {
        CHECK(var_fx_boundary(se, std::max(t, kEpsDiag)) ==
              var_fx_interior(se, std::max(t, kEpsDiag)));
    }
    const auto cosine = CovarianceModel::cosine_mixture({1.0}, {1.0});
    CHECK(var_fx_boundary(cosine, 1.5 * kPi) == doctest::Approx(1.0).epsilon(1e-12));
    const auto blend = blend_model();
    for (double t = kEpsDiag; t <= kBlendT; t += 0.0137) {
        CHECK(var_fx_boundary(blend, t) >= var_fx_interior(blend, t) - 1e-15);
    }
}

TEST_CASE("sigma_local: spectral moment values") {
    CHECK(sigma_local(CovarianceModel::squared_exponential(1.0)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sigma_local(CovarianceModel::cosine_mixture({1.0}, {1.0})) == 0.0);
    for (double r : {0.3, 0.5, 0.8}) {
        const auto lat = CovarianceModel::latitude_circle(r).normalize_second_moment();
        CHECK(sigma_local(lat) ==
              doctest::Approx((1.0 - r * r) / (r * r)).epsilon(1e-10));
    }
    CHECK_THROWS(sigma_local(CovarianceModel::latitude_circle(0.5)));
}

TEST_CASE("local limit: Richardson extrapolation of the interior ratio") {
    for (const auto& model :
         {CovarianceModel::squared_exponential(1.0),
          CovarianceModel::latitude_circle(0.5).normalize_second_moment(), blend_model()}) {
        const double f1 = var_fx_interior(model, 1e-2);
        const double f2 = var_fx_interior(model, 5e-3);
        const double f3 = var_fx_interior(model, 2.5e-3);
        const double e1 = (4.0 * f2 - f1) / 3.0;
        const double e2 = (4.0 * f3 - f2) / 3.0;
        const double extrapolated = (16.0 * e2 - e1) / 15.0;
        CHECK(extrapolated == doctest::Approx(sigma_local(model)).epsilon(1e-5));
    }
}

TEST_CASE("sigma_critical_interval: monotone family attains locally") {
    const auto report = sigma_critical_interval(CovarianceModel::squared_exponential(1.0), 5.0);
    CHECK(report.sigma_c_sq == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(report.attained_locally);
    CHECK_FALSE(report.argmax_t.has_value());
    CHECK(report.exponent == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(report.method == SigmaMethod::GridRefine);
}

TEST_CASE("sigma_critical_interval: degenerate cosine reports the sentinel") {
    const auto report =
        sigma_critical_interval(CovarianceModel::cosine_mixture({1.0}, {1.0}), kPi);
    CHECK(report.sigma_c_sq == 0.0);
    CHECK(std::isinf(report.exponent));
    CHECK(report.theta_c == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK(report.attained_locally);
}

TEST_CASE("sigma_critical_interval: blend regression fixture") {
    const auto model = blend_model();
    const auto report = sigma_critical_interval(model, kBlendT);
    CHECK(report.sigma_c_sq == doctest::Approx(kBlendSigma).epsilon(1e-6));
    CHECK_FALSE(report.attained_locally);
    REQUIRE(report.argmax_t.has_value());
    CHECK(*report.argmax_t == doctest::Approx(kBlendT).epsilon(1e-6));
    CHECK(model.derivative(1, *report.argmax_t) > 0.0);
    CHECK(report.sigma_c_sq > sigma_local(model) + 0.3);

    // independent dense-grid oracle, no golden-section refinement
    double oracle_best = 0.0;
    const std::size_t grid = 1 << 17;
    for (std::size_t k = 0; k <= grid; ++k) {
        const double t =
            kEpsDiag + (kBlendT - kEpsDiag) * static_cast<double>(k) / static_cast<double>(grid);
        oracle_best = std::max(oracle_best, var_fx_boundary(model, t));
    }
    oracle_best = std::max(oracle_best, sigma_local(model));
    CHECK(report.sigma_c_sq == doctest::Approx(oracle_best).epsilon(1e-6));
    CHECK(oracle_best == doctest::Approx(kBlendSigma).epsilon(1e-9));
}

TEST_CASE("sigma_monotone_shortcut: applicability and agreement") {
    const auto se = CovarianceModel::squared_exponential(1.0);
    const auto shortcut = sigma_monotone_shortcut(se, 10.0);
    REQUIRE(shortcut.has_value());
    CHECK(shortcut->sigma_c_sq == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(shortcut->method == SigmaMethod::MonotoneShortcut);
    CHECK(shortcut->attained_locally);

    CHECK_FALSE(sigma_monotone_shortcut(blend_model(), kBlendT).has_value());

    // agreement with the grid whenever the shortcut applies
    const auto grid = sigma_critical_interval(se, 10.0);
    CHECK(std::fabs(shortcut->sigma_c_sq - grid.sigma_c_sq) <= kTolAttain);
    const auto lat = CovarianceModel::latitude_circle(0.5).normalize_second_moment();
    const auto lat_short = sigma_monotone_shortcut(lat, 0.5 * kPi);
    REQUIRE(lat_short.has_value());
    const auto lat_grid = sigma_critical_interval(lat, 0.5 * kPi);
    CHECK(std::fabs(lat_short->sigma_c_sq - lat_grid.sigma_c_sq) <= kTolAttain);
}

TEST_CASE("sigma_isotropic_convex: radial shortcut and hypothesis") {
    const IsotropicModel iso(CovarianceModel::squared_exponential(1.0), 2);
    const auto report = sigma_isotropic_convex(iso);
    CHECK(report.sigma_c_sq == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.attained_locally);
    // same radial computation as the 1D local value
    CHECK(report.sigma_c_sq == sigma_local(iso.radial()));

    const IsotropicModel waves(CovarianceModel::cosine_mixture({1.0}, {1.0}), 2);
    CHECK_THROWS(sigma_isotropic_convex(waves));
}

TEST_CASE("exponent mapping and critical angle") {
    const double sigmas[] = {0.5, 1.0, 2.0, 3.0};
    const double exponents[] = {1.5, 1.0, 0.75, 2.0 / 3.0};
    for (int i = 0; i < 4; ++i) {
        const auto r = make_critical_variance_report(sigmas[i], std::nullopt, true,
                                                     SigmaMethod::GridRefine);
        CHECK(r.exponent == doctest::Approx(exponents[i]).epsilon(1e-15));
        CHECK(1.0 / std::tan(r.theta_c) ==
              doctest::Approx(std::sqrt(sigmas[i])).epsilon(1e-12));
    }
    const auto zero =
        make_critical_variance_report(0.0, std::nullopt, true, SigmaMethod::GridRefine);
    CHECK(std::isinf(zero.exponent));
    CHECK(zero.theta_c == doctest::Approx(0.5 * kPi).epsilon(1e-15));
    CHECK_THROWS(make_critical_variance_report(-1e-9, std::nullopt, true,
                                               SigmaMethod::GridRefine));
    // within tolerance of zero: clamped
    const auto tiny =
        make_critical_variance_report(-5e-11, std::nullopt, true, SigmaMethod::GridRefine);
    CHECK(tiny.sigma_c_sq == 0.0);
}

TEST_CASE("var_fx_finite_kl: latitude circle is constant") {
    const auto model = latitude_embedding(0.5, 512);
    const double expected = 3.0;  // (1 - r^2) / r^2
    CHECK(var_fx_finite_kl(model, 0, 100) == doctest::Approx(expected).epsilon(1e-8));
    CHECK(var_fx_finite_kl(model, 17, 444) == doctest::Approx(expected).epsilon(1e-8));
    CHECK(var_fx_finite_kl(model, 444, 17) == doctest::Approx(expected).epsilon(1e-8));
    CHECK_THROWS(var_fx_finite_kl(model, 3, 3));

    // great-circle limit: the value collapses with 1 - r^2
    const auto nearly_great = latitude_embedding(0.999, 256);
    const double r2 = 0.999 * 0.999;
    CHECK(var_fx_finite_kl(nearly_great, 0, 64) ==
          doctest::Approx((1.0 - r2) / r2).epsilon(1e-6));
}

TEST_CASE("var_fx_finite_kl: orientation reversal leaves values unchanged") {
    const std::size_t n = 128;
    const auto fwd = latitude_embedding(0.6, n);
    std::vector<double> phi_rev, dphi_rev;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (n - i) % n;
        for (std::size_t c = 0; c < 3; ++c) phi_rev.push_back(fwd.phi(j)[c]);
        for (std::size_t c = 0; c < 3; ++c) dphi_rev.push_back(-fwd.dphi(j)[c]);
    }
    const auto rev = FiniteKLModel::with_jacobian(n, 3, std::move(phi_rev), std::move(dphi_rev));
    const double a = var_fx_finite_kl(fwd, 10, 50);
    const double b = var_fx_finite_kl(rev, (n - 10) % n, (n - 50) % n);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("var_fx_finite_kl: eps_rho band rejects near-diagonal pairs") {
    const auto model = latitude_embedding(0.5, 8192);
    // adjacent points: 1 - rho = r^2 (1 - cos(2 pi / 8192)) ~ 7e-8 < eps_rho
    CHECK_THROWS(var_fx_finite_kl(model, 0, 1));
    CHECK_NOTHROW(var_fx_finite_kl(model, 0, 64));
}

TEST_CASE("finite-KL constancy invariant on the latitude circle") {
    const auto model = latitude_embedding(0.5, 256);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (std::size_t j = 0; j < model.size(); ++j) {
            if (i == j || model.rho(i, j) >= 1.0 - kEpsRho) continue;
            const double v = var_fx_finite_kl(model, i, j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    CHECK(hi - lo <= 1e-8);
}

TEST_CASE("sigma_critical_finite_kl: latitude circles") {
    const auto report = sigma_critical_finite_kl(latitude_embedding(0.5, 512));
    CHECK(report.sigma_c_sq == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(report.theta_c == doctest::Approx(kPi / 6.0).epsilon(1e-9));
    CHECK(report.method == SigmaMethod::FiniteKL);

    const auto diag = sigma_critical_finite_kl(latitude_embedding(1.0 / std::sqrt(2.0), 512));
    CHECK(diag.sigma_c_sq == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(diag.theta_c == doctest::Approx(kPi / 4.0).epsilon(1e-9));
}

TEST_CASE("sigma_critical_finite_kl: spectral jacobian route agrees") {
    const std::size_t n = 512;
    std::vector<double> phi;
    const double r = 0.5, z = std::sqrt(1.0 - r * r);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        phi.push_back(r * std::cos(x));
        phi.push_back(r * std::sin(x));
        phi.push_back(z);
    }
    const auto model = FiniteKLModel::closed_curve(n, 3, std::move(phi));
    // spectral differentiation reproduces the analytic tangents of a
    // band-limited curve to near machine precision
    CHECK(model.dphi(7)[0] ==
          doctest::Approx(-r * std::sin(2.0 * kPi * 7.0 / static_cast<double>(n)))
              .epsilon(1e-10));
    const auto report = sigma_critical_finite_kl(model);
    CHECK(report.sigma_c_sq == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("finite-KL and stationary routes agree on the latitude covariance") {
    // distances on the circle reach half the circumference, so the stationary
    // surrogate runs on a half-period interval
    const auto model = CovarianceModel::latitude_circle(0.5).normalize_second_moment();
    const double half_period = kPi * model.scale_factor();  // = pi/2
    const auto stationary = sigma_critical_interval(model, half_period);
    const auto finite_kl = sigma_critical_finite_kl(latitude_embedding(0.5, 512));
    CHECK(std::fabs(stationary.sigma_c_sq - finite_kl.sigma_c_sq) <= 1e-6);
}

TEST_CASE("var_ftilde_diagnostic: values and divergence") {
    const auto cosine = CovarianceModel::cosine_mixture({1.0}, {1.0});
    CHECK(var_ftilde_diagnostic(cosine, 0.5 * kPi) == doctest::Approx(1.0).epsilon(1e-12));
    const auto se = CovarianceModel::squared_exponential(1.0);
    CHECK(var_ftilde_diagnostic(se, 1e-6) > 1e10);
    CHECK_THROWS(var_ftilde_diagnostic(se, 0.0));
    CHECK_THROWS(var_ftilde_diagnostic(se, -1.0));
    double prev = var_ftilde_diagnostic(se, 0.1);
    for (double t = 0.2; t <= 3.0; t += 0.1) {
        const double cur = var_ftilde_diagnostic(se, t);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("FiniteKLModel validation") {
    // non-unit rows rejected
    std::vector<double> bad = {1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS(FiniteKLModel::with_jacobian(4, 3, bad, bad));
    // duplicate points (rho = 1) rejected
    std::vector<double> dup, ddup;
    for (int i = 0; i < 4; ++i) {
        dup.insert(dup.end(), {1.0, 0.0, 0.0});
        ddup.insert(ddup.end(), {0.0, 1.0, 0.0});
    }
    CHECK_THROWS(FiniteKLModel::with_jacobian(4, 3, dup, ddup));
}
