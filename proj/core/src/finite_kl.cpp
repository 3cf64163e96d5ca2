#include "ecfield/finite_kl.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ecfield/fft.hpp"

namespace ecfield {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kUnitNormTol = 1e-10;
constexpr double kRankDropTol = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

FiniteKLModel::FiniteKLModel(std::size_t n_points, std::size_t ambient_dim,
                             std::vector<double> phi, std::vector<double> dphi)
    : n_points_(n_points),
      ambient_dim_(ambient_dim),
      phi_(std::move(phi)),
      dphi_(std::move(dphi)) {
    validate();
}

FiniteKLModel FiniteKLModel::with_jacobian(std::size_t n_points, std::size_t ambient_dim,
                                           std::vector<double> phi, std::vector<double> dphi) {
    if (phi.size() != n_points * ambient_dim || dphi.size() != n_points * ambient_dim) {
        throw std::invalid_argument("FiniteKLModel: phi/dphi size mismatch");
    }
    return FiniteKLModel(n_points, ambient_dim, std::move(phi), std::move(dphi));
}

FiniteKLModel FiniteKLModel::closed_curve(std::size_t n_points, std::size_t ambient_dim,
                                          std::vector<double> phi) {
    if (phi.size() != n_points * ambient_dim) {
        throw std::invalid_argument("FiniteKLModel: phi size mismatch");
    }
    if (n_points < 4) {
        throw std::invalid_argument("FiniteKLModel: closed curve needs at least 4 grid points");
    }
    // Periodic spectral differentiation with respect to the 2 pi parameter:
    // multiply bin k by i k_signed (Nyquist bin zeroed for even n).
    const std::size_t n = n_points;
    Fft fft(n);
    std::vector<double> dphi(n * ambient_dim, 0.0);
    std::vector<double> re(n), im(n);
    for (std::size_t c = 0; c < ambient_dim; ++c) {
        for (std::size_t j = 0; j < n; ++j) {
            re[j] = phi[j * ambient_dim + c];
            im[j] = 0.0;
        }
        fft.forward(re.data(), im.data());
        for (std::size_t k = 0; k < n; ++k) {
            double ks;
            if (2 * k < n) {
                ks = static_cast<double>(k);
            } else if (2 * k == n) {
                ks = 0.0;
            } else {
                ks = static_cast<double>(k) - static_cast<double>(n);
            }
            // multiply by i*ks: (re + i im) -> (-ks im + i ks re)
            const double r = re[k], i = im[k];
            re[k] = -ks * i;
            im[k] = ks * r;
        }
        fft.inverse(re.data(), im.data());
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            dphi[j * ambient_dim + c] = re[j] * scale;
        }
    }
    return FiniteKLModel(n_points, ambient_dim, std::move(phi), std::move(dphi));
}

void FiniteKLModel::validate() const {
    for (std::size_t i = 0; i < n_points_; ++i) {
        const double nv = norm(phi(i));
        if (std::fabs(nv - 1.0) > kUnitNormTol) {
            throw std::invalid_argument("FiniteKLModel: phi rows must have unit norm (1e-10)");
        }
    }
    for (std::size_t i = 0; i < n_points_; ++i) {
        for (std::size_t j = i + 1; j < n_points_; ++j) {
            if (rho(i, j) >= 1.0) {
                throw std::invalid_argument(
                    "FiniteKLModel: rho(x, y) must be strictly below 1 for distinct grid points");
            }
        }
    }
}

double FiniteKLModel::rho(std::size_t i, std::size_t j) const {
    return dot(phi(i), phi(j));
}

double FiniteKLModel::parameter_of(std::size_t i) const {
    return kTwoPi * static_cast<double>(i) / static_cast<double>(n_points_);
}

double var_fx_finite_kl(const FiniteKLModel& model, std::size_t x_index, std::size_t y_index) {
    if (x_index == y_index) {
        throw std::invalid_argument("var_fx_finite_kl: x_index and y_index must differ");
    }
    const double rho = model.rho(x_index, y_index);
    if (rho >= 1.0 - kEpsRho) {
        throw std::domain_error("var_fx_finite_kl: points too close (rho within eps_rho of 1)");
    }

    const std::size_t d = model.ambient_dim();
    const std::span<const double> px = model.phi(x_index);
    const std::span<const double> tx = model.dphi(x_index);

    // Orthonormal basis of span{phi(x), dphi(x)} by modified Gram-Schmidt
    // with one re-orthogonalization pass. phi(x) is unit norm already.
    std::vector<double> e1(px.begin(), px.end());
    std::vector<double> e2(tx.begin(), tx.end());
    bool have_e2 = true;
    for (int pass = 0; pass < 2; ++pass) {
        const double c = dot(e2, e1);
        for (std::size_t i = 0; i < d; ++i) e2[i] -= c * e1[i];
    }
    const double n2 = norm(e2);
    if (n2 < kRankDropTol) {
        have_e2 = false;  // tangent numerically parallel to phi(x)
    } else {
        for (std::size_t i = 0; i < d; ++i) e2[i] /= n2;
    }

    std::vector<double> res(model.phi(y_index).begin(), model.phi(y_index).end());
    const double c1 = dot(res, e1);
    for (std::size_t i = 0; i < d; ++i) res[i] -= c1 * e1[i];
    if (have_e2) {
        const double c2 = dot(res, e2);
        for (std::size_t i = 0; i < d; ++i) res[i] -= c2 * e2[i];
    }
    const double num = clamp_variance(dot(res, res), "var_fx_finite_kl");
    const double om = 1.0 - rho;
    return num / (om * om);
}

CriticalVarianceReport sigma_critical_finite_kl(const FiniteKLModel& model) {
    const std::size_t n = model.size();
    if (n < 4) throw std::invalid_argument("sigma_critical_finite_kl: need at least 4 grid points");

    auto admissible = [&](std::size_t i, std::size_t j) {
        return i != j && model.rho(i, j) < 1.0 - kEpsRho;
    };
    auto value = [&](std::size_t i, std::size_t j) {
        return var_fx_finite_kl(model, i, j);
    };

    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    std::size_t min_sep = n;  // smallest circular separation among admissible pairs
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!admissible(i, j)) continue;
            any = true;
            const std::size_t fwd = (j + n - i) % n;
            min_sep = std::min(min_sep, std::min(fwd, n - fwd));
            const double v = value(i, j);
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    if (!any) {
        throw std::domain_error("sigma_critical_finite_kl: no admissible grid pairs outside the eps_rho band");
    }

    // Parabolic refinement of the discrete objective along each index,
    // keeping the grid value when the three-point stencil is not concave.
    auto parabolic_peak = [](double vl, double vc, double vr) {
        const double curb = vl - 2.0 * vc + vr;
        if (!(curb < -1e-300)) return vc;
        const double peak = vc - (vr - vl) * (vr - vl) / (8.0 * curb);
        return peak > vc ? peak : vc;
    };
    double refined = best;
    {
        const std::size_t jl = (bj + n - 1) % n;
        const std::size_t jr = (bj + 1) % n;
        if (admissible(bi, jl) && admissible(bi, jr)) {
            refined = std::max(refined, parabolic_peak(value(bi, jl), best, value(bi, jr)));
        }
        const std::size_t il = (bi + n - 1) % n;
        const std::size_t ir = (bi + 1) % n;
        if (admissible(il, bj) && admissible(ir, bj)) {
            refined = std::max(refined, parabolic_peak(value(il, bj), best, value(ir, bj)));
        }
    }

    const std::size_t fwd = (bj + n - bi) % n;
    const std::size_t sep = std::min(fwd, n - fwd);
    const bool attained_locally = (sep == min_sep);
    return make_critical_variance_report(refined, model.parameter_of(bi), attained_locally,
                                         SigmaMethod::FiniteKL);
}

}  // namespace ecfield
