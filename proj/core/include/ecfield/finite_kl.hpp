#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecfield/critical_variance.hpp"

namespace ecfield {

// Finite Karhunen-Loeve model of a closed curve on the unit sphere of R^n:
// per grid point an embedding vector phi (unit norm) and a tangent vector
// dphi. The correlation is rho(x, y) = <phi(x), phi(y)>.
//
// Grid points are assumed uniformly spaced over one traversal of the curve
// with parameter range [0, 2 pi); dphi can be supplied or computed by
// periodic spectral differentiation.
class FiniteKLModel {
public:
    static FiniteKLModel with_jacobian(std::size_t n_points, std::size_t ambient_dim,
                                       std::vector<double> phi, std::vector<double> dphi);

    static FiniteKLModel closed_curve(std::size_t n_points, std::size_t ambient_dim,
                                      std::vector<double> phi);

    std::size_t size() const { return n_points_; }
    std::size_t ambient_dim() const { return ambient_dim_; }

    std::span<const double> phi(std::size_t i) const {
        return {phi_.data() + i * ambient_dim_, ambient_dim_};
    }
    std::span<const double> dphi(std::size_t i) const {
        return {dphi_.data() + i * ambient_dim_, ambient_dim_};
    }

    double rho(std::size_t i, std::size_t j) const;

    double parameter_of(std::size_t i) const;  // 2 pi i / n_points

private:
    FiniteKLModel(std::size_t n_points, std::size_t ambient_dim,
                  std::vector<double> phi, std::vector<double> dphi);

    void validate() const;

    std::size_t n_points_ = 0;
    std::size_t ambient_dim_ = 0;
    std::vector<double> phi_;   // row-major n_points x ambient_dim
    std::vector<double> dphi_;
};

// ||phi(y) - P phi(y)||^2 / (1 - rho)^2 where P projects onto
// span{phi(x), dphi(x)}, orthonormalized by modified Gram-Schmidt with
// re-orthogonalization; spanning vectors with residual norm below 1e-12 are
// dropped. Throws when rho(x, y) >= 1 - kEpsRho.
double var_fx_finite_kl(const FiniteKLModel& model, std::size_t x_index, std::size_t y_index);

// Double maximization of var_fx_finite_kl over all admissible grid pairs
// (the eps_rho band around rho = 1 excluded), with parabolic refinement of
// the discrete objective around the winner.
CriticalVarianceReport sigma_critical_finite_kl(const FiniteKLModel& model);

}  // namespace ecfield
