#include "ecfield/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace ecfield {

double gaussian_upper_tail(double u) {
    return 0.5 * std::erfc(u * 0.7071067811865475244008443621048490);
}

double chisq_upper_tail(std::size_t n, double x) {
    if (n < 1) throw std::invalid_argument("chisq_upper_tail: n must be at least 1");
    if (x < 0.0) throw std::invalid_argument("chisq_upper_tail: x must be nonnegative");
    if (x == 0.0) return 1.0;

    const double z = 0.5 * x;
    double q;
    double a;  // current shape parameter, Q = Q(a, z)
    if (n % 2 == 0) {
        q = std::exp(-z);
        a = 1.0;
    } else {
        q = std::erfc(std::sqrt(z));
        a = 0.5;
    }
    // Q(a+1, z) = Q(a, z) + exp(a log z - z - lgamma(a+1))
    const double half_n = 0.5 * static_cast<double>(n);
    const double logz = std::log(z);
    while (a < half_n - 0.25) {
        q += std::exp(a * logz - z - std::lgamma(a + 1.0));
        a += 1.0;
    }
    return q < 1.0 ? q : 1.0;
}

}  // namespace ecfield
