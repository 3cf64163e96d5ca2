#pragma once

#include <cstddef>

namespace ecfield {

// P(Z >= u) for standard normal Z, via the complementary error function.
double gaussian_upper_tail(double u);

// P(chi^2_n >= x) for integer degrees of freedom n >= 1 and x >= 0.
// Computed by the parity recurrence Q(a+1, z) = Q(a, z) + z^a e^{-z}/Gamma(a+1)
// from the erfc (odd n) or exp (even n) base case; all terms are positive so
// no cancellation occurs.
double chisq_upper_tail(std::size_t n, double x);

}  // namespace ecfield
