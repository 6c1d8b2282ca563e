#pragma once

// Independent reference computations for the test suites. Nothing here
// shares code with the library beyond the public types.

#include <cstddef>
#include <span>
#include <vector>

namespace shepeaks::oracle {

/// int_0^t p_r(a) dr by adaptive Gauss-Kronrod after r = v^2.
double incomplete_green_quadrature(double t, double a);

/// int_0^eps p_{2s}(lag) ds by adaptive Gauss-Kronrod after s = v^2.
double spatial_covariance_quadrature(double epsilon, double lag);

/// Covariance of the window-restricted field at lag, as the double integral
/// int_0^eps int_{overlap} p_r(y) p_r(lag - y) dy dr.
double truncated_covariance_quadrature(double epsilon, double delta, double lag);

/// Largest subset with all consecutive gaps > r, by exhaustive search.
/// points must be ascending and hold at most 20 entries.
std::size_t brute_force_capacity(std::span<const double> points, double r);

/// Both endpoints of the 2^level intervals of the middle-thirds construction.
std::vector<double> cantor_prefix(int level);

/// Occupied dyadic boxes of size 2^-k by direct enumeration of box indices.
std::size_t brute_force_box_count(std::span<const double> points, int k);

}  // namespace shepeaks::oracle
