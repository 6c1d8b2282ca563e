#pragma once

// Deterministic analytic core: the heat kernel of (1/2) d^2/dx^2, its
// incomplete Green's function, and the covariance models of the linear
// solution Z of dZ = (1/2) Z'' dt + dW, Z(0) = 0.
//
// All quantities are dimensionless. Every function here is pure.

#include <cstddef>
#include <span>
#include <vector>

namespace shepeaks::kernel {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct HeatKernelQuery {
  double r;  // elapsed time, > 0
  double w;  // displacement
};

struct SpaceTimePoint {
  double t;
  double x;
};

/// Gaussian density (2 pi r)^{-1/2} exp(-w^2 / 2r). Throws DomainError if r <= 0.
double heat_kernel(HeatKernelQuery q);

/// g_t(a) = int_0^t p_r(a) dr, evaluated in closed form through erfc.
///
/// For large |a| / sqrt(2t) the closed form is a difference of two nearly
/// equal terms; there the bracket is replaced by its asymptotic series,
/// which is accurate to round-off once the argument exceeds 6.
double incomplete_green(double t, double a);

/// Cov[Z(eps, x), Z(eps, x + lag)] = (sqrt(eps) / 2) g_2(lag / sqrt(eps)).
double spatial_covariance(double epsilon, double lag);

/// Cov[Z(t, x), Z(s, x)] = (sqrt(t + s) - sqrt|t - s|) / sqrt(2 pi).
double temporal_covariance(double t, double s);

/// Half-width sqrt(2 eps log(1/delta)) of the localisation window around x.
double truncation_half_width(double epsilon, double delta);

/// Separation beyond which truncated values are exactly independent:
/// twice the half-width, sqrt(8 eps log(1/delta)).
double independence_gap(double epsilon, double delta);

/// Covariance of the truncated field Z_delta(eps, .), whose noise is
/// restricted to the window [x - w, x + w] around each evaluation point.
///
/// Exactly zero when the two windows are disjoint. Otherwise the spatial
/// integral is done in closed form and the remaining time integral by
/// adaptive Gauss-Kronrod quadrature (relative tolerance 1e-9).
///
/// Requires eps > 0 and delta in (0, 1).
double truncated_covariance(double epsilon, double delta, double x, double x_prime);

/// Same as truncated_covariance, as a function of the lag only.
double truncated_covariance_lag(double epsilon, double delta, double lag);

/// Var[Z(eps, x)] - Var[Z_delta(eps, x)] = E|Z - Z_delta|^2 >= 0.
double truncation_deficit(double epsilon, double delta);

/// Parabolic metric |t - s|^{1/4} + |x - y|^{1/2}.
double spacetime_distance(SpaceTimePoint p, SpaceTimePoint q);

enum class CovarianceKind { Spatial, Temporal, Truncated };

/// A covariance model of Z. Spatial and Truncated models are stationary and
/// take positions; the Temporal model takes times.
class CovarianceModel {
 public:
  static CovarianceModel spatial(double epsilon);
  static CovarianceModel temporal();
  static CovarianceModel truncated(double epsilon, double delta);

  CovarianceKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }

  /// Covariance between the field at coordinates a and b (positions for
  /// stationary models, times for the temporal model).
  double operator()(double a, double b) const;

  /// Dense n x n covariance matrix over the given coordinates, row-major.
  std::vector<double> matrix(std::span<const double> coords) const;

 private:
  CovarianceModel(CovarianceKind kind, double epsilon, double delta)
      : kind_(kind), epsilon_(epsilon), delta_(delta) {}

  CovarianceKind kind_;
  double epsilon_;
  double delta_;
};

}  // namespace shepeaks::kernel
