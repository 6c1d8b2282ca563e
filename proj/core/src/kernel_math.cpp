#include <shepeaks/kernel_math.hpp>

#include <shepeaks/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <string>

namespace shepeaks::kernel {

namespace {

constexpr double kSqrtPi = 1.77245385090551602729816748334114518;
constexpr double kQuadratureTolerance = 1e-9;
constexpr unsigned kQuadratureDepth = 18;

// e^{-x^2}/sqrt(pi) - x erfc(x) for x >= 0.
double green_bracket(double x) {
  if (x < 6.0) {
    return std::exp(-x * x) / kSqrtPi - x * std::erfc(x);
  }
  // Asymptotic expansion: sum_{n>=1} (-1)^{n+1} (2n-1)!! / (2x^2)^n.
  const double inv = 1.0 / (2.0 * x * x);
  double term = inv;
  double sum = 0.0;
  double prev_abs = std::abs(term) * 2.0;
  for (int n = 1; n < 200; ++n) {
    if (std::abs(term) >= prev_abs) break;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    prev_abs = std::abs(term);
    term *= -static_cast<double>(2 * n + 1) * inv;
  }
  return std::exp(-x * x) / kSqrtPi * sum;
}

template <class F>
double integrate(F&& f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, lo, hi, kQuadratureDepth,
                                              kQuadratureTolerance, &error);
}

void check_truncation_args(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("truncated covariance: epsilon must be positive, got " +
                      std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("truncated covariance: delta must lie in (0,1), got " +
                      std::to_string(delta));
  }
}

}  // namespace

double heat_kernel(HeatKernelQuery q) {
  if (!(q.r > 0.0)) {
    throw DomainError("heat_kernel: r must be positive, got " + std::to_string(q.r));
  }
  return std::exp(-q.w * q.w / (2.0 * q.r)) / std::sqrt(2.0 * kPi * q.r);
}

double incomplete_green(double t, double a) {
  if (!(t > 0.0)) {
    throw DomainError("incomplete_green: t must be positive, got " + std::to_string(t));
  }
  const double scale = std::sqrt(2.0 * t);
  return scale * green_bracket(std::abs(a) / scale);
}

double spatial_covariance(double epsilon, double lag) {
  if (!(epsilon > 0.0)) {
    throw DomainError("spatial_covariance: epsilon must be positive, got " +
                      std::to_string(epsilon));
  }
  const double root = std::sqrt(epsilon);
  return 0.5 * root * incomplete_green(2.0, lag / root);
}

double temporal_covariance(double t, double s) {
  if (t < 0.0 || s < 0.0) {
    throw DomainError("temporal_covariance: times must be nonnegative");
  }
  return (std::sqrt(t + s) - std::sqrt(std::abs(t - s))) / std::sqrt(2.0 * kPi);
}

double truncation_half_width(double epsilon, double delta) {
  check_truncation_args(epsilon, delta);
  return std::sqrt(2.0 * epsilon * std::log(1.0 / delta));
}

double independence_gap(double epsilon, double delta) {
  return 2.0 * truncation_half_width(epsilon, delta);
}

double truncated_covariance_lag(double epsilon, double delta, double lag) {
  const double half = truncation_half_width(epsilon, delta);
  const double dist = std::abs(lag);
  // The windows overlap on [max - half, min + half]; disjoint (or touching)
  // windows share no noise.
  const double reach = half - 0.5 * dist;
  if (!(reach > 0.0)) return 0.0;

  // With r = eps - s = v^2 the space integral of p_r(y-x) p_r(y-x') over the
  // overlap is p_{2r}(lag) * erf(reach / sqrt(r)).
  const double d2 = 0.25 * dist * dist;
  auto inside = [&](double v) {
    if (v <= 0.0) return dist == 0.0 ? 1.0 / kSqrtPi : 0.0;
    return std::exp(-d2 / (v * v)) * std::erf(reach / v) / kSqrtPi;
  };
  auto outside = [&](double v) {
    if (v <= 0.0) return 0.0;
    return std::exp(-d2 / (v * v)) * std::erfc(reach / v) / kSqrtPi;
  };
  const double root = std::sqrt(epsilon);
  const double kept = integrate(inside, 0.0, root);
  const double lost = integrate(outside, 0.0, root);
  if (lost <= kept) {
    return spatial_covariance(epsilon, dist) - lost;
  }
  return kept;
}

double truncated_covariance(double epsilon, double delta, double x, double x_prime) {
  return truncated_covariance_lag(epsilon, delta, x - x_prime);
}

double truncation_deficit(double epsilon, double delta) {
  const double half = truncation_half_width(epsilon, delta);
  auto outside = [&](double v) {
    if (v <= 0.0) return 0.0;
    return std::erfc(half / v) / kSqrtPi;
  };
  return integrate(outside, 0.0, std::sqrt(epsilon));
}

double spacetime_distance(SpaceTimePoint p, SpaceTimePoint q) {
  return std::pow(std::abs(p.t - q.t), 0.25) + std::sqrt(std::abs(p.x - q.x));
}

CovarianceModel CovarianceModel::spatial(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("Spatial model: epsilon must be positive");
  return CovarianceModel(CovarianceKind::Spatial, epsilon, 0.0);
}

CovarianceModel CovarianceModel::temporal() {
  return CovarianceModel(CovarianceKind::Temporal, 0.0, 0.0);
}

CovarianceModel CovarianceModel::truncated(double epsilon, double delta) {
  check_truncation_args(epsilon, delta);
  return CovarianceModel(CovarianceKind::Truncated, epsilon, delta);
}

double CovarianceModel::operator()(double a, double b) const {
  switch (kind_) {
    case CovarianceKind::Spatial:
      return spatial_covariance(epsilon_, a - b);
    case CovarianceKind::Temporal:
      return temporal_covariance(a, b);
    case CovarianceKind::Truncated:
      return truncated_covariance(epsilon_, delta_, a, b);
  }
  return 0.0;
}

std::vector<double> CovarianceModel::matrix(std::span<const double> coords) const {
  const std::size_t n = coords.size();
  std::vector<double> out(n * n);
  // Stationary models only depend on |a - b|; memoise so that quadrature is
  // done once per distinct lag.
  std::map<double, double> memo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double value;
      if (kind_ == CovarianceKind::Temporal) {
        value = temporal_covariance(coords[i], coords[j]);
      } else {
        const double lag = std::abs(coords[i] - coords[j]);
        auto it = memo.find(lag);
        if (it == memo.end()) {
          it = memo.emplace(lag, (*this)(0.0, lag)).first;
        }
        value = it->second;
      }
      out[i * n + j] = value;
      out[j * n + i] = value;
    }
  }
  return out;
}

}  // namespace shepeaks::kernel
