#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace shepeaks::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double adaptive(F&& f, double lo, double hi, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, tol);
}

double heat(double r, double w) { return std::exp(-w * w / (2.0 * r)) / std::sqrt(2.0 * kPi * r); }

}  // namespace

double incomplete_green_quadrature(double t, double a) {
  // p_{v^2}(a) 2v dv = sqrt(2/pi) exp(-a^2 / 2v^2) dv
  const auto f = [a](double v) {
    return v > 0.0 ? std::sqrt(2.0 / kPi) * std::exp(-a * a / (2.0 * v * v)) : (a == 0.0 ? std::sqrt(2.0 / kPi) : 0.0);
  };
  return adaptive(f, 0.0, std::sqrt(t));
}

double spatial_covariance_quadrature(double epsilon, double lag) {
  // p_{2v^2}(lag) 2v dv = exp(-lag^2 / 4v^2) / sqrt(pi) dv
  const auto f = [lag](double v) {
    if (v == 0.0) return lag == 0.0 ? 1.0 / std::sqrt(kPi) : 0.0;
    return std::exp(-lag * lag / (4.0 * v * v)) / std::sqrt(kPi);
  };
  return adaptive(f, 0.0, std::sqrt(epsilon));
}

double truncated_covariance_quadrature(double epsilon, double delta, double lag) {
  const double h = std::sqrt(2.0 * epsilon * std::log(1.0 / delta));
  lag = std::abs(lag);
  const double lo = std::max(-h, lag - h);
  const double hi = std::min(h, lag + h);
  if (lo >= hi) return 0.0;
  const auto inner = [&](double v) {
    if (v == 0.0) return 0.0;
    const double r = v * v;
    const auto g = [&](double y) { return heat(r, y) * heat(r, lag - y); };
    // The product peaks at y = lag / 2 with width ~ v; split there.
    const double mid = std::clamp(0.5 * lag, lo, hi);
    double total = 0.0;
    if (mid > lo) total += adaptive(g, lo, mid, 1e-13);
    if (hi > mid) total += adaptive(g, mid, hi, 1e-13);
    return 2.0 * v * total;
  };
  return adaptive(inner, 0.0, std::sqrt(epsilon), 1e-12);
}

std::size_t brute_force_capacity(std::span<const double> points, double r) {
  const std::size_t n = points.size();
  if (n > 20) throw std::invalid_argument("brute_force_capacity: too many points");
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    bool ok = true;
    double last = 0.0;
    bool have_last = false;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask & (std::uint32_t{1} << i))) continue;
      if (have_last && !(points[i] - last > r)) ok = false;
      last = points[i];
      have_last = true;
    }
    if (ok) best = size;
  }
  return best;
}

std::vector<double> cantor_prefix(int level) {
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  for (int l = 0; l < level; ++l) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : intervals) {
      const double third = (b - a) / 3.0;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    intervals.swap(next);
  }
  std::vector<double> pts;
  for (auto [a, b] : intervals) {
    pts.push_back(a);
    pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::size_t brute_force_box_count(std::span<const double> points, int k) {
  std::set<long long> boxes;
  const double n = std::ldexp(1.0, k);
  for (double p : points) {
    long long idx = static_cast<long long>(std::floor(p * n));
    idx = std::clamp<long long>(idx, 0, static_cast<long long>(n) - 1);
    boxes.insert(idx);
  }
  return boxes.size();
}

}  // namespace shepeaks::oracle
