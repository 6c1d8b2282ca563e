#include <shepeaks/fractal_analysis.hpp>

#include <shepeaks/errors.hpp>
#include <shepeaks/kernel_math.hpp>
#include <shepeaks/parallel.hpp>
#include <shepeaks/spde_solver.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shepeaks::fractal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRelTol = 1e-12;

bool in_unit_interval(double x) { return x >= -kRelTol && x <= 1.0 + kRelTol; }

void check_window(ScaleWindow window, double resolution) {
  if (!(window.r_min > 0.0) || !(window.r_min < window.r_max)) {
    throw EstimatorError("scale window requires 0 < r_min < r_max");
  }
  if (window.r_min < 2.0 * resolution * (1.0 - 1e-9)) {
    throw EstimatorError("scale window r_min is below twice the grid resolution");
  }
}

// Dyadic exponents k with 2^-k inside the window.
std::vector<int> dyadic_exponents(ScaleWindow window) {
  const int k_lo = static_cast<int>(std::ceil(std::log2(1.0 / window.r_max) - 1e-9));
  const int k_hi = static_cast<int>(std::floor(std::log2(1.0 / window.r_min) + 1e-9));
  std::vector<int> ks;
  for (int k = std::max(k_lo, 0); k <= k_hi; ++k) ks.push_back(k);
  return ks;
}

DimensionEstimate finish_fit(std::span<const double> log_inv_r, std::span<const double> log_n,
                             ScaleWindow window) {
  const stats::LinearFit fit = stats::fit_line(log_inv_r, log_n);
  DimensionEstimate est;
  est.raw_slope = fit.slope;
  est.slope = std::clamp(fit.slope, 0.0, kMaxReportedSlope);
  est.stderr_slope = fit.stderr_slope;
  est.r_squared = fit.r_squared;
  est.window = window;
  est.scales = fit.points;
  return est;
}

template <class Count>
DimensionEstimate dyadic_fit(const ExceedanceSet& s, ScaleWindow window, Count&& count) {
  check_window(window, s.resolution);
  if (s.points.empty()) throw EstimatorError("dimension of an empty set is undefined");
  const std::vector<int> ks = dyadic_exponents(window);
  if (ks.size() < 5) {
    throw EstimatorError("scale window holds " + std::to_string(ks.size()) +
                         " dyadic scales; at least 5 are required");
  }
  std::vector<double> x, y;
  for (int k : ks) {
    x.push_back(static_cast<double>(k) * std::log(2.0));
    y.push_back(std::log(static_cast<double>(count(k))));
  }
  return finish_fit(x, y, window);
}

// Occupied boxes of size r (partition of [0,1] anchored at 0) among
// positions with h >= c on one row.
std::size_t matched_count(std::span<const double> positions, std::span<const double> h_row,
                          double c, double r, std::size_t boxes) {
  std::size_t count = 0;
  std::size_t last = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (!(h_row[j] >= c) || !in_unit_interval(positions[j])) continue;
    const double x = std::max(positions[j], 0.0);
    const auto idx = std::min(static_cast<std::size_t>(x / r), boxes - 1);
    if (idx != last) {
      ++count;
      last = idx;
    }
  }
  return count;
}

double mean_or_nan(const std::vector<double>& v) {
  return v.empty() ? kNaN : stats::mean(v);
}

}  // namespace

void EpsilonLadder::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("ladder ratio nu must lie in (0,1)");
  if (n0 < 1) throw DomainError("ladder requires n0 >= 1 so that every eps_n < 1");
  if (!(n0 < n1)) throw DomainError("ladder requires n0 < n1");
}

double EpsilonLadder::epsilon(std::size_t level) const {
  return std::pow(nu, n0 + static_cast<int>(level));
}

std::vector<double> EpsilonLadder::values() const {
  std::vector<double> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = epsilon(k);
  return out;
}

double peak_scale(double epsilon) {
  return std::pow(epsilon, 0.25) * std::sqrt(std::log(1.0 / epsilon));
}

PeakField normalize_peaks(const Array2D& values, double baseline, const EpsilonLadder& ladder,
                          std::span<const double> positions) {
  ladder.validate();
  if (values.rows() != ladder.size() || values.cols() != positions.size()) {
    throw DomainError("normalize_peaks: values must be ladder levels x grid points");
  }
  PeakField pf;
  pf.ladder = ladder;
  pf.positions.assign(positions.begin(), positions.end());
  pf.resolution = positions.size() > 1
                      ? (positions.back() - positions.front()) /
                            static_cast<double>(positions.size() - 1)
                      : 0.0;
  pf.h = Array2D(values.rows(), values.cols());
  for (std::size_t n = 0; n < values.rows(); ++n) {
    const double eps = ladder.epsilon(n);
    if (!(eps < 1.0)) throw DomainError("normalize_peaks: ladder value >= 1");
    const double scale = peak_scale(eps);
    for (std::size_t j = 0; j < values.cols(); ++j) {
      pf.h(n, j) = (values(n, j) - baseline) / scale;
    }
  }
  return pf;
}

ExceedanceSet exceedance_set(const PeakField& pf, double c) {
  if (!(c >= 0.0)) throw DomainError("exceedance threshold must be >= 0");
  ExceedanceSet s{c, {}, pf.resolution};
  for (std::size_t j = 0; j < pf.positions.size(); ++j) {
    if (!in_unit_interval(pf.positions[j])) continue;
    for (std::size_t n = 0; n < pf.h.rows(); ++n) {
      if (pf.h(n, j) >= c) {
        s.points.push_back(pf.positions[j]);
        break;
      }
    }
  }
  return s;
}

ExceedanceSet level_exceedance_set(const PeakField& pf, std::size_t level, double c) {
  if (!(c >= 0.0)) throw DomainError("exceedance threshold must be >= 0");
  if (level >= pf.h.rows()) throw DomainError("ladder level out of range");
  ExceedanceSet s{c, {}, pf.resolution};
  for (std::size_t j = 0; j < pf.positions.size(); ++j) {
    if (in_unit_interval(pf.positions[j]) && pf.h(level, j) >= c) {
      s.points.push_back(pf.positions[j]);
    }
  }
  return s;
}

std::size_t occupied_dyadic_boxes(std::span<const double> points, int k) {
  const double boxes = std::ldexp(1.0, k);
  const auto last_box = static_cast<std::uint64_t>(boxes) - 1;
  std::size_t count = 0;
  std::uint64_t last = std::numeric_limits<std::uint64_t>::max();
  for (double p : points) {
    const double x = std::clamp(p, 0.0, 1.0);
    const auto idx = std::min(static_cast<std::uint64_t>(x * boxes), last_box);
    if (idx != last) {
      ++count;
      last = idx;
    }
  }
  return count;
}

DimensionEstimate box_dimension(const ExceedanceSet& s, ScaleWindow window) {
  return dyadic_fit(s, window, [&](int k) { return occupied_dyadic_boxes(s.points, k); });
}

std::size_t kolmogorov_capacity(std::span<const double> points, double r) {
  if (!(r > 0.0)) throw DomainError("kolmogorov_capacity: separation must be positive");
  if (points.empty()) return 0;
  std::size_t count = 1;
  double last = points.front();
  for (double p : points.subspan(1)) {
    if (p - last > r) {
      ++count;
      last = p;
    }
  }
  return count;
}

DimensionEstimate capacity_dimension(const ExceedanceSet& s, ScaleWindow window) {
  return dyadic_fit(s, window,
                    [&](int k) { return kolmogorov_capacity(s.points, std::ldexp(1.0, -k)); });
}

std::vector<DimensionRow> dimension_vs_c(std::span<const PeakField> replicates,
                                         std::span<const double> c_grid, ScaleWindow window,
                                         double sigma1) {
  if (replicates.empty()) throw EstimatorError("dimension_vs_c: no replicates");
  const PeakField& first = replicates.front();
  check_window(window, first.resolution);
  for (const auto& pf : replicates) {
    if (pf.positions != first.positions || pf.h.rows() != first.h.rows()) {
      throw EstimatorError("dimension_vs_c: replicates must share ladder and grid");
    }
  }

  // Ladder levels whose correlation scale sqrt(eps) lies in the window.
  std::vector<std::size_t> levels;
  for (std::size_t n = 0; n < first.h.rows(); ++n) {
    const double r = std::sqrt(first.ladder.epsilon(n));
    if (r >= window.r_min * (1.0 - 1e-9) && r <= window.r_max * (1.0 + 1e-9)) {
      levels.push_back(n);
    }
  }
  if (levels.size() < 5) {
    throw EstimatorError("dimension_vs_c: fewer than 5 ladder levels inside the window");
  }

  const double reps = static_cast<double>(replicates.size());
  std::vector<DimensionRow> rows;
  for (double c : c_grid) {
    if (!(c >= 0.0)) throw DomainError("exceedance threshold must be >= 0");
    DimensionRow row;
    row.c = c;
    row.theory = std::max(0.0, 1.0 - c * c * std::sqrt(kernel::kPi) / (sigma1 * sigma1));

    std::vector<double> x, y;
    for (std::size_t n : levels) {
      const double r = std::sqrt(first.ladder.epsilon(n));
      const auto boxes = static_cast<std::size_t>(std::ceil(1.0 / r - 1e-9));
      double total = 0.0;
      for (const auto& pf : replicates) {
        total += static_cast<double>(matched_count(pf.positions, pf.h.row(n), c, r, boxes));
      }
      const double mean_count = total / reps;
      if (n == levels.back()) row.finest_fraction = mean_count / static_cast<double>(boxes);
      if (mean_count > 0.0) {
        x.push_back(std::log(1.0 / r));
        y.push_back(std::log(mean_count));
      }
    }
    if (x.size() >= 5) {
      row.estimate = finish_fit(x, y, window);
    } else {
      row.estimate.raw_slope = kNaN;
      row.estimate.slope = 0.0;
      row.estimate.stderr_slope = std::numeric_limits<double>::infinity();
      row.estimate.r_squared = kNaN;
      row.estimate.window = window;
      row.estimate.scales = x.size();
    }

    std::vector<double> union_slopes, capacity_slopes;
    for (const auto& pf : replicates) {
      const ExceedanceSet s = exceedance_set(pf, c);
      if (s.points.empty()) continue;
      union_slopes.push_back(box_dimension(s, window).raw_slope);
      capacity_slopes.push_back(capacity_dimension(s, window).raw_slope);
    }
    row.union_slope = mean_or_nan(union_slopes);
    row.capacity_slope = mean_or_nan(capacity_slopes);
    rows.push_back(row);
  }
  return rows;
}

double fd_box_supremum(double R, double epsilon, double points_per_root_eps,
                       noise::SeedSpec seed) {
  if (!(R > 0.0)) throw DomainError("box aspect R must be positive");
  const spde::SolverConfig cfg =
      spde::scaled_config(epsilon, points_per_root_eps, 0.0, R * std::sqrt(epsilon));
  double sup = -std::numeric_limits<double>::infinity();
  spde::integrate(spde::SigmaSpec::constant(1.0), cfg, spde::seeded_noise(seed),
                  [&](std::size_t, double t, std::span<const double> dev) {
                    if (t > epsilon * (1.0 + kRelTol)) return;
                    for (double v : dev) sup = std::max(sup, v);
                  });
  return sup;
}

std::vector<TailPoint> tail_from_suprema(std::span<const double> suprema, double epsilon,
                                         std::span<const double> lambda_grid) {
  if (suprema.empty()) throw DomainError("tail estimate needs at least one trial");
  const double n = static_cast<double>(suprema.size());
  const double unit = std::pow(4.0 * epsilon / kernel::kPi, 0.25);
  std::vector<TailPoint> out;
  out.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    TailPoint p;
    p.lambda = lambda;
    p.threshold = unit * lambda;
    p.hits = static_cast<std::size_t>(
        std::count_if(suprema.begin(), suprema.end(), [&](double s) { return s >= p.threshold; }));
    p.p_hat = static_cast<double>(p.hits) / n;
    p.stderr_p = std::sqrt(p.p_hat * (1.0 - p.p_hat) / n);
    p.normalized_log_p =
        (p.hits > 0 && lambda != 0.0) ? std::log(p.p_hat) / (lambda * lambda) : kNaN;
    p.reliable = p.hits >= kReliableHits;
    p.single_point_bound = stats::normal_upper_tail(std::sqrt(2.0) * lambda);
    out.push_back(p);
  }
  return out;
}

std::vector<TailPoint> sup_tail_estimate(double R, double epsilon,
                                         std::span<const double> lambda_grid, std::size_t trials,
                                         noise::SeedSpec seed, const FdBoxOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("tail estimate: eps must lie in (0,1)");
  if (trials < 10000) throw DomainError("tail estimate: at least 1e4 trials are required");
  std::vector<double> sups(trials);
  parallel_for(trials, options.workers, [&](std::size_t i) {
    sups[i] = fd_box_supremum(R, epsilon, options.points_per_root_eps,
                              {seed.master_seed, seed.stream_index + i});
  });
  return tail_from_suprema(sups, epsilon, lambda_grid);
}

namespace {

// Sups of nested boxes (0, eps_k] x [0, R sqrt(eps_k)] from one run on a
// lattice of spacing dx with horizon max eps_k.
void nested_box_sups(std::span<const double> epsilons, std::span<const std::size_t> members,
                     double R, double dx, noise::SeedSpec seed, std::vector<double>& sup) {
  double t_max = 0.0;
  for (std::size_t k : members) t_max = std::max(t_max, epsilons[k]);
  spde::SolverConfig cfg;
  cfg.dx = dx;
  cfg.dt = 0.5 * dx * dx;
  cfg.T = t_max;
  cfg.L = std::ceil(6.0 * std::sqrt(t_max) / dx) * dx;
  cfg.x_min = 0.0;
  cfg.x_max = R * std::sqrt(t_max);
  const std::vector<double> xs = spde::core_positions(cfg);

  std::vector<std::size_t> width(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    const double eps = epsilons[members[m]];
    if (eps < cfg.dt) throw DomainError("fd_sup_sampler: eps below one time step");
    const double edge = R * std::sqrt(eps) * (1.0 + kRelTol);
    width[m] = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), edge) - xs.begin());
  }
  std::vector<double> prefix_max(xs.size());
  spde::integrate(spde::SigmaSpec::constant(1.0), cfg, spde::seeded_noise(seed),
                  [&](std::size_t, double t, std::span<const double> dev) {
                    double running = -std::numeric_limits<double>::infinity();
                    for (std::size_t j = 0; j < dev.size(); ++j) {
                      running = std::max(running, dev[j]);
                      prefix_max[j] = running;
                    }
                    for (std::size_t m = 0; m < members.size(); ++m) {
                      const std::size_t k = members[m];
                      if (t <= epsilons[k] * (1.0 + kRelTol) && width[m] > 0) {
                        sup[k] = std::max(sup[k], prefix_max[width[m] - 1]);
                      }
                    }
                  });
}

}  // namespace

SupSampler fd_sup_sampler(const SupGrid& grid, noise::SeedSpec seed) {
  if (!(grid.dx > 0.0) && !(grid.min_points_per_root_eps > 0.0)) {
    throw DomainError("fd_sup_sampler: need dx > 0 or a positive points-per-sqrt(eps)");
  }
  return [grid, seed](std::span<const double> epsilons, double R, std::uint64_t trial) {
    std::vector<double> sup(epsilons.size(), -std::numeric_limits<double>::infinity());
    if (epsilons.empty()) return sup;
    const noise::SeedSpec stream{seed.master_seed, seed.stream_index + trial};
    if (grid.dx > 0.0) {
      std::vector<std::size_t> all(epsilons.size());
      for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
      nested_box_sups(epsilons, all, R, grid.dx, stream, sup);
      return sup;
    }
    // Band exponent b: dx = 2^-b with sqrt(eps) / dx >= min_points_per_root_eps.
    std::vector<int> band(epsilons.size());
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
      band[k] = static_cast<int>(
          std::ceil(std::log2(grid.min_points_per_root_eps / std::sqrt(epsilons[k])) - 1e-9));
    }
    std::vector<int> bands = band;
    std::sort(bands.begin(), bands.end());
    bands.erase(std::unique(bands.begin(), bands.end()), bands.end());
    for (int b : bands) {
      std::vector<std::size_t> members;
      for (std::size_t k = 0; k < band.size(); ++k) {
        if (band[k] == b) members.push_back(k);
      }
      const noise::SeedSpec banded{
          noise::subkey(stream.master_seed, 0x62616e64ULL, static_cast<std::uint64_t>(b)),
          stream.stream_index};
      nested_box_sups(epsilons, members, R, std::ldexp(1.0, -b), banded, sup);
    }
    return sup;
  };
}

SupScaling expected_sup_scaling(double R, std::span<const double> epsilons, std::size_t trials,
                                const SupSampler& sampler, unsigned workers) {
  if (!(R > 0.0)) throw DomainError("box aspect R must be positive");
  if (trials == 0) throw DomainError("sup scaling needs at least one trial");
  if (epsilons.empty()) throw DomainError("sup scaling needs at least one eps");
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("sup scaling: eps must lie in (0,1)");
  }
  const std::size_t levels = epsilons.size();
  Array2D sups(trials, levels);
  parallel_for(trials, workers, [&](std::size_t i) {
    const std::vector<double> s = sampler(epsilons, R, i);
    if (s.size() != levels) throw ModelError("sup sampler returned the wrong number of boxes");
    std::copy(s.begin(), s.end(), sups.row(i).begin());
  });

  SupScaling out;
  out.epsilons.assign(epsilons.begin(), epsilons.end());
  std::vector<double> column(trials);
  bool positive = true;
  for (std::size_t k = 0; k < levels; ++k) {
    for (std::size_t i = 0; i < trials; ++i) column[i] = sups(i, k);
    out.mean_sup.push_back(stats::mean(column));
    out.stderr_sup.push_back(stats::standard_error(column));
    positive = positive && out.mean_sup.back() > 0.0;
  }
  if (positive && levels >= 2) {
    std::vector<double> lx(levels), ly(levels);
    for (std::size_t k = 0; k < levels; ++k) {
      lx[k] = std::log(epsilons[k]);
      ly[k] = std::log(out.mean_sup[k]);
    }
    out.fit = stats::fit_line(lx, ly);
  } else {
    out.fit.slope = kNaN;
    out.fit.intercept = kNaN;
    out.fit.stderr_slope = kNaN;
    out.fit.r_squared = kNaN;
    out.fit.points = levels;
  }
  return out;
}

LilSummary lil_statistic(const Array2D& values, double baseline, const EpsilonLadder& ladder,
                         double sigma1) {
  ladder.validate();
  if (values.cols() != ladder.size()) {
    throw DomainError("lil_statistic: one column per ladder level is required");
  }
  if (values.rows() == 0) throw DomainError("lil_statistic: no traces");
  std::vector<double> scale(ladder.size());
  for (std::size_t k = 0; k < scale.size(); ++k) {
    const double eps = ladder.epsilon(k);
    const double loglog = std::log(std::log(1.0 / eps));
    if (!(loglog > 0.0)) {
      throw DomainError("lil_statistic: every ladder level needs log log(1/eps) > 0");
    }
    scale[k] = std::pow(eps, 0.25) * std::sqrt(loglog);
  }
  if (!(std::log(std::log(1.0 / ladder.epsilon(ladder.size() - 1))) > 0.5)) {
    throw DomainError("lil_statistic: ladder too shallow, need log log(1/eps) > 0.5 at depth");
  }
  LilSummary out;
  out.statistic.resize(values.rows());
  for (std::size_t i = 0; i < values.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scale.size(); ++k) {
      best = std::max(best, (values(i, k) - baseline) / scale[k]);
    }
    out.statistic[i] = best;
  }
  out.median = stats::quantile(out.statistic, 0.5);
  out.q25 = stats::quantile(out.statistic, 0.25);
  out.q75 = stats::quantile(out.statistic, 0.75);
  out.iqr = out.q75 - out.q25;
  out.target = std::pow(4.0 / kernel::kPi, 0.25) * std::abs(sigma1);
  return out;
}

}  // namespace shepeaks::fractal
