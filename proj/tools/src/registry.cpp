#include <shepeaks_tools/experiments.hpp>

#include <shepeaks/array2d.hpp>
#include <shepeaks/csv.hpp>
#include <shepeaks/errors.hpp>
#include <shepeaks/fractal_analysis.hpp>
#include <shepeaks/gaussian_field.hpp>
#include <shepeaks/kernel_math.hpp>
#include <shepeaks/noise.hpp>
#include <shepeaks/parallel.hpp>
#include <shepeaks/spde_solver.hpp>
#include <shepeaks/stats.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace shepeaks::experiments {

namespace {

using fractal::EpsilonLadder;

std::string num(double x) { return csv::format_number(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

double get_num(const json& p, const char* key) { return p.at(key).get<double>(); }

std::int64_t get_int(const json& p, const char* key) {
  return static_cast<std::int64_t>(std::llround(p.at(key).get<double>()));
}

std::size_t get_count(const json& p, const char* key) {
  return static_cast<std::size_t>(std::max<std::int64_t>(0, get_int(p, key)));
}

std::vector<double> get_list(const json& p, const char* key) {
  return p.at(key).get<std::vector<double>>();
}

spde::SigmaSpec get_sigma(const json& p) {
  const json& s = p.at("sigma");
  const std::string kind = s.at("kind").get<std::string>();
  const double a = s.value("a", 1.0);
  const double b = s.value("b", 0.0);
  if (kind == "constant") return spde::SigmaSpec::constant(a);
  if (kind == "affine") return spde::SigmaSpec::affine(a, b);
  return spde::SigmaSpec::bounded_smooth(a);
}

EpsilonLadder get_ladder(const json& p) {
  return EpsilonLadder{get_num(p, "nu"), static_cast<int>(get_int(p, "n0")),
                       static_cast<int>(get_int(p, "n1"))};
}

json stream_range(std::uint64_t first, std::uint64_t count, std::string role) {
  return json{{"first", first}, {"count", count}, {"role", std::move(role)}};
}

using Diagnostics = std::vector<std::string>;

void require(Diagnostics& d, bool ok, std::string message) {
  if (!ok) d.push_back(std::move(message));
}

void check_ladder(Diagnostics& d, const json& p) {
  const EpsilonLadder ladder = get_ladder(p);
  if (ladder.n0 < 1 || ladder.nu >= 1.0) {
    d.emplace_back(
        "eps ladder contains 1.0 or more: the peak normalization needs log(1/eps) > 0 at every "
        "level (use nu in (0,1) and n0 >= 1)");
  }
  require(d, ladder.nu > 0.0 && ladder.nu < 1.0, "ladder ratio nu must lie in (0,1)");
  require(d, ladder.n0 < ladder.n1, "ladder requires n0 < n1");
}

void check_epsilons(Diagnostics& d, const std::vector<double>& eps, bool allow_one) {
  require(d, !eps.empty(), "epsilons must not be empty");
  for (double e : eps) {
    if (!(e > 0.0 && (allow_one ? e <= 1.0 : e < 1.0))) {
      d.push_back("epsilon " + num(e) + (allow_one ? " outside (0,1]" : " outside (0,1)"));
    }
  }
}

// ---------------------------------------------------------------- covariance

ExperimentResult covariance_check(const json& p, const RunContext& ctx) {
  const auto epsilons = get_list(p, "epsilons");
  const auto factors = get_list(p, "lag_factors");
  const std::size_t draws = get_count(p, "draws");

  Table t{"results", {"epsilon", "lag", "model", "empirical", "stderr", "z_score"}, {}, {}};
  json summary = {{"max_abs_z", 0.0}};
  double max_z = 0.0;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const double eps = epsilons[e];
    std::vector<double> coords{0.0};
    for (double f : factors) coords.push_back(f * std::sqrt(eps));
    const auto model = kernel::CovarianceModel::spatial(eps);
    const noise::GaussianSampler sampler(model.matrix(coords), coords.size());

    Array2D products(draws, factors.size());
    parallel_for(draws, ctx.workers, [&](std::size_t i) {
      noise::Rng rng(noise::SeedSpec{ctx.master_seed, e * draws + i});
      std::vector<double> z(coords.size());
      sampler.draw(rng, z);
      for (std::size_t k = 0; k < factors.size(); ++k) products(i, k) = z[0] * z[k + 1];
    });
    std::vector<double> column(draws);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      for (std::size_t i = 0; i < draws; ++i) column[i] = products(i, k);
      const double expected = model(0.0, coords[k + 1]);
      const double mean = stats::mean(column);
      const double se = stats::standard_error(column);
      const double z = se > 0.0 ? (mean - expected) / se : 0.0;
      max_z = std::max(max_z, std::abs(z));
      t.rows.push_back({num(eps), num(coords[k + 1]), num(expected), num(mean), num(se), num(z)});
    }
  }
  t.streams = stream_range(0, epsilons.size() * draws, "one exact slice draw per stream");
  summary["max_abs_z"] = max_z;
  return {{t}, summary};
}

Diagnostics covariance_check_diag(const json& p) {
  Diagnostics d;
  check_epsilons(d, get_list(p, "epsilons"), true);
  for (double f : get_list(p, "lag_factors")) require(d, f >= 0.0, "lag_factors must be >= 0");
  require(d, get_int(p, "draws") >= 2, "draws must be at least 2");
  return d;
}

// ----------------------------------------------------------- correlation

ExperimentResult correlation_profile(const json& p, const RunContext&) {
  const double eps = get_num(p, "epsilon");
  const auto alphas = get_list(p, "alphas");
  Table t{"results", {"alpha", "lag", "covariance", "normalized"}, {}, json::array()};
  for (const auto& pt : field::correlation_length_profile(eps, alphas)) {
    t.rows.push_back({num(pt.alpha), num(pt.lag), num(pt.covariance), num(pt.normalized)});
  }
  return {{t}, json::object()};
}

Diagnostics correlation_profile_diag(const json& p) {
  Diagnostics d;
  const double eps = get_num(p, "epsilon");
  require(d, eps > 0.0 && eps < 1.0, "epsilon must lie in (0,1)");
  require(d, !get_list(p, "alphas").empty(), "alphas must not be empty");
  return d;
}

// ------------------------------------------------------------ truncation

ExperimentResult truncation_check(const json& p, const RunContext&) {
  const auto epsilons = get_list(p, "epsilons");
  const auto deltas = get_list(p, "deltas");
  const std::size_t lag_points = get_count(p, "lag_points");

  Table bounds{"results",
               {"epsilon", "delta", "half_width", "independence_gap", "deficit", "bound",
                "within_bound", "beyond_gap_zero"},
               {},
               json::array()};
  Table lags{"lags", {"epsilon", "delta", "lag", "full", "truncated"}, {}, json::array()};
  bool all_ok = true;
  for (double eps : epsilons) {
    for (double delta : deltas) {
      const double gap = kernel::independence_gap(eps, delta);
      const double deficit = kernel::truncation_deficit(eps, delta);
      const double bound = delta * delta * std::sqrt(eps);
      bool zero_beyond = true;
      for (std::size_t k = 0; k < lag_points; ++k) {
        const double lag = 1.5 * gap * static_cast<double>(k) /
                           static_cast<double>(std::max<std::size_t>(lag_points - 1, 1));
        const double truncated = kernel::truncated_covariance_lag(eps, delta, lag);
        if (lag >= gap && truncated != 0.0) zero_beyond = false;
        lags.rows.push_back({num(eps), num(delta), num(lag),
                             num(kernel::spatial_covariance(eps, lag)), num(truncated)});
      }
      const bool within = deficit >= 0.0 && deficit < bound;
      all_ok = all_ok && within && zero_beyond;
      bounds.rows.push_back({num(eps), num(delta), num(0.5 * gap), num(gap), num(deficit),
                             num(bound), flag(within), flag(zero_beyond)});
    }
  }
  return {{bounds, lags}, json{{"all_within_bound", all_ok}}};
}

Diagnostics truncation_check_diag(const json& p) {
  Diagnostics d;
  for (double e : get_list(p, "epsilons")) {
    require(d, e > 0.0, "epsilons must be positive");
  }
  for (double delta : get_list(p, "deltas")) {
    require(d, delta > 0.0 && delta < 1.0, "deltas must lie in (0,1)");
  }
  require(d, get_int(p, "lag_points") >= 2, "lag_points must be at least 2");
  return d;
}

// ----------------------------------------------------------- sup scaling

ExperimentResult sup_scaling(const json& p, const RunContext& ctx) {
  const EpsilonLadder ladder = get_ladder(p);
  const double R = get_num(p, "R");
  const std::size_t trials = get_count(p, "trials");
  const fractal::SupGrid grid{get_num(p, "dx"), get_num(p, "points_per_root_eps")};
  const auto eps = ladder.values();
  const auto sampler = fractal::fd_sup_sampler(grid, noise::SeedSpec{ctx.master_seed, 0});
  const auto result = fractal::expected_sup_scaling(R, eps, trials, sampler, ctx.workers);

  Table t{"results", {"epsilon", "mean_sup", "stderr", "mean_sup_over_eps_quarter"}, {}, {}};
  for (std::size_t k = 0; k < eps.size(); ++k) {
    t.rows.push_back({num(eps[k]), num(result.mean_sup[k]), num(result.stderr_sup[k]),
                      num(result.mean_sup[k] / std::pow(eps[k], 0.25))});
  }
  t.streams = stream_range(0, trials, "finite-difference runs per trial, nested boxes per dx band");
  Table fit{"fit", {"slope", "intercept", "stderr", "r2", "points"}, {}, t.streams};
  fit.rows.push_back({num(result.fit.slope), num(result.fit.intercept),
                      num(result.fit.stderr_slope), num(result.fit.r_squared),
                      num(result.fit.points)});
  return {{t, fit}, json{{"slope", result.fit.slope}}};
}

Diagnostics sup_scaling_diag(const json& p) {
  Diagnostics d;
  check_ladder(d, p);
  const double dx = get_num(p, "dx");
  require(d, dx >= 0.0, "dx must be >= 0 (0 selects banded lattices)");
  require(d, dx > 0.0 || get_num(p, "points_per_root_eps") >= 2.0,
          "points_per_root_eps must be >= 2");
  require(d, get_num(p, "R") > 0.0, "R must be positive");
  require(d, get_int(p, "trials") >= 1000, "trials must be at least 1000");
  if (d.empty() && dx > 0.0) {
    const double finest = get_ladder(p).values().back();
    require(d, 0.5 * dx * dx <= finest,
            "finest eps is shorter than one time step dx^2/2; refine dx");
  }
  return d;
}

// -------------------------------------------------------------- tail law

ExperimentResult tail_law(const json& p, const RunContext& ctx) {
  const double eps = get_num(p, "epsilon");
  const double R = get_num(p, "R");
  const auto lambdas = get_list(p, "lambdas");
  const std::size_t trials = get_count(p, "trials");
  fractal::FdBoxOptions options;
  options.points_per_root_eps = get_num(p, "points_per_root_eps");
  options.workers = ctx.workers;
  const auto rows = fractal::sup_tail_estimate(R, eps, lambdas, trials,
                                               noise::SeedSpec{ctx.master_seed, 0}, options);
  Table t{"results",
          {"lambda", "p_hat", "normalized_log_p", "reliable", "hits", "stderr",
           "single_point_bound"},
          {},
          stream_range(0, trials, "one finite-difference run per trial")};
  double largest_reliable = std::numeric_limits<double>::quiet_NaN();
  double value_there = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    t.rows.push_back({num(r.lambda), num(r.p_hat), num(r.normalized_log_p), flag(r.reliable),
                      num(r.hits), num(r.stderr_p), num(r.single_point_bound)});
    if (r.reliable && r.lambda > 0.0 && !(r.lambda <= largest_reliable)) {
      largest_reliable = r.lambda;
      value_there = r.normalized_log_p;
    }
  }
  return {{t},
          json{{"largest_reliable_lambda", largest_reliable},
               {"normalized_log_p_there", value_there}}};
}

Diagnostics tail_law_diag(const json& p) {
  Diagnostics d;
  const double eps = get_num(p, "epsilon");
  require(d, eps > 0.0 && eps < 1.0, "epsilon must lie in (0,1)");
  require(d, get_num(p, "R") > 0.0, "R must be positive");
  require(d, get_int(p, "trials") >= 10000, "trials must be at least 10000");
  require(d, get_num(p, "points_per_root_eps") >= 2.0, "points_per_root_eps must be >= 2");
  for (double l : get_list(p, "lambdas")) require(d, l >= 0.0, "lambdas must be >= 0");
  return d;
}

// --------------------------------------------------------------- coupling

spde::SolverConfig coupling_config(const json& p) {
  spde::SolverConfig cfg;
  cfg.dx = get_num(p, "dx");
  cfg.dt = get_num(p, "dt");
  cfg.T = std::ldexp(1.0, -static_cast<int>(get_int(p, "n_min")));
  cfg.L = cfg.dx > 0.0 ? std::ceil(6.0 * std::sqrt(cfg.T) / cfg.dx) * cfg.dx : 0.0;
  cfg.x_min = 0.0;
  cfg.x_max = 1.0;
  return cfg;
}

ExperimentResult coupling_error(const json& p, const RunContext& ctx) {
  const spde::SigmaSpec sigma = get_sigma(p);
  const spde::SolverConfig cfg = coupling_config(p);
  const int n_min = static_cast<int>(get_int(p, "n_min"));
  const int n_max = static_cast<int>(get_int(p, "n_max"));
  const std::size_t seeds = get_count(p, "seeds");
  const double sigma1 = sigma.value_at_one();

  std::vector<double> eps;
  for (int n = n_min; n <= n_max; ++n) eps.push_back(std::ldexp(1.0, -n));
  Array2D errors(seeds, eps.size());
  parallel_for(seeds, ctx.workers, [&](std::size_t s) {
    auto row = errors.row(s);
    spde::integrate_coupled(
        sigma, cfg, spde::seeded_noise({ctx.master_seed, s}),
        [&](std::size_t, double t, std::span<const double> u, std::span<const double> z) {
          double worst = 0.0;
          for (std::size_t j = 0; j < u.size(); ++j) {
            worst = std::max(worst, std::abs(u[j] - sigma1 * z[j]));
          }
          for (std::size_t k = 0; k < eps.size(); ++k) {
            if (t <= eps[k] * (1.0 + 1e-12)) row[k] = std::max(row[k], worst);
          }
        });
  });

  Table t{"results", {"epsilon", "coupling_error", "stderr", "min", "max"}, {},
          stream_range(0, seeds, "one coupled solve per stream")};
  std::vector<double> lx, ly, column(seeds);
  bool positive = true;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    for (std::size_t s = 0; s < seeds; ++s) column[s] = errors(s, k);
    const double mean = stats::mean(column);
    t.rows.push_back({num(eps[k]), num(mean), num(stats::standard_error(column)),
                      num(*std::min_element(column.begin(), column.end())),
                      num(*std::max_element(column.begin(), column.end()))});
    positive = positive && mean > 0.0;
    lx.push_back(std::log(eps[k]));
    ly.push_back(mean > 0.0 ? std::log(mean) : 0.0);
  }
  Table fit{"fit", {"slope", "intercept", "stderr", "r2", "points"}, {}, t.streams};
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (positive && lx.size() >= 2) {
    const auto f = stats::fit_line(lx, ly);
    slope = f.slope;
    fit.rows.push_back({num(f.slope), num(f.intercept), num(f.stderr_slope), num(f.r_squared),
                        num(f.points)});
  } else {
    fit.rows.push_back({"nan", "nan", "nan", "nan", num(lx.size())});
  }
  return {{t, fit}, json{{"slope", slope}, {"sigma1", sigma1}}};
}

Diagnostics coupling_error_diag(const json& p) {
  Diagnostics d;
  const int n_min = static_cast<int>(get_int(p, "n_min"));
  const int n_max = static_cast<int>(get_int(p, "n_max"));
  require(d, n_min >= 1 && n_min < n_max, "require 1 <= n_min < n_max");
  require(d, get_int(p, "seeds") >= 1, "seeds must be at least 1");
  if (!d.empty()) return d;
  for (auto& m : spde::diagnose(coupling_config(p))) d.push_back(std::move(m));
  if (d.empty()) {
    require(d, get_num(p, "dt") <= std::ldexp(1.0, -n_max),
            "finest eps 2^-n_max is shorter than one time step");
  }
  return d;
}

// ------------------------------------------------------------- exceedance

ExperimentResult exceedance_dim(const json& p, const RunContext& ctx) {
  const EpsilonLadder ladder = get_ladder(p);
  const auto c_grid = get_list(p, "c_grid");
  const int exponent = static_cast<int>(get_int(p, "grid_exponent"));
  const std::size_t reps = get_count(p, "replicates");
  const double sigma1 = get_num(p, "sigma1");
  const fractal::ScaleWindow window{get_num(p, "r_min"), get_num(p, "r_max")};

  const double dx = std::ldexp(1.0, -exponent);
  const field::UniformGrid grid{0.0, dx, (std::size_t{1} << exponent) + 1};
  const auto positions = grid.positions();
  const std::size_t levels = ladder.size();

  std::vector<field::SpatialSliceSampler> samplers;
  samplers.reserve(levels);
  for (std::size_t n = 0; n < levels; ++n) samplers.emplace_back(ladder.epsilon(n), grid);

  std::vector<fractal::PeakField> fields(reps);
  parallel_for(reps, ctx.workers, [&](std::size_t r) {
    Array2D values(levels, grid.n);
    for (std::size_t n = 0; n < levels; ++n) {
      noise::Rng rng(noise::SeedSpec{ctx.master_seed, r * levels + n});
      samplers[n].draw(rng, values.row(n));
      for (double& v : values.row(n)) v *= sigma1;
    }
    fields[r] = fractal::normalize_peaks(values, 0.0, ladder, positions);
  });
  const auto rows = fractal::dimension_vs_c(fields, c_grid, window, sigma1);

  Table t{"results",
          {"c", "slope", "stderr", "r2", "raw_slope", "union_slope", "capacity_slope",
           "finest_fraction", "theory"},
          {},
          stream_range(0, reps * levels, "one exact slice per (replicate, ladder level)")};
  for (const auto& r : rows) {
    t.rows.push_back({num(r.c), num(r.estimate.slope), num(r.estimate.stderr_slope),
                      num(r.estimate.r_squared), num(r.estimate.raw_slope), num(r.union_slope),
                      num(r.capacity_slope), num(r.finest_fraction), num(r.theory)});
  }
  return {{t}, json::object()};
}

Diagnostics exceedance_dim_diag(const json& p) {
  Diagnostics d;
  check_ladder(d, p);
  const int exponent = static_cast<int>(get_int(p, "grid_exponent"));
  require(d, exponent >= 4 && exponent <= 20, "grid_exponent must lie in [4, 20]");
  require(d, get_int(p, "replicates") >= 1, "replicates must be at least 1");
  require(d, get_num(p, "sigma1") != 0.0, "sigma1 must be nonzero");
  const double r_min = get_num(p, "r_min");
  const double r_max = get_num(p, "r_max");
  require(d, r_min > 0.0 && r_min < r_max, "require 0 < r_min < r_max");
  if (exponent >= 4 && exponent <= 20) {
    require(d, r_min >= 2.0 * std::ldexp(1.0, -exponent),
            "r_min must be at least twice the grid spacing");
  }
  for (double c : get_list(p, "c_grid")) require(d, c >= 0.0, "c_grid entries must be >= 0");
  return d;
}

// -------------------------------------------------------------------- LIL

ExperimentResult lil(const json& p, const RunContext& ctx) {
  const EpsilonLadder ladder = get_ladder(p);
  const std::size_t traces = get_count(p, "traces");
  const double sigma1 = get_num(p, "sigma1");
  const double x = get_num(p, "x");
  auto eps = ladder.values();
  std::vector<double> times(eps.rbegin(), eps.rend());
  const field::TemporalTraceSampler sampler(times);
  const std::size_t levels = eps.size();

  Array2D values(traces, levels);
  parallel_for(traces, ctx.workers, [&](std::size_t i) {
    noise::Rng rng(noise::SeedSpec{ctx.master_seed, i});
    std::vector<double> z(levels);
    sampler.draw(rng, z);
    for (std::size_t k = 0; k < levels; ++k) values(i, k) = sigma1 * z[levels - 1 - k];
  });
  const auto s = fractal::lil_statistic(values, 0.0, ladder, sigma1);

  const json streams = stream_range(0, traces, "one exact temporal trace per stream");
  Table per{"traces", {"trace", "x", "statistic"}, {}, streams};
  for (std::size_t i = 0; i < traces; ++i) {
    per.rows.push_back({num(i), num(x), num(s.statistic[i])});
  }
  Table summary{"results", {"median", "q25", "q75", "iqr", "target", "median_over_target"}, {},
                streams};
  summary.rows.push_back({num(s.median), num(s.q25), num(s.q75), num(s.iqr), num(s.target),
                          num(s.median / s.target)});
  return {{summary, per}, json{{"median", s.median}, {"target", s.target}}};
}

Diagnostics lil_diag(const json& p) {
  Diagnostics d;
  check_ladder(d, p);
  require(d, get_int(p, "traces") >= 1, "traces must be at least 1");
  if (d.empty()) {
    const EpsilonLadder ladder = get_ladder(p);
    require(d, std::log(std::log(1.0 / ladder.epsilon(0))) > 0.0,
            "every ladder level needs log log(1/eps) > 0 (eps < 1/e)");
    require(d, std::log(std::log(1.0 / ladder.values().back())) > 0.5,
            "ladder too shallow: need log log(1/eps) > 0.5 at the deepest level");
  }
  return d;
}

// --------------------------------------------------------------- capacity

fractal::ExceedanceSet demo_set(const json& p, std::uint64_t master_seed) {
  const std::string kind = p.at("set").get<std::string>();
  const int level = static_cast<int>(get_int(p, "level"));
  fractal::ExceedanceSet s;
  if (kind == "cantor") {
    std::vector<double> left{0.0};
    double width = 1.0;
    for (int l = 0; l < level; ++l) {
      width /= 3.0;
      std::vector<double> next;
      next.reserve(left.size() * 2);
      for (double a : left) {
        next.push_back(a);
        next.push_back(a + 2.0 * width);
      }
      left.swap(next);
    }
    for (double a : left) {
      s.points.push_back(a);
      s.points.push_back(a + width);
    }
    s.resolution = width;
  } else if (kind == "interval") {
    const std::size_t n = (std::size_t{1} << level) + 1;
    const double h = std::ldexp(1.0, -level);
    for (std::size_t k = 0; k < n; ++k) s.points.push_back(static_cast<double>(k) * h);
    s.resolution = h;
  } else {
    noise::Rng rng(noise::SeedSpec{master_seed, 0});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = get_count(p, "points");
    for (std::size_t k = 0; k < n; ++k) s.points.push_back(unit(rng));
    s.resolution = 0.0;
  }
  std::sort(s.points.begin(), s.points.end());
  s.points.erase(std::unique(s.points.begin(), s.points.end()), s.points.end());
  return s;
}

ExperimentResult capacity_demo(const json& p, const RunContext& ctx) {
  const auto s = demo_set(p, ctx.master_seed);
  const int k_min = static_cast<int>(get_int(p, "k_min"));
  const int k_max = static_cast<int>(get_int(p, "k_max"));
  const fractal::ScaleWindow window{std::ldexp(1.0, -k_max), std::ldexp(1.0, -k_min)};

  Table t{"results", {"r", "capacity", "occupied_boxes"}, {}, json::array()};
  for (int k = k_min; k <= k_max; ++k) {
    const double r = std::ldexp(1.0, -k);
    t.rows.push_back({num(r), num(fractal::kolmogorov_capacity(s.points, r)),
                      num(fractal::occupied_dyadic_boxes(s.points, k))});
  }
  const auto box = fractal::box_dimension(s, window);
  const auto cap = fractal::capacity_dimension(s, window);
  const std::string kind = p.at("set").get<std::string>();
  const double reference = kind == "cantor"     ? std::log(2.0) / std::log(3.0)
                           : kind == "interval" ? 1.0
                                                : std::numeric_limits<double>::quiet_NaN();
  Table summary{"summary",
                {"points", "box_slope", "box_stderr", "capacity_slope", "capacity_stderr",
                 "reference"},
                {},
                kind == "random" ? stream_range(0, 1, "uniform point set") : json::array()};
  summary.rows.push_back({num(s.points.size()), num(box.raw_slope), num(box.stderr_slope),
                          num(cap.raw_slope), num(cap.stderr_slope), num(reference)});
  if (kind == "random") t.streams = summary.streams;
  return {{t, summary}, json{{"box_slope", box.raw_slope}, {"capacity_slope", cap.raw_slope}}};
}

Diagnostics capacity_demo_diag(const json& p) {
  Diagnostics d;
  const std::string kind = p.at("set").get<std::string>();
  require(d, kind == "cantor" || kind == "interval" || kind == "random",
          "set must be one of cantor, interval, random");
  const int level = static_cast<int>(get_int(p, "level"));
  require(d, level >= 1 && level <= 20, "level must lie in [1, 20]");
  const int k_min = static_cast<int>(get_int(p, "k_min"));
  const int k_max = static_cast<int>(get_int(p, "k_max"));
  require(d, k_min >= 0 && k_max - k_min >= 4, "need at least 5 dyadic scales (k_max - k_min >= 4)");
  require(d, get_int(p, "points") >= 1, "points must be at least 1");
  if (d.empty() && kind != "random") {
    const double resolution =
        kind == "cantor" ? std::pow(3.0, -level) : std::ldexp(1.0, -level);
    require(d, std::ldexp(1.0, -k_max) >= 2.0 * resolution,
            "finest scale 2^-k_max must be at least twice the set resolution");
  }
  return d;
}

json sigma_default(const char* kind, double a) { return json{{"kind", kind}, {"a", a}, {"b", 0.0}}; }

std::vector<ExperimentInfo> build_registry() {
  using P = ParamType;
  std::vector<ExperimentInfo> r;
  r.push_back({"covariance-check",
               "Exact slice sampler against the model spatial covariance of Z(eps, .).",
               {{"epsilons", P::NumberList, json{1.0, 0.1, 0.01}, "times eps in (0,1]"},
                {"lag_factors", P::NumberList, json{0.0, 0.25, 0.5, 1.0, 2.0},
                 "lags in units of sqrt(eps); 0 gives the variance sqrt(eps/pi)"},
                {"draws", P::Integer, 20000, "independent draws per eps"}},
               covariance_check_diag,
               covariance_check});
  r.push_back({"correlation-profile",
               "Deterministic covariance at lag eps^(1/2 + alpha), normalized.",
               {{"epsilon", P::Number, 0.01, "time eps in (0,1)"},
                {"alphas", P::NumberList,
                 json{-0.25, -0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.25, 0.5},
                 "exponent offsets; alpha >= 0 is inside the correlation length"}},
               correlation_profile_diag,
               correlation_profile});
  r.push_back({"truncation-check",
               "Localised field: variance deficit against delta^2 sqrt(eps) and exact "
               "independence beyond the gap sqrt(8 eps log(1/delta)).",
               {{"epsilons", P::NumberList, json{1.0, 0.1, 0.01}, "times eps > 0"},
                {"deltas", P::NumberList, json{0.5, 0.1, 0.01}, "localisation levels in (0,1)"},
                {"lag_points", P::Integer, 25, "lags sampled on [0, 1.5 x gap]"}},
               truncation_check_diag,
               truncation_check});
  r.push_back({"sup-scaling",
               "Mean supremum of Z over (0,eps] x [0, R sqrt(eps)] against eps; slope near 1/4.",
               {{"R", P::Number, 1.0, "box aspect parameter"},
                {"nu", P::Number, 0.5, "ladder ratio, eps_n = nu^n"},
                {"n0", P::Integer, 4, "first ladder index"},
                {"n1", P::Integer, 12, "last ladder index"},
                {"trials", P::Integer, 1000, "independent finite-difference runs"},
                {"dx", P::Number, 0.0,
                 "fixed lattice spacing for all boxes; 0 selects a dyadic band per eps"},
                {"points_per_root_eps", P::Number, 16.0,
                 "banded lattices: at least this many points per sqrt(eps)"}},
               sup_scaling_diag,
               sup_scaling});
  r.push_back({"tail-law",
               "Tail of sup Z over the box at thresholds (4 eps/pi)^(1/4) lambda; "
               "log P / lambda^2 tends to -1.",
               {{"epsilon", P::Number, 0.01, "time eps in (0,1)"},
                {"R", P::Number, 1.0, "box aspect parameter"},
                {"lambdas", P::NumberList, json{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0},
                 "threshold multipliers"},
                {"trials", P::Integer, 100000, "independent finite-difference runs (>= 1e4)"},
                {"points_per_root_eps", P::Number, 16.0, "lattice points per sqrt(eps)"}},
               tail_law_diag,
               tail_law});
  r.push_back({"coupling-error",
               "sup over t <= eps, x in [0,1] of |u - 1 - sigma(1) Z| with shared noise.",
               {{"sigma", P::Sigma, sigma_default("bounded_smooth", 1.0),
                 "diffusion coefficient {kind: constant|affine|bounded_smooth, a, b}"},
                {"dx", P::Number, 0.001953125, "lattice spacing"},
                {"dt", P::Number, 1.9073486328125e-06, "time step, at most dx^2/2"},
                {"n_min", P::Integer, 6, "coarsest eps = 2^-n_min, also the horizon"},
                {"n_max", P::Integer, 12, "finest eps = 2^-n_max"},
                {"seeds", P::Integer, 16, "independent noise realisations"}},
               coupling_error_diag,
               coupling_error});
  r.push_back({"exceedance-dim",
               "Box-counting dimension of peak exceedance sets against the threshold c.",
               {{"c_grid", P::NumberList, json{0.1, 0.3, 0.5, 0.7, 0.8}, "thresholds c >= 0"},
                {"nu", P::Number, 0.5, "ladder ratio"},
                {"n0", P::Integer, 4, "first ladder index"},
                {"n1", P::Integer, 24, "last ladder index"},
                {"grid_exponent", P::Integer, 14, "grid of 2^k + 1 points on [0,1]"},
                {"replicates", P::Integer, 32, "independent peak fields averaged"},
                {"r_min", P::Number, 0.000244140625, "smallest box size"},
                {"r_max", P::Number, 0.25, "largest box size"},
                {"sigma1", P::Number, 1.0, "constant diffusion coefficient sigma(1)"}},
               exceedance_dim_diag,
               exceedance_dim});
  r.push_back({"lil",
               "Loglog-normalised maximum of t -> Z(t, x) along the ladder; target "
               "(4/pi)^(1/4) sigma(1).",
               {{"nu", P::Number, 0.5, "ladder ratio"},
                {"n0", P::Integer, 4, "first ladder index"},
                {"n1", P::Integer, 40, "last ladder index"},
                {"traces", P::Integer, 1000, "independent exact traces"},
                {"sigma1", P::Number, 1.0, "constant diffusion coefficient sigma(1)"},
                {"x", P::Number, 0.5, "spatial location (the law does not depend on it)"}},
               lil_diag,
               lil});
  r.push_back({"capacity-demo",
               "Kolmogorov capacity and box counts of a reference set across dyadic scales.",
               {{"set", P::String, "cantor", "cantor | interval | random"},
                {"level", P::Integer, 10, "construction depth (interval: 2^level + 1 points)"},
                {"points", P::Integer, 1000, "size of the random set"},
                {"k_min", P::Integer, 2, "coarsest scale 2^-k_min"},
                {"k_max", P::Integer, 14, "finest scale 2^-k_max"}},
               capacity_demo_diag,
               capacity_demo});
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

const ExperimentInfo& find_experiment(std::string_view name) {
  for (const auto& info : registry()) {
    if (info.name == name) return info;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace shepeaks::experiments
