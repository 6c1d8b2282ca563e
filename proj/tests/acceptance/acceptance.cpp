// Acceptance suite. Each criterion prints exactly one PASS/FAIL line,
// followed by indented detail lines. Tolerances are fixed here and never
// adapted to the observed values.

#include <shepeaks/fractal_analysis.hpp>
#include <shepeaks/gaussian_field.hpp>
#include <shepeaks/kernel_math.hpp>
#include <shepeaks/spde_solver.hpp>
#include <shepeaks/stats.hpp>
#include <shepeaks_tools/experiments.hpp>

#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

using namespace shepeaks;
namespace ex = shepeaks::experiments;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 20240611;

struct Report {
  bool ok = true;
  std::vector<std::string> details;

  void check(bool cond, const std::string& what) {
    ok = ok && cond;
    details.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double cell(const ex::Table& t, std::size_t row, const std::string& column) {
  const auto it = std::find(t.header.begin(), t.header.end(), column);
  if (it == t.header.end()) throw std::runtime_error("missing column " + column);
  return std::stod(t.rows.at(row)[static_cast<std::size_t>(it - t.header.begin())]);
}

const ex::Table& table(const ex::ExperimentResult& r, const std::string& name) {
  for (const auto& t : r.tables) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("missing table " + name);
}

ex::RunSettings settings(const std::string& experiment, ex::json parameters) {
  ex::RunSettings s;
  s.experiment = experiment;
  s.parameters = std::move(parameters);
  s.master_seed = kMasterSeed;
  return s;
}

// 1. Closed forms against adaptive quadrature.
Report analytic_oracles() {
  Report r;
  const double ts[] = {0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  const double as[] = {0.0, 0.001, 0.05, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0};
  double worst_g = 0.0;
  for (double t : ts) {
    for (double a : as) {
      const double diff =
          std::abs(kernel::incomplete_green(t, a) - oracle::incomplete_green_quadrature(t, a));
      worst_g = std::max(worst_g, diff);
    }
  }
  r.check(worst_g <= 1e-10, fmt("incomplete_green: max |closed - quadrature| = %.3e over 8 x 10 "
                                "grid (tol 1e-10)",
                                worst_g));
  const double factors[] = {0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  double worst_s = 0.0;
  for (double eps : {1.0, 0.1, 0.01}) {
    for (double f : factors) {
      const double lag = f * std::sqrt(eps);
      const double diff = std::abs(kernel::spatial_covariance(eps, lag) -
                                   oracle::spatial_covariance_quadrature(eps, lag));
      worst_s = std::max(worst_s, diff);
    }
  }
  r.check(worst_s <= 1e-8, fmt("spatial_covariance: max |closed - quadrature| = %.3e over 3 x 10 "
                               "grid (tol 1e-8)",
                               worst_s));
  return r;
}

// 2. Var Z(eps, 0) = sqrt(eps / pi) for the exact sampler and the solver.
Report variance_law() {
  Report r;
  constexpr std::size_t kDraws = 100000;
  for (double eps : {1.0, 0.01}) {
    const double dx = 4.0 * std::sqrt(eps);
    const field::SpatialSliceSampler sampler(eps, field::UniformGrid{0.0, dx, 8});
    noise::Rng rng(noise::SeedSpec{kMasterSeed, eps == 1.0 ? 1u : 2u});
    std::vector<double> x(8), first(kDraws);
    for (std::size_t k = 0; k < kDraws; ++k) {
      sampler.draw(rng, x);
      first[k] = x[0];
    }
    const double target = std::sqrt(eps / kernel::kPi);
    const double v = stats::variance(first);
    const double se = target * std::sqrt(2.0 / (kDraws - 1.0));
    r.check(std::abs(v - target) <= 3.0 * se,
            fmt("exact sampler eps=%g: var %.6g vs %.6g, |z| = %.2f (tol 3)", eps, v, target,
                std::abs(v - target) / se));
  }

  // Six core points 0.3 apart are nearly independent at eps = 0.01.
  spde::SolverConfig cfg;
  cfg.dx = 0.002;
  cfg.dt = cfg.dx * cfg.dx / 2.0;
  cfg.T = 0.01;
  cfg.L = 0.6;
  cfg.x_min = 0.0;
  cfg.x_max = 1.5;
  constexpr std::size_t kSeeds = 2000;
  const std::size_t stride = static_cast<std::size_t>(std::llround(0.3 / cfg.dx));
  std::vector<double> squares;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const auto f = spde::solve_she(spde::SigmaSpec::constant(1.0), cfg, {kMasterSeed, 100 + s});
    const auto last = f.deviation.row(f.deviation.rows() - 1);
    for (std::size_t j = 0; j < last.size(); j += stride) squares.push_back(last[j] * last[j]);
  }
  const double target = std::sqrt(cfg.T / kernel::kPi);
  const double v = stats::mean(squares);
  r.check(std::abs(v / target - 1.0) <= 0.05,
          fmt("finite differences eps=0.01 dx=0.002: E[Z^2] %.6g vs %.6g, rel err %.2f%% "
              "(tol 5%%, %zu samples)",
              v, target, 100.0 * std::abs(v / target - 1.0), squares.size()));
  return r;
}

// 3. Truncation deficit and exact independence.
Report truncation_bound() {
  Report r;
  for (double eps : {1.0, 0.1, 0.01}) {
    for (double delta : {0.5, 0.1, 0.01}) {
      const double d = kernel::truncation_deficit(eps, delta);
      const double bound = delta * delta * std::sqrt(eps);
      const double gap = kernel::independence_gap(eps, delta);
      constexpr std::size_t n = 40;
      const double dx = 1.5 * gap / (n - 1);
      std::vector<double> xs(n);
      for (std::size_t k = 0; k < n; ++k) xs[k] = dx * static_cast<double>(k);
      const auto c = kernel::CovarianceModel::truncated(eps, delta).matrix(xs);
      const auto lags = field::truncated_lag_covariances(field::TruncatedFieldSpec(eps, delta),
                                                         dx, n);
      std::size_t beyond = 0, nonzero = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (std::abs(xs[i] - xs[j]) > gap) {
            ++beyond;
            if (c[i * n + j] != 0.0) ++nonzero;
          }
        }
        if (xs[i] > gap && lags[i] != 0.0) ++nonzero;
      }
      r.check(d >= 0.0 && d < bound && nonzero == 0 && beyond > 0,
              fmt("eps=%g delta=%g: deficit %.3e < %.3e; %zu entries beyond gap %.4g, %zu "
                  "nonzero",
                  eps, delta, d, bound, beyond, gap, nonzero));
    }
  }
  return r;
}

// 4. E sup over the parabolic box scales like eps^{1/4}.
Report sup_scaling() {
  Report r;
  std::vector<double> eps;
  for (int n = 4; n <= 12; ++n) eps.push_back(std::ldexp(1.0, -n));
  const auto sampler = fractal::fd_sup_sampler(fractal::SupGrid{}, {kMasterSeed, 0});
  const auto s = fractal::expected_sup_scaling(1.0, eps, 1000, sampler);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    r.note(fmt("eps=2^-%zu mean sup %.5g +- %.2g", k + 4, s.mean_sup[k], s.stderr_sup[k]));
  }
  r.check(s.fit.slope >= 0.2 && s.fit.slope <= 0.3,
          fmt("slope %.4f +- %.4f in [0.2, 0.3]", s.fit.slope, s.fit.stderr_slope));
  return r;
}

// 5. Gaussian tail of the box supremum.
Report tail_law() {
  Report r;
  std::vector<double> lambdas;
  for (int k = 0; k <= 16; ++k) lambdas.push_back(0.25 * k);
  const auto tail = fractal::sup_tail_estimate(1.0, 0.01, lambdas, 100000, {kMasterSeed, 0});
  const fractal::TailPoint* last = nullptr;
  bool bound_ok = true;
  for (const auto& t : tail) {
    const bool above = t.p_hat >= t.single_point_bound - 3.0 * t.stderr_p;
    bound_ok = bound_ok && above;
    r.note(fmt("lambda=%.2f hits=%zu p=%.4g log p/lambda^2=%.3f bound=%.4g%s", t.lambda, t.hits,
               t.p_hat, t.normalized_log_p, t.single_point_bound, above ? "" : "  <- below"));
    if (t.reliable && t.lambda > 0.0) last = &t;
  }
  if (last) {
    r.check(last->normalized_log_p >= -1.5 && last->normalized_log_p <= -0.6,
            fmt("largest reliable lambda %.2f: log p/lambda^2 = %.3f in [-1.5, -0.6]",
                last->lambda, last->normalized_log_p));
  } else {
    r.check(false, "no reliable lambda > 0");
  }
  r.check(bound_ok, "p_hat >= P{X >= sqrt(2) lambda} - 3 stderr at every lambda");
  return r;
}

// 6. Coupling of u - 1 with sigma(1) Z.
Report coupling() {
  Report r;
  const auto smooth = ex::execute(settings("coupling-error", ex::json::object()));
  const auto& rows = table(smooth, "results");
  for (std::size_t k = 0; k < rows.rows.size(); ++k) {
    r.note(fmt("eps=%.4g error %.4g +- %.2g", cell(rows, k, "epsilon"),
               cell(rows, k, "coupling_error"), cell(rows, k, "stderr")));
  }
  const double slope = cell(table(smooth, "fit"), 0, "slope");
  r.check(slope >= 0.3, fmt("BoundedSmooth(1): slope %.4f >= 0.3", slope));

  const auto constant = ex::execute(settings(
      "coupling-error", {{"sigma", {{"kind", "constant"}, {"a", 1.7}}}, {"seeds", 4}}));
  const auto& c = table(constant, "results");
  bool zero = true;
  for (std::size_t k = 0; k < c.rows.size(); ++k) zero = zero && cell(c, k, "max") == 0.0;
  r.check(zero, "Constant(1.7): coupling error identically 0 at every eps and seed");
  return r;
}

// 7. Dimension curve of exceedance sets.
Report dimension_curve() {
  Report r;
  const auto res = ex::execute(settings("exceedance-dim", ex::json::object()));
  const auto& t = table(res, "results");
  std::vector<double> cs, slopes, errs, fractions;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    cs.push_back(cell(t, k, "c"));
    slopes.push_back(cell(t, k, "slope"));
    errs.push_back(cell(t, k, "stderr"));
    fractions.push_back(cell(t, k, "finest_fraction"));
    r.note(fmt("c=%.2f slope %.4f +- %.4f (union %.3f, capacity %.3f) finest fraction %.3g, "
               "theory %.4f",
               cs.back(), slopes.back(), errs.back(), cell(t, k, "union_slope"),
               cell(t, k, "capacity_slope"), fractions.back(), cell(t, k, "theory")));
  }
  const auto at = [&](double c) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (std::abs(cs[k] - c) < 1e-12) return k;
    }
    throw std::runtime_error("c grid lacks " + std::to_string(c));
  };
  // Monotone up to one combined standard error between neighbours.
  bool monotone = true;
  const std::vector<std::size_t> idx{at(0.1), at(0.3), at(0.5), at(0.7)};
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const double se = std::isfinite(errs[idx[k]]) && std::isfinite(errs[idx[k + 1]])
                          ? std::hypot(errs[idx[k]], errs[idx[k + 1]])
                          : 0.0;
    monotone = monotone && slopes[idx[k + 1]] <= slopes[idx[k]] + se;
  }
  r.check(monotone, "slopes nonincreasing over c = 0.1, 0.3, 0.5, 0.7 up to stderr");
  r.check(slopes[at(0.1)] >= 0.85, fmt("c=0.1: slope %.4f >= 0.85", slopes[at(0.1)]));
  const double theory = 1.0 - 0.25 * std::sqrt(kernel::kPi);
  r.check(std::abs(slopes[at(0.5)] - theory) <= 0.2,
          fmt("c=0.5: slope %.4f within 0.2 of %.4f", slopes[at(0.5)], theory));
  r.check(fractions[at(0.8)] <= 0.01,
          fmt("c=0.8: finest occupied fraction %.3g <= 1%%", fractions[at(0.8)]));
  return r;
}

// 8. Estimator calibration.
Report estimator_oracles() {
  Report r;
  const fractal::ScaleWindow window{std::ldexp(1.0, -14), 0.25};
  fractal::ExceedanceSet interval;
  const int k = 16;
  for (std::size_t j = 0; j <= (std::size_t{1} << k); ++j) {
    interval.points.push_back(std::ldexp(static_cast<double>(j), -k));
  }
  interval.resolution = std::ldexp(1.0, -k);
  const double d_interval = fractal::box_dimension(interval, window).slope;
  r.check(std::abs(d_interval - 1.0) <= 0.02, fmt("interval: %.4f = 1 +- 0.02", d_interval));

  const fractal::ExceedanceSet point{0.0, {0.5}, 0.0};
  const double d_point = fractal::box_dimension(point, window).slope;
  r.check(std::abs(d_point) <= 0.02, fmt("point: %.4f = 0 +- 0.02", d_point));

  const fractal::ExceedanceSet cantor{0.0, oracle::cantor_prefix(10), std::pow(3.0, -10)};
  const double d_cantor = fractal::box_dimension(cantor, window).slope;
  const double ln23 = std::log(2.0) / std::log(3.0);
  r.check(std::abs(d_cantor - ln23) <= 0.05,
          fmt("level-10 Cantor prefix: %.4f = %.4f +- 0.05 (window 2^-14..2^-2)", d_cantor, ln23));

  std::mt19937_64 gen(kMasterSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 15);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> pts(static_cast<std::size_t>(size(gen)));
    for (double& p : pts) p = unit(gen);
    std::sort(pts.begin(), pts.end());
    const double sep = std::exp(std::log(1e-3) * unit(gen));  // log-uniform in [1e-3, 1]
    if (fractal::kolmogorov_capacity(pts, sep) != oracle::brute_force_capacity(pts, sep)) {
      ++mismatches;
    }
  }
  r.check(mismatches == 0,
          fmt("kolmogorov_capacity vs exhaustive search: %zu mismatches in 1000 trials",
              mismatches));
  return r;
}

// 9. LIL constant at t = 0.
Report lil_constant() {
  Report r;
  const auto one = ex::execute(settings("lil", ex::json::object()));
  const double median = cell(table(one, "results"), 0, "median");
  const double target = cell(table(one, "results"), 0, "target");
  r.check(median >= 0.6 * target && median <= 1.4 * target,
          fmt("sigma(1)=1: median %.4f in [0.6, 1.4] x %.4f (ratio %.3f)", median, target,
              median / target));
  const auto two = ex::execute(settings("lil", {{"sigma1", 2.0}}));
  const double median2 = cell(table(two, "results"), 0, "median");
  r.check(median2 == 2.0 * median, fmt("sigma(1)=2: median %.6f = 2 x %.6f exactly", median2,
                                       median));
  const auto three = ex::execute(settings("lil", {{"sigma1", 3.0}}));
  const double median3 = cell(table(three, "results"), 0, "median");
  r.check(std::abs(median3 - 3.0 * median) <= 1e-12 * median3,
          fmt("sigma(1)=3: median %.6f = 3 x %.6f to round-off", median3, median));
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Worker count never changes the bytes written.
Report reproducibility() {
  Report r;
  const std::vector<std::pair<std::string, ex::json>> runs{
      {"covariance-check", {{"draws", 2000}}},
      {"correlation-profile", ex::json::object()},
      {"truncation-check", {{"lag_points", 10}}},
      {"sup-scaling", {{"trials", 1000}, {"n1", 8}}},
      {"tail-law", {{"trials", 10000}, {"points_per_root_eps", 6}}},
      {"coupling-error",
       {{"dx", 0.0078125}, {"dt", 3.0517578125e-05}, {"n_min", 4}, {"n_max", 8}, {"seeds", 12}}},
      {"exceedance-dim",
       {{"grid_exponent", 10}, {"n1", 16}, {"replicates", 8}, {"r_min", 0.00390625}}},
      {"lil", {{"traces", 200}}},
      {"capacity-demo", {{"set", "random"}}},
  };
  const fs::path root = fs::temp_directory_path() / "shepeaks_acceptance_repro";
  fs::remove_all(root);
  for (const auto& [name, params] : runs) {
    std::vector<std::vector<std::string>> bytes;
    for (unsigned workers : {1u, 4u, 8u}) {
      ex::RunSettings s = settings(name, params);
      s.workers = workers;
      s.output_dir = root / ("w" + std::to_string(workers));
      const auto m = ex::run(s);
      std::vector<std::string> csvs;
      for (const auto& f : m.files) {
        if (f.extension() == ".csv") csvs.push_back(slurp(f));
      }
      bytes.push_back(std::move(csvs));
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1] && bytes[0] == bytes[2];
    r.check(same, fmt("%s: %zu CSV file(s) byte-identical with 1, 4 and 8 workers", name.c_str(),
                      bytes[0].size()));
  }
  fs::remove_all(root);
  return r;
}

struct Criterion {
  int id;
  const char* title;
  Report (*run)();
};

const Criterion kCriteria[] = {
    {1, "analytic oracle agreement", analytic_oracles},
    {2, "variance law", variance_law},
    {3, "truncation bound and independence gap", truncation_bound},
    {4, "supremum scaling", sup_scaling},
    {5, "tail law", tail_law},
    {6, "coupling", coupling},
    {7, "dimension-curve surrogate", dimension_curve},
    {8, "estimator calibration", estimator_oracles},
    {9, "LIL constant", lil_constant},
    {10, "reproducibility across worker counts", reproducibility},
};

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  try {
    rep = c.run();
  } catch (const std::exception& e) {
    rep.check(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %d: %s (%.1f s)\n", rep.ok ? "PASS" : "FAIL", c.id, c.title, secs);
  for (const auto& d : rep.details) std::printf("    %s\n", d.c_str());
  std::fflush(stdout);
  return rep.ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the shepeaks library"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "criterion number 1-10; 0 runs all")
      ->check(CLI::Range(0, 10));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (const auto& c : kCriteria) {
    if (criterion == 0 || criterion == c.id) ok = run_one(c) && ok;
  }
  return ok ? 0 : 1;
}
