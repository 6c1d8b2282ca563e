#include <shepeaks/spde_solver.hpp>

#include <shepeaks/csv.hpp>
#include <shepeaks/errors.hpp>

#include <algorithm>
#include <cmath>

namespace shepeaks::spde {

namespace {

constexpr double kLatticeTol = 1e-9;

// Global lattice indices of the simulated interval. Nodes lo and hi carry
// the Dirichlet value; lo + 1 .. hi - 1 are updated.
struct Lattice {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t core_lo = 0;
  std::int64_t core_hi = 0;

  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  std::size_t core_offset() const { return static_cast<std::size_t>(core_lo - lo); }
  std::size_t core_size() const { return static_cast<std::size_t>(core_hi - core_lo + 1); }
};

Lattice make_lattice(const SolverConfig& cfg) {
  Lattice lat;
  lat.core_lo = static_cast<std::int64_t>(std::ceil(cfg.x_min / cfg.dx - kLatticeTol));
  lat.core_hi = static_cast<std::int64_t>(std::floor(cfg.x_max / cfg.dx + kLatticeTol));
  if (lat.core_hi < lat.core_lo) throw ConfigError("core interval contains no lattice point");
  const auto ext = static_cast<std::int64_t>(std::ceil(cfg.L / cfg.dx - kLatticeTol));
  lat.lo = lat.core_lo - std::max<std::int64_t>(ext, 1);
  lat.hi = lat.core_hi + std::max<std::int64_t>(ext, 1);
  return lat;
}

bool keep_row(const std::vector<std::size_t>& wanted, std::size_t step) {
  return std::binary_search(wanted.begin(), wanted.end(), step);
}

std::vector<std::size_t> retained_steps(const SolverConfig& cfg, std::size_t nsteps) {
  std::vector<std::size_t> steps;
  if (cfg.retention.all_rows) {
    steps.resize(nsteps + 1);
    for (std::size_t n = 0; n <= nsteps; ++n) steps[n] = n;
    return steps;
  }
  steps.push_back(0);
  steps.push_back(nsteps);
  for (double t : cfg.retention.times) {
    const auto n = static_cast<std::size_t>(std::llround(t / cfg.dt));
    steps.push_back(std::min(n, nsteps));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

// One explicit step on deviations v (size = lattice size); endpoints stay 0.
template <class Sigma>
void advance(std::vector<double>& v, std::vector<double>& next, const std::vector<double>& w,
             double mu, Sigma&& sigma) {
  const std::size_t n = v.size();
  next[0] = 0.0;
  next[n - 1] = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    next[j] = v[j] + mu * (v[j + 1] - 2.0 * v[j] + v[j - 1]) + sigma(v[j]) * w[j];
  }
  v.swap(next);
}

// Drives the scheme; calls emit(step, u_dev_core, z_dev_core) for step 0..nsteps.
// z is only advanced when with_z is set; for constant sigma, u = a Z exactly.
template <class Emit>
void run_scheme(const SigmaSpec& sigma, const SolverConfig& cfg, const NoiseSource& noise,
                bool with_z, Emit&& emit) {
  validate(cfg);
  const Lattice lat = make_lattice(cfg);
  const std::size_t nsteps = step_count(cfg);
  const std::size_t size = lat.size();
  const std::size_t off = lat.core_offset();
  const std::size_t core = lat.core_size();
  const double mu = cfg.dt / (2.0 * cfg.dx * cfg.dx);
  const double noise_scale = std::sqrt(cfg.dt / cfg.dx);
  const bool constant = sigma.kind == SigmaKind::Constant;
  const double a = sigma.a;

  std::vector<double> u(size, 0.0), u_next(size, 0.0);
  std::vector<double> z(size, 0.0), z_next(size, 0.0);
  std::vector<double> w(size, 0.0);
  std::vector<double> u_core(core, 0.0);
  const bool need_z = with_z || constant;

  auto publish = [&](std::size_t step) {
    std::span<const double> z_core(z.data() + off, core);
    if (constant) {
      for (std::size_t k = 0; k < core; ++k) u_core[k] = a * z[off + k];
    } else {
      std::copy_n(u.data() + off, core, u_core.data());
    }
    emit(step, std::span<const double>(u_core), z_core);
  };

  publish(0);
  for (std::size_t n = 0; n < nsteps; ++n) {
    noise(static_cast<std::int64_t>(n), lat.lo + 1, std::span<double>(w.data() + 1, size - 2));
    for (std::size_t j = 1; j + 1 < size; ++j) w[j] *= noise_scale;
    if (need_z) advance(z, z_next, w, mu, [](double) { return 1.0; });
    if (!constant) {
      advance(u, u_next, w, mu, [&sigma](double v) { return sigma.at_deviation(v); });
    }
    publish(n + 1);
  }
}

SpaceTimeField empty_field(const SolverConfig& cfg, double baseline,
                           const std::vector<std::size_t>& steps) {
  SpaceTimeField f;
  f.config = cfg;
  f.baseline = baseline;
  f.steps = steps;
  f.times.reserve(steps.size());
  for (std::size_t s : steps) f.times.push_back(static_cast<double>(s) * cfg.dt);
  f.positions = core_positions(cfg);
  f.deviation = Array2D(steps.size(), f.positions.size());
  return f;
}

}  // namespace

double SigmaSpec::at_deviation(double v) const noexcept {
  switch (kind) {
    case SigmaKind::Constant:
      return a;
    case SigmaKind::Affine:
      return a + b * v;
    case SigmaKind::BoundedSmooth:
      return a * (1.0 + 0.5 * std::sin(v));
  }
  return a;
}

double SigmaSpec::lipschitz() const noexcept {
  switch (kind) {
    case SigmaKind::Constant:
      return 0.0;
    case SigmaKind::Affine:
      return std::abs(b);
    case SigmaKind::BoundedSmooth:
      return 0.5 * std::abs(a);
  }
  return 0.0;
}

std::string to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::Constant:
      return "constant";
    case SigmaKind::Affine:
      return "affine";
    case SigmaKind::BoundedSmooth:
      return "bounded_smooth";
  }
  return "unknown";
}

std::vector<std::string> diagnose(const SolverConfig& cfg) {
  std::vector<std::string> out;
  const auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_positive(cfg.dx)) out.emplace_back("dx must be positive and finite");
  if (!finite_positive(cfg.dt)) out.emplace_back("dt must be positive and finite");
  if (!finite_positive(cfg.T)) out.emplace_back("T must be positive and finite");
  if (!(std::isfinite(cfg.L) && cfg.L >= 0.0)) out.emplace_back("L must be finite and >= 0");
  if (!(std::isfinite(cfg.x_min) && std::isfinite(cfg.x_max) && cfg.x_min <= cfg.x_max)) {
    out.emplace_back("core interval requires finite x_min <= x_max");
  }
  if (!out.empty()) return out;
  if (cfg.dt > 0.5 * cfg.dx * cfg.dx * (1.0 + 1e-12)) {
    out.emplace_back("CFL violated: require dt ≤ dx²/2");
  }
  if (cfg.L < 6.0 * std::sqrt(cfg.T) * (1.0 - 1e-12)) {
    out.emplace_back("domain extension too small: require L ≥ 6√T");
  }
  if (std::ceil(cfg.x_min / cfg.dx - kLatticeTol) >
      std::floor(cfg.x_max / cfg.dx + kLatticeTol)) {
    out.emplace_back("core interval contains no lattice point");
  }
  for (double t : cfg.retention.times) {
    if (!(t >= 0.0 && t <= cfg.T * (1.0 + 1e-12))) {
      out.emplace_back("retained time outside [0, T]");
      break;
    }
  }
  return out;
}

void validate(const SolverConfig& cfg) {
  const auto problems = diagnose(cfg);
  if (problems.empty()) return;
  std::string msg = "invalid solver config:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw ConfigError(msg);
}

std::size_t step_count(const SolverConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.T / cfg.dt - kLatticeTol));
}

SolverConfig scaled_config(double epsilon, double points_per_root_eps, double x_min,
                           double x_max) {
  if (!(epsilon > 0.0) || !(points_per_root_eps > 0.0)) {
    throw ConfigError("scaled_config: epsilon and resolution must be positive");
  }
  SolverConfig cfg;
  cfg.dx = std::sqrt(epsilon) / points_per_root_eps;
  cfg.dt = 0.5 * cfg.dx * cfg.dx;
  cfg.T = epsilon;
  cfg.L = std::ceil(6.0 * std::sqrt(epsilon) / cfg.dx) * cfg.dx;
  cfg.x_min = x_min;
  cfg.x_max = x_max;
  return cfg;
}

std::vector<double> core_positions(const SolverConfig& cfg) {
  const Lattice lat = make_lattice(cfg);
  std::vector<double> out(lat.core_size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<double>(lat.core_lo + static_cast<std::int64_t>(k)) * cfg.dx;
  }
  return out;
}

NoiseSource seeded_noise(noise::SeedSpec seed) {
  const std::uint64_t key = noise::stream_key(seed);
  return [key](std::int64_t step, std::int64_t first_column, std::span<double> out) {
    noise::cell_normals(key, step, first_column, out);
  };
}

SpaceTimeField solve_she(const SigmaSpec& sigma, const SolverConfig& cfg, noise::SeedSpec seed) {
  return solve_she(sigma, cfg, seeded_noise(seed));
}

SpaceTimeField solve_she(const SigmaSpec& sigma, const SolverConfig& cfg,
                         const NoiseSource& noise) {
  validate(cfg);
  const auto steps = retained_steps(cfg, step_count(cfg));
  SpaceTimeField u = empty_field(cfg, 1.0, steps);
  std::size_t row = 0;
  run_scheme(sigma, cfg, noise, false,
             [&](std::size_t step, std::span<const double> u_dev, std::span<const double>) {
               if (!keep_row(steps, step)) return;
               std::copy(u_dev.begin(), u_dev.end(), u.deviation.row(row).begin());
               ++row;
             });
  return u;
}

CoupledFields solve_coupled(const SigmaSpec& sigma, const SolverConfig& cfg,
                            noise::SeedSpec seed) {
  validate(cfg);
  const auto steps = retained_steps(cfg, step_count(cfg));
  CoupledFields out{empty_field(cfg, 1.0, steps), empty_field(cfg, 0.0, steps)};
  std::size_t row = 0;
  run_scheme(sigma, cfg, seeded_noise(seed), true,
             [&](std::size_t step, std::span<const double> u_dev, std::span<const double> z_dev) {
               if (!keep_row(steps, step)) return;
               std::copy(u_dev.begin(), u_dev.end(), out.u.deviation.row(row).begin());
               std::copy(z_dev.begin(), z_dev.end(), out.z.deviation.row(row).begin());
               ++row;
             });
  return out;
}

void integrate(const SigmaSpec& sigma, const SolverConfig& cfg, const NoiseSource& noise,
               const RowObserver& observer) {
  run_scheme(sigma, cfg, noise, false,
             [&](std::size_t step, std::span<const double> u_dev, std::span<const double>) {
               if (step > 0) observer(step, static_cast<double>(step) * cfg.dt, u_dev);
             });
}

void integrate_coupled(const SigmaSpec& sigma, const SolverConfig& cfg, const NoiseSource& noise,
                       const CoupledObserver& observer) {
  run_scheme(sigma, cfg, noise, true,
             [&](std::size_t step, std::span<const double> u_dev, std::span<const double> z_dev) {
               if (step > 0) observer(step, static_cast<double>(step) * cfg.dt, u_dev, z_dev);
             });
}

double coupling_error(const SpaceTimeField& u, const SpaceTimeField& z, double sigma1,
                      double epsilon) {
  if (!(u.config == z.config) || u.steps != z.steps || u.positions != z.positions) {
    throw DomainError("coupling_error: fields do not share one configuration");
  }
  if (!(epsilon > 0.0) || epsilon > u.config.T * (1.0 + 1e-12)) {
    throw DomainError("coupling_error: epsilon must lie in (0, T]");
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < u.times.size(); ++r) {
    if (u.times[r] > epsilon * (1.0 + 1e-12)) continue;
    for (std::size_t k = 0; k < u.positions.size(); ++k) {
      const double x = u.positions[k];
      if (x < -kLatticeTol || x > 1.0 + kLatticeTol) continue;
      worst = std::max(worst, std::abs(u.deviation(r, k) - sigma1 * z.deviation(r, k)));
    }
  }
  return worst;
}

void write_csv(std::ostream& os, const SpaceTimeField& field) {
  os << "t,x,value\n";
  for (std::size_t r = 0; r < field.times.size(); ++r) {
    const std::string t = csv::format_number(field.times[r]);
    for (std::size_t k = 0; k < field.positions.size(); ++k) {
      os << t << ',' << csv::format_number(field.positions[k]) << ','
         << csv::format_number(field.value(r, k)) << '\n';
    }
  }
}

}  // namespace shepeaks::spde
