#pragma once

// Explicit finite-difference Euler-Maruyama scheme for
//   du = (1/2) u'' dt + sigma(u) dW,   u(0, .) = 1,
// on a truncated interval with Dirichlet data, plus the coupled mode that
// drives u and the linear solution Z (sigma = 1, Z(0) = 0) with one noise.
//
// Fields are stored as deviations from their constant initial value, so
// u - 1 is available without cancellation.

#include <shepeaks/array2d.hpp>
#include <shepeaks/noise.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace shepeaks::spde {

enum class SigmaKind { Constant, Affine, BoundedSmooth };

/// Closed family of diffusion coefficients:
///   Constant(a):       sigma(u) = a
///   Affine(a, b):      sigma(u) = a + b (u - 1)
///   BoundedSmooth(a):  sigma(u) = a (1 + sin(u - 1) / 2)
struct SigmaSpec {
  SigmaKind kind = SigmaKind::Constant;
  double a = 1.0;
  double b = 0.0;

  static SigmaSpec constant(double a) { return {SigmaKind::Constant, a, 0.0}; }
  static SigmaSpec affine(double a, double b) { return {SigmaKind::Affine, a, b}; }
  static SigmaSpec bounded_smooth(double a) { return {SigmaKind::BoundedSmooth, a, 0.0}; }

  double operator()(double u) const noexcept { return at_deviation(u - 1.0); }
  /// sigma(1 + v).
  double at_deviation(double v) const noexcept;
  double value_at_one() const noexcept { return at_deviation(0.0); }
  double lipschitz() const noexcept;

  friend bool operator==(const SigmaSpec&, const SigmaSpec&) = default;
};

std::string to_string(SigmaKind kind);

enum class Boundary { Dirichlet };

/// Which time rows a solve keeps. Step 0 and the final step are always kept.
struct RowRetention {
  bool all_rows = false;
  std::vector<double> times;

  friend bool operator==(const RowRetention&, const RowRetention&) = default;
};

/// Lattice x_j = j dx covering [x_min - L, x_max + L]; values are reported on
/// the core interval [x_min, x_max].
struct SolverConfig {
  double dx = 0.002;
  double dt = 2e-6;
  double T = 0.01;
  double L = 0.6;
  double x_min = 0.0;
  double x_max = 1.0;
  Boundary boundary = Boundary::Dirichlet;
  RowRetention retention;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Human-readable violations of the configuration invariants
/// (dt <= dx^2 / 2, L >= 6 sqrt(T), positive steps); empty when valid.
std::vector<std::string> diagnose(const SolverConfig& cfg);

/// Throws ConfigError listing every violation.
void validate(const SolverConfig& cfg);

/// Number of time steps ceil(T / dt).
std::size_t step_count(const SolverConfig& cfg);

/// Convenience: dx = sqrt(eps) / points_per_root_eps, dt = dx^2 / 2, T = eps,
/// L = 6 sqrt(eps) rounded up to a lattice multiple, core [x_min, x_max].
SolverConfig scaled_config(double epsilon, double points_per_root_eps, double x_min,
                           double x_max);

struct SpaceTimeField {
  SolverConfig config;
  double baseline = 0.0;            // initial value: 1 for u, 0 for Z
  std::vector<std::size_t> steps;   // retained step indices, increasing
  std::vector<double> times;        // steps[i] * dt
  std::vector<double> positions;    // core lattice points
  Array2D deviation;                // value - baseline, rows x positions

  double value(std::size_t row, std::size_t col) const {
    return baseline + deviation(row, col);
  }
};

struct CoupledFields {
  SpaceTimeField u;
  SpaceTimeField z;
};

/// Supplies N(0,1) draws for cells (step, first_column + k), k < out.size().
using NoiseSource =
    std::function<void(std::int64_t step, std::int64_t first_column, std::span<double> out)>;

/// Position-keyed noise of the given seed stream (see noise::cell_normals).
NoiseSource seeded_noise(noise::SeedSpec seed);

/// Receives the core-interval deviations after each step (step >= 1).
using RowObserver =
    std::function<void(std::size_t step, double t, std::span<const double> deviation)>;

/// Solves for u, keeping the rows selected by cfg.retention.
SpaceTimeField solve_she(const SigmaSpec& sigma, const SolverConfig& cfg, noise::SeedSpec seed);
SpaceTimeField solve_she(const SigmaSpec& sigma, const SolverConfig& cfg,
                         const NoiseSource& noise);

/// u and Z driven by the same noise cells.
CoupledFields solve_coupled(const SigmaSpec& sigma, const SolverConfig& cfg,
                            noise::SeedSpec seed);

/// Runs the scheme without storing rows; observer sees every step.
void integrate(const SigmaSpec& sigma, const SolverConfig& cfg, const NoiseSource& noise,
               const RowObserver& observer);

/// Receives the core-interval deviations of u and Z after each step.
using CoupledObserver = std::function<void(std::size_t step, double t,
                                           std::span<const double> u_deviation,
                                           std::span<const double> z_deviation)>;

/// Coupled counterpart of integrate.
void integrate_coupled(const SigmaSpec& sigma, const SolverConfig& cfg, const NoiseSource& noise,
                       const CoupledObserver& observer);

/// Core lattice positions for cfg.
std::vector<double> core_positions(const SolverConfig& cfg);

/// max |u - 1 - sigma1 Z| over retained rows with t <= eps and x in [0, 1].
/// Throws DomainError if the fields do not share a configuration or
/// eps exceeds the horizon.
double coupling_error(const SpaceTimeField& u, const SpaceTimeField& z, double sigma1,
                      double epsilon);

/// CSV with header `t,x,value`.
void write_csv(std::ostream& os, const SpaceTimeField& field);

}  // namespace shepeaks::spde
