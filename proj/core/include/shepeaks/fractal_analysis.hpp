#pragma once

// Peak normalisation on an epsilon ladder, exceedance sets, box-counting and
// capacity estimators, and the Monte Carlo estimators for suprema of Z over
// parabolic boxes (0, eps] x [0, R sqrt(eps)].

#include <shepeaks/array2d.hpp>
#include <shepeaks/noise.hpp>
#include <shepeaks/stats.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace shepeaks::fractal {

/// eps_n = nu^n for n = n0..n1.
struct EpsilonLadder {
  double nu = 0.5;
  int n0 = 4;
  int n1 = 24;

  /// Throws DomainError unless nu in (0,1), 1 <= n0 < n1.
  void validate() const;
  std::size_t size() const noexcept { return static_cast<std::size_t>(n1 - n0 + 1); }
  double epsilon(std::size_t level) const;
  /// Decreasing: eps_{n0}, ..., eps_{n1}.
  std::vector<double> values() const;
};

/// h(level, j) = (value - baseline) / (eps^{1/4} sqrt(log(1/eps))).
struct PeakField {
  EpsilonLadder ladder;
  std::vector<double> positions;  // uniform, ascending
  double resolution = 0.0;        // grid spacing
  Array2D h;                      // ladder.size() x positions.size()
};

/// values is ladder.size() x positions.size(). Throws DomainError for a
/// ladder value >= 1 or a shape mismatch.
PeakField normalize_peaks(const Array2D& values, double baseline, const EpsilonLadder& ladder,
                          std::span<const double> positions);

/// Peak normalisation factor eps^{1/4} sqrt(log(1/eps)).
double peak_scale(double epsilon);

struct ExceedanceSet {
  double c = 0.0;
  std::vector<double> points;  // ascending, distinct, within [0,1]
  double resolution = 0.0;
};

/// Grid points in [0,1] whose ladder maximum of h is >= c. c = 0 is allowed;
/// negative c throws DomainError.
ExceedanceSet exceedance_set(const PeakField& pf, double c);

/// Grid points in [0,1] with h(level, j) >= c at one ladder level.
ExceedanceSet level_exceedance_set(const PeakField& pf, std::size_t level, double c);

struct ScaleWindow {
  double r_min = 0.0;
  double r_max = 0.0;
};

inline constexpr double kMaxReportedSlope = 1.2;

struct DimensionEstimate {
  double slope = 0.0;      // raw_slope clamped to [0, 1.2]
  double raw_slope = 0.0;  // unclamped least-squares slope
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  ScaleWindow window;
  std::size_t scales = 0;
};

/// Occupied boxes of the dyadic partition of [0,1] into boxes of size 2^-k.
std::size_t occupied_dyadic_boxes(std::span<const double> points, int k);

/// Slope of log N(r) against log(1/r) over dyadic r = 2^-k in the window.
/// Throws EstimatorError with fewer than 5 scales, r_min < 2 x resolution,
/// or an empty set.
DimensionEstimate box_dimension(const ExceedanceSet& s, ScaleWindow window);

/// Largest r-separated subset size (pairwise gaps strictly greater than r),
/// by the greedy sweep. points must be ascending; r <= 0 throws DomainError.
std::size_t kolmogorov_capacity(std::span<const double> points, double r);

/// Slope of log K(r) against log(1/r) over dyadic r in the window.
DimensionEstimate capacity_dimension(const ExceedanceSet& s, ScaleWindow window);

struct DimensionRow {
  double c = 0.0;
  /// Level-matched estimate: level-n exceedances counted in boxes of size
  /// sqrt(eps_n), mean count regressed on log(1/sqrt(eps_n)) over the ladder
  /// levels with sqrt(eps_n) inside the window.
  DimensionEstimate estimate;
  double union_slope = 0.0;     // mean box slope of the ladder-max set; NaN if undefined
  double capacity_slope = 0.0;  // mean capacity slope of the ladder-max set; NaN if undefined
  /// Mean occupied fraction of sqrt(eps)-boxes at the finest ladder level in the window.
  double finest_fraction = 0.0;
  double theory = 0.0;  // max(0, 1 - c^2 sqrt(pi) / sigma1^2)
};

/// Dimension curve over thresholds, averaged over replicate peak fields that
/// share one ladder and grid. Levels without any exceedance are dropped from
/// the level-matched fit; fewer than 5 remaining levels gives slope 0 with
/// infinite stderr.
std::vector<DimensionRow> dimension_vs_c(std::span<const PeakField> replicates,
                                         std::span<const double> c_grid, ScaleWindow window,
                                         double sigma1 = 1.0);

struct TailPoint {
  double lambda = 0.0;
  double threshold = 0.0;  // (4 eps / pi)^{1/4} lambda
  std::size_t hits = 0;
  double p_hat = 0.0;
  double stderr_p = 0.0;
  double normalized_log_p = 0.0;  // log(p_hat) / lambda^2; NaN when undefined
  bool reliable = false;          // hits >= kReliableHits
  double single_point_bound = 0.0;  // P{X >= sqrt(2) lambda}
};

inline constexpr std::size_t kReliableHits = 20;

struct FdBoxOptions {
  double points_per_root_eps = 16.0;  // dx = sqrt(eps) / this
  unsigned workers = 1;
};

/// Supremum of the finite-difference Z over (0, eps] x [0, R sqrt(eps)] for
/// one noise stream.
double fd_box_supremum(double R, double epsilon, double points_per_root_eps,
                       noise::SeedSpec seed);

/// Monte Carlo tail of sup Z over the box. Trial i uses stream
/// (seed.master_seed, seed.stream_index + i). Requires trials >= 1e4 and
/// eps in (0,1).
std::vector<TailPoint> sup_tail_estimate(double R, double epsilon,
                                         std::span<const double> lambda_grid, std::size_t trials,
                                         noise::SeedSpec seed, const FdBoxOptions& options = {});

/// Tail summary from precomputed suprema.
std::vector<TailPoint> tail_from_suprema(std::span<const double> suprema, double epsilon,
                                         std::span<const double> lambda_grid);

/// Returns sup over each box (0, eps_k] x [0, R sqrt(eps_k)] for one trial.
using SupSampler = std::function<std::vector<double>(std::span<const double> epsilons, double R,
                                                     std::uint64_t trial)>;

/// Lattice choice for fd_sup_sampler. With dx > 0 every box is read off one
/// run on that lattice. Otherwise each eps gets the coarsest dyadic dx with
/// sqrt(eps)/dx >= min_points_per_root_eps; boxes sharing a dx share one run,
/// and distinct dx bands use independent noise.
struct SupGrid {
  double dx = 0.0;
  double min_points_per_root_eps = 16.0;
};

/// Finite-difference sampler, dt = dx^2/2, horizon the largest eps of a band.
SupSampler fd_sup_sampler(const SupGrid& grid, noise::SeedSpec seed);

struct SupScaling {
  std::vector<double> epsilons;
  std::vector<double> mean_sup;
  std::vector<double> stderr_sup;
  /// Regression of log mean_sup on log eps; NaN slope when a mean is <= 0.
  stats::LinearFit fit;
};

/// Requires eps in (0,1) and trials >= 1.
SupScaling expected_sup_scaling(double R, std::span<const double> epsilons, std::size_t trials,
                                const SupSampler& sampler, unsigned workers = 1);

struct LilSummary {
  std::vector<double> statistic;  // one per trace
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  double target = 0.0;  // (4/pi)^{1/4} sigma1
};

/// values is traces x ladder levels, column k holding the field at eps_{n0+k}.
/// Statistic per trace: max_k (value - baseline) / (eps^{1/4} sqrt(log log(1/eps))).
/// Throws DomainError if some eps has log log(1/eps) <= 0 or the deepest
/// level has log log(1/eps) <= 0.5.
LilSummary lil_statistic(const Array2D& values, double baseline, const EpsilonLadder& ladder,
                         double sigma1);

}  // namespace shepeaks::fractal
