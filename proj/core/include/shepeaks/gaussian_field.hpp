#pragma once

// Exact simulation of the linear solution Z: spatial slices Z(eps, .),
// temporal traces Z(., x), truncated slices Z_delta(eps, .), and the
// correlation-length profile of a slice.

#include <shepeaks/noise.hpp>

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace shepeaks::field {

/// x_k = x0 + k dx for k = 0..n-1.
struct UniformGrid {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t n = 0;

  double operator[](std::size_t k) const noexcept { return x0 + static_cast<double>(k) * dx; }
  std::vector<double> positions() const;

  /// Builds a grid from explicit positions; throws DomainError unless they
  /// are strictly increasing with spacings equal to within 1e-9 relative.
  static UniformGrid from_positions(std::span<const double> positions);
};

struct FieldSlice {
  double epsilon = 0.0;
  double delta = 0.0;  // 0 for an untruncated slice
  UniformGrid grid;
  std::vector<double> values;
};

struct TemporalTrace {
  double x = 0.0;
  std::vector<double> times;  // strictly increasing, all > 0
  std::vector<double> values;
};

/// Localisation parameters of Z_delta(eps, .).
class TruncatedFieldSpec {
 public:
  /// Throws DomainError unless eps > 0 and delta in (0, 1).
  TruncatedFieldSpec(double epsilon, double delta);

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  double half_width() const noexcept { return half_width_; }
  double independence_gap() const noexcept { return 2.0 * half_width_; }

 private:
  double epsilon_;
  double delta_;
  double half_width_;
};

/// Repeated exact draws of Z(eps, .) on a fixed uniform grid (circulant
/// embedding, dense fallback).
class SpatialSliceSampler {
 public:
  SpatialSliceSampler(double epsilon, UniformGrid grid);

  const UniformGrid& grid() const noexcept { return grid_; }
  double epsilon() const noexcept { return epsilon_; }
  bool uses_embedding() const noexcept { return sampler_.uses_embedding(); }

  FieldSlice draw(noise::SeedSpec seed) const;
  void draw(noise::Rng& rng, std::span<double> out) const { sampler_.draw(rng, out); }

 private:
  double epsilon_;
  UniformGrid grid_;
  noise::CirculantSampler sampler_;
};

/// Repeated exact draws of t -> Z(t, x) at fixed times (dense factorisation).
class TemporalTraceSampler {
 public:
  explicit TemporalTraceSampler(std::vector<double> times);

  const std::vector<double>& times() const noexcept { return times_; }

  TemporalTrace draw(double x, noise::SeedSpec seed) const;
  void draw(noise::Rng& rng, std::span<double> out) const { sampler_.draw(rng, out); }

 private:
  std::vector<double> times_;
  noise::GaussianSampler sampler_;
};

/// Repeated exact draws of Z_delta(eps, .) on a fixed uniform grid.
class TruncatedSliceSampler {
 public:
  TruncatedSliceSampler(TruncatedFieldSpec spec, UniformGrid grid);

  const TruncatedFieldSpec& spec() const noexcept { return spec_; }
  /// Model covariance at lag k * dx.
  const std::vector<double>& lag_covariances() const noexcept { return lags_; }

  FieldSlice draw(noise::SeedSpec seed) const;

 private:
  TruncatedFieldSpec spec_;
  UniformGrid grid_;
  std::vector<double> lags_;
  noise::GaussianSampler sampler_;
};

/// Covariances of Z(eps, .) at lags 0, dx, ..., (n-1) dx.
std::vector<double> spatial_lag_covariances(double epsilon, double dx, std::size_t n);

/// Covariances of Z_delta(eps, .) at lags 0, dx, ..., (n-1) dx. Results are
/// cached per (eps, delta, dx); the cache is safe for concurrent use.
std::vector<double> truncated_lag_covariances(const TruncatedFieldSpec& spec, double dx,
                                              std::size_t n);

FieldSlice sample_spatial_slice(double epsilon, const UniformGrid& grid, noise::SeedSpec seed);
FieldSlice sample_spatial_slice(double epsilon, std::span<const double> positions,
                                noise::SeedSpec seed);

TemporalTrace sample_temporal_trace(double x, std::span<const double> times,
                                    noise::SeedSpec seed);

FieldSlice sample_truncated_slice(const TruncatedFieldSpec& spec, const UniformGrid& grid,
                                  noise::SeedSpec seed);

struct CorrelationPoint {
  double alpha;
  double lag;         // eps^{1/2 + alpha}
  double covariance;  // Cov[Z(eps, 0), Z(eps, lag)]
  /// covariance / sqrt(eps) when alpha >= 0, otherwise covariance divided by
  /// eps^{1/2 + 2|alpha|} exp(-1 / (4 eps^{2|alpha|})).
  double normalized;
};

/// Deterministic covariance at lag eps^{1/2 + alpha} for each alpha.
/// Requires eps in (0, 1).
std::vector<CorrelationPoint> correlation_length_profile(double epsilon,
                                                         std::span<const double> alphas);

/// CSV with header `x,value`.
void write_csv(std::ostream& os, const FieldSlice& slice);
/// CSV with header `t,value`.
void write_csv(std::ostream& os, const TemporalTrace& trace);

}  // namespace shepeaks::field
