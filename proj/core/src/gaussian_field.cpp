#include <shepeaks/gaussian_field.hpp>

#include <shepeaks/csv.hpp>
#include <shepeaks/errors.hpp>
#include <shepeaks/kernel_math.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>

namespace shepeaks::field {

namespace {

void check_slice_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw DomainError("spatial slice: epsilon must lie in (0,1], got " + std::to_string(epsilon));
  }
}

void check_grid(const UniformGrid& grid) {
  if (grid.n == 0) throw DomainError("grid has no points");
  if (grid.n > 1 && !(grid.dx > 0.0)) throw DomainError("grid spacing must be positive");
}

std::vector<double> toeplitz(std::span<const double> lags) {
  const std::size_t n = lags.size();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = lags[i > j ? i - j : j - i];
  }
  return out;
}

std::vector<double> temporal_matrix(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw DomainError("temporal trace: times must be positive");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw DomainError("temporal trace: times must be strictly increasing");
    }
  }
  if (times.empty()) throw DomainError("temporal trace: no times given");
  return kernel::CovarianceModel::temporal().matrix(times);
}

using CacheKey = std::tuple<double, double, double>;

struct TruncatedCache {
  std::shared_mutex mutex;
  std::map<CacheKey, std::vector<double>> entries;
};

TruncatedCache& truncated_cache() {
  static TruncatedCache cache;
  return cache;
}

}  // namespace

std::vector<double> UniformGrid::positions() const {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = (*this)[k];
  return out;
}

UniformGrid UniformGrid::from_positions(std::span<const double> positions) {
  if (positions.empty()) throw DomainError("grid has no points");
  if (positions.size() == 1) return UniformGrid{positions[0], 1.0, 1};
  const double dx = (positions.back() - positions.front()) /
                    static_cast<double>(positions.size() - 1);
  if (!(dx > 0.0)) throw DomainError("grid must be strictly increasing");
  for (std::size_t k = 1; k < positions.size(); ++k) {
    const double step = positions[k] - positions[k - 1];
    if (!(step > 0.0) || std::abs(step - dx) > 1e-9 * dx) {
      throw DomainError("grid is not uniform at index " + std::to_string(k));
    }
  }
  return UniformGrid{positions[0], dx, positions.size()};
}

TruncatedFieldSpec::TruncatedFieldSpec(double epsilon, double delta)
    : epsilon_(epsilon),
      delta_(delta),
      half_width_(kernel::truncation_half_width(epsilon, delta)) {}

std::vector<double> spatial_lag_covariances(double epsilon, double dx, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = kernel::spatial_covariance(epsilon, static_cast<double>(k) * dx);
  }
  return out;
}

std::vector<double> truncated_lag_covariances(const TruncatedFieldSpec& spec, double dx,
                                              std::size_t n) {
  auto& cache = truncated_cache();
  const CacheKey key{spec.epsilon(), spec.delta(), dx};
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end() && it->second.size() >= n) {
      return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(n)};
    }
  }
  std::vector<double> lags(n);
  for (std::size_t k = 0; k < n; ++k) {
    lags[k] = kernel::truncated_covariance_lag(spec.epsilon(), spec.delta(),
                                               static_cast<double>(k) * dx);
  }
  std::unique_lock lock(cache.mutex);
  auto& slot = cache.entries[key];
  if (slot.size() < lags.size()) slot = lags;
  return lags;
}

SpatialSliceSampler::SpatialSliceSampler(double epsilon, UniformGrid grid)
    : epsilon_((check_slice_epsilon(epsilon), epsilon)),
      grid_((check_grid(grid), grid)),
      sampler_(spatial_lag_covariances(epsilon, grid.dx, grid.n)) {}

FieldSlice SpatialSliceSampler::draw(noise::SeedSpec seed) const {
  FieldSlice slice{epsilon_, 0.0, grid_, sampler_.draw(seed)};
  return slice;
}

TemporalTraceSampler::TemporalTraceSampler(std::vector<double> times)
    : times_(std::move(times)), sampler_(temporal_matrix(times_), times_.size()) {}

TemporalTrace TemporalTraceSampler::draw(double x, noise::SeedSpec seed) const {
  return TemporalTrace{x, times_, sampler_.draw(seed)};
}

TruncatedSliceSampler::TruncatedSliceSampler(TruncatedFieldSpec spec, UniformGrid grid)
    : spec_(spec),
      grid_((check_grid(grid), grid)),
      lags_(truncated_lag_covariances(spec, grid.dx, grid.n)),
      sampler_(toeplitz(lags_), grid.n) {}

FieldSlice TruncatedSliceSampler::draw(noise::SeedSpec seed) const {
  return FieldSlice{spec_.epsilon(), spec_.delta(), grid_, sampler_.draw(seed)};
}

FieldSlice sample_spatial_slice(double epsilon, const UniformGrid& grid, noise::SeedSpec seed) {
  return SpatialSliceSampler(epsilon, grid).draw(seed);
}

FieldSlice sample_spatial_slice(double epsilon, std::span<const double> positions,
                                noise::SeedSpec seed) {
  return sample_spatial_slice(epsilon, UniformGrid::from_positions(positions), seed);
}

TemporalTrace sample_temporal_trace(double x, std::span<const double> times,
                                    noise::SeedSpec seed) {
  return TemporalTraceSampler(std::vector<double>(times.begin(), times.end())).draw(x, seed);
}

FieldSlice sample_truncated_slice(const TruncatedFieldSpec& spec, const UniformGrid& grid,
                                  noise::SeedSpec seed) {
  return TruncatedSliceSampler(spec, grid).draw(seed);
}

std::vector<CorrelationPoint> correlation_length_profile(double epsilon,
                                                         std::span<const double> alphas) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("correlation_length_profile: epsilon must lie in (0,1)");
  }
  std::vector<CorrelationPoint> out;
  out.reserve(alphas.size());
  const double log_eps = std::log(epsilon);
  for (double alpha : alphas) {
    const double lag = std::exp((0.5 + alpha) * log_eps);
    const double cov = kernel::spatial_covariance(epsilon, lag);
    double log_scale;
    if (alpha >= 0.0) {
      log_scale = 0.5 * log_eps;
    } else {
      const double a = std::abs(alpha);
      log_scale = (0.5 + 2.0 * a) * log_eps - 0.25 * std::exp(-2.0 * a * log_eps);
    }
    out.push_back({alpha, lag, cov, std::exp(std::log(cov) - log_scale)});
  }
  return out;
}

void write_csv(std::ostream& os, const FieldSlice& slice) {
  os << "x,value\n";
  for (std::size_t k = 0; k < slice.values.size(); ++k) {
    os << csv::format_number(slice.grid[k]) << ',' << csv::format_number(slice.values[k])
       << '\n';
  }
}

void write_csv(std::ostream& os, const TemporalTrace& trace) {
  os << "t,value\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    os << csv::format_number(trace.times[k]) << ',' << csv::format_number(trace.values[k])
       << '\n';
  }
}

}  // namespace shepeaks::field
