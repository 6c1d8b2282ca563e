#pragma once

// Reproducible randomness: seed streams, discretised space-time white noise
// and exact samplers for centred Gaussian vectors.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace shepeaks::noise {

/// Identifies one independent random stream. Equal specs reproduce
/// bit-identical draws.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Keyed hash of (master_seed, stream_index) used to key every stream.
std::uint64_t stream_key(SeedSpec seed) noexcept;

/// Keyed hash of a key and two counters (row, block, ...).
std::uint64_t subkey(std::uint64_t key, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// xoshiro256++ engine; cheap to seed, so one engine per (key, counter) is
/// affordable. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) noexcept;
  explicit Rng(SeedSpec seed) noexcept : Rng(stream_key(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

 private:
  std::uint64_t s_[4];
};

/// Fills out with i.i.d. N(0,1) draws from rng.
void fill_standard_normal(Rng& rng, std::span<double> out);

/// Position-keyed normals: out[k] is the N(0,1) value attached to cell
/// (row, first_column + k) of the stream identified by key. Columns are
/// global lattice indices, so two grids that overlap see the same values on
/// their common cells.
void cell_normals(std::uint64_t key, std::int64_t row, std::int64_t first_column,
                  std::span<double> out);

struct NoiseGrid {
  double dt = 0.0;
  double dx = 0.0;
  std::size_t nt = 0;
  std::size_t nx = 0;
  std::vector<double> values;  // row-major nt x nx

  double operator()(std::size_t n, std::size_t j) const { return values[n * nx + j]; }
};

/// nt x nx i.i.d. N(0, 1/(dt dx)) cell averages of space-time white noise.
NoiseGrid white_noise_grid(double dt, double dx, std::size_t nt, std::size_t nx,
                           SeedSpec seed);

/// Relative threshold below which negative eigenvalues are treated as
/// round-off and clipped.
inline constexpr double kEigenvalueFloor = 1e-8;

/// Exact sampler for N(0, C) given a dense symmetric PSD matrix C. Tries a
/// Cholesky factorisation, then pivoted LDL^T, then Cholesky with diagonal
/// jitter of at most 1e-10 x trace, then a clipped eigendecomposition.
class GaussianSampler {
 public:
  /// cov is row-major n x n. Throws ModelError if it is not symmetric or has
  /// an eigenvalue below -1e-8 x trace.
  GaussianSampler(std::span<const double> cov, std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(factor_.rows()); }

  void draw(Rng& rng, std::span<double> out) const;
  std::vector<double> draw(SeedSpec seed) const;

  enum class Method { Cholesky, PivotedLdlt, JitteredCholesky, Eigen };
  Method method() const noexcept { return method_; }

 private:
  Eigen::MatrixXd factor_;
  Method method_ = Method::Cholesky;
};

/// Exact sampler for a stationary Gaussian sequence on a uniform grid via
/// circulant embedding of size 2(n-1). Falls back to GaussianSampler when
/// the embedding has eigenvalues below -1e-8 x (largest eigenvalue).
class CirculantSampler {
 public:
  explicit CirculantSampler(std::span<const double> first_row);

  std::size_t size() const noexcept { return n_; }
  bool uses_embedding() const noexcept { return !dense_; }

  void draw(Rng& rng, std::span<double> out) const;
  std::vector<double> draw(SeedSpec seed) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> root_eigen_;  // sqrt(lambda_k / m)
  std::optional<GaussianSampler> dense_;
};

/// One centred Gaussian draw with covariance cov (row-major n x n).
std::vector<double> sample_gaussian_vector(std::span<const double> cov, std::size_t n,
                                           SeedSpec seed);

/// One stationary Gaussian draw whose covariance at lag k is first_row[k].
std::vector<double> sample_stationary_circulant(std::span<const double> first_row,
                                                SeedSpec seed);

}  // namespace shepeaks::noise
