#include <shepeaks/noise.hpp>

#include <shepeaks/errors.hpp>

#include <boost/random/normal_distribution.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace shepeaks::noise {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::int64_t kCellBlock = 64;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(SeedSpec seed) noexcept {
  return mix64(mix64(seed.master_seed) ^ rotl(mix64(seed.stream_index ^ kGolden), 17));
}

std::uint64_t subkey(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t k1 = mix64(key ^ rotl(mix64(a), 23));
  return mix64(k1 ^ rotl(mix64(b + kGolden), 41));
}

Rng::Rng(std::uint64_t key) noexcept {
  std::uint64_t state = key;
  for (auto& word : s_) {
    state += kGolden;
    word = mix64(state);
  }
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

void fill_standard_normal(Rng& rng, std::span<double> out) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = normal(rng);
}

void cell_normals(std::uint64_t key, std::int64_t row, std::int64_t first_column,
                  std::span<double> out) {
  if (out.empty()) return;
  const std::int64_t last_column = first_column + static_cast<std::int64_t>(out.size()) - 1;
  std::array<double, kCellBlock> block{};
  for (std::int64_t b = floor_div(first_column, kCellBlock);
       b <= floor_div(last_column, kCellBlock); ++b) {
    Rng rng(subkey(key, static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(b)));
    fill_standard_normal(rng, block);
    const std::int64_t lo = std::max(first_column, b * kCellBlock);
    const std::int64_t hi = std::min(last_column, b * kCellBlock + kCellBlock - 1);
    for (std::int64_t c = lo; c <= hi; ++c) {
      out[static_cast<std::size_t>(c - first_column)] =
          block[static_cast<std::size_t>(c - b * kCellBlock)];
    }
  }
}

NoiseGrid white_noise_grid(double dt, double dx, std::size_t nt, std::size_t nx,
                           SeedSpec seed) {
  if (!(dt > 0.0) || !(dx > 0.0)) {
    throw DomainError("white_noise_grid: dt and dx must be positive");
  }
  if (nt == 0 || nx == 0) {
    throw DomainError("white_noise_grid: nt and nx must be at least 1");
  }
  NoiseGrid grid{dt, dx, nt, nx, std::vector<double>(nt * nx)};
  const std::uint64_t key = stream_key(seed);
  const double scale = 1.0 / std::sqrt(dt * dx);
  for (std::size_t n = 0; n < nt; ++n) {
    std::span<double> row(grid.values.data() + n * nx, nx);
    cell_normals(key, static_cast<std::int64_t>(n), 0, row);
    for (double& v : row) v *= scale;
  }
  return grid;
}

GaussianSampler::GaussianSampler(std::span<const double> cov, std::size_t n) {
  if (cov.size() != n * n) {
    throw ModelError("GaussianSampler: covariance has " + std::to_string(cov.size()) +
                     " entries, expected " + std::to_string(n * n));
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd c(dim, dim);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * n + j];
      max_abs = std::max(max_abs, std::abs(cov[i * n + j]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(cov[i * n + j] - cov[j * n + i]) > 1e-12 * max_abs) {
        throw ModelError("GaussianSampler: covariance matrix is not symmetric");
      }
    }
  }
  const double trace = c.trace();
  if (trace < 0.0) throw ModelError("GaussianSampler: negative trace");

  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    method_ = Method::Cholesky;
    return;
  }
  // Pivoted LDL^T handles exactly singular PSD matrices (rank-deficient
  // models) without perturbing them.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
  if (ldlt.info() == Eigen::Success) {
    const Eigen::VectorXd d = ldlt.vectorD();
    if (d.minCoeff() >= -kEigenvalueFloor * trace) {
      Eigen::MatrixXd lower = ldlt.matrixL();
      Eigen::MatrixXd candidate =
          ldlt.transpositionsP().transpose() * (lower * d.cwiseMax(0.0).cwiseSqrt().asDiagonal());
      const double residual = (candidate * candidate.transpose() - c).cwiseAbs().maxCoeff();
      if (residual <= 1e-10 * std::max(trace, 1e-300)) {
        factor_ = std::move(candidate);
        method_ = Method::PivotedLdlt;
        return;
      }
    }
  }
  Eigen::MatrixXd jittered = c;
  jittered.diagonal().array() += 1e-10 * trace;
  llt.compute(jittered);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    method_ = Method::JitteredCholesky;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) {
    throw ModelError("GaussianSampler: eigendecomposition failed");
  }
  const double min_eigen = eig.eigenvalues().minCoeff();
  if (min_eigen < -kEigenvalueFloor * trace) {
    throw ModelError("GaussianSampler: eigenvalue " + std::to_string(min_eigen) +
                     " below floor -1e-8 x trace");
  }
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * roots.asDiagonal();
  method_ = Method::Eigen;
}

void GaussianSampler::draw(Rng& rng, std::span<double> out) const {
  const auto n = factor_.rows();
  if (static_cast<Eigen::Index>(out.size()) != n) {
    throw DomainError("GaussianSampler::draw: output size mismatch");
  }
  Eigen::VectorXd z(n);
  fill_standard_normal(rng, std::span<double>(z.data(), static_cast<std::size_t>(n)));
  Eigen::Map<Eigen::VectorXd> result(out.data(), n);
  if (method_ == Method::Cholesky || method_ == Method::JitteredCholesky) {
    result.noalias() = factor_.triangularView<Eigen::Lower>() * z;
  } else {
    result.noalias() = factor_ * z;
  }
}

std::vector<double> GaussianSampler::draw(SeedSpec seed) const {
  std::vector<double> out(size());
  Rng rng(seed);
  draw(rng, out);
  return out;
}

CirculantSampler::CirculantSampler(std::span<const double> first_row) : n_(first_row.size()) {
  if (n_ == 0) throw ModelError("CirculantSampler: empty covariance sequence");
  if (n_ == 1) {
    if (first_row[0] < 0.0) throw ModelError("CirculantSampler: negative variance");
    root_eigen_ = {std::sqrt(first_row[0])};
    return;
  }
  const std::size_t m = 2 * (n_ - 1);
  std::vector<std::complex<double>> embedding(m);
  for (std::size_t k = 0; k < n_; ++k) embedding[k] = first_row[k];
  for (std::size_t k = n_; k < m; ++k) embedding[k] = first_row[m - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, embedding);

  double max_eigen = 0.0;
  double min_eigen = 0.0;
  for (const auto& s : spectrum) {
    max_eigen = std::max(max_eigen, s.real());
    min_eigen = std::min(min_eigen, s.real());
  }
  if (min_eigen < -kEigenvalueFloor * max_eigen || !(max_eigen >= 0.0)) {
    std::vector<double> toeplitz(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        toeplitz[i * n_ + j] = first_row[i > j ? i - j : j - i];
      }
    }
    dense_.emplace(toeplitz, n_);
    return;
  }
  // Eigenvalues at FFT round-off level are zero in exact arithmetic.
  const double roundoff =
      16.0 * static_cast<double>(m) * std::numeric_limits<double>::epsilon() * max_eigen;
  root_eigen_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double lambda = spectrum[k].real() > roundoff ? spectrum[k].real() : 0.0;
    root_eigen_[k] = std::sqrt(lambda / static_cast<double>(m));
  }
}

void CirculantSampler::draw(Rng& rng, std::span<double> out) const {
  if (out.size() != n_) throw DomainError("CirculantSampler::draw: output size mismatch");
  if (dense_) {
    dense_->draw(rng, out);
    return;
  }
  if (n_ == 1) {
    double z = 0.0;
    fill_standard_normal(rng, std::span<double>(&z, 1));
    out[0] = root_eigen_[0] * z;
    return;
  }
  const std::size_t m = root_eigen_.size();
  std::vector<double> z(2 * m);
  fill_standard_normal(rng, z);
  std::vector<std::complex<double>> weighted(m);
  for (std::size_t k = 0; k < m; ++k) {
    weighted[k] = root_eigen_[k] * std::complex<double>(z[2 * k], z[2 * k + 1]);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> field;
  fft.fwd(field, weighted);
  for (std::size_t j = 0; j < n_; ++j) out[j] = field[j].real();
}

std::vector<double> CirculantSampler::draw(SeedSpec seed) const {
  std::vector<double> out(n_);
  Rng rng(seed);
  draw(rng, out);
  return out;
}

std::vector<double> sample_gaussian_vector(std::span<const double> cov, std::size_t n,
                                           SeedSpec seed) {
  return GaussianSampler(cov, n).draw(seed);
}

std::vector<double> sample_stationary_circulant(std::span<const double> first_row,
                                                SeedSpec seed) {
  return CirculantSampler(first_row).draw(seed);
}

}  // namespace shepeaks::noise
