#include <doctest.h>

#include <shepeaks/errors.hpp>
#include <shepeaks/kernel_math.hpp>

#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace shepeaks;
using namespace shepeaks::kernel;

namespace {

struct Frozen {
  double p, q, value;
};

// 30-digit references computed once with arbitrary-precision arithmetic.
const Frozen kGreen[] = {
    {1.0, 0.0, 0.79788456080286535588},     {1.0, 0.5, 0.39559311480261205919},
    {2.0, 1.0, 0.39928245674849133178},     {2.0, 3.0, 0.017245728649561552732},
    {0.5, 2.0, 0.00097802271495149525267},  {2.0, 12.0, 3.4932833749395255227e-18},
    {1.0, 10.0, 1.4949120509178656073e-24},
};

const Frozen kSpatial[] = {
    {1.0, 0.0, 0.56418958354775628297},
    {1.0, 0.3, 0.42683645903951644731},
    {0.01, 0.05, 0.034908866223011634294},
    {0.01, 0.3, 0.00086228643247807779257},
};

const Frozen kTemporal[] = {
    {1.0, 1.0, 0.56418958354775628695},
    {0.5, 1.0, 0.20650772012904177811},
    {0.01, 0.04, 0.020107375913371463628},
};

struct FrozenTruncated {
  double eps, delta, lag, value;
};

const FrozenTruncated kTruncated[] = {
    {1.0, 0.5, 0.0, 0.55456121260316119197},
    {1.0, 0.5, 0.7, 0.25306443647807474411},
    {0.01, 0.1, 0.05, 0.034872187109353855255},
    {0.01, 0.1, 0.3, 0.00060169638431726098894},
    {0.1, 0.01, 0.9, 0.0036298053029526831212},
};

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("heat kernel is a normalised density") {
    CHECK(heat_kernel({1.0, 0.0}) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-15));
    CHECK(heat_kernel({0.25, 0.3}) == heat_kernel({0.25, -0.3}));
    CHECK_THROWS_AS(heat_kernel({0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(heat_kernel({-1.0, 1.0}), DomainError);
  }

  TEST_CASE("incomplete green matches frozen references") {
    for (const auto& f : kGreen) {
      CAPTURE(f.p);
      CAPTURE(f.q);
      CHECK(std::abs(incomplete_green(f.p, f.q) - f.value) <= 1e-13 * f.value);
    }
  }

  TEST_CASE("incomplete green agrees with quadrature in both branches") {
    // a / sqrt(2t) straddles the switch to the asymptotic series.
    for (double t : {0.1, 1.0, 3.0}) {
      for (double x : {5.5, 5.99, 6.0, 6.01, 7.0}) {
        const double a = x * std::sqrt(2.0 * t);
        const double ref = oracle::incomplete_green_quadrature(t, a);
        CAPTURE(t);
        CAPTURE(a);
        CHECK(std::abs(incomplete_green(t, a) - ref) <= 1e-12 * ref);
      }
    }
  }

  TEST_CASE("incomplete green symmetry and monotonicity") {
    CHECK(incomplete_green(1.0, -0.7) == incomplete_green(1.0, 0.7));
    CHECK(incomplete_green(1.0, 0.7) < incomplete_green(2.0, 0.7));
    CHECK(incomplete_green(1.0, 0.7) > incomplete_green(1.0, 0.8));
    CHECK_THROWS_AS(incomplete_green(0.0, 1.0), DomainError);
  }

  TEST_CASE("spatial covariance matches frozen references") {
    for (const auto& f : kSpatial) {
      CAPTURE(f.p);
      CAPTURE(f.q);
      CHECK(std::abs(spatial_covariance(f.p, f.q) - f.value) <= 1e-14 * f.value);
    }
    CHECK(spatial_covariance(0.01, 0.0) == doctest::Approx(std::sqrt(0.01 / kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(spatial_covariance(0.0, 0.1), DomainError);
  }

  TEST_CASE("temporal covariance matches frozen references") {
    for (const auto& f : kTemporal) {
      CHECK(std::abs(temporal_covariance(f.p, f.q) - f.value) <= 1e-14 * f.value);
      CHECK(temporal_covariance(f.q, f.p) == temporal_covariance(f.p, f.q));
    }
    CHECK(temporal_covariance(0.0, 1.0) == 0.0);
  }

  TEST_CASE("temporal and spatial variances agree") {
    for (double e : {1.0, 0.1, 0.01}) {
      CHECK(temporal_covariance(e, e) == doctest::Approx(spatial_covariance(e, 0.0)).epsilon(1e-13));
    }
  }

  TEST_CASE("truncated covariance matches frozen references") {
    for (const auto& f : kTruncated) {
      CAPTURE(f.eps);
      CAPTURE(f.delta);
      CAPTURE(f.lag);
      CHECK(std::abs(truncated_covariance_lag(f.eps, f.delta, f.lag) - f.value) <= 1e-8 * f.value);
    }
  }

  TEST_CASE("truncated covariance agrees with the two-dimensional quadrature") {
    const double eps = 0.04, delta = 0.2;
    const double gap = independence_gap(eps, delta);
    for (double frac : {0.0, 0.1, 0.35, 0.6, 0.9}) {
      const double lag = frac * gap;
      const double ref = oracle::truncated_covariance_quadrature(eps, delta, lag);
      CAPTURE(lag);
      CHECK(std::abs(truncated_covariance_lag(eps, delta, lag) - ref) <= 1e-8 * ref + 1e-15);
    }
  }

  TEST_CASE("truncation geometry") {
    const double eps = 0.01, delta = 0.1;
    CHECK(truncation_half_width(eps, delta) == doctest::Approx(std::sqrt(2 * eps * std::log(10.0))));
    CHECK(independence_gap(eps, delta) == 2.0 * truncation_half_width(eps, delta));
    const double gap = independence_gap(eps, delta);
    CHECK(truncated_covariance_lag(eps, delta, gap) == 0.0);
    CHECK(truncated_covariance_lag(eps, delta, gap * 1.5) == 0.0);
    CHECK(truncated_covariance_lag(eps, delta, gap * 0.999) > 0.0);
    CHECK(truncated_covariance(eps, delta, 0.2, 0.3) ==
          doctest::Approx(truncated_covariance_lag(eps, delta, 0.1)).epsilon(1e-9));
    CHECK_THROWS_AS(truncated_covariance_lag(eps, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(truncated_covariance_lag(eps, 0.0, 0.0), DomainError);
  }

  TEST_CASE("truncation deficit is small and nonnegative") {
    for (double eps : {1.0, 0.1, 0.01}) {
      for (double delta : {0.5, 0.1, 0.01}) {
        const double d = truncation_deficit(eps, delta);
        CHECK(d >= 0.0);
        CHECK(d < delta * delta * std::sqrt(eps));
      }
    }
  }

  TEST_CASE("truncated covariance never exceeds the full covariance") {
    for (double lag : {0.0, 0.02, 0.1, 0.25}) {
      CHECK(truncated_covariance_lag(0.01, 0.1, lag) <= spatial_covariance(0.01, lag) + 1e-15);
    }
  }

  TEST_CASE("parabolic distance") {
    CHECK(spacetime_distance({0.0, 0.0}, {16.0, 4.0}) == doctest::Approx(4.0));
    CHECK(spacetime_distance({1.0, 1.0}, {1.0, 1.0}) == 0.0);
  }

  TEST_CASE("covariance models build symmetric matrices") {
    const std::vector<double> xs{0.0, 0.05, 0.1, 0.3};
    for (const auto& m : {CovarianceModel::spatial(0.01), CovarianceModel::truncated(0.01, 0.1)}) {
      const auto c = m.matrix(xs);
      REQUIRE(c.size() == 16);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(c[i * 4 + j] == c[j * 4 + i]);
      }
      CHECK(c[0] == m(0.0, 0.0));
    }
    const auto temporal = CovarianceModel::temporal();
    CHECK(temporal.kind() == CovarianceKind::Temporal);
    CHECK(temporal(0.5, 1.0) == temporal_covariance(0.5, 1.0));
  }
}
