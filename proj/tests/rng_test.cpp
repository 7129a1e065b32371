#include <doctest.h>

#include <cmath>

#include "mbal/rng.hpp"

using namespace mbal;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same seed and stream reproduce the sequence") {
  Rng a(42, 1, 7), b(42, 1, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams are distinct") {
  Rng a(42, 1, 7), b(42, 1, 8), c(43, 1, 7);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++equal_ab;
    if (va == c.next_u64()) ++equal_ac;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("uniforms live in [0,1) with mean near 1/2") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("inverse normal CDF hits known quantiles") {
  CHECK(Rng::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(Rng::inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054));
  CHECK(Rng::inverse_normal_cdf(0.84134474606854293) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(Rng::inverse_normal_cdf(0.158655253931457) ==
        doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("normal draws have the right first moments") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_normal();
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(0.01));
  CHECK(std::abs(mean) < 3.5 / std::sqrt(double(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bernoulli matches its probability") {
  Rng rng(13);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.next_bernoulli(0.3) ? 1 : 0;
  CHECK(double(hits) / n == doctest::Approx(0.3).epsilon(0.03));
}

TEST_SUITE_END();
