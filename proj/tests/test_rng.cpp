#include <doctest.h>

#include "ewb/rng.hpp"

using namespace ewb;

TEST_CASE("streams are decorrelated and reproducible") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s1 = Rng(42).stream(StreamId::Prior);
  Rng s2 = Rng(42).stream(StreamId::Checker);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += s1.next_u64() == s2.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("uniform stays in [0,1) and has the right mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // stderr of the mean is 1/sqrt(12 n) ~ 9.1e-4
  CHECK(std::abs(sum / n - 0.5) < 3.0 * 9.2e-4);
}

TEST_CASE("normal moments") {
  Rng rng(11);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sumsq / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
}
