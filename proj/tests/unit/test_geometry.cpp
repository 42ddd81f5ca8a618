#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socon/geometry.hpp"
#include "socon/rng.hpp"

using socon::SE2;

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(socon::wrap_angle(socon::kPi) == doctest::Approx(socon::kPi));
  CHECK(socon::wrap_angle(-socon::kPi) == doctest::Approx(socon::kPi));
  CHECK(socon::wrap_angle(3 * socon::kPi) == doctest::Approx(socon::kPi));
  CHECK(socon::wrap_angle(0.1) == doctest::Approx(0.1));
  CHECK(socon::wrap_angle(2 * socon::kPi + 0.1) == doctest::Approx(0.1));
}

TEST_CASE("SE2 group laws hold to 1e-9") {
  socon::Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const SE2 a(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3));
    const SE2 b(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3));
    const SE2 c(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3));

    const SE2 ab_c = (a * b) * c;
    const SE2 a_bc = a * (b * c);
    CHECK(ab_c.x == doctest::Approx(a_bc.x).epsilon(1e-9));
    CHECK(ab_c.y == doctest::Approx(a_bc.y).epsilon(1e-9));
    CHECK(socon::wrap_angle(ab_c.yaw - a_bc.yaw) == doctest::Approx(0.0).epsilon(1e-9));

    const SE2 e = a * a.inverse();
    CHECK(e.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(e.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(e.yaw == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("between recovers the relative pose") {
  const SE2 a(1.0, 2.0, 0.5);
  const SE2 rel(0.3, -0.1, 0.2);
  const SE2 b = a * rel;
  const SE2 back = a.between(b);
  CHECK(back.x == doctest::Approx(rel.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(rel.y).epsilon(1e-12));
  CHECK(back.yaw == doctest::Approx(rel.yaw).epsilon(1e-12));
}

TEST_CASE("apply matches compose on point transforms") {
  const SE2 t(2.0, -1.0, 0.7);
  double x, y;
  t.apply(3.0, 4.0, x, y);
  const SE2 as_pose = t * SE2(3.0, 4.0, 0.0);
  CHECK(x == doctest::Approx(as_pose.x));
  CHECK(y == doctest::Approx(as_pose.y));
}

TEST_CASE("rng substreams are reproducible and distinct") {
  socon::Rng a(7);
  socon::Rng b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  socon::Rng base(7);
  auto s1 = base.substream(1);
  auto s1_again = base.substream(1);
  auto s2 = base.substream(2);
  CHECK(s1.next_u64() == s1_again.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("rng normal and exponential have sane moments") {
  socon::Rng rng(123);
  double sum = 0, sum_sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.05));
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.05));

  double esum = 0;
  for (int i = 0; i < n; ++i) esum += rng.exponential();
  CHECK(esum / n == doctest::Approx(1.0).epsilon(0.05));
}
