#include <doctest.h>

#include <cmath>

#include "vfog/core.hpp"
#include "vfog/error.hpp"
#include "vfog/random.hpp"

using namespace vfog;

TEST_CASE("compute_delay examples") {
  CHECK(compute_delay(1e6, 1000, 2e9) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(compute_delay(0, 1000, 5e9) == 0.0);
  CHECK(compute_delay(2e5, 1000, 5e9) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK_THROWS_AS(compute_delay(1e6, 1000, 0), InvalidParameter);
  CHECK_THROWS_AS(compute_delay(1e6, -1, 2e9), InvalidParameter);
}

TEST_CASE("compute_delay scales linearly") {
  RandomStream rng(3, "test.scaling");
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(1e3, 1e7);
    const double f = rng.uniform(1e9, 6e9);
    const double d = compute_delay(x, 1000, f);
    CHECK(std::abs(compute_delay(2 * x, 1000, f) - 2 * d) <= std::nextafter(2 * d, kInf) - 2 * d);
    CHECK(std::abs(compute_delay(x, 1000, 2 * f) - d / 2) <= std::nextafter(d / 2, kInf) - d / 2);
  }
}

TEST_CASE("upload delay") {
  LinkModel link;
  RandomStream rng(1, "test.upload");
  SUBCASE("p = 1 is deterministic") {
    for (int i = 0; i < 100; ++i) {
      const auto s = sample_upload_delay(5e5, link, 1.0, rng);
      CHECK(s.attempts == 1);
      CHECK(s.delay == doctest::Approx(5e5 / 6e6));
    }
    CHECK(sample_upload_delay(5e5, link, 1.0, rng).delay == doctest::Approx(0.08333).epsilon(1e-4));
  }
  SUBCASE("p = 0.9 mean attempts") {
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_upload_delay(1e5, link, 0.9, rng).attempts);
    CHECK(std::abs(sum / n - 1 / 0.9) / (1 / 0.9) < 0.01);
  }
  SUBCASE("retry slot") {
    link.retry_slot = 0.01;
    const auto s = sample_upload_delay(6e5, link, 0.5, rng);
    CHECK(s.delay == doctest::Approx(0.1 + 0.01 * static_cast<double>(s.attempts - 1)));
  }
  CHECK_THROWS_AS(sample_upload_delay(1e5, link, 0.0, rng), InvalidParameter);
  CHECK(expected_upload_delay(6e5, LinkModel{}, 0.9) == doctest::Approx(0.1 / 0.9));
}

TEST_CASE("offload_delay") {
  Task task;
  task.input_bits = 1e6;
  FogNode node;
  node.cpu_hz = 2e9;
  LinkModel link;
  RandomStream rng(5, "test.offload");
  const auto d = offload_delay(task, node, link, rng);
  CHECK(d.download == 0.0);
  CHECK(d.total == doctest::Approx(0.66667).epsilon(1e-5));
  CHECK(d.total == d.upload + d.compute + d.download);

  SUBCASE("determinism and sum identity") {
    node.link_success_prob = 0.7;
    task.output_bits = 2e5;
    for (int i = 0; i < 50; ++i) {
      RandomStream a(i, "x"), b(i, "x");
      const auto da = offload_delay(task, node, link, a);
      const auto db = offload_delay(task, node, link, b);
      CHECK(da.total == db.total);
      CHECK(da.total == da.upload + da.compute + da.download);
      CHECK(da.download > 0);
    }
  }
  SUBCASE("node gone") {
    node.depart_time = 0.5;
    CHECK_THROWS_AS(offload_delay(task, node, link, rng), NodeDeparted);
    node.appear_time = 1.0;
    node.depart_time = kInf;
    CHECK_THROWS_AS(offload_delay(task, node, link, rng), NodeDeparted);
  }
}

TEST_CASE("random streams") {
  RandomStream a(7, "alpha", 1), b(7, "alpha", 1), c(7, "alpha", 2), d(7, "beta", 1);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  CHECK(x != d.next_u64());
  RandomStream r(1, "range");
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.uniform_pos() > 0.0);
    CHECK(r.index(5) < 5);
    CHECK(r.geometric(0.3) >= 1);
  }
  CHECK(r.geometric(1.0) == 1);
}
