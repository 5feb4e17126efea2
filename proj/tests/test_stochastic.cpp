#include <doctest/doctest.h>

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "ncd/error.hpp"
#include "ncd/stochastic.hpp"

using namespace ncd;
using doctest::Approx;

TEST_CASE("sample_path shape and determinism") {
  const BrownianPath p = sample_path(1.0, 0.25, 42);
  CHECK(p.steps() == 4);
  CHECK(p.dt == 0.25);
  CHECK(p.level == 0);
  CHECK(p.horizon() == 1.0);
  CHECK(sample_path(1.0, 0.5, 9) == sample_path(1.0, 0.5, 9));
  CHECK(sample_path(1.0, 0.5, 9).increments != sample_path(1.0, 0.5, 10).increments);
  CHECK(sample_path(1.0, 1e-3, 0).steps() == 1000);
  CHECK_THROWS_AS(sample_path(1.0, 0.3, 1), ValidationError);
  CHECK_THROWS_AS(sample_path(0.0, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(sample_path(1.0, 0.0, 1), ValidationError);
  CHECK(step_count(0.1, 0.01) == 10);
}

TEST_CASE("pinned generator output") {
  // Guards the platform-stable sequence; any change here changes every report.
  CHECK(derive_seed(0, 0, 0) == 0xa706dd2f4d197e6fULL);
  const BrownianPath p = sample_path(1.0, 0.25, 1);
  CHECK(p.increments[0] == Approx(-0.019699978377076377).epsilon(1e-15));
  CHECK(checksum(p) == 0xab48eb0bf5b0f26aULL);
}

TEST_CASE("increments have variance dt and mean zero") {
  double sum = 0.0, sum_sq = 0.0, total_sum = 0.0, total_sq = 0.0;
  const int seeds = 100000;
  for (int s = 0; s < seeds; ++s) {
    const BrownianPath p = sample_path(1.0, 0.25, derive_seed(77, s, 0));
    double total = 0.0;
    for (double x : p.increments) {
      sum += x;
      sum_sq += x * x;
      total += x;
    }
    total_sum += total;
    total_sq += total * total;
  }
  const double n = 4.0 * seeds;
  const double mean = sum / n;
  CHECK(sum_sq / n - mean * mean == Approx(0.25).epsilon(0.02));
  const double total_mean = total_sum / seeds;
  const double total_se = std::sqrt((total_sq / seeds - total_mean * total_mean) / seeds);
  CHECK(std::abs(total_mean) < 3.0 * total_se);
}

TEST_CASE("bridge refinement is exact") {
  const BrownianPath p = sample_path(1.0, 1.0 / 64, 5);
  const BrownianPath r = refine(p);
  CHECK(r.steps() == 128);
  CHECK(r.dt == p.dt / 2);
  CHECK(r.level == 1);
  CHECK(r.seed == p.seed);
  for (std::size_t i = 0; i < p.steps(); ++i) {
    CHECK(r.increments[2 * i] + r.increments[2 * i + 1] == p.increments[i]);
  }
  CHECK(coarsen(r).increments == p.increments);
  CHECK(coarsen(r).dt == p.dt);

  const BrownianPath rr = refine(r);
  CHECK(rr.dt == p.dt / 4);
  CHECK(coarsen(coarsen(rr)).increments == p.increments);
  CHECK(refine(p) == r);
  CHECK_THROWS_AS(coarsen(sample_path(0.3, 0.1, 1)), ValidationError);
}

TEST_CASE("bridge midpoints have the conditional variance dt/4") {
  const double dt = 0.01;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t s = 0; count < 100000; ++s) {
    const BrownianPath p = sample_path(1.0, dt, derive_seed(123, s, 0));
    const BrownianPath r = refine(p);
    for (std::size_t i = 0; i < p.steps(); ++i) {
      const double d = r.increments[2 * i] - 0.5 * p.increments[i];
      sum_sq += d * d;
      ++count;
    }
  }
  CHECK(sum_sq / static_cast<double>(count) == Approx(dt / 4).epsilon(0.02));
}

TEST_CASE("refined paths keep the quadratic variation") {
  BrownianPath p = sample_path(1.0, 1.0 / 256, 99);
  for (int level = 0; level < 4; ++level) {
    double qv = 0.0;
    for (double x : p.increments) qv += x * x;
    CHECK(qv == Approx(1.0).epsilon(0.25));
    p = refine(p);
  }
}

TEST_CASE("derived seeds do not collide") {
  CHECK(derive_seed(7, 0, 0) != derive_seed(7, 1, 0));
  CHECK(derive_seed(7, 0, 0) != derive_seed(7, 0, 1));
  CHECK(derive_seed(7, 3, 2) == derive_seed(7, 3, 2));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1000000);
  for (std::uint64_t i = 0; i < 250000; ++i) {
    for (std::uint32_t s = 0; s < 4; ++s) seen.insert(derive_seed(2024, i, s));
  }
  CHECK(seen.size() == 1000000);
}

TEST_CASE("path persistence round trips") {
  const BrownianPath p = refine(sample_path(0.5, 0.01, 31));
  std::stringstream bin;
  write_path_binary(bin, p);
  CHECK(read_path_binary(bin) == p);

  std::stringstream csv;
  write_path_csv(csv, p);
  CHECK(read_path_csv(csv) == p);

  std::stringstream bad("NOTAPATH and more");
  CHECK_THROWS_AS(read_path_binary(bad), ValidationError);
  std::stringstream truncated;
  write_path_binary(truncated, p);
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() - 3);
  std::stringstream cut(bytes);
  CHECK_THROWS_AS(read_path_binary(cut), ValidationError);
  std::stringstream junk("# T,dt,seed,level\n1,0.5,0,0\n0,abc\n");
  CHECK_THROWS_AS(read_path_csv(junk), ValidationError);
}
