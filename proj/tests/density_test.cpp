#include <doctest.h>

#include <cmath>
#include <random>

#include "fanlab/density.hpp"

using namespace fanlab;

TEST_CASE("two-exponent lattice search") {
  // Independently derived: scanning all pairs m,n <= 24 shows (m=20, n=12)
  // is the first eps=0.01 witness in the search's n-major candidate order.
  DensityWitness w = search_pow23(0.5, 0.25, 0.01, 1 << 20);
  CHECK(w.exponent("m") == 20);
  CHECK(w.exponent("n") == 12);
  CHECK(std::abs(w.achieved - 0.25) < 0.01);
  CHECK(w.error == std::abs(w.achieved - 0.25));

  // Exact lattice point: z = x^(2/3) is hit by (1,1) with zero error.
  double z = std::pow(0.5, 2.0 / 3.0);
  DensityWitness e = search_pow23(0.5, z, 1e-12, 1 << 20);
  CHECK(e.exponent("m") == 1);
  CHECK(e.exponent("n") == 1);
  CHECK(e.error <= 1e-12);

  CHECK_THROWS_AS(search_pow23(0.5, 0.25, 1e-15, 4), Error);
  CHECK_THROWS_AS(search_pow23(1.5, 0.25, 0.01, 100), Error);
}

TEST_CASE("two-exponent lattice search: endpoint targets") {
  DensityWitness z0 = search_pow23(0.5, 0.0, 1e-4, 1 << 20);
  CHECK(z0.achieved < 1e-4);
  DensityWitness z1 = search_pow23(0.5, 1.0, 1e-4, 1 << 20);
  CHECK(std::abs(z1.achieved - 1.0) < 1e-4);
}

TEST_CASE("halving-with-roots search") {
  // z = 1/2 is on the lattice at k = n = 1: (1/2)^(1/2) * (1/2)^(1/2) = 1/2.
  DensityWitness w = search_half_pow(0.5, 0.5, 1e-9, 1 << 20);
  CHECK(w.exponent("k") == 1);
  CHECK(w.exponent("n") == 1);
  CHECK(w.achieved == doctest::Approx(0.5).epsilon(1e-12));

  // z = 0 uses the closed-form schedule k = n * 2^n with 2^-n <= eps.
  DensityWitness z0 = search_half_pow(0.5, 0.0, 0.125, 1 << 20);
  CHECK(z0.exponent("n") == 3);
  CHECK(z0.exponent("k") == 24);
  CHECK(z0.achieved < 0.125);

  DensityWitness g = search_half_pow(0.6, 0.3, 1e-3, 1 << 20);
  CHECK(std::abs(g.achieved - 0.3) < 1e-3);
  CHECK_THROWS_AS(search_half_pow(0.9, 0.3, 1e-3, 100), Error);  // x > 2/3
}

TEST_CASE("three-exponent steering search is verified by map iteration") {
  MapFamily fam = catalog("definicija");
  // z = 1 takes the proof's m = k = 1 route.
  DensityWitness one = search_propertyL(fam, 0.37, 1.0, 1e-6, 1 << 22);
  CHECK(one.exponent("m") == 1);
  CHECK(one.exponent("k") == 1);
  CHECK(std::abs(one.achieved - 1.0) < 1e-6);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 25; ++trial) {
    double x = u(rng), z = u(rng);
    DensityWitness w = search_propertyL(fam, x, z, 1e-6, 1 << 22);
    long long k = w.exponent("k"), m = w.exponent("m"), n = w.exponent("n");
    // Re-run the claimed composition through the actual maps in log space.
    double lv = std::log(x);
    for (long long i = 0; i < m; ++i) lv = fam.map(3).eval_log(lv);
    for (long long i = 0; i < k; ++i) lv = fam.map(2).eval_log(lv);
    for (long long i = 0; i < m + n; ++i) lv = fam.map(1).eval_log(lv);
    CHECK(std::exp(lv) == doctest::Approx(w.achieved).epsilon(1e-9));
    CHECK(std::abs(std::exp(lv) - z) < 1e-6 + 1e-9);
  }
}

TEST_CASE("triple-power block search") {
  // Exact witness at h=2, k=2: the log value is
  // (9/4)(ln1 - ln2/2) + ln2/8 = -ln2, i.e. exactly 1/2.
  DensityWitness w = search_gabi(1.0, 0.5, 1e-9, 1 << 20);
  CHECK(w.exponent("h") == 2);
  CHECK(w.exponent("k") == 2);
  CHECK(w.achieved == doctest::Approx(0.5).epsilon(1e-12));

  DensityWitness near1 = search_gabi(1.0, 1.0, 1e-6, 1 << 20);
  CHECK(near1.exponent("h") == 1);
  CHECK(std::abs(near1.achieved - 1.0) < 1e-6);

  DensityWitness z0 = search_gabi(0.8, 0.0, 1e-6, 1 << 20);
  CHECK(z0.achieved < 1e-6);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const double ln2 = std::log(2.0), ln3 = std::log(3.0);
  for (int trial = 0; trial < 25; ++trial) {
    double x = u(rng), z = u(rng) * 0.9;
    DensityWitness g = search_gabi(x, z, 1e-3, 1 << 20);
    // Independent re-evaluation of the claimed exponents.
    double ratio = std::exp(double(g.exponent("h")) * ln3 - double(g.exponent("k")) * ln2);
    double lv = ratio * (std::log(x) - 0.5 * ln2) +
                std::exp2(-double(g.exponent("k") + 1)) * ln2;
    CHECK(std::exp(lv) == doctest::Approx(g.achieved).epsilon(1e-12));
    CHECK(std::abs(std::exp(lv) - z) < 1e-3);
  }
}

TEST_CASE("witness JSON serialization") {
  DensityWitness w = search_pow23(0.5, 0.25, 0.01, 1 << 20);
  nlohmann::json j = w.to_json();
  CHECK(j["exponents"]["m"] == 20);
  CHECK(j["exponents"]["n"] == 12);
  CHECK(j["achieved"].get<double>() == w.achieved);
  CHECK(j["evaluations"].get<std::uint64_t>() == w.evaluations);
  CHECK_THROWS_AS(w.exponent("q"), Error);
}

TEST_CASE("searches are deterministic") {
  for (int rep = 0; rep < 3; ++rep) {
    DensityWitness a = search_pow23(0.31, 0.62, 1e-4, 1 << 20);
    DensityWitness b = search_pow23(0.31, 0.62, 1e-4, 1 << 20);
    CHECK(a.exponents == b.exponents);
    CHECK(a.achieved == b.achieved);
    CHECK(a.evaluations == b.evaluations);
  }
}
