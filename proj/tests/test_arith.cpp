#include <doctest.h>

#include <random>

#include "mflab/arith.hpp"
#include "oracles.hpp"

using namespace mflab;
using namespace mflab::arith;

namespace {

mpz_class random_bits(std::mt19937_64& rng, unsigned bits) {
  mpz_class r = 0;
  for (unsigned got = 0; got < bits; got += 64) {
    r <<= 64;
    r += mpz_class(std::to_string(rng()));
  }
  r >>= (bits + 63) / 64 * 64 - bits;
  mpz_setbit(r.get_mpz_t(), bits - 1);
  return r;
}

}  // namespace

TEST_CASE("prime sieve matches trial division up to 10^6") {
  const auto primes = primes_up_to(1000000);
  CHECK(primes.size() == 78498);
  std::size_t idx = 0;
  for (std::uint64_t n = 0; n <= 1000000; ++n) {
    const bool expect = oracle::is_prime(n);
    const bool listed = idx < primes.size() && primes[idx] == n;
    if (listed) ++idx;
    if (expect != listed) {
      FAIL("sieve disagrees at " << n);
    }
  }
  CHECK(primes_up_to(1).empty());
  CHECK(primes_up_to(2) == std::vector<std::uint64_t>{2});
}

TEST_CASE("primality") {
  CHECK(primality(2) == Primality::Prime);
  CHECK(primality(1) == Primality::Composite);
  CHECK(primality(0) == Primality::Composite);
  CHECK(primality(561) == Primality::Composite);            // Carmichael
  CHECK(primality(mpz_class("3215031751")) == Primality::Composite);   // strong pseudoprime to 2,3,5,7
  CHECK(primality(mpz_class("18446744073709551557")) == Primality::Prime);  // largest below 2^64
  const mpz_class m127 = (mpz_class(1) << 127) - 1;
  CHECK(primality(m127) == Primality::ProbablePrime);
  CHECK(primality(m127 * 3) == Primality::Composite);
}

TEST_CASE("known factorizations") {
  CHECK(factorize(240).to_string() == "2^4*3*5");
  CHECK(factorize(-240).to_string() == "2^4*3*5");
  CHECK(factorize(1).to_string() == "1");
  CHECK(factorize(-1).to_string() == "1");
  CHECK_THROWS_AS(factorize(0), Error);
  const auto f = factorize(240);
  CHECK(omega(f) == 3);
  CHECK(big_omega(f) == 6);
  CHECK(f.certified());
  // product of two 40-bit primes: beyond trial division
  const mpz_class p("1099511627791"), q("1099511628401");
  const auto g = factorize(p * q);
  REQUIRE(g.factors.size() == 2);
  CHECK(g.factors[0].prime == p);
  CHECK(g.factors[1].prime == q);
  // semiprime just below 2^64
  CHECK(factorize(mpz_class("13318099688407299913")).to_string() == "1122765403*11861872171");
  // square of a prime above the trial-division range
  const auto h = factorize(p * p * 7);
  CHECK(h.to_string() == "7*1099511627791^2");
}

TEST_CASE("factorization agrees with trial division on small values") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = 2 + rng() % 100000000ULL;
    const auto f = factorize(mpz_class(std::to_string(n)));
    const auto expect = oracle::trial_factor(n);
    REQUIRE(f.factors.size() == expect.size());
    std::size_t j = 0;
    for (const auto& [p, e] : expect) {
      CHECK(f.factors[j].prime == mpz_class(std::to_string(p)));
      CHECK(f.factors[j].exponent == e);
      ++j;
    }
  }
}

TEST_CASE("factorization reassembles random 40-bit and 120-bit integers") {
  std::mt19937_64 rng(7);
  for (unsigned bits : {40U, 120U}) {
    for (int i = 0; i < 25; ++i) {
      const mpz_class n = random_bits(rng, bits);
      const auto f = factorize(n);
      CHECK(f.product() == n);
      CHECK(f.value == n);
      for (const auto& pp : f.factors) CHECK(primality(pp.prime) != Primality::Composite);
      for (std::size_t j = 1; j < f.factors.size(); ++j) {
        CHECK(f.factors[j - 1].prime < f.factors[j].prime);
      }
    }
  }
}

TEST_CASE("omega and Omega are additive over coprime and arbitrary products") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const mpz_class a(std::to_string(2 + rng() % 1000000));
    const mpz_class b(std::to_string(2 + rng() % 1000000));
    CHECK(big_omega(a * b) == big_omega(a) + big_omega(b));
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g == 1) CHECK(omega(a * b) == omega(a) + omega(b));
  }
}

TEST_CASE("timeouts raise IncompleteFactorization with the partial result") {
  // two 100-bit primes: rho cannot split this within a millisecond
  const mpz_class p("1267650600228229401496703205653");
  const mpz_class q("1267650600228229401496703205707");
  REQUIRE(primality(p) != Primality::Composite);
  REQUIRE(primality(q) != Primality::Composite);
  FactorOptions opts;
  opts.timeout = std::chrono::milliseconds(1);
  try {
    factorize(p * q * 12, opts);
    FAIL("expected a timeout");
  } catch (const IncompleteFactorization& e) {
    CHECK(e.kind() == ErrorKind::Incomplete);
    CHECK(e.partial().to_string() == "2^2*3");
    CHECK(e.unfactored() == p * q);
  }
}

TEST_CASE("gcd_all") {
  const mpz_class v[] = {-240, 480, 720};
  CHECK(gcd_all(v) == 240);
  const mpz_class z[] = {0, 0};
  CHECK(gcd_all(z) == 0);
  CHECK_THROWS_AS(gcd_all(std::span<const mpz_class>{}), Error);
}
