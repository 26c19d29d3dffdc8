#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mflab/error.hpp"

namespace mflab::arith {

/// Primes <= X in ascending order.
std::vector<std::uint64_t> primes_up_to(std::uint64_t X);

enum class Primality { Composite, Prime, ProbablePrime };

/// Miller-Rabin. Below 2^64 a deterministic witness set is used and the
/// answer is exact; above, `rounds` random bases drawn from `seed`.
Primality primality(const mpz_class& n, std::uint64_t seed = 0, int rounds = 64);

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;
  bool certified = true;  // false when the prime came from a probabilistic test

  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  mpz_class value;  // |n|
  std::vector<PrimePower> factors;  // sorted by prime

  /// Every factor certified (deterministic primality path).
  bool certified() const noexcept;
  /// "2^4*3*5"; "1" for the empty factorization.
  std::string to_string() const;
  mpz_class product() const;
};

struct FactorOptions {
  std::chrono::milliseconds timeout{10000};
  std::uint64_t seed = 0x6d666c6162ULL;
};

/// Thrown when factoring runs out of time. Carries the factors found so far
/// and the cofactor that could not be split.
class IncompleteFactorization : public Error {
 public:
  IncompleteFactorization(Factorization partial, mpz_class unfactored);

  const Factorization& partial() const noexcept { return partial_; }
  const mpz_class& unfactored() const noexcept { return unfactored_; }

 private:
  Factorization partial_;
  mpz_class unfactored_;
};

/// Trial division by primes below 10^5, then Miller-Rabin and Pollard rho
/// (Brent cycle detection, randomized restarts) on what remains.
/// Throws InvalidInput for n = 0 and IncompleteFactorization on timeout.
Factorization factorize(const mpz_class& n, const FactorOptions& opts = {});

unsigned omega(const Factorization& f) noexcept;
unsigned big_omega(const Factorization& f) noexcept;
unsigned omega(const mpz_class& n, const FactorOptions& opts = {});
unsigned big_omega(const mpz_class& n, const FactorOptions& opts = {});

/// gcd of the absolute values; 0 when every entry is 0.
mpz_class gcd_all(std::span<const mpz_class> values);

}  // namespace mflab::arith
