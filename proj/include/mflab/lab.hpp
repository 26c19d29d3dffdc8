#pragma once

// Experiments on a pair of level-1 eigenforms f1, f2 of distinct weights:
// per-prime difference tables a1(p) -/+ a2(p) with their omega/Omega,
// the counting functions pi(X, h) and pi*(X, h), empirical-vs-exact
// divisibility densities, bound tallies, sieve certificates and the
// congruence-divisor search.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mflab/arith.hpp"
#include "mflab/qexp.hpp"
#include "mflab/richert.hpp"

namespace mflab::lab {

using u64 = std::uint64_t;

enum class SignMode { Minus, Plus };

const char* to_string(SignMode s) noexcept;
SignMode parse_sign_mode(const std::string& text);

enum RecordFlag : unsigned {
  kZeroDifference = 1U << 0U,
  kFactorIncomplete = 1U << 1U,
  kSiftedOut = 1U << 2U,
  kPositiveContribution = 1U << 3U,
  kSquarefullMiddle = 1U << 4U,
};

std::vector<std::string> flag_names(unsigned flags);
unsigned parse_flag(const std::string& name);

struct PrimeRecord {
  u64 p = 0;
  mpz_class a1;
  mpz_class a2;
  mpz_class d;  // a1 - a2 (minus) or a1 + a2 (plus)
  std::optional<arith::Factorization> factorization;
  std::optional<unsigned> omega;
  std::optional<unsigned> big_omega;
  unsigned flags = 0;

  bool has(RecordFlag f) const noexcept { return (flags & f) != 0; }
  /// d != 0 with a complete factorization.
  bool factored() const noexcept { return d != 0 && omega.has_value(); }
};

struct LabOptions {
  arith::FactorOptions factor;
  std::optional<std::filesystem::path> cache_dir;
  std::size_t terms_cap = qexp::kDefaultTermsCap;
  unsigned threads = 1;
  u64 sieve_floor = 3;  // sieving set = primes >= sieve_floor
};

/// Rejects equal or unsupported weights.
void require_weight_pair(int k1, int k2);

/// a(p) for p <= X of the eigenform of weight k, through the disk cache when
/// one is configured.
std::map<u64, mpz_class> prime_coefficients(int k, u64 X, const LabOptions& opts);

/// Rows for every prime p <= X from two coefficient tables (which must agree
/// on their key sets). d = 0 rows are kept and flagged.
std::vector<PrimeRecord> records_from_coefficients(const std::map<u64, mpz_class>& a1,
                                                   const std::map<u64, mpz_class>& a2,
                                                   SignMode sign, const LabOptions& opts);

std::vector<PrimeRecord> diff_table(int k1, int k2, u64 X, SignMode sign,
                                    const LabOptions& opts = {});

/// #{rows : d != 0, h | d}.
u64 pi_star(std::span<const PrimeRecord> rows, u64 h);
/// #{rows : p does not divide h, h | d}; d = 0 rows count.
u64 pi_h(std::span<const PrimeRecord> rows, u64 h);

/// #{rows : d = 0}.
u64 equal_coefficient_count(std::span<const PrimeRecord> rows);

struct DeltaComparisonRow {
  u64 ell = 0;
  unsigned n = 0;
  u64 modulus = 0;
  u64 pi_h_count = 0;
  u64 pi_X = 0;
  double empirical = 0;
  mpq_class delta_exact;
  double deviation = 0;   // empirical - delta
  double threshold = 0;   // 5 sqrt(delta (1 - delta) / pi(X))
  bool exceptional = false;
};

std::vector<DeltaComparisonRow> empirical_delta_comparison(std::span<const PrimeRecord> rows,
                                                           int k1, int k2,
                                                           std::span<const u64> ells,
                                                           unsigned n);

struct BoundTally {
  int k = 0;
  long b_omega = 0;
  long b_big_omega = 0;
  u64 considered = 0;  // d != 0 and factored
  u64 satisfied_omega = 0;
  u64 satisfied_big_omega = 0;
  u64 quarantined = 0;  // d != 0, factorization incomplete
  unsigned max_omega = 0;
  unsigned max_big_omega = 0;
  std::map<unsigned, u64> omega_histogram;

  bool operator==(const BoundTally&) const = default;
};

BoundTally bound_satisfaction(std::span<const PrimeRecord> rows, int k);

struct ChainViolation {
  u64 p = 0;
  unsigned count = 0;  // omega or Omega restricted to the sieved primes
  double bound = 0;
};

struct CertificateSummary {
  richert::Family mode = richert::Family::Main;
  richert::SieveParams params;
  int k = 0;
  double X = 0;
  u64 sieve_floor = 3;
  double chain_bound = 0;
  double W_total = 0;
  u64 considered = 0;         // d != 0, factored
  u64 sifted_out = 0;
  u64 positive = 0;           // positive contribution, passed to the chain check
  u64 nonpositive = 0;        // not sifted, contribution <= 0
  u64 squarefull_excluded = 0;  // variant only: condition (b) fails
  u64 squarefull_census = 0;  // rows with l^2 | d for some member l in [X^{1/v}, X^{1/u}]
  u64 with_small_nonmember = 0;  // rows divisible by a non-member prime below X^{1/u}
  u64 quarantined = 0;
  std::vector<ChainViolation> violations;
  std::vector<unsigned> row_flags;  // sieve flags per input row

  bool ok() const noexcept { return violations.empty(); }
};

/// Evaluates the weighted sum on the rows and checks, for every positive
/// contribution, that the number of prime factors the sieve controls (all
/// primes except non-members below X^{1/u}) is at most the chain bound.
/// Counted without multiplicity in Main mode and with it in OmegaVariant.
CertificateSummary sieve_certificate(std::span<const PrimeRecord> rows, int k, double X,
                                     richert::Family mode, u64 sieve_floor = 3);

struct ExperimentCounts {
  u64 primes_considered = 0;
  u64 zero_difference = 0;
  u64 quarantined = 0;
  std::map<u64, u64> pi_star;
  std::map<u64, u64> pi_h;
  BoundTally tally;

  bool operator==(const ExperimentCounts&) const = default;
};

ExperimentCounts recompute_counts(std::span<const PrimeRecord> rows, int k,
                                  std::span<const u64> h_list);

struct ExperimentConfig {
  int k1 = 12;
  int k2 = 16;
  u64 X = 10000;
  SignMode sign = SignMode::Minus;
  std::vector<u64> h_list = {2, 3, 4, 6, 12};
  std::vector<u64> delta_ells = {3, 5, 7, 11, 13};
  std::vector<unsigned> delta_ns = {1, 2};
  LabOptions options;
};

struct ExperimentReport {
  int k1 = 0;
  int k2 = 0;
  int k = 0;
  u64 X = 0;
  SignMode sign = SignMode::Minus;
  u64 sieve_floor = 3;
  u64 seed = 0;
  std::string tool_version;
  std::vector<u64> h_list;
  std::vector<PrimeRecord> rows;
  ExperimentCounts counts;
  std::vector<DeltaComparisonRow> delta_comparison;
  std::vector<CertificateSummary> certificates;
  std::string started_at;  // timestamps sit outside every determinism check
  std::string finished_at;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct CongruenceReport {
  int k1 = 0;
  int k2 = 0;
  u64 n_primes = 0;
  u64 confirm_primes = 0;
  mpz_class D;
  std::vector<mpz_class> prefix_gcds;  // gcd after the first i+1 primes
  u64 stable_since = 0;                // shortest prefix already equal to D
  std::optional<arith::Factorization> factorization;
  std::string unfactored;  // cofactor when factoring D timed out
  u64 confirm_checked = 0;
  u64 confirm_failures = 0;
  std::optional<u64> first_failure;
  bool confirmed = false;
  long b_omega = 0;
  std::optional<unsigned> omega_D;
  bool omega_within_bound = true;  // vacuous when D <= 1

  bool congruence_detected() const { return D > 1; }
};

CongruenceReport congruence_search(int k1, int k2, u64 n_primes, u64 confirm_primes,
                                   const LabOptions& opts = {});

}  // namespace mflab::lab
