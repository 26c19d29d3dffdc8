#pragma once

// Counting inside the product image
//
//   A_{l^n} = { (A, B) in GL2(Z/l^n)^2 : det A = v^{k1-1}, det B = v^{k2-1},
//               v a unit mod l^n }
//   C_{l^n} = { (A, B) in A_{l^n} : tr A = tr B }
//
// taken as the definition of the image for every odd prime l. The closed
// forms live next to exhaustive enumerations that serve as their oracles;
// enumerations refuse moduli beyond a fixed budget.

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace mflab::gl2 {

using u64 = std::uint64_t;

inline constexpr u64 kDetTraceEnumerationBudget = 50;  // modulus for single-class enumeration
inline constexpr u64 kImageEnumerationBudget = 25;     // modulus for |A| by enumeration
inline constexpr u64 kPairEnumerationBudget = 11;      // modulus for |C| by pair enumeration

struct ImageParams {
  u64 ell = 0;
  unsigned n = 0;
  int k1 = 0;
  int k2 = 0;
  u64 modulus = 0;      // l^n
  u64 lambda_n = 0;     // gcd(l^n - l^(n-1), k1 - 1, k2 - 1)
  u64 Lambda_size = 0;  // (l^n - l^(n-1)) / lambda_n
};

/// Validates (odd prime l, n >= 1, weights >= 2) and fills in lambda_n, |Lambda_n|.
ImageParams image_params(u64 ell, unsigned n, int k1, int k2);

/// The distinct determinant pairs (v^{k1-1}, v^{k2-1}) mod l^n, sorted.
std::vector<std::pair<u64, u64>> linked_determinants(const ImageParams& p);

enum class DiscClass { Zero, NonzeroDivisibleByEll, QuadraticResidue, NonResidue };

const char* to_string(DiscClass c) noexcept;

/// Classifies x mod l^n (n in {1, 2}). A unit is a square mod l^2 exactly
/// when it is a square mod l.
DiscClass classify_disc(u64 ell, unsigned n, long long x);

/// #{g in GL2(Z/l^n) : det g = d, tr g = t} from the closed forms, n in {1, 2}.
u64 count_det_trace(u64 ell, unsigned n, long long d, long long t);

/// Same count by running through all l^{4n} matrices. Refuses l^n > 50.
u64 count_det_trace_bruteforce(u64 ell, unsigned n, long long d, long long t);

/// All (det, tr) counts from one pass over the matrices mod l^n.
struct DetTraceTable {
  u64 modulus = 0;
  std::vector<u64> counts;  // counts[det * modulus + tr]

  u64 at(u64 det, u64 tr) const { return counts[det * modulus + tr]; }
  u64 with_det(u64 det) const;
};

DetTraceTable det_trace_table_bruteforce(u64 ell, unsigned n);

/// |GL2(Z/l^n)| = l^{4n-3} (l - 1)(l^2 - 1).
mpz_class gl2_order(u64 ell, unsigned n);

/// For a in Z/l^2 and the quadratic a^2 - a t + d (d a unit):
struct QuadraticRootCounts {
  u64 exact_roots = 0;            // a^2 - at + d = 0
  u64 nonzero_ell_divisible = 0;  // 0 != a^2 - at + d = 0 mod l
  u64 unit_values = 0;            // a^2 - at + d a unit, a != 0

  bool operator==(const QuadraticRootCounts&) const = default;
};

/// Closed forms selected by the class of t^2 - 4d mod l^2.
QuadraticRootCounts count_quadratic_roots(u64 ell, long long t, long long d);
QuadraticRootCounts count_quadratic_roots_bruteforce(u64 ell, long long t, long long d);

/// #{g = Id mod l : det g = d} mod l^n by enumeration; should equal l^{3(n-1)}.
/// Requires d = 1 mod l.
u64 kernel_count_check(u64 ell, unsigned n, long long d);

/// #{(b, c) mod l^2 : bc = 0} by enumeration; should equal 3l^2 - 2l.
u64 zero_divisor_pairs(u64 ell);

mpz_class card_A(u64 ell, unsigned n, int k1, int k2);
mpz_class card_A_bruteforce(u64 ell, unsigned n, int k1, int k2);

enum class TraceRelation { Equal, Negated };

/// sum_t sum_{(d1,d2) in Lambda_n} N(d1, t) N(d2, +-t), n in {1, 2}.
mpz_class card_C(u64 ell, unsigned n, int k1, int k2,
                 TraceRelation rel = TraceRelation::Equal);
/// Enumeration over all pairs (A, B) of invertible matrices. Refuses l^n > 11.
mpz_class card_C_bruteforce(u64 ell, unsigned n, int k1, int k2,
                            TraceRelation rel = TraceRelation::Equal);

struct ImageCounts {
  ImageParams params;
  mpz_class card_A;
  mpz_class card_C;
  mpq_class delta;
};

ImageCounts image_counts(u64 ell, unsigned n, int k1, int k2);
mpq_class delta_exact(u64 ell, unsigned n, int k1, int k2);

/// delta(h) for odd squarefree h as the product over its prime divisors;
/// delta(1) = 1.
mpq_class delta_squarefree(u64 h, int k1, int k2);

struct SampleResult {
  u64 hits = 0;
  u64 trials = 0;
  mpq_class frequency;
};

/// Monte-Carlo frequency of tr A = tr B over uniform draws from A_{l^n}.
/// Trial i uses its own generator derived from (seed, i).
SampleResult sample_trace_equal_frequency(u64 ell, unsigned n, int k1, int k2, u64 trials,
                                          u64 seed);

}  // namespace mflab::gl2
