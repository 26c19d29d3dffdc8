#pragma once

// Richert's weighted one-dimensional sieve: the main-term function F, the two
// parameter families used for the omega and Omega bounds, the bound
// arithmetic, the weighted sifting sum on concrete data, and a finite-range
// check of the Omega_2(1, L) hypothesis.
//
// Double precision throughout; all logarithms are natural.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace mflab::richert {

inline constexpr double kEulerGamma = 0.577215664901;  // 12 decimal places

struct SieveConstants {
  double A1 = 0, A2 = 0, A3 = 0, A4 = 0, A5 = 0, L = 0;
};

struct SieveParams {
  double alpha = 0;
  double u = 0;
  double v = 0;
  double lambda = 0;
  std::optional<double> k;                  // weight the family was instantiated at
  std::optional<SieveConstants> constants;  // only when supplied by the caller

  /// 1/alpha < u < v, 2/alpha <= v <= 4/alpha, lambda > 0.
  bool valid() const noexcept;
  /// Describes the first failing condition, empty when valid.
  std::string validity_report() const;
};

enum class Family { Main, OmegaVariant };

const char* to_string(Family f) noexcept;

/// (alpha, v, u, lambda) -> (2e^gamma / (alpha v)) (log(alpha v - 1)
///   - lambda alpha u log(v/u) + lambda (alpha u - 1) log((alpha v - 1)/(alpha u - 1))).
/// Throws InvalidInput unless alpha v > 1 and alpha u > 1.
double F_value(const SieveParams& p);

/// alpha = (k-1)/14k, u = (14k+1)/(k-1), v = 56k/(k-1), lambda = k^{-1/5}.
/// Weights k < 2 are rejected.
SieveParams params_main(int k);
/// alpha = (k-1)/14k, u = (26k+1)/(k-1), v = 30k/(k-1), lambda = 1/sqrt(log k).
SieveParams params_omega_variant(int k);
/// Either family with k treated as a real parameter; defined for k > 1.
SieveParams params_for(Family f, double k);

/// Closed form of F(params_main(k)).
double closed_form_F_main(double k);

/// Root of k -> F(params(k)) by bisection. Brackets sit 0.05 either side of
/// 1.71 (main) and of 1.006 (variant), the latter clipped to k > 1 where the
/// family is defined.
double positivity_threshold(Family f, double tolerance = 1e-3);

struct BoundSet {
  int k = 0;
  long b_omega = 0;                        // [7k + 1/2 + k^{1/5}]
  std::optional<long> b_omega_sqrtlog;     // [7k + 1/2 + sqrt(log k)], k >= 6
  long b_big_omega = 0;                    // [13k + 1/2 + sqrt(log k)]
  long b_selberg_upper = 0;                // [(29k - 13)/2]
  long b_joshi = 0;                        // [5k + 1 + sqrt(log k)]
};

BoundSet bounds(int k);

/// 1/lambda + u (k-1)/2 + u log 4 / log X: what a positive-weight prime can
/// have in prime factors once |a1(p) - a2(p)| <= 4 p^{(k-1)/2} is used.
double bound_from_chain(double k, double u, double lambda, double X);

enum class WeightMode {
  Divides,        // middle-range primes q | m
  ExactlyDivides  // middle-range primes q || m (Omega variant)
};

struct WItem {
  std::uint64_t p = 0;  // the prime the element came from
  mpz_class m;          // positive element of the sifted set
};

struct WContribution {
  std::uint64_t p = 0;
  bool sifted_out = false;  // a member prime below X^{1/v} divides m
  double contribution = 0;  // 0 when sifted out
  std::vector<std::uint64_t> middle_primes;   // member primes in [X^{1/v}, X^{1/u}) that count
  bool squarefull_middle = false;             // some member q in the middle range has q^2 | m
  std::vector<std::uint64_t> small_nonmember_primes;  // non-member primes below X^{1/u} dividing m
};

struct WResult {
  double total = 0;
  std::vector<WContribution> contributions;  // same order as the input
};

using PrimeMembership = std::function<bool(std::uint64_t)>;

/// Sum over items coprime to the member primes below X^{1/v} of
/// 1 - sum_{middle q} lambda (1 - u log q / log X).
WResult weighted_sum_W(std::span<const WItem> data, double X, const SieveParams& params,
                       const PrimeMembership& member, WeightMode mode = WeightMode::Divides);

struct Omega2Report {
  double w = 0;
  double z = 0;
  double weighted_sum = 0;   // sum_{w <= l <= z} delta(l) log l
  double discrepancy = 0;    // weighted_sum - log(z/w)
  double L = 0;
  double A2 = 0;
  std::size_t primes_used = 0;
  bool pass = false;         // -L <= discrepancy <= A2
};

/// Finite-range Omega_2(1, L) check. delta_table must hold every prime in [w, z].
Omega2Report check_hyp_omega2(const std::map<std::uint64_t, mpq_class>& delta_table, double w,
                              double z, double L, double A2);

}  // namespace mflab::richert
