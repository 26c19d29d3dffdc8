#pragma once

// Exact q-expansions of level-1 forms.
//
// Everything here works with truncated power series over Z: a QSeries with
// n_terms coefficients is known exactly modulo q^n_terms. Products never
// request more precision than both factors carry.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace mflab::qexp {

/// Default ceiling on the number of coefficients any series may request.
inline constexpr std::size_t kDefaultTermsCap = 100000;

/// Weights k for which dim S_k(1) = 1.
inline constexpr int kSupportedWeights[] = {12, 16, 18, 20, 22, 26};

bool is_supported_weight(int k) noexcept;
std::string supported_weights_text();

struct QSeries {
  std::vector<mpz_class> coeffs;  // coeffs[i] multiplies q^i
  std::string label;
  int weight = 0;  // 0 when the series is not a modular form

  std::size_t n_terms() const noexcept { return coeffs.size(); }
  const mpz_class& operator[](std::size_t i) const { return coeffs.at(i); }

  bool operator==(const QSeries& other) const { return coeffs == other.coeffs; }
};

QSeries from_integers(std::span<const long> values, std::string label = {});

/// Coefficient n >= 1 is sigma_r(n); constant term 0.
QSeries sigma_series(unsigned r, std::size_t n_terms);

/// Normalized E_4 = 1 + 240 sum sigma_3(n) q^n or E_6 = 1 - 504 sum sigma_5(n) q^n.
QSeries eisenstein(int k, std::size_t n_terms);

QSeries mul(const QSeries& a, const QSeries& b, std::size_t n_terms);
QSeries pow(const QSeries& a, unsigned e, std::size_t n_terms);

/// Delta = (E_4^3 - E_6^2) / 1728. Throws InvariantViolation if any
/// coefficient of the numerator is not divisible by 1728.
QSeries delta_series(std::size_t n_terms);

/// Independent construction q * prod (1 - q^n)^24, using Jacobi's identity
/// prod (1 - q^n)^3 = sum (-1)^j (2j+1) q^{j(j+1)/2} and eight sparse products.
QSeries eta24_series(std::size_t n_terms);

class Eigenform {
 public:
  Eigenform(int weight, QSeries series);

  int weight() const noexcept { return weight_; }
  int level() const noexcept { return 1; }
  std::size_t n_terms() const noexcept { return series_.n_terms(); }
  const QSeries& series() const noexcept { return series_; }

  /// a(n); throws InvalidInput when n is beyond the computed range.
  const mpz_class& coefficient(std::size_t n) const;

 private:
  int weight_;
  QSeries series_;
};

/// Exponents (a, b) with f_k = Delta * E_4^a * E_6^b.
std::pair<unsigned, unsigned> eisenstein_exponents(int k);

Eigenform eigenform(int k, std::size_t n_terms,
                    std::size_t terms_cap = kDefaultTermsCap);

/// Several weights at once; Delta, E_4 and E_6 are computed a single time.
std::vector<Eigenform> eigenforms(std::span<const int> weights,
                                  std::size_t n_terms,
                                  std::size_t terms_cap = kDefaultTermsCap);

/// a(p) for every prime p <= X. Empty when X < 2.
std::map<std::uint64_t, mpz_class> coefficients_at_primes(const Eigenform& f,
                                                          std::uint64_t X);

}  // namespace mflab::qexp
