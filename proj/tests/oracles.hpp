#pragma once

// Slow, direct implementations used only to check the library.

#include <cstdint>
#include <map>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using u64 = std::uint64_t;

/// q prod (1 - q^m)^24 expanded factor by factor with binomial coefficients.
std::vector<mpz_class> delta_by_binomials(std::size_t n_terms);

/// Divisor sum by a plain loop.
mpz_class sigma(unsigned r, u64 n);

/// Trial division up to sqrt(n).
bool is_prime(u64 n);
std::map<u64, unsigned> trial_factor(u64 n);

/// 4-fold loop over 2x2 matrices mod m with entries written out.
u64 count_det_trace(u64 m, u64 d, u64 t);

/// Matrices mod m with the given determinant (any trace).
u64 count_det(u64 m, u64 d);

/// |A| from the set {(v^{k1-1}, v^{k2-1})} built by a loop over units v.
mpz_class card_A(u64 ell, unsigned n, int k1, int k2);

/// |C| as sum over linked pairs and traces of count_det_trace products.
mpz_class card_C(u64 ell, unsigned n, int k1, int k2);

/// The sifting sum re-derived from scratch by trial division of each m.
double weighted_sum(const std::vector<std::pair<u64, mpz_class>>& data, double X, double u,
                    double v, double lambda, u64 floor, bool exact);

}  // namespace oracle
