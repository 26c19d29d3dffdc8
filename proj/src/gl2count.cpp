#include "mflab/gl2count.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mflab/error.hpp"

namespace mflab::gl2 {

namespace {

using u128 = unsigned __int128;

bool is_small_prime(u64 x) {
  if (x < 2) return false;
  for (u64 d = 2; d * d <= x; ++d) {
    if (x % d == 0) return false;
  }
  return true;
}

void require_odd_prime(u64 ell) {
  if (ell == 2) throw invalid_input("l = 2 is excluded; the counting formulas need an odd prime");
  if (!is_small_prime(ell)) throw invalid_input(std::to_string(ell) + " is not an odd prime");
}

void require_formula_exponent(unsigned n) {
  if (n != 1 && n != 2) {
    throw invalid_input("closed forms cover n in {1, 2}, got n = " + std::to_string(n));
  }
}

u64 ipow(u64 base, unsigned e) {
  u64 r = 1;
  while (e-- > 0) r *= base;
  return r;
}

u64 modulus_of(u64 ell, unsigned n) {
  if (n < 1) throw invalid_input("exponent n must be >= 1");
  u64 m = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (m > (1ULL << 40) / ell) throw invalid_input("modulus l^n is too large");
    m *= ell;
  }
  return m;
}

u64 reduce(long long x, u64 m) {
  const long long mm = static_cast<long long>(m);
  long long r = x % mm;
  if (r < 0) r += mm;
  return static_cast<u64>(r);
}

u64 powmod(u64 base, u64 e, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1U) r = r * base % m;
    base = base * base % m;
    e >>= 1U;
  }
  return r;
}

void require_budget(u64 m, u64 budget, const char* what) {
  if (m > budget) {
    throw invalid_input(std::string(what) + ": modulus " + std::to_string(m) +
                        " exceeds the enumeration budget " + std::to_string(budget));
  }
}

mpz_class to_mpz(u128 v) {
  mpz_class hi = static_cast<unsigned long>(static_cast<u64>(v >> 64U));
  mpz_class lo = static_cast<unsigned long>(static_cast<u64>(v));
  return (hi << 64) + lo;
}

// Table-driven classification for repeated queries at a fixed (l, n).
class DiscClassifier {
 public:
  DiscClassifier(u64 ell, unsigned n) : ell_(ell), n_(n), m_(ipow(ell, n)), square_(ell, false) {
    for (u64 x = 1; x < ell; ++x) square_[x * x % ell] = true;
  }

  DiscClass classify(u64 x) const {
    x %= m_;
    if (x == 0) return DiscClass::Zero;
    if (x % ell_ == 0) return DiscClass::NonzeroDivisibleByEll;
    return square_[x % ell_] ? DiscClass::QuadraticResidue : DiscClass::NonResidue;
  }

  u64 count(u64 d, u64 t) const {
    const u64 disc = (t * t % m_ + m_ - 4 * d % m_) % m_;
    const u64 l = ell_;
    const DiscClass c = classify(disc);
    if (n_ == 1) {
      switch (c) {
        case DiscClass::QuadraticResidue: return l * l + l;
        case DiscClass::Zero: return l * l;
        case DiscClass::NonResidue: return l * l - l;
        case DiscClass::NonzeroDivisibleByEll: break;
      }
      throw invariant_violation("nonzero multiple of l modulo l");
    }
    const u64 l2 = l * l, l3 = l2 * l, l4 = l3 * l;
    switch (c) {
      case DiscClass::Zero: return l4 + l3 - l2;
      case DiscClass::NonzeroDivisibleByEll: return l4 - l2;
      case DiscClass::QuadraticResidue: return l4 + l3;
      case DiscClass::NonResidue: return l4 - l3;
    }
    return 0;
  }

  u64 modulus() const { return m_; }

 private:
  u64 ell_;
  unsigned n_;
  u64 m_;
  std::vector<bool> square_;
};

void require_unit(u64 d, u64 ell, u64 m) {
  if (d % ell == 0) {
    throw invalid_input("determinant " + std::to_string(d) + " is not a unit mod " +
                        std::to_string(m));
  }
}

// det and trace of every invertible matrix mod m, as (det, tr) pairs.
std::vector<std::pair<u64, u64>> invertible_det_traces(u64 ell, u64 m) {
  std::vector<std::pair<u64, u64>> out;
  for (u64 a = 0; a < m; ++a)
    for (u64 b = 0; b < m; ++b)
      for (u64 c = 0; c < m; ++c)
        for (u64 e = 0; e < m; ++e) {
          const u64 det = (a * e + m * m - b * c % m) % m;
          if (det % ell == 0) continue;
          out.emplace_back(det, (a + e) % m);
        }
  return out;
}

// Uniform integer in [0, bound) from a 64-bit generator, by rejection.
struct SplitMix64 {
  u64 state;
  u64 next() {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
  }
  u64 below(u64 bound) {
    const u64 limit = ~0ULL - (~0ULL % bound);
    for (;;) {
      const u64 x = next();
      if (x < limit) return x % bound;
    }
  }
};

}  // namespace

ImageParams image_params(u64 ell, unsigned n, int k1, int k2) {
  require_odd_prime(ell);
  if (k1 < 2 || k2 < 2) throw invalid_input("weights must be >= 2");
  ImageParams p;
  p.ell = ell;
  p.n = n;
  p.k1 = k1;
  p.k2 = k2;
  p.modulus = modulus_of(ell, n);
  const u64 units = p.modulus - p.modulus / ell;
  p.lambda_n = std::gcd(units, std::gcd(static_cast<u64>(k1 - 1), static_cast<u64>(k2 - 1)));
  p.Lambda_size = units / p.lambda_n;
  return p;
}

std::vector<std::pair<u64, u64>> linked_determinants(const ImageParams& p) {
  std::vector<std::pair<u64, u64>> out;
  for (u64 v = 1; v < p.modulus; ++v) {
    if (v % p.ell == 0) continue;
    out.emplace_back(powmod(v, static_cast<u64>(p.k1 - 1), p.modulus),
                     powmod(v, static_cast<u64>(p.k2 - 1), p.modulus));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const char* to_string(DiscClass c) noexcept {
  switch (c) {
    case DiscClass::Zero: return "zero";
    case DiscClass::NonzeroDivisibleByEll: return "nonzero_divisible_by_ell";
    case DiscClass::QuadraticResidue: return "quadratic_residue";
    case DiscClass::NonResidue: return "non_residue";
  }
  return "?";
}

DiscClass classify_disc(u64 ell, unsigned n, long long x) {
  require_odd_prime(ell);
  require_formula_exponent(n);
  return DiscClassifier(ell, n).classify(reduce(x, ipow(ell, n)));
}

u64 count_det_trace(u64 ell, unsigned n, long long d, long long t) {
  require_odd_prime(ell);
  require_formula_exponent(n);
  const DiscClassifier cls(ell, n);
  const u64 m = cls.modulus();
  const u64 dd = reduce(d, m);
  require_unit(dd, ell, m);
  return cls.count(dd, reduce(t, m));
}

u64 count_det_trace_bruteforce(u64 ell, unsigned n, long long d, long long t) {
  require_odd_prime(ell);
  const u64 m = modulus_of(ell, n);
  require_budget(m, kDetTraceEnumerationBudget, "count_det_trace_bruteforce");
  const u64 dd = reduce(d, m), tt = reduce(t, m);
  require_unit(dd, ell, m);
  u64 count = 0;
  for (u64 a = 0; a < m; ++a)
    for (u64 b = 0; b < m; ++b)
      for (u64 c = 0; c < m; ++c)
        for (u64 e = 0; e < m; ++e) {
          if ((a + e) % m != tt) continue;
          if ((a * e + m * m - b * c % m) % m == dd) ++count;
        }
  return count;
}

u64 DetTraceTable::with_det(u64 det) const {
  u64 total = 0;
  for (u64 t = 0; t < modulus; ++t) total += at(det, t);
  return total;
}

DetTraceTable det_trace_table_bruteforce(u64 ell, unsigned n) {
  require_odd_prime(ell);
  const u64 m = modulus_of(ell, n);
  require_budget(m, kDetTraceEnumerationBudget, "det_trace_table_bruteforce");
  DetTraceTable table;
  table.modulus = m;
  table.counts.assign(m * m, 0);
  for (u64 a = 0; a < m; ++a)
    for (u64 b = 0; b < m; ++b)
      for (u64 c = 0; c < m; ++c)
        for (u64 e = 0; e < m; ++e) {
          const u64 det = (a * e + m * m - b * c % m) % m;
          ++table.counts[det * m + (a + e) % m];
        }
  return table;
}

mpz_class gl2_order(u64 ell, unsigned n) {
  require_odd_prime(ell);
  if (n < 1) throw invalid_input("exponent n must be >= 1");
  mpz_class l = static_cast<unsigned long>(ell), r;
  mpz_pow_ui(r.get_mpz_t(), l.get_mpz_t(), 4 * n - 3);
  return r * (l - 1) * (l * l - 1);
}

QuadraticRootCounts count_quadratic_roots(u64 ell, long long t, long long d) {
  require_odd_prime(ell);
  const u64 m = ell * ell;
  const u64 dd = reduce(d, m);
  require_unit(dd, ell, m);
  const u64 tt = reduce(t, m);
  const u64 disc = (tt * tt % m + m - 4 * dd % m) % m;
  QuadraticRootCounts r;
  switch (DiscClassifier(ell, 2).classify(disc)) {
    case DiscClass::Zero:
      r.exact_roots = ell;
      r.nonzero_ell_divisible = 0;
      r.unit_values = ell * ell - ell - 1;
      break;
    case DiscClass::NonzeroDivisibleByEll:
      r.exact_roots = 0;
      r.nonzero_ell_divisible = ell;
      r.unit_values = ell * ell - ell - 1;
      break;
    case DiscClass::QuadraticResidue:
      r.exact_roots = 2;
      r.nonzero_ell_divisible = 2 * (ell - 1);
      r.unit_values = ell * ell - 2 * ell - 1;
      break;
    case DiscClass::NonResidue:
      r.exact_roots = 0;
      r.nonzero_ell_divisible = 0;
      r.unit_values = ell * ell - 1;
      break;
  }
  return r;
}

QuadraticRootCounts count_quadratic_roots_bruteforce(u64 ell, long long t, long long d) {
  require_odd_prime(ell);
  const u64 m = ell * ell;
  const u64 dd = reduce(d, m);
  require_unit(dd, ell, m);
  const u64 tt = reduce(t, m);
  QuadraticRootCounts r;
  for (u64 a = 0; a < m; ++a) {
    const u64 value = (a * a % m + m - a * tt % m + dd) % m;
    if (value == 0) {
      ++r.exact_roots;
    } else if (value % ell == 0) {
      ++r.nonzero_ell_divisible;
    } else if (a != 0) {
      ++r.unit_values;
    }
  }
  return r;
}

u64 kernel_count_check(u64 ell, unsigned n, long long d) {
  require_odd_prime(ell);
  const u64 m = modulus_of(ell, n);
  require_budget(m, kDetTraceEnumerationBudget, "kernel_count_check");
  const u64 dd = reduce(d, m);
  if (dd % ell != 1) {
    throw invalid_input("kernel_count_check needs d = 1 mod l, got d = " + std::to_string(d));
  }
  // Matrices congruent to the identity mod l: Id + l * M with M mod l^{n-1}.
  const u64 lifts = m / ell;
  u64 count = 0;
  for (u64 a = 0; a < lifts; ++a)
    for (u64 b = 0; b < lifts; ++b)
      for (u64 c = 0; c < lifts; ++c)
        for (u64 e = 0; e < lifts; ++e) {
          const u64 x11 = (1 + ell * a) % m, x12 = ell * b % m;
          const u64 x21 = ell * c % m, x22 = (1 + ell * e) % m;
          if ((x11 * x22 + m * m - x12 * x21 % m) % m == dd) ++count;
        }
  return count;
}

u64 zero_divisor_pairs(u64 ell) {
  require_odd_prime(ell);
  const u64 m = ell * ell;
  u64 count = 0;
  for (u64 b = 0; b < m; ++b)
    for (u64 c = 0; c < m; ++c)
      if (b * c % m == 0) ++count;
  return count;
}

mpz_class card_A(u64 ell, unsigned n, int k1, int k2) {
  const ImageParams p = image_params(ell, n, k1, k2);
  mpz_class l = static_cast<unsigned long>(ell), lift, r;
  mpz_pow_ui(lift.get_mpz_t(), l.get_mpz_t(), 7 * (n - 1));
  mpz_class lm1 = l - 1, lsq = l * l + l;
  r = lift * lm1 * lm1 * lm1 * lsq * lsq;
  if (!mpz_divisible_ui_p(r.get_mpz_t(), p.lambda_n)) {
    throw invariant_violation("card_A: lambda_n does not divide the group order");
  }
  mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), p.lambda_n);
  return r;
}

mpz_class card_A_bruteforce(u64 ell, unsigned n, int k1, int k2) {
  const ImageParams p = image_params(ell, n, k1, k2);
  require_budget(p.modulus, kImageEnumerationBudget, "card_A_bruteforce");
  const DetTraceTable table = det_trace_table_bruteforce(ell, n);
  std::vector<u64> per_det(p.modulus, 0);
  for (u64 d = 0; d < p.modulus; ++d) per_det[d] = table.with_det(d);
  mpz_class total = 0;
  for (const auto& [d1, d2] : linked_determinants(p)) {
    total += mpz_class(static_cast<unsigned long>(per_det[d1])) *
             static_cast<unsigned long>(per_det[d2]);
  }
  return total;
}

mpz_class card_C(u64 ell, unsigned n, int k1, int k2, TraceRelation rel) {
  require_formula_exponent(n);
  const ImageParams p = image_params(ell, n, k1, k2);
  const DiscClassifier cls(ell, n);
  const u64 m = p.modulus;
  const auto pairs = linked_determinants(p);
  u128 total = 0;
  for (u64 t = 0; t < m; ++t) {
    const u64 t2 = rel == TraceRelation::Equal ? t : (m - t) % m;
    for (const auto& [d1, d2] : pairs) {
      total += static_cast<u128>(cls.count(d1, t)) * cls.count(d2, t2);
    }
  }
  return to_mpz(total);
}

mpz_class card_C_bruteforce(u64 ell, unsigned n, int k1, int k2, TraceRelation rel) {
  const ImageParams p = image_params(ell, n, k1, k2);
  const u64 m = p.modulus;
  require_budget(m, kPairEnumerationBudget, "card_C_bruteforce");
  const auto mats = invertible_det_traces(ell, m);
  std::vector<bool> linked(m * m, false);
  for (const auto& [d1, d2] : linked_determinants(p)) linked[d1 * m + d2] = true;
  u64 count = 0;
  for (const auto& [da, ta] : mats) {
    for (const auto& [db, tb] : mats) {
      if (!linked[da * m + db]) continue;
      const u64 want = rel == TraceRelation::Equal ? ta : (m - ta) % m;
      if (tb == want) ++count;
    }
  }
  return mpz_class(static_cast<unsigned long>(count));
}

ImageCounts image_counts(u64 ell, unsigned n, int k1, int k2) {
  ImageCounts r;
  r.params = image_params(ell, n, k1, k2);
  r.card_A = card_A(ell, n, k1, k2);
  r.card_C = card_C(ell, n, k1, k2);
  r.delta = mpq_class(r.card_C, r.card_A);
  r.delta.canonicalize();
  return r;
}

mpq_class delta_exact(u64 ell, unsigned n, int k1, int k2) {
  return image_counts(ell, n, k1, k2).delta;
}

mpq_class delta_squarefree(u64 h, int k1, int k2) {
  if (h == 0) throw invalid_input("delta_squarefree: h must be positive");
  if (h % 2 == 0) throw invalid_input("delta_squarefree: h must be odd");
  mpq_class result = 1;
  u64 rest = h;
  for (u64 q = 3; q * q <= rest; q += 2) {
    if (rest % q != 0) continue;
    rest /= q;
    if (rest % q == 0) {
      throw invalid_input("delta_squarefree: " + std::to_string(h) + " is not squarefree");
    }
    result *= delta_exact(q, 1, k1, k2);
  }
  if (rest > 1) result *= delta_exact(rest, 1, k1, k2);
  result.canonicalize();
  return result;
}

SampleResult sample_trace_equal_frequency(u64 ell, unsigned n, int k1, int k2, u64 trials,
                                          u64 seed) {
  if (trials == 0) throw invalid_input("sample_trace_equal_frequency: trials must be >= 1");
  const ImageParams p = image_params(ell, n, k1, k2);
  const u64 m = p.modulus;

  SampleResult r;
  r.trials = trials;
  for (u64 i = 0; i < trials; ++i) {
    SplitMix64 rng{seed ^ (0x632be59bd9b4e019ULL * (i + 1))};
    u64 v = 0;
    do {
      v = rng.below(m);
    } while (v % ell == 0);
    const u64 d1 = powmod(v, static_cast<u64>(k1 - 1), m);
    const u64 d2 = powmod(v, static_cast<u64>(k2 - 1), m);
    auto draw_trace = [&](u64 det) {
      for (;;) {
        const u64 a = rng.below(m), b = rng.below(m), c = rng.below(m), e = rng.below(m);
        if ((a * e + m * m - b * c % m) % m == det) return (a + e) % m;
      }
    };
    const u64 ta = draw_trace(d1);
    const u64 tb = draw_trace(d2);
    if (ta == tb) ++r.hits;
  }
  r.frequency = mpq_class(mpz_class(static_cast<unsigned long>(r.hits)),
                          mpz_class(static_cast<unsigned long>(trials)));
  r.frequency.canonicalize();
  return r;
}

}  // namespace mflab::gl2
