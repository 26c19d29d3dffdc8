#include "mflab/arith.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mflab::arith {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Clock = std::chrono::steady_clock;

constexpr u64 kTrialBound = 100000;

const std::vector<u64>& trial_primes() {
  static const std::vector<u64> primes = primes_up_to(kTrialBound - 1);
  return primes;
}

bool fits_u64(const mpz_class& n) { return mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

u64 to_u64(const mpz_class& n) {
  // mpz_get_ui only returns the low limb; limbs are 64-bit on the targets we build for.
  static_assert(sizeof(unsigned long) == 8);
  return mpz_get_ui(n.get_mpz_t());
}

int ctz128(u128 v) {
  const u64 lo = static_cast<u64>(v);
  return lo != 0 ? __builtin_ctzll(lo) : 64 + __builtin_ctzll(static_cast<u64>(v >> 64));
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 base, u64 e, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    e >>= 1U;
  }
  return result;
}

bool miller_rabin_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  // Witness set deterministic for all n < 2^64 (Sinclair).
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    a %= n;
    if (a == 0) continue;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool miller_rabin_mpz(const mpz_class& n, std::mt19937_64& rng, int rounds) {
  const mpz_class n_minus_1 = n - 1;
  mpz_class d = n_minus_1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  gmp_randclass gmp_rng(gmp_randinit_default);
  gmp_rng.seed(static_cast<unsigned long>(rng()));
  const mpz_class span = n - 3;
  mpz_class a, x;
  for (int round = 0; round < rounds; ++round) {
    a = gmp_rng.get_z_range(span) + 2;  // uniform in [2, n-2]
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (mp_bitcnt_t r = 1; r < s; ++r) {
      mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class Deadline {
 public:
  explicit Deadline(std::chrono::milliseconds budget) : end_(Clock::now() + budget) {}
  bool expired() const { return Clock::now() >= end_; }

 private:
  Clock::time_point end_;
};

// Brent's variant of Pollard rho with batched gcds. Returns 0 on timeout.
// n must be odd, composite and not a perfect power of a small prime.
u64 rho_u64(u64 n, std::mt19937_64& rng, const Deadline& deadline) {
  constexpr u64 kBatch = 128;
  for (;;) {
    const u64 c = rng() % (n - 1) + 1;
    u64 y = rng() % n;
    u64 x = y, ys = y, q = 1, g = 1;
    auto f = [&](u64 v) {
      const u64 r = mulmod(v, v, n);
      return r >= n - c ? r - (n - c) : r + c;
    };
    for (u64 r = 1; g == 1; r <<= 1U) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        const u64 lim = std::min(kBatch, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        if ((k & 0xffffU) == 0 && deadline.expired()) return 0;
      }
      if (deadline.expired()) return 0;
    }
    if (g == n) {
      // Batch overshot; replay one step at a time.
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

// Montgomery arithmetic modulo an odd n < 2^127, R = 2^128.
class Mont128 {
 public:
  explicit Mont128(u128 n) : n_(n) {
    u128 x = n;
    for (int i = 0; i < 7; ++i) x *= 2 - n * x;
    ninv_ = -x;
  }

  u128 mul(u128 a, u128 b) const {
    u128 hi, lo;
    wide(a, b, hi, lo);
    const u128 m = lo * ninv_;
    u128 mh, ml;
    wide(m, n_, mh, ml);
    u128 t = hi + mh + (lo != 0 ? 1 : 0);
    return t >= n_ ? t - n_ : t;
  }

  u128 add(u128 a, u128 b) const {
    const u128 r = a + b;
    return r >= n_ ? r - n_ : r;
  }

 private:
  static void wide(u128 a, u128 b, u128& hi, u128& lo) {
    const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    const u128 p00 = static_cast<u128>(a0) * b0;
    const u128 p01 = static_cast<u128>(a0) * b1;
    const u128 p10 = static_cast<u128>(a1) * b0;
    const u128 p11 = static_cast<u128>(a1) * b1;
    const u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
    lo = (mid << 64) | static_cast<u64>(p00);
    hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  }

  u128 n_;
  u128 ninv_;
};

u128 gcd128(u128 a, u128 b) {
  if (a == 0) return b;
  if (b == 0) return a;
  const int shift = std::min(ctz128(a), ctz128(b));
  a >>= ctz128(a);
  while (b != 0) {
    b >>= ctz128(b);
    if (a > b) std::swap(a, b);
    b -= a;
  }
  return a << shift;
}

u128 to_u128(const mpz_class& n) {
  const mpz_class hi = n >> 64;
  const mpz_class lo = n - (hi << 64);
  return (static_cast<u128>(to_u64(hi)) << 64) | to_u64(lo);
}

mpz_class from_u128(u128 v) {
  mpz_class r = static_cast<unsigned long>(v >> 64);
  r <<= 64;
  r += static_cast<unsigned long>(static_cast<u64>(v));
  return r;
}

// rho_u64 on 128-bit Montgomery residues. Returns 0 on timeout.
u128 rho_u128(u128 n, std::mt19937_64& rng, const Deadline& deadline) {
  constexpr u64 kBatch = 128;
  const Mont128 mont(n);
  auto draw = [&] { return ((static_cast<u128>(rng()) << 64) | rng()) % n; };
  for (;;) {
    const u128 c = draw();
    u128 y = draw();
    u128 x = y, ys = y, q = 1, g = 1;
    auto f = [&](u128 v) { return mont.add(mont.mul(v, v), c); };
    for (u64 r = 1; g == 1; r <<= 1U) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        const u64 lim = std::min(kBatch, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = f(y);
          q = mont.mul(q, x > y ? x - y : y - x);
        }
        g = gcd128(q, n);
        if ((k & 0xffffU) == 0 && deadline.expired()) return 0;
      }
      if (deadline.expired()) return 0;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd128(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

mpz_class rho_mpz(const mpz_class& n, std::mt19937_64& rng, const Deadline& deadline) {
  constexpr unsigned long kBatch = 128;
  gmp_randclass gmp_rng(gmp_randinit_default);
  gmp_rng.seed(static_cast<unsigned long>(rng()));
  mpz_class x, y, ys, q, g, c, diff;
  auto f = [&](mpz_class& v) {
    v *= v;
    v += c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  for (;;) {
    c = gmp_rng.get_z_range(n - 1) + 1;
    y = gmp_rng.get_z_range(n);
    q = 1;
    g = 1;
    for (unsigned long r = 1; g == 1; r <<= 1U) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) f(y);
      for (unsigned long k = 0; k < r && g == 1; k += kBatch) {
        ys = y;
        const unsigned long lim = std::min(kBatch, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          f(y);
          diff = x - y;
          q *= diff;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        if ((k & 0x3fffU) == 0 && deadline.expired()) return 0;
      }
      if (deadline.expired()) return 0;
    }
    if (g == n) {
      do {
        f(ys);
        diff = x - ys;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void add_factor(std::vector<PrimePower>& out, const mpz_class& p, unsigned e, bool certified) {
  for (auto& pp : out) {
    if (pp.prime == p) {
      pp.exponent += e;
      pp.certified = pp.certified && certified;
      return;
    }
  }
  out.push_back({p, e, certified});
}

void normalize(Factorization& f) {
  std::sort(f.factors.begin(), f.factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
}

}  // namespace

std::vector<std::uint64_t> primes_up_to(std::uint64_t X) {
  std::vector<std::uint64_t> out;
  if (X < 2) return out;
  out.push_back(2);
  // is_composite[i] describes the odd number 2i + 1.
  const std::uint64_t half = (X - 1) / 2;
  std::vector<bool> is_composite(half + 1, false);
  for (std::uint64_t i = 1; i <= half; ++i) {
    if (is_composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    out.push_back(p);
    for (std::uint64_t m = p * p; m <= X; m += 2 * p) is_composite[(m - 1) / 2] = true;
  }
  return out;
}

Primality primality(const mpz_class& n, std::uint64_t seed, int rounds) {
  if (n < 2) return Primality::Composite;
  if (fits_u64(n)) return miller_rabin_u64(to_u64(n)) ? Primality::Prime : Primality::Composite;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return Primality::Composite;
  }
  std::mt19937_64 rng(seed);
  return miller_rabin_mpz(n, rng, rounds) ? Primality::ProbablePrime : Primality::Composite;
}

bool Factorization::certified() const noexcept {
  return std::all_of(factors.begin(), factors.end(),
                     [](const PrimePower& pp) { return pp.certified; });
}

std::string Factorization::to_string() const {
  if (factors.empty()) return "1";
  std::string out;
  for (const auto& pp : factors) {
    if (!out.empty()) out += "*";
    out += pp.prime.get_str();
    if (pp.exponent > 1) out += "^" + std::to_string(pp.exponent);
  }
  return out;
}

mpz_class Factorization::product() const {
  mpz_class r = 1, pe;
  for (const auto& pp : factors) {
    mpz_pow_ui(pe.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
    r *= pe;
  }
  return r;
}

IncompleteFactorization::IncompleteFactorization(Factorization partial, mpz_class unfactored)
    : Error(ErrorKind::Incomplete,
            "factorization of " + partial.value.get_str() + " timed out; unfactored cofactor " +
                unfactored.get_str()),
      partial_(std::move(partial)),
      unfactored_(std::move(unfactored)) {}

Factorization factorize(const mpz_class& n, const FactorOptions& opts) {
  if (n == 0) throw invalid_input("factorize: n must be nonzero");
  Factorization result;
  result.value = abs(n);
  mpz_class rest = result.value;

  for (u64 p : trial_primes()) {
    if (rest == 1) break;
    if (rest < static_cast<unsigned long>(p * p)) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      unsigned e = 0;
      do {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        ++e;
      } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
      result.factors.push_back({mpz_class(static_cast<unsigned long>(p)), e, true});
    }
  }

  const Deadline deadline(opts.timeout);
  // Seed mixes the value so that each integer gets its own reproducible stream.
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed),
                    static_cast<std::uint32_t>(opts.seed >> 32U),
                    static_cast<std::uint32_t>(mpz_get_ui(result.value.get_mpz_t())),
                    static_cast<std::uint32_t>(mpz_sizeinbase(result.value.get_mpz_t(), 2))};
  std::mt19937_64 rng(seq);

  std::vector<mpz_class> pending;
  if (rest > 1) pending.push_back(rest);
  std::vector<PrimePower> large;
  while (!pending.empty()) {
    mpz_class m = std::move(pending.back());
    pending.pop_back();
    if (m == 1) continue;

    const Primality pr = primality(m, rng());
    if (pr != Primality::Composite) {
      add_factor(large, m, 1, pr == Primality::Prime);
      continue;
    }
    if (mpz_perfect_square_p(m.get_mpz_t())) {
      mpz_class root;
      mpz_sqrt(root.get_mpz_t(), m.get_mpz_t());
      pending.push_back(root);
      pending.push_back(root);
      continue;
    }

    mpz_class divisor;
    if (fits_u64(m)) {
      divisor = static_cast<unsigned long>(rho_u64(to_u64(m), rng, deadline));
    } else if (mpz_sizeinbase(m.get_mpz_t(), 2) <= 126) {
      divisor = from_u128(rho_u128(to_u128(m), rng, deadline));
    } else {
      divisor = rho_mpz(m, rng, deadline);
    }
    if (divisor == 0) {
      Factorization partial = result;
      for (const auto& pp : large) add_factor(partial.factors, pp.prime, pp.exponent, pp.certified);
      normalize(partial);
      mpz_class unfactored = m;
      for (const auto& other : pending) unfactored *= other;
      throw IncompleteFactorization(std::move(partial), std::move(unfactored));
    }
    pending.push_back(m / divisor);
    pending.push_back(std::move(divisor));
  }

  for (const auto& pp : large) add_factor(result.factors, pp.prime, pp.exponent, pp.certified);
  normalize(result);
  return result;
}

unsigned omega(const Factorization& f) noexcept { return static_cast<unsigned>(f.factors.size()); }

unsigned big_omega(const Factorization& f) noexcept {
  unsigned total = 0;
  for (const auto& pp : f.factors) total += pp.exponent;
  return total;
}

unsigned omega(const mpz_class& n, const FactorOptions& opts) { return omega(factorize(n, opts)); }

unsigned big_omega(const mpz_class& n, const FactorOptions& opts) {
  return big_omega(factorize(n, opts));
}

mpz_class gcd_all(std::span<const mpz_class> values) {
  if (values.empty()) throw invalid_input("gcd_all: list must be nonempty");
  mpz_class g = 0;
  for (const auto& v : values) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  return g;
}

}  // namespace mflab::arith
