#include "mflab/qexp.hpp"

#include <algorithm>
#include <sstream>

#include "mflab/arith.hpp"
#include "mflab/error.hpp"

namespace mflab::qexp {

namespace {

void require_terms(const QSeries& s, std::size_t n_terms, const char* op) {
  if (s.n_terms() < n_terms) {
    std::ostringstream msg;
    msg << op << ": series '" << s.label << "' carries " << s.n_terms()
        << " coefficients, " << n_terms << " requested";
    throw invalid_input(msg.str());
  }
}

QSeries one(std::size_t n_terms) {
  QSeries r;
  r.coeffs.assign(n_terms, 0);
  if (n_terms > 0) r.coeffs[0] = 1;
  r.label = "1";
  return r;
}

// (E4^3 - E6^2) / 1728, asserting exact divisibility coefficient by coefficient.
QSeries delta_from(const QSeries& e4_cubed, const QSeries& e6_squared) {
  const std::size_t n_terms = e4_cubed.n_terms();
  QSeries d;
  d.coeffs.resize(n_terms);
  d.label = "Delta";
  d.weight = 12;
  mpz_class num;
  for (std::size_t i = 0; i < n_terms; ++i) {
    num = e4_cubed.coeffs[i] - e6_squared.coeffs[i];
    if (!mpz_divisible_ui_p(num.get_mpz_t(), 1728)) {
      throw invariant_violation("E4^3 - E6^2 coefficient " + std::to_string(i) +
                                " is not divisible by 1728");
    }
    mpz_divexact_ui(d.coeffs[i].get_mpz_t(), num.get_mpz_t(), 1728);
  }
  return d;
}

void check_cap(std::size_t n_terms, std::size_t cap) {
  if (n_terms > cap) {
    std::ostringstream msg;
    msg << "n_terms " << n_terms << " exceeds the configured cap " << cap;
    throw invalid_input(msg.str());
  }
}

}  // namespace

bool is_supported_weight(int k) noexcept {
  return std::find(std::begin(kSupportedWeights), std::end(kSupportedWeights),
                   k) != std::end(kSupportedWeights);
}

std::string supported_weights_text() {
  std::string out = "{";
  for (int k : kSupportedWeights) {
    if (out.size() > 1) out += ",";
    out += std::to_string(k);
  }
  return out + "}";
}

QSeries from_integers(std::span<const long> values, std::string label) {
  QSeries r;
  r.coeffs.reserve(values.size());
  for (long v : values) r.coeffs.emplace_back(v);
  r.label = std::move(label);
  return r;
}

QSeries sigma_series(unsigned r, std::size_t n_terms) {
  if (n_terms < 1) throw invalid_input("sigma_series: n_terms must be >= 1");
  QSeries s;
  s.coeffs.assign(n_terms, 0);
  s.label = "sigma_" + std::to_string(r);
  mpz_class power;
  for (std::size_t d = 1; d < n_terms; ++d) {
    mpz_ui_pow_ui(power.get_mpz_t(), d, r);
    for (std::size_t m = d; m < n_terms; m += d) s.coeffs[m] += power;
  }
  return s;
}

QSeries eisenstein(int k, std::size_t n_terms) {
  long scale = 0;
  unsigned r = 0;
  switch (k) {
    case 4: scale = 240; r = 3; break;
    case 6: scale = -504; r = 5; break;
    default:
      throw invalid_input("eisenstein: only k = 4 and k = 6 have integral "
                          "normalizations here, got k = " + std::to_string(k));
  }
  QSeries e = sigma_series(r, n_terms);
  for (auto& c : e.coeffs) c *= scale;
  e.coeffs[0] = 1;
  e.label = "E" + std::to_string(k);
  e.weight = k;
  return e;
}

QSeries mul(const QSeries& a, const QSeries& b, std::size_t n_terms) {
  require_terms(a, n_terms, "mul");
  require_terms(b, n_terms, "mul");
  QSeries r;
  r.coeffs.assign(n_terms, 0);
  r.label = a.label + "*" + b.label;
  r.weight = (a.weight && b.weight) ? a.weight + b.weight : 0;

  // Row-wise accumulation keeps the inner loop on contiguous mpz_t storage.
  for (std::size_t i = 0; i < n_terms; ++i) {
    mpz_srcptr ai = a.coeffs[i].get_mpz_t();
    if (mpz_sgn(ai) == 0) continue;
    const std::size_t len = n_terms - i;
    mpz_ptr out = nullptr;
    for (std::size_t j = 0; j < len; ++j) {
      mpz_srcptr bj = b.coeffs[j].get_mpz_t();
      if (mpz_sgn(bj) == 0) continue;
      out = r.coeffs[i + j].get_mpz_t();
      mpz_addmul(out, ai, bj);
    }
  }
  return r;
}

QSeries pow(const QSeries& a, unsigned e, std::size_t n_terms) {
  if (e == 0) return one(n_terms);
  require_terms(a, n_terms, "pow");
  const unsigned exponent = e;
  QSeries result;
  bool have_result = false;
  QSeries base = a;
  base.coeffs.resize(n_terms);
  while (e > 0) {
    if (e & 1U) {
      result = have_result ? mul(result, base, n_terms) : base;
      have_result = true;
    }
    e >>= 1U;
    if (e > 0) base = mul(base, base, n_terms);
  }
  result.label = "(" + a.label + ")^" + std::to_string(exponent);
  return result;
}

QSeries delta_series(std::size_t n_terms) {
  if (n_terms < 2) throw invalid_input("delta_series: n_terms must be >= 2");
  const QSeries e4 = eisenstein(4, n_terms);
  const QSeries e6 = eisenstein(6, n_terms);
  return delta_from(mul(mul(e4, e4, n_terms), e4, n_terms), mul(e6, e6, n_terms));
}

QSeries eta24_series(std::size_t n_terms) {
  if (n_terms < 1) throw invalid_input("eta24_series: n_terms must be >= 1");
  // prod (1 - q^n)^24 is needed to precision q^{n_terms - 1}.
  const std::size_t prec = n_terms - 1;

  struct Term {
    std::size_t exp;
    long coeff;
  };
  std::vector<Term> cube;
  for (std::size_t j = 0;; ++j) {
    const std::size_t e = j * (j + 1) / 2;
    if (e >= prec) break;
    cube.push_back({e, (j % 2 == 0 ? 1L : -1L) * static_cast<long>(2 * j + 1)});
  }

  std::vector<mpz_class> acc(prec, 0);
  if (prec > 0) acc[0] = 1;
  std::vector<mpz_class> next(prec);
  for (int step = 0; step < 8; ++step) {
    for (auto& c : next) c = 0;
    for (std::size_t i = 0; i < prec; ++i) {
      if (acc[i] == 0) continue;
      for (const Term& t : cube) {
        if (i + t.exp >= prec) break;
        if (t.coeff > 0) {
          mpz_addmul_ui(next[i + t.exp].get_mpz_t(), acc[i].get_mpz_t(),
                        static_cast<unsigned long>(t.coeff));
        } else {
          mpz_submul_ui(next[i + t.exp].get_mpz_t(), acc[i].get_mpz_t(),
                        static_cast<unsigned long>(-t.coeff));
        }
      }
    }
    acc.swap(next);
  }

  QSeries r;
  r.coeffs.assign(n_terms, 0);
  for (std::size_t i = 0; i < prec; ++i) r.coeffs[i + 1] = acc[i];
  r.label = "eta^24";
  r.weight = 12;
  return r;
}

Eigenform::Eigenform(int weight, QSeries series)
    : weight_(weight), series_(std::move(series)) {
  if (!is_supported_weight(weight_)) {
    throw invalid_input("unsupported weight " + std::to_string(weight_) +
                        "; supported weights are " + supported_weights_text());
  }
  if (series_.n_terms() >= 2 && series_.coeffs[1] != 1) {
    throw invariant_violation("eigenform of weight " + std::to_string(weight_) +
                              " is not normalized: a(1) = " +
                              series_.coeffs[1].get_str());
  }
  series_.weight = weight_;
}

const mpz_class& Eigenform::coefficient(std::size_t n) const {
  if (n >= series_.n_terms()) {
    throw invalid_input("coefficient index " + std::to_string(n) +
                        " beyond computed range " +
                        std::to_string(series_.n_terms()));
  }
  return series_.coeffs[n];
}

std::pair<unsigned, unsigned> eisenstein_exponents(int k) {
  switch (k) {
    case 12: return {0, 0};
    case 16: return {1, 0};
    case 18: return {0, 1};
    case 20: return {2, 0};
    case 22: return {1, 1};
    case 26: return {2, 1};
    default:
      throw invalid_input("unsupported weight " + std::to_string(k) +
                          "; supported weights are " + supported_weights_text());
  }
}

std::vector<Eigenform> eigenforms(std::span<const int> weights,
                                  std::size_t n_terms, std::size_t terms_cap) {
  for (int k : weights) eisenstein_exponents(k);  // validates
  if (n_terms < 2) throw invalid_input("eigenform: n_terms must be >= 2");
  check_cap(n_terms, terms_cap);

  const QSeries e4 = eisenstein(4, n_terms);
  const QSeries e6 = eisenstein(6, n_terms);
  const QSeries e4_squared = mul(e4, e4, n_terms);
  const QSeries e6_squared = mul(e6, e6, n_terms);
  const QSeries e4_cubed = mul(e4_squared, e4, n_terms);

  const QSeries delta = delta_from(e4_cubed, e6_squared);

  std::vector<Eigenform> out;
  out.reserve(weights.size());
  for (int k : weights) {
    const auto [a, b] = eisenstein_exponents(k);
    const QSeries* factor = nullptr;
    QSeries e4_e6;
    if (a == 1 && b == 0) factor = &e4;
    if (a == 0 && b == 1) factor = &e6;
    if (a == 2 && b == 0) factor = &e4_squared;
    if (a == 1 && b == 1) {
      e4_e6 = mul(e4, e6, n_terms);
      factor = &e4_e6;
    }
    if (a == 2 && b == 1) {
      e4_e6 = mul(e4_squared, e6, n_terms);
      factor = &e4_e6;
    }
    QSeries f = factor ? mul(delta, *factor, n_terms) : delta;
    f.label = "f" + std::to_string(k);
    out.emplace_back(k, std::move(f));
  }
  return out;
}

Eigenform eigenform(int k, std::size_t n_terms, std::size_t terms_cap) {
  const int w[] = {k};
  return std::move(eigenforms(w, n_terms, terms_cap).front());
}

std::map<std::uint64_t, mpz_class> coefficients_at_primes(const Eigenform& f,
                                                          std::uint64_t X) {
  std::map<std::uint64_t, mpz_class> out;
  if (X < 2) return out;
  if (X >= f.n_terms()) {
    throw invalid_input("coefficients_at_primes: form computed to " +
                        std::to_string(f.n_terms()) + " terms, X = " +
                        std::to_string(X));
  }
  for (std::uint64_t p : arith::primes_up_to(X)) out.emplace(p, f.coefficient(p));
  return out;
}

}  // namespace mflab::qexp
