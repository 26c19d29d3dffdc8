#include "mflab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

#include "mflab/coeff_cache.hpp"
#include "mflab/error.hpp"
#include "mflab/gl2count.hpp"

namespace mflab::lab {

namespace {

struct FlagName {
  RecordFlag flag;
  const char* name;
};

constexpr FlagName kFlagNames[] = {
    {kZeroDifference, "zero_difference"},
    {kFactorIncomplete, "factor_incomplete"},
    {kSiftedOut, "sifted_out"},
    {kPositiveContribution, "positive_contribution"},
    {kSquarefullMiddle, "squarefull_middle"},
};

constexpr unsigned kSieveFlags = kSiftedOut | kPositiveContribution | kSquarefullMiddle;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// |d| <= 4 p^{(k-1)/2}, squared so it stays in integers.
bool within_deligne(const mpz_class& d, u64 p, int k) {
  mpz_class rhs;
  mpz_ui_pow_ui(rhs.get_mpz_t(), p, static_cast<unsigned long>(k - 1));
  rhs *= 16;
  return d * d <= rhs;
}

void fill_factorization(PrimeRecord& r, const arith::FactorOptions& fopts) {
  if (r.d == 0) {
    r.flags |= kZeroDifference;
    return;
  }
  try {
    arith::Factorization f = arith::factorize(r.d, fopts);
    r.omega = arith::omega(f);
    r.big_omega = arith::big_omega(f);
    r.factorization = std::move(f);
  } catch (const arith::IncompleteFactorization& e) {
    r.flags |= kFactorIncomplete;
    r.factorization = e.partial();
  }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool divides(u64 h, const mpz_class& d) {
  return mpz_divisible_ui_p(d.get_mpz_t(), h) != 0;
}

}  // namespace

const char* to_string(SignMode s) noexcept { return s == SignMode::Minus ? "minus" : "plus"; }

SignMode parse_sign_mode(const std::string& text) {
  if (text == "minus") return SignMode::Minus;
  if (text == "plus") return SignMode::Plus;
  throw invalid_input("sign must be minus or plus, got '" + text + "'");
}

std::vector<std::string> flag_names(unsigned flags) {
  std::vector<std::string> out;
  for (const auto& f : kFlagNames) {
    if ((flags & f.flag) != 0) out.emplace_back(f.name);
  }
  return out;
}

unsigned parse_flag(const std::string& name) {
  for (const auto& f : kFlagNames) {
    if (name == f.name) return f.flag;
  }
  throw invalid_input("unknown record flag '" + name + "'");
}

void require_weight_pair(int k1, int k2) {
  for (int k : {k1, k2}) {
    if (!qexp::is_supported_weight(k)) {
      throw invalid_input("unsupported weight " + std::to_string(k) + "; supported: " +
                          qexp::supported_weights_text());
    }
  }
  if (k1 == k2) {
    throw invalid_input("k1 and k2 must differ (equal weights need a twist check)");
  }
}

std::map<u64, mpz_class> prime_coefficients(int k, u64 X, const LabOptions& opts) {
  if (X < 2) return {};
  const std::size_t n = static_cast<std::size_t>(X) + 1;
  if (opts.cache_dir) {
    const qexp::CoefficientCache cache(*opts.cache_dir);
    return qexp::coefficients_at_primes(cache.get_or_compute(k, n, opts.terms_cap), X);
  }
  return qexp::coefficients_at_primes(qexp::eigenform(k, n, opts.terms_cap), X);
}

std::vector<PrimeRecord> records_from_coefficients(const std::map<u64, mpz_class>& a1,
                                                   const std::map<u64, mpz_class>& a2,
                                                   SignMode sign, const LabOptions& opts) {
  if (a1.size() != a2.size()) {
    throw invalid_input("coefficient tables cover different primes");
  }
  std::vector<PrimeRecord> rows;
  rows.reserve(a1.size());
  auto it2 = a2.begin();
  for (const auto& [p, c1] : a1) {
    if (it2->first != p) throw invalid_input("coefficient tables cover different primes");
    PrimeRecord r;
    r.p = p;
    r.a1 = c1;
    r.a2 = it2->second;
    r.d = sign == SignMode::Minus ? mpz_class(r.a1 - r.a2) : mpz_class(r.a1 + r.a2);
    rows.push_back(std::move(r));
    ++it2;
  }
  parallel_for(rows.size(), opts.threads,
               [&](std::size_t i) { fill_factorization(rows[i], opts.factor); });
  return rows;
}

std::vector<PrimeRecord> diff_table(int k1, int k2, u64 X, SignMode sign,
                                    const LabOptions& opts) {
  require_weight_pair(k1, k2);
  if (X < 2) return {};
  std::map<u64, mpz_class> c1;
  std::map<u64, mpz_class> c2;
  if (opts.cache_dir) {
    c1 = prime_coefficients(k1, X, opts);
    c2 = prime_coefficients(k2, X, opts);
  } else {
    const int ks[] = {k1, k2};
    const auto forms = qexp::eigenforms(ks, static_cast<std::size_t>(X) + 1, opts.terms_cap);
    c1 = qexp::coefficients_at_primes(forms[0], X);
    c2 = qexp::coefficients_at_primes(forms[1], X);
  }
  auto rows = records_from_coefficients(c1, c2, sign, opts);
  const int k = std::max(k1, k2);
  for (const auto& r : rows) {
    if (!within_deligne(r.d, r.p, k)) {
      throw invariant_violation("difference bound d^2 <= 16 p^(k-1) fails at p = " +
                                std::to_string(r.p) + " (d = " + r.d.get_str() + ")");
    }
  }
  return rows;
}

u64 pi_star(std::span<const PrimeRecord> rows, u64 h) {
  if (h == 0) throw invalid_input("pi_star: h must be >= 1");
  return static_cast<u64>(std::count_if(rows.begin(), rows.end(), [h](const PrimeRecord& r) {
    return r.d != 0 && divides(h, r.d);
  }));
}

u64 pi_h(std::span<const PrimeRecord> rows, u64 h) {
  if (h == 0) throw invalid_input("pi_h: h must be >= 1");
  return static_cast<u64>(std::count_if(rows.begin(), rows.end(), [h](const PrimeRecord& r) {
    return h % r.p != 0 && divides(h, r.d);
  }));
}

u64 equal_coefficient_count(std::span<const PrimeRecord> rows) {
  return static_cast<u64>(
      std::count_if(rows.begin(), rows.end(), [](const PrimeRecord& r) { return r.d == 0; }));
}

std::vector<DeltaComparisonRow> empirical_delta_comparison(std::span<const PrimeRecord> rows,
                                                           int k1, int k2,
                                                           std::span<const u64> ells,
                                                           unsigned n) {
  if (ells.empty()) return {};
  if (rows.empty()) throw invalid_input("empirical_delta_comparison: no records");
  std::vector<DeltaComparisonRow> out;
  for (u64 ell : ells) {
    DeltaComparisonRow row;
    row.ell = ell;
    row.n = n;
    row.delta_exact = gl2::delta_exact(ell, n, k1, k2);
    row.modulus = gl2::image_params(ell, n, k1, k2).modulus;
    row.pi_h_count = pi_h(rows, row.modulus);
    row.pi_X = rows.size();
    row.empirical = static_cast<double>(row.pi_h_count) / static_cast<double>(row.pi_X);
    const double delta = row.delta_exact.get_d();
    row.deviation = row.empirical - delta;
    row.threshold = 5 * std::sqrt(delta * (1 - delta) / static_cast<double>(row.pi_X));
    row.exceptional = std::abs(row.deviation) > row.threshold;
    out.push_back(std::move(row));
  }
  return out;
}

BoundTally bound_satisfaction(std::span<const PrimeRecord> rows, int k) {
  const richert::BoundSet b = richert::bounds(k);
  BoundTally t;
  t.k = k;
  t.b_omega = b.b_omega;
  t.b_big_omega = b.b_big_omega;
  for (const auto& r : rows) {
    if (r.d == 0) continue;
    if (!r.factored()) {
      ++t.quarantined;
      continue;
    }
    ++t.considered;
    const unsigned w = *r.omega;
    const unsigned W = *r.big_omega;
    if (static_cast<long>(w) <= t.b_omega) ++t.satisfied_omega;
    if (static_cast<long>(W) <= t.b_big_omega) ++t.satisfied_big_omega;
    t.max_omega = std::max(t.max_omega, w);
    t.max_big_omega = std::max(t.max_big_omega, W);
    ++t.omega_histogram[w];
  }
  return t;
}

CertificateSummary sieve_certificate(std::span<const PrimeRecord> rows, int k, double X,
                                     richert::Family mode, u64 sieve_floor) {
  if (sieve_floor < 2) throw invalid_input("sieve_certificate: sieve floor must be >= 2");
  if (!(X >= 2)) throw invalid_input("sieve_certificate: X must be >= 2");
  CertificateSummary s;
  s.mode = mode;
  s.params = mode == richert::Family::Main ? richert::params_main(k)
                                           : richert::params_omega_variant(k);
  s.k = k;
  s.X = X;
  s.sieve_floor = sieve_floor;
  s.chain_bound = richert::bound_from_chain(k, s.params.u, s.params.lambda, X);
  s.row_flags.assign(rows.size(), 0);

  const bool variant = mode == richert::Family::OmegaVariant;
  std::vector<richert::WItem> items;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.d == 0) continue;
    if (!r.factored()) {
      ++s.quarantined;
      continue;
    }
    ++s.considered;
    items.push_back({r.p, abs(r.d)});
    index.push_back(i);
  }
  const auto member = [sieve_floor](std::uint64_t q) { return q >= sieve_floor; };
  const richert::WResult w = richert::weighted_sum_W(
      items, X, s.params, member,
      variant ? richert::WeightMode::ExactlyDivides : richert::WeightMode::Divides);
  s.W_total = w.total;

  const double upper = std::pow(X, 1.0 / s.params.u);
  for (std::size_t j = 0; j < items.size(); ++j) {
    const auto& c = w.contributions[j];
    const auto& r = rows[index[j]];
    unsigned& flags = s.row_flags[index[j]];
    if (c.squarefull_middle) {
      flags |= kSquarefullMiddle;
      ++s.squarefull_census;
    }
    if (!c.small_nonmember_primes.empty()) ++s.with_small_nonmember;
    if (c.sifted_out) {
      flags |= kSiftedOut;
      ++s.sifted_out;
      continue;
    }
    if (!(c.contribution > 0)) {
      ++s.nonpositive;
      continue;
    }
    flags |= kPositiveContribution;
    if (variant && c.squarefull_middle) {
      ++s.squarefull_excluded;
      continue;
    }
    ++s.positive;
    unsigned count = 0;
    for (const auto& pp : r.factorization->factors) {
      const bool small_nonmember = pp.prime < upper && !member(pp.prime.get_ui());
      if (small_nonmember) continue;
      count += variant ? pp.exponent : 1;
    }
    if (static_cast<double>(count) > s.chain_bound) {
      s.violations.push_back({r.p, count, s.chain_bound});
    }
  }
  return s;
}

ExperimentCounts recompute_counts(std::span<const PrimeRecord> rows, int k,
                                  std::span<const u64> h_list) {
  ExperimentCounts c;
  c.primes_considered = rows.size();
  c.zero_difference = equal_coefficient_count(rows);
  for (const auto& r : rows) {
    if (r.d != 0 && !r.factored()) ++c.quarantined;
  }
  for (u64 h : h_list) {
    c.pi_star[h] = pi_star(rows, h);
    c.pi_h[h] = pi_h(rows, h);
  }
  c.tally = bound_satisfaction(rows, k);
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.started_at = utc_now();
  rep.k1 = cfg.k1;
  rep.k2 = cfg.k2;
  rep.k = std::max(cfg.k1, cfg.k2);
  rep.X = cfg.X;
  rep.sign = cfg.sign;
  rep.sieve_floor = cfg.options.sieve_floor;
  rep.seed = cfg.options.factor.seed;
  rep.tool_version = MFLAB_VERSION;
  rep.h_list = cfg.h_list;
  for (u64 h : rep.h_list) {
    if (h == 0) throw invalid_input("h-list entries must be >= 1");
  }

  rep.rows = diff_table(cfg.k1, cfg.k2, cfg.X, cfg.sign, cfg.options);
  rep.counts = recompute_counts(rep.rows, rep.k, rep.h_list);
  if (!rep.rows.empty()) {
    for (unsigned n : cfg.delta_ns) {
      auto part = empirical_delta_comparison(rep.rows, cfg.k1, cfg.k2, cfg.delta_ells, n);
      std::move(part.begin(), part.end(), std::back_inserter(rep.delta_comparison));
    }
  }
  if (cfg.X >= 2) {
    const double X = static_cast<double>(cfg.X);
    for (auto mode : {richert::Family::Main, richert::Family::OmegaVariant}) {
      rep.certificates.push_back(
          sieve_certificate(rep.rows, rep.k, X, mode, cfg.options.sieve_floor));
    }
    // Row flags follow the main-family certificate.
    const auto& main = rep.certificates.front();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      rep.rows[i].flags = (rep.rows[i].flags & ~kSieveFlags) | main.row_flags[i];
    }
  }
  rep.finished_at = utc_now();
  return rep;
}

CongruenceReport congruence_search(int k1, int k2, u64 n_primes, u64 confirm_primes,
                                   const LabOptions& opts) {
  require_weight_pair(k1, k2);
  if (n_primes < 10) throw invalid_input("congruence search needs at least 10 primes");
  const u64 total = n_primes + confirm_primes;

  // Smallest sieve range holding `total` primes.
  u64 bound = 64;
  std::vector<std::uint64_t> primes = arith::primes_up_to(bound);
  while (primes.size() < total) {
    bound *= 2;
    primes = arith::primes_up_to(bound);
  }
  const u64 X = primes[total - 1];
  if (X + 1 > opts.terms_cap) {
    throw invalid_input("congruence search needs " + std::to_string(X + 1) +
                        " coefficients, above the cap of " + std::to_string(opts.terms_cap));
  }
  const auto c1 = prime_coefficients(k1, X, opts);
  const auto c2 = prime_coefficients(k2, X, opts);

  CongruenceReport rep;
  rep.k1 = k1;
  rep.k2 = k2;
  rep.n_primes = n_primes;
  rep.confirm_primes = confirm_primes;
  mpz_class g = 0;
  for (u64 i = 0; i < n_primes; ++i) {
    const u64 p = primes[i];
    const mpz_class d = c1.at(p) - c2.at(p);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
    rep.prefix_gcds.push_back(g);
  }
  rep.D = g;
  rep.stable_since = n_primes;
  while (rep.stable_since > 1 && rep.prefix_gcds[rep.stable_since - 2] == rep.D) {
    --rep.stable_since;
  }
  for (u64 i = n_primes; i < total; ++i) {
    const u64 p = primes[i];
    const mpz_class d = c1.at(p) - c2.at(p);
    ++rep.confirm_checked;
    const bool ok = rep.D == 0 ? d == 0 : mpz_divisible_p(d.get_mpz_t(), rep.D.get_mpz_t()) != 0;
    if (!ok) {
      ++rep.confirm_failures;
      if (!rep.first_failure) rep.first_failure = p;
    }
  }
  rep.confirmed = rep.confirm_failures == 0;
  rep.b_omega = richert::bounds(std::max(k1, k2)).b_omega;
  if (rep.D > 1) {
    try {
      auto f = arith::factorize(rep.D, opts.factor);
      rep.omega_D = arith::omega(f);
      rep.factorization = std::move(f);
      rep.omega_within_bound = static_cast<long>(*rep.omega_D) <= rep.b_omega;
    } catch (const arith::IncompleteFactorization& e) {
      rep.factorization = e.partial();
      rep.unfactored = e.unfactored().get_str();
      // distinct primes found so far plus at least one in the cofactor
      rep.omega_within_bound =
          static_cast<long>(arith::omega(e.partial()) + 1) <= rep.b_omega;
    }
  }
  return rep;
}

}  // namespace mflab::lab
