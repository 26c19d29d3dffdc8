#include "mflab/richert.hpp"

#include <cmath>
#include <sstream>

#include "mflab/arith.hpp"
#include "mflab/error.hpp"

namespace mflab::richert {

bool SieveParams::valid() const noexcept { return validity_report().empty(); }

std::string SieveParams::validity_report() const {
  std::ostringstream out;
  if (!(alpha > 0 && alpha < 1)) {
    out << "alpha = " << alpha << " outside (0, 1)";
  } else if (!(1.0 / alpha < u)) {
    out << "need 1/alpha < u, got 1/alpha = " << 1.0 / alpha << ", u = " << u;
  } else if (!(u < v)) {
    out << "need u < v, got u = " << u << ", v = " << v;
  } else if (!(2.0 / alpha <= v * (1 + 1e-12) && v <= 4.0 / alpha * (1 + 1e-12))) {
    out << "need 2/alpha <= v <= 4/alpha, got v = " << v << " with alpha = " << alpha;
  } else if (!(lambda > 0)) {
    out << "need lambda > 0, got " << lambda;
  }
  return out.str();
}

const char* to_string(Family f) noexcept {
  return f == Family::Main ? "main" : "omega_variant";
}

double F_value(const SieveParams& p) {
  const double av = p.alpha * p.v;
  const double au = p.alpha * p.u;
  if (!(av > 1) || !(au > 1)) {
    std::ostringstream msg;
    msg << "F_value: need alpha*v > 1 and alpha*u > 1, got " << av << " and " << au;
    throw invalid_input(msg.str());
  }
  const double lead = 2.0 * std::exp(kEulerGamma) / av;
  return lead * (std::log(av - 1) - p.lambda * au * std::log(p.v / p.u) +
                 p.lambda * (au - 1) * std::log((av - 1) / (au - 1)));
}

namespace {

void require_family_domain(double k) {
  if (!(k > 1)) {
    std::ostringstream msg;
    msg << "sieve parameter families need k > 1, got " << k;
    throw invalid_input(msg.str());
  }
}

SieveParams main_family(double k) {
  require_family_domain(k);
  SieveParams p;
  p.alpha = (k - 1) / (14 * k);
  p.u = (14 * k + 1) / (k - 1);
  p.v = 56 * k / (k - 1);
  p.lambda = 1.0 / std::pow(k, 0.2);
  p.k = k;
  return p;
}

SieveParams variant_family(double k) {
  require_family_domain(k);
  SieveParams p;
  p.alpha = (k - 1) / (14 * k);
  p.u = (26 * k + 1) / (k - 1);
  p.v = 30 * k / (k - 1);
  p.lambda = 1.0 / std::sqrt(std::log(k));
  p.k = k;
  return p;
}

void require_weight(int k) {
  if (k < 2) throw invalid_input("sieve parameters need weight k >= 2, got " + std::to_string(k));
}

}  // namespace

SieveParams params_main(int k) {
  require_weight(k);
  return main_family(k);
}

SieveParams params_omega_variant(int k) {
  require_weight(k);
  return variant_family(k);
}

SieveParams params_for(Family f, double k) {
  return f == Family::Main ? main_family(k) : variant_family(k);
}

double closed_form_F_main(double k) {
  require_family_domain(k);
  const double k65 = std::pow(k, 1.2);
  return std::exp(kEulerGamma) *
         (14 * k65 * std::log(3.0) + std::log(42 * k) -
          (1 + 14 * k) * std::log(56 * k / (14 * k + 1))) /
         (28 * k65);
}

double positivity_threshold(Family f, double tolerance) {
  const double anchor = f == Family::Main ? 1.71 : 1.006;
  double lo = std::max(anchor - 0.05, 1.0 + 1e-9);
  double hi = anchor + 0.05;
  auto g = [f](double k) { return F_value(params_for(f, k)); };
  double glo = g(lo);
  const double ghi = g(hi);
  if ((glo > 0) == (ghi > 0)) {
    std::ostringstream msg;
    msg << "positivity_threshold: no sign change of F on [" << lo << ", " << hi << "]";
    throw invariant_violation(msg.str());
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoundSet bounds(int k) {
  if (k < 2) throw invalid_input("bounds: weight must be >= 2");
  const double kd = k;
  const double sqrtlog = std::sqrt(std::log(kd));
  BoundSet b;
  b.k = k;
  b.b_omega = static_cast<long>(std::floor(7 * kd + 0.5 + std::pow(kd, 0.2)));
  if (k >= 6) b.b_omega_sqrtlog = static_cast<long>(std::floor(7 * kd + 0.5 + sqrtlog));
  b.b_big_omega = static_cast<long>(std::floor(13 * kd + 0.5 + sqrtlog));
  b.b_selberg_upper = static_cast<long>(std::floor((29 * kd - 13) / 2));
  b.b_joshi = static_cast<long>(std::floor(5 * kd + 1 + sqrtlog));
  return b;
}

double bound_from_chain(double k, double u, double lambda, double X) {
  if (!(X > 1)) throw invalid_input("bound_from_chain: X must exceed 1");
  if (!(lambda > 0)) throw invalid_input("bound_from_chain: lambda must be positive");
  return 1.0 / lambda + u * (k - 1) / 2 + u * std::log(4.0) / std::log(X);
}

WResult weighted_sum_W(std::span<const WItem> data, double X, const SieveParams& params,
                       const PrimeMembership& member, WeightMode mode) {
  if (!(X >= 2)) throw invalid_input("weighted_sum_W: X must be >= 2");
  const double logX = std::log(X);
  const double lower = std::pow(X, 1.0 / params.v);  // X^{1/v}
  const double upper = std::pow(X, 1.0 / params.u);  // X^{1/u}
  const auto small = arith::primes_up_to(static_cast<std::uint64_t>(std::floor(upper)));

  WResult result;
  result.contributions.reserve(data.size());
  for (const WItem& item : data) {
    if (item.m <= 0) {
      throw invalid_input("weighted_sum_W: element for p = " + std::to_string(item.p) +
                          " is not positive");
    }
    WContribution c;
    c.p = item.p;
    double penalty = 0;
    for (std::uint64_t q : small) {
      const double qd = static_cast<double>(q);
      if (qd >= upper) break;
      if (!mpz_divisible_ui_p(item.m.get_mpz_t(), q)) continue;
      if (!member(q)) {
        c.small_nonmember_primes.push_back(q);
        continue;
      }
      if (qd < lower) {
        c.sifted_out = true;
        break;
      }
      const bool square = mpz_divisible_ui_p(item.m.get_mpz_t(), q * q) != 0;
      if (square) c.squarefull_middle = true;
      if (mode == WeightMode::ExactlyDivides && square) continue;
      c.middle_primes.push_back(q);
      penalty += params.lambda * (1 - params.u * std::log(qd) / logX);
    }
    if (c.sifted_out) {
      c.middle_primes.clear();
      c.squarefull_middle = false;
      c.contribution = 0;
    } else {
      c.contribution = 1 - penalty;
    }
    result.total += c.contribution;
    result.contributions.push_back(std::move(c));
  }
  return result;
}

Omega2Report check_hyp_omega2(const std::map<std::uint64_t, mpq_class>& delta_table, double w,
                              double z, double L, double A2) {
  if (!(w >= 2) || !(w <= z)) throw invalid_input("check_hyp_omega2: need 2 <= w <= z");
  Omega2Report r;
  r.w = w;
  r.z = z;
  r.L = L;
  r.A2 = A2;
  for (std::uint64_t ell : arith::primes_up_to(static_cast<std::uint64_t>(std::floor(z)))) {
    if (static_cast<double>(ell) < w) continue;
    const auto it = delta_table.find(ell);
    if (it == delta_table.end()) {
      throw invalid_input("check_hyp_omega2: delta table has no entry for prime " +
                          std::to_string(ell));
    }
    r.weighted_sum += it->second.get_d() * std::log(static_cast<double>(ell));
    ++r.primes_used;
  }
  r.discrepancy = r.weighted_sum - std::log(z / w);
  r.pass = -L <= r.discrepancy && r.discrepancy <= A2;
  return r;
}

}  // namespace mflab::richert
