#include <doctest.h>

#include <cmath>

#include "mflab/error.hpp"
#include "mflab/gl2count.hpp"
#include "oracles.hpp"

using namespace mflab;
using namespace mflab::gl2;

TEST_CASE("image parameters") {
  const auto p = image_params(7, 1, 16, 22);
  CHECK(p.modulus == 7);
  CHECK(p.lambda_n == 3);
  CHECK(p.Lambda_size == 2);
  CHECK(linked_determinants(p).size() == 2);
  const auto q = image_params(3, 2, 12, 16);
  CHECK(q.modulus == 9);
  CHECK(q.lambda_n == 1);
  CHECK(q.Lambda_size == 6);
  CHECK_THROWS_AS(image_params(2, 1, 12, 16), Error);
  CHECK_THROWS_AS(image_params(9, 1, 12, 16), Error);
  CHECK_THROWS_AS(image_params(5, 1, 1, 16), Error);
  CHECK_THROWS_AS(image_params(5, 0, 12, 16), Error);
  for (u64 ell : {3, 5, 7, 11, 13}) {
    for (unsigned n : {1U, 2U}) {
      const auto r = image_params(ell, n, 12, 18);
      CHECK(linked_determinants(r).size() == r.Lambda_size);
    }
  }
}

TEST_CASE("discriminant classes") {
  CHECK(classify_disc(5, 1, 0) == DiscClass::Zero);
  CHECK(classify_disc(5, 1, 4) == DiscClass::QuadraticResidue);
  CHECK(classify_disc(5, 1, 2) == DiscClass::NonResidue);
  CHECK(classify_disc(5, 1, -1) == DiscClass::QuadraticResidue);
  CHECK(classify_disc(3, 2, 3) == DiscClass::NonzeroDivisibleByEll);
  CHECK(classify_disc(3, 2, 9) == DiscClass::Zero);
  CHECK(classify_disc(3, 2, 7) == DiscClass::QuadraticResidue);
  CHECK(classify_disc(3, 2, 5) == DiscClass::NonResidue);
}

TEST_CASE("det/trace counts against the direct oracle") {
  struct Case {
    u64 ell;
    unsigned n;
  };
  for (Case c : {Case{3, 1}, Case{5, 1}, Case{7, 1}, Case{3, 2}}) {
    const u64 m = c.n == 1 ? c.ell : c.ell * c.ell;
    for (u64 d = 1; d < m; ++d) {
      if (d % c.ell == 0) continue;
      for (u64 t = 0; t < m; ++t) {
        CAPTURE(c.ell);
        CAPTURE(d);
        CAPTURE(t);
        const u64 expect = oracle::count_det_trace(m, d, t);
        CHECK(count_det_trace(c.ell, c.n, d, t) == expect);
        CHECK(count_det_trace_bruteforce(c.ell, c.n, d, t) == expect);
      }
    }
  }
  CHECK_THROWS_AS(count_det_trace(5, 1, 10, 1), Error);
  CHECK_THROWS_AS(count_det_trace(3, 3, 1, 1), Error);
  CHECK_THROWS_AS(count_det_trace_bruteforce(11, 2, 1, 1), Error);
}

TEST_CASE("counts over all classes partition GL2") {
  for (u64 ell : {3, 5, 7, 11, 13}) {
    for (unsigned n : {1U, 2U}) {
      const u64 m = n == 1 ? ell : ell * ell;
      mpz_class total = 0;
      for (u64 d = 1; d < m; ++d) {
        if (d % ell == 0) continue;
        for (u64 t = 0; t < m; ++t) total += static_cast<unsigned long>(count_det_trace(ell, n, d, t));
      }
      CHECK(total == gl2_order(ell, n));
    }
  }
  CHECK(gl2_order(3, 1) == 48);
  CHECK(gl2_order(5, 1) == 480);
}

TEST_CASE("table enumeration matches single-class enumeration") {
  const auto table = det_trace_table_bruteforce(5, 1);
  for (u64 d = 0; d < 5; ++d)
    for (u64 t = 0; t < 5; ++t) {
      if (d == 0) continue;
      CHECK(table.at(d, t) == count_det_trace_bruteforce(5, 1, d, t));
    }
  CHECK(table.with_det(1) == 120);
}

TEST_CASE("quadratic root counts, kernel count and zero-divisor pairs") {
  for (u64 ell : {3, 5, 7}) {
    const u64 m = ell * ell;
    for (u64 d = 1; d < m; ++d) {
      if (d % ell == 0) continue;
      for (u64 t = 0; t < m; ++t) {
        CHECK(count_quadratic_roots(ell, t, d) == count_quadratic_roots_bruteforce(ell, t, d));
      }
    }
    CHECK(zero_divisor_pairs(ell) == 3 * ell * ell - 2 * ell);
  }
  for (u64 ell : {3, 5}) {
    for (u64 d = 1; d < ell * ell; d += ell) CHECK(kernel_count_check(ell, 2, d) == ell * ell * ell);
  }
  CHECK_THROWS_AS(kernel_count_check(5, 2, 2), Error);
}

TEST_CASE("|A| against enumeration") {
  const std::pair<int, int> weights[] = {{12, 16}, {12, 18}, {16, 22}};
  for (const auto& [k1, k2] : weights) {
    for (u64 ell : {3, 5, 7}) {
      const auto expect = oracle::card_A(ell, 1, k1, k2);
      CHECK(card_A(ell, 1, k1, k2) == expect);
      CHECK(card_A_bruteforce(ell, 1, k1, k2) == expect);
    }
    CHECK(card_A(3, 2, k1, k2) == oracle::card_A(3, 2, k1, k2));
  }
  CHECK(card_A(5, 1, 12, 16) == 57600);
}

TEST_CASE("|C| against enumeration") {
  const std::pair<int, int> weights[] = {{12, 16}, {12, 18}, {16, 22}};
  for (const auto& [k1, k2] : weights) {
    for (u64 ell : {3, 5, 7}) {
      const auto expect = oracle::card_C(ell, 1, k1, k2);
      CHECK(card_C(ell, 1, k1, k2) == expect);
      CHECK(card_C_bruteforce(ell, 1, k1, k2) == expect);
    }
    CHECK(card_C(3, 2, k1, k2) == oracle::card_C(3, 2, k1, k2));
  }
  CHECK(card_C(5, 1, 12, 16) == 11900);
  CHECK(delta_exact(5, 1, 12, 16) == mpq_class(119, 576));
}

TEST_CASE("negated trace relation gives the same count") {
  for (u64 ell : {3, 5, 7, 11, 13, 17}) {
    for (unsigned n : {1U, 2U}) {
      CHECK(card_C(ell, n, 12, 16, TraceRelation::Negated) == card_C(ell, n, 12, 16));
      CHECK(card_C(ell, n, 16, 22, TraceRelation::Negated) == card_C(ell, n, 16, 22));
    }
  }
  CHECK(card_C_bruteforce(5, 1, 12, 18, TraceRelation::Negated) == card_C(5, 1, 12, 18));
}

TEST_CASE("delta stays near 1/l^n") {
  for (u64 ell = 3; ell <= 31; ell += 2) {
    if (!oracle::is_prime(ell)) continue;
    for (unsigned n : {1U, 2U}) {
      const u64 m = n == 1 ? ell : ell * ell;
      const double scaled = delta_exact(ell, n, 12, 16).get_d() * static_cast<double>(m);
      CHECK(scaled >= 1 - 4.0 / static_cast<double>(ell));
      CHECK(scaled <= 1 + 4.0 / static_cast<double>(ell));
    }
  }
}

TEST_CASE("delta on squarefree products") {
  CHECK(delta_squarefree(1, 12, 16) == 1);
  CHECK(delta_squarefree(15, 12, 16) == delta_exact(3, 1, 12, 16) * delta_exact(5, 1, 12, 16));
  CHECK(delta_squarefree(3 * 5 * 7 * 11, 16, 22) ==
        delta_exact(3, 1, 16, 22) * delta_exact(5, 1, 16, 22) * delta_exact(7, 1, 16, 22) *
            delta_exact(11, 1, 16, 22));
  CHECK_THROWS_AS(delta_squarefree(6, 12, 16), Error);
  CHECK_THROWS_AS(delta_squarefree(45, 12, 16), Error);
  CHECK_THROWS_AS(delta_squarefree(0, 12, 16), Error);
}

TEST_CASE("Monte-Carlo sampler") {
  const auto a = sample_trace_equal_frequency(5, 1, 12, 16, 20000, 99);
  const auto b = sample_trace_equal_frequency(5, 1, 12, 16, 20000, 99);
  CHECK(a.hits == b.hits);
  CHECK(a.trials == 20000);
  const double delta = delta_exact(5, 1, 12, 16).get_d();
  const double sigma = std::sqrt(delta * (1 - delta) / 20000.0);
  CHECK(std::abs(a.frequency.get_d() - delta) <= 4 * sigma);
  CHECK_THROWS_AS(sample_trace_equal_frequency(5, 1, 12, 16, 0, 1), Error);
}
