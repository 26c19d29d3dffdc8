#include "mflab/cli.hpp"

#include <array>
#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mflab/arith.hpp"
#include "mflab/coeff_cache.hpp"
#include "mflab/gl2count.hpp"
#include "mflab/lab.hpp"
#include "mflab/qexp.hpp"
#include "mflab/report_io.hpp"
#include "mflab/richert.hpp"

namespace mflab::cli {

using nlohmann::json;
using u64 = std::uint64_t;

namespace {

constexpr std::pair<int, int> kVerifyWeights[] = {{12, 16}, {12, 18}, {16, 22}};

std::string weights_text(int k1, int k2) {
  return "k1=" + std::to_string(k1) + ",k2=" + std::to_string(k2);
}

VerifyCase det_trace_case(u64 ell, unsigned n) {
  VerifyCase c{"det_trace", ell, n};
  const u64 m = n == 1 ? ell : ell * ell;
  if (m > gl2::kDetTraceEnumerationBudget) {
    c.skipped = true;
    return c;
  }
  const gl2::DetTraceTable table = gl2::det_trace_table_bruteforce(ell, n);
  for (u64 d = 0; d < m; ++d) {
    if (d % ell == 0) continue;
    for (u64 t = 0; t < m; ++t) {
      ++c.cases;
      const auto dd = static_cast<long long>(d);
      const auto tt = static_cast<long long>(t);
      if (gl2::count_det_trace(ell, n, dd, tt) != table.at(d, t)) ++c.mismatches;
    }
  }
  return c;
}

VerifyCase partition_case(u64 ell, unsigned n) {
  VerifyCase c{"gl2_order_partition", ell, n};
  const u64 m = n == 1 ? ell : ell * ell;
  if (m > gl2::kDetTraceEnumerationBudget) {
    c.skipped = true;
    return c;
  }
  mpz_class total = 0;
  for (u64 d = 0; d < m; ++d) {
    if (d % ell == 0) continue;
    for (u64 t = 0; t < m; ++t) {
      total += static_cast<unsigned long>(
          gl2::count_det_trace(ell, n, static_cast<long long>(d), static_cast<long long>(t)));
    }
  }
  c.cases = 1;
  if (total != gl2::gl2_order(ell, n)) c.mismatches = 1;
  return c;
}

VerifyCase quadratic_roots_case(u64 ell) {
  VerifyCase c{"quadratic_roots", ell, 2};
  const u64 m = ell * ell;
  for (u64 d = 1; d < m; ++d) {
    if (d % ell == 0) continue;
    for (u64 t = 0; t < m; ++t) {
      ++c.cases;
      const auto dd = static_cast<long long>(d);
      const auto tt = static_cast<long long>(t);
      if (!(gl2::count_quadratic_roots(ell, tt, dd) ==
            gl2::count_quadratic_roots_bruteforce(ell, tt, dd))) {
        ++c.mismatches;
      }
    }
  }
  return c;
}

VerifyCase kernel_case(u64 ell) {
  VerifyCase c{"kernel_count", ell, 2};
  const u64 m = ell * ell;
  if (m > gl2::kDetTraceEnumerationBudget) {
    c.skipped = true;
    return c;
  }
  for (u64 d = 1; d < m; d += ell) {
    ++c.cases;
    if (gl2::kernel_count_check(ell, 2, static_cast<long long>(d)) != ell * ell * ell) {
      ++c.mismatches;
    }
  }
  return c;
}

VerifyCase zero_divisor_case(u64 ell) {
  VerifyCase c{"zero_divisor_pairs", ell, 2};
  c.cases = 1;
  if (gl2::zero_divisor_pairs(ell) != 3 * ell * ell - 2 * ell) c.mismatches = 1;
  return c;
}

VerifyCase card_A_case(u64 ell, unsigned n, int k1, int k2) {
  VerifyCase c{"card_A", ell, n, weights_text(k1, k2)};
  const u64 m = n == 1 ? ell : ell * ell;
  if (m > gl2::kImageEnumerationBudget) {
    c.skipped = true;
    return c;
  }
  c.cases = 1;
  if (gl2::card_A(ell, n, k1, k2) != gl2::card_A_bruteforce(ell, n, k1, k2)) c.mismatches = 1;
  return c;
}

VerifyCase card_C_case(u64 ell, unsigned n, int k1, int k2, gl2::TraceRelation rel) {
  VerifyCase c{rel == gl2::TraceRelation::Equal ? "card_C" : "card_C_negated", ell, n,
               weights_text(k1, k2)};
  const u64 m = n == 1 ? ell : ell * ell;
  if (m > gl2::kPairEnumerationBudget) {
    c.skipped = true;
    return c;
  }
  c.cases = 1;
  if (gl2::card_C(ell, n, k1, k2, rel) != gl2::card_C_bruteforce(ell, n, k1, k2, rel)) {
    c.mismatches = 1;
  }
  return c;
}

json sieve_params_json(const richert::SieveParams& p) {
  return json{{"alpha", p.alpha},
              {"u", p.u},
              {"v", p.v},
              {"lambda", p.lambda},
              {"valid", p.valid()},
              {"validity_report", p.validity_report()}};
}

std::vector<u64> parse_u64_list(const std::string& text, const char* what) {
  std::vector<u64> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw invalid_input(std::string(what) + ": expected comma-separated positive integers, got '" +
                          text + "'");
    }
    const u64 v = std::stoull(item);
    if (v == 0) throw invalid_input(std::string(what) + ": entries must be >= 1");
    out.push_back(v);
  }
  if (out.empty()) throw invalid_input(std::string(what) + ": empty list");
  return out;
}

// Configuration flags, attached to every leaf subcommand.
struct ConfigFlags {
  std::string config_file;
  std::string cache_dir;
  std::string n_terms_cap;
  std::string factor_timeout_secs;
  std::string threads;
  std::string seed;
  std::vector<std::array<CLI::Option*, 5>> opts;  // one set per leaf
  std::vector<CLI::Option*> config_opts;

  void attach(CLI::App* app) {
    config_opts.push_back(app->add_option("--config", config_file, "key=value configuration file"));
    opts.push_back({
        app->add_option("--cache-dir", cache_dir, "coefficient cache directory"),
        app->add_option("--n-terms-cap", n_terms_cap, "largest number of q-expansion terms allowed"),
        app->add_option("--factor-timeout-secs", factor_timeout_secs,
                        "time budget per factorization"),
        app->add_option("--threads", threads, "worker threads, integer or 'auto'"),
        app->add_option("--seed", seed, "seed for randomized steps"),
    });
  }

  CliConfig resolve(const EnvLookup& env) const {
    KeyValues flags;
    const std::string* values[] = {&cache_dir, &n_terms_cap, &factor_timeout_secs, &threads,
                                   &seed};
    for (const auto& set : opts) {
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i]->count() > 0) flags[config_keys()[i]] = *values[i];
      }
    }
    std::optional<std::filesystem::path> file;
    for (const auto* o : config_opts) {
      if (o->count() > 0) file = config_file;
    }
    return resolve_config(flags, env, file);
  }
};

class Runner {
 public:
  Runner(std::ostream& out, const EnvLookup& env) : out_(out), env_(env) {}

  int coeffs(int weight, std::size_t n, const std::string& format) const {
    const report::Format fmt = report::parse_format(format);
    if (!qexp::is_supported_weight(weight)) {
      throw invalid_input("unsupported weight " + std::to_string(weight) + "; supported: " +
                          qexp::supported_weights_text());
    }
    if (n < 2) throw invalid_input("--n must be >= 2");
    const CliConfig cfg = flags_.resolve(env_);
    const qexp::Eigenform f =
        cfg.cache_dir ? qexp::CoefficientCache(*cfg.cache_dir).get_or_compute(weight, n, cfg.n_terms_cap)
                      : qexp::eigenform(weight, n, cfg.n_terms_cap);
    if (fmt == report::Format::Csv) {
      out_ << "n,a\n";
      for (std::size_t i = 0; i < n; ++i) out_ << i << ',' << f.coefficient(i).get_str() << '\n';
    } else {
      json coeffs = json::array();
      for (std::size_t i = 0; i < n; ++i) coeffs.push_back(f.coefficient(i).get_str());
      out_ << report::dump(json{{"schema", "mflab.coeffs/1"},
                                {"weight", weight},
                                {"n_terms", std::to_string(n)},
                                {"coefficients", coeffs}});
    }
    return kExitOk;
  }

  int gl2_verify(u64 ell_max, unsigned n) const {
    flags_.resolve(env_);
    if (ell_max < 3) throw invalid_input("--ell-max must be >= 3");
    if (ell_max > 1000) throw invalid_input("--ell-max above 1000 is not supported");
    std::vector<unsigned> ns;
    if (n == 0) {
      ns = {1, 2};
    } else if (n == 1 || n == 2) {
      ns = {n};
    } else {
      throw invalid_input("--n must be 1 or 2");
    }
    const auto cases = gl2_verify_suite(ell_max, ns);
    json arr = json::array();
    bool pass = true;
    u64 skipped = 0;
    for (const auto& c : cases) {
      arr.push_back(to_json(c));
      pass = pass && c.pass();
      if (c.skipped) ++skipped;
    }
    out_ << report::dump(json{{"schema", "mflab.gl2verify/1"},
                              {"ell_max", std::to_string(ell_max)},
                              {"cases", arr},
                              {"skipped", std::to_string(skipped)},
                              {"pass", pass}});
    return pass ? kExitOk : kExitCheckFailed;
  }

  int gl2_delta(u64 ell, unsigned n, int k1, int k2, u64 sample) const {
    const CliConfig cfg = flags_.resolve(env_);
    const gl2::ImageCounts ic = gl2::image_counts(ell, n, k1, k2);
    json j{{"schema", "mflab.gl2delta/1"},
           {"ell", std::to_string(ell)},
           {"n", std::to_string(n)},
           {"k1", k1},
           {"k2", k2},
           {"modulus", std::to_string(ic.params.modulus)},
           {"lambda_n", std::to_string(ic.params.lambda_n)},
           {"Lambda_size", std::to_string(ic.params.Lambda_size)},
           {"card_A", ic.card_A.get_str()},
           {"card_C", ic.card_C.get_str()},
           {"delta", ic.delta.get_str()},
           {"delta_float", ic.delta.get_d()},
           {"sample", nullptr}};
    if (sample > 0) {
      const auto s = gl2::sample_trace_equal_frequency(ell, n, k1, k2, sample, cfg.seed);
      const double delta = ic.delta.get_d();
      const double sigma = std::sqrt(delta * (1 - delta) / static_cast<double>(s.trials));
      const double freq = s.frequency.get_d();
      j["sample"] = {{"trials", std::to_string(s.trials)},
                     {"hits", std::to_string(s.hits)},
                     {"seed", std::to_string(cfg.seed)},
                     {"frequency", freq},
                     {"sigma", sigma},
                     {"z", sigma > 0 ? (freq - delta) / sigma : 0.0}};
    }
    out_ << report::dump(j);
    return kExitOk;
  }

  int sieve_bounds(int k) const {
    flags_.resolve(env_);
    const richert::BoundSet b = richert::bounds(k);
    out_ << report::dump(json{
        {"schema", "mflab.sievebounds/1"},
        {"k", k},
        {"b_omega", std::to_string(b.b_omega)},
        {"b_omega_sqrtlog",
         b.b_omega_sqrtlog ? json(std::to_string(*b.b_omega_sqrtlog)) : json(nullptr)},
        {"b_big_omega", std::to_string(b.b_big_omega)},
        {"b_selberg_upper", std::to_string(b.b_selberg_upper)},
        {"b_joshi", std::to_string(b.b_joshi)}});
    return kExitOk;
  }

  int sieve_f(double k, bool variant) const {
    flags_.resolve(env_);
    const richert::Family fam = variant ? richert::Family::OmegaVariant : richert::Family::Main;
    const richert::SieveParams p = richert::params_for(fam, k);
    const double F = richert::F_value(p);
    json j{{"schema", "mflab.sievef/1"},
           {"family", richert::to_string(fam)},
           {"k", k},
           {"params", sieve_params_json(p)},
           {"F", F},
           {"positive", F > 0},
           {"threshold", richert::positivity_threshold(fam)},
           {"threshold_tolerance", 1e-3}};
    if (!variant) j["closed_form_F"] = richert::closed_form_F_main(k);
    out_ << report::dump(j);
    return kExitOk;
  }

  int experiment(const lab::ExperimentConfig& base, const std::string& h_list,
                 const std::string& ells, const std::string& out_path,
                 const std::string& format) const {
    const CliConfig cfg = flags_.resolve(env_);
    const report::Format fmt = report::parse_format(format);
    lab::ExperimentConfig ec = base;
    ec.options = cfg.lab_options();
    ec.options.sieve_floor = base.options.sieve_floor;
    ec.h_list = parse_u64_list(h_list, "--h-list");
    ec.delta_ells = parse_u64_list(ells, "--delta-ells");
    lab::require_weight_pair(ec.k1, ec.k2);
    if (ec.X + 1 > cfg.n_terms_cap) {
      throw invalid_input("--x " + std::to_string(ec.X) + " needs more terms than n_terms_cap = " +
                          std::to_string(cfg.n_terms_cap));
    }
    const lab::ExperimentReport rep = lab::run_experiment(ec);
    report::export_report(rep, fmt, out_path);

    json summary = report::to_json(rep);
    summary.erase("rows");
    summary.erase("timestamps");
    summary["out"] = out_path;
    out_ << report::dump(summary);

    const auto& t = rep.counts.tally;
    bool ok = t.satisfied_omega == t.considered && t.satisfied_big_omega == t.considered;
    for (const auto& c : rep.certificates) ok = ok && c.ok();
    return ok ? kExitOk : kExitCheckFailed;
  }

  int congruence(int k1, int k2, u64 primes, u64 confirm) const {
    const CliConfig cfg = flags_.resolve(env_);
    const lab::CongruenceReport rep =
        lab::congruence_search(k1, k2, primes, confirm, cfg.lab_options());
    out_ << report::dump(report::to_json(rep));
    return rep.omega_within_bound ? kExitOk : kExitCheckFailed;
  }

  ConfigFlags& flags() { return flags_; }

 private:
  std::ostream& out_;
  const EnvLookup& env_;
  ConfigFlags flags_;
};

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Io:
      return kExitInvalidInput;
    case ErrorKind::InvariantViolation:
    case ErrorKind::Incomplete:
      return kExitCheckFailed;
  }
  return kExitCheckFailed;
}

std::string error_line(const std::string& kind, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}}.dump();
}

json to_json(const VerifyCase& c) {
  return json{{"check", c.check},       {"ell", std::to_string(c.ell)},
              {"n", std::to_string(c.n)}, {"detail", c.detail},
              {"cases", std::to_string(c.cases)},
              {"mismatches", std::to_string(c.mismatches)},
              {"skipped", c.skipped},   {"pass", c.pass()}};
}

std::vector<VerifyCase> gl2_verify_suite(u64 ell_max, const std::vector<unsigned>& ns) {
  std::vector<VerifyCase> out;
  for (u64 ell : arith::primes_up_to(ell_max)) {
    if (ell == 2) continue;
    for (unsigned n : ns) {
      out.push_back(det_trace_case(ell, n));
      out.push_back(partition_case(ell, n));
      if (n == 2) {
        out.push_back(quadratic_roots_case(ell));
        out.push_back(kernel_case(ell));
        out.push_back(zero_divisor_case(ell));
      }
      for (const auto& [k1, k2] : kVerifyWeights) {
        out.push_back(card_A_case(ell, n, k1, k2));
        out.push_back(card_C_case(ell, n, k1, k2, gl2::TraceRelation::Equal));
        out.push_back(card_C_case(ell, n, k1, k2, gl2::TraceRelation::Negated));
      }
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  Runner runner(out, env);
  CLI::App app{"Coefficient differences of level-1 eigenforms: exact tables, image counts, "
               "sieve bounds."};
  app.name("mflab");
  app.require_subcommand(1);
  app.set_version_flag("--version", MFLAB_VERSION);

  int status = kExitOk;
  std::function<int()> action;

  // coeffs
  int c_weight = 0;
  std::size_t c_n = 0;
  std::string c_format = "csv";
  auto* coeffs = app.add_subcommand("coeffs", "q-expansion coefficients a(0..N-1)");
  coeffs->add_option("--weight", c_weight, "weight in {12,16,18,20,22,26}")->required();
  coeffs->add_option("--n", c_n, "number of coefficients")->required();
  coeffs->add_option("--format", c_format, "csv or json")->capture_default_str();
  runner.flags().attach(coeffs);
  coeffs->callback([&] { action = [&] { return runner.coeffs(c_weight, c_n, c_format); }; });

  // gl2
  auto* gl2 = app.add_subcommand("gl2", "counts in GL2(Z/l^n) and the product image");
  gl2->require_subcommand(1);
  u64 v_ell_max = 0;
  unsigned v_n = 0;
  auto* verify = gl2->add_subcommand("verify", "closed forms against exhaustive enumeration");
  verify->add_option("--ell-max", v_ell_max, "largest prime l")->required();
  verify->add_option("--n", v_n, "1 or 2 (both when omitted)");

  u64 d_ell = 0, d_sample = 0;
  unsigned d_n = 1;
  int d_k1 = 0, d_k2 = 0;
  auto* delta = gl2->add_subcommand("delta", "exact delta(l^n) and optional Monte-Carlo estimate");
  delta->add_option("--ell", d_ell, "odd prime l")->required();
  delta->add_option("--n", d_n, "exponent, 1 or 2")->required();
  delta->add_option("--k1", d_k1, "first weight")->required();
  delta->add_option("--k2", d_k2, "second weight")->required();
  delta->add_option("--sample", d_sample, "Monte-Carlo trials (0 = none)");

  // sieve
  auto* sieve = app.add_subcommand("sieve", "weighted sieve parameters and bounds");
  sieve->require_subcommand(1);
  int b_k = 0;
  auto* sbounds = sieve->add_subcommand("bounds", "omega and Omega bounds for weight k");
  sbounds->add_option("--k", b_k, "weight k >= 2")->required();
  double f_k = 0;
  bool f_variant = false;
  auto* sf = sieve->add_subcommand("f", "main-term function F and its positivity threshold");
  sf->add_option("--k", f_k, "real k > 1")->required();
  sf->add_flag("--variant", f_variant, "use the Omega parameter family");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "difference-table experiments");
  experiment->require_subcommand(1);
  lab::ExperimentConfig e_cfg;
  std::string e_sign = "minus", e_h = "2,3,4,6,12", e_ells = "3,5,7,11,13", e_out,
              e_format = "json";
  auto* erun = experiment->add_subcommand("run", "build the table for p <= X and write a report");
  erun->add_option("--k1", e_cfg.k1, "first weight")->required();
  erun->add_option("--k2", e_cfg.k2, "second weight")->required();
  erun->add_option("--x", e_cfg.X, "prime bound X")->required();
  erun->add_option("--sign", e_sign, "minus (a1 - a2) or plus (a1 + a2)")->capture_default_str();
  erun->add_option("--h-list", e_h, "moduli h for pi and pi*, comma separated")
      ->capture_default_str();
  erun->add_option("--delta-ells", e_ells, "primes l for the delta comparison")
      ->capture_default_str();
  erun->add_option("--sieve-floor", e_cfg.options.sieve_floor,
                   "sieving primes are those >= this value")
      ->capture_default_str();
  erun->add_option("--out", e_out, "report path")->required();
  erun->add_option("--format", e_format, "json or csv")->capture_default_str();

  // congruence
  int g_k1 = 0, g_k2 = 0;
  u64 g_primes = 0, g_confirm = 0;
  auto* cong = app.add_subcommand("congruence", "gcd of coefficient differences");
  cong->add_option("--k1", g_k1, "first weight")->required();
  cong->add_option("--k2", g_k2, "second weight")->required();
  cong->add_option("--primes", g_primes, "primes used for the gcd (>= 10)")->required();
  cong->add_option("--confirm", g_confirm, "further primes checked against D")->required();

  for (CLI::App* leaf : {verify, delta, sbounds, sf, erun, cong}) runner.flags().attach(leaf);
  verify->callback([&] { action = [&] { return runner.gl2_verify(v_ell_max, v_n); }; });
  delta->callback([&] {
    action = [&] { return runner.gl2_delta(d_ell, d_n, d_k1, d_k2, d_sample); };
  });
  sbounds->callback([&] { action = [&] { return runner.sieve_bounds(b_k); }; });
  sf->callback([&] { action = [&] { return runner.sieve_f(f_k, f_variant); }; });
  erun->callback([&] {
    action = [&] {
      e_cfg.sign = lab::parse_sign_mode(e_sign);
      return runner.experiment(e_cfg, e_h, e_ells, e_out, e_format);
    };
  });
  cong->callback([&] {
    action = [&] { return runner.congruence(g_k1, g_k2, g_primes, g_confirm); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_line("invalid_input", e.what()) << '\n';
    return kExitInvalidInput;
  }

  try {
    status = action ? action() : kExitInvalidInput;
  } catch (const Error& e) {
    err << error_line(to_string(e.kind()), e.what()) << '\n';
    status = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << error_line("internal", e.what()) << '\n';
    status = kExitCheckFailed;
  }
  return status;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace mflab::cli
