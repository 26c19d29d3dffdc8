#include "mflab/report_io.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mflab/error.hpp"

namespace mflab::report {

using lab::u64;

namespace {

std::string str(u64 v) { return std::to_string(v); }
std::string str(const mpz_class& v) { return v.get_str(); }

json optional_count(const std::optional<unsigned>& v) {
  return v ? json(std::to_string(*v)) : json(nullptr);
}

u64 parse_u64(const json& j, const char* key) {
  const std::string text = j.at(key).get<std::string>();
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw invalid_input(std::string("report field '") + key + "' is not a non-negative integer: " +
                        text);
  }
  return v;
}

mpz_class parse_mpz(const json& j, const char* key) {
  mpz_class v;
  if (v.set_str(j.at(key).get<std::string>(), 10) != 0) {
    throw invalid_input(std::string("report field '") + key + "' is not an integer");
  }
  return v;
}

u64 parse_key(const std::string& key) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(key, &used);
  if (used != key.size()) throw invalid_input("bad integer key '" + key + "'");
  return v;
}

std::map<u64, u64> count_map_from_json(const json& j) {
  std::map<u64, u64> out;
  for (const auto& [key, value] : j.items()) {
    out[parse_key(key)] = parse_u64(json{{"v", value}}, "v");
  }
  return out;
}

json count_map(const std::map<u64, u64>& m) {
  json out = json::object();
  for (const auto& [h, n] : m) out[str(h)] = str(n);
  return out;
}

lab::BoundTally tally_from_json(const json& j) {
  lab::BoundTally t;
  t.k = j.at("k").get<int>();
  t.b_omega = static_cast<long>(parse_u64(j, "b_omega"));
  t.b_big_omega = static_cast<long>(parse_u64(j, "b_big_omega"));
  t.considered = parse_u64(j, "considered");
  t.satisfied_omega = parse_u64(j, "satisfied_omega");
  t.satisfied_big_omega = parse_u64(j, "satisfied_big_omega");
  t.quarantined = parse_u64(j, "quarantined");
  t.max_omega = static_cast<unsigned>(parse_u64(j, "max_omega"));
  t.max_big_omega = static_cast<unsigned>(parse_u64(j, "max_big_omega"));
  for (const auto& [key, value] : count_map_from_json(j.at("omega_histogram"))) {
    t.omega_histogram[static_cast<unsigned>(key)] = value;
  }
  return t;
}

lab::DeltaComparisonRow delta_row_from_json(const json& j) {
  lab::DeltaComparisonRow r;
  r.ell = parse_u64(j, "ell");
  r.n = static_cast<unsigned>(parse_u64(j, "n"));
  r.modulus = parse_u64(j, "modulus");
  r.pi_h_count = parse_u64(j, "pi_h");
  r.pi_X = parse_u64(j, "pi_X");
  r.empirical = j.at("empirical").get<double>();
  r.delta_exact = mpq_class(j.at("delta_exact").get<std::string>());
  r.delta_exact.canonicalize();
  r.deviation = j.at("deviation").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.exceptional = j.at("exceptional").get<bool>();
  return r;
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  throw invalid_input("format must be json or csv, got '" + text + "'");
}

json to_json(const lab::PrimeRecord& r) {
  json j;
  j["p"] = str(r.p);
  j["a1"] = str(r.a1);
  j["a2"] = str(r.a2);
  j["d"] = str(r.d);
  j["omega"] = optional_count(r.omega);
  j["big_omega"] = optional_count(r.big_omega);
  j["factor_string"] = r.factorization ? r.factorization->to_string() : std::string();
  j["certified"] = r.factorization ? r.factorization->certified() : true;
  j["flags"] = lab::flag_names(r.flags);
  return j;
}

json to_json(const lab::BoundTally& t) {
  json hist = json::object();
  for (const auto& [w, n] : t.omega_histogram) hist[std::to_string(w)] = str(n);
  return json{{"k", t.k},
              {"b_omega", std::to_string(t.b_omega)},
              {"b_big_omega", std::to_string(t.b_big_omega)},
              {"considered", str(t.considered)},
              {"satisfied_omega", str(t.satisfied_omega)},
              {"satisfied_big_omega", str(t.satisfied_big_omega)},
              {"quarantined", str(t.quarantined)},
              {"max_omega", std::to_string(t.max_omega)},
              {"max_big_omega", std::to_string(t.max_big_omega)},
              {"omega_histogram", hist}};
}

json to_json(const lab::DeltaComparisonRow& row) {
  return json{{"ell", str(row.ell)},
              {"n", std::to_string(row.n)},
              {"modulus", str(row.modulus)},
              {"pi_h", str(row.pi_h_count)},
              {"pi_X", str(row.pi_X)},
              {"empirical", row.empirical},
              {"delta_exact", row.delta_exact.get_str()},
              {"delta", row.delta_exact.get_d()},
              {"deviation", row.deviation},
              {"threshold", row.threshold},
              {"exceptional", row.exceptional}};
}

json to_json(const lab::CertificateSummary& s) {
  json violations = json::array();
  for (const auto& v : s.violations) {
    violations.push_back({{"p", str(v.p)}, {"count", std::to_string(v.count)}, {"bound", v.bound}});
  }
  return json{{"mode", richert::to_string(s.mode)},
              {"k", s.k},
              {"X", s.X},
              {"sieve_floor", str(s.sieve_floor)},
              {"params",
               {{"alpha", s.params.alpha},
                {"u", s.params.u},
                {"v", s.params.v},
                {"lambda", s.params.lambda}}},
              {"chain_bound", s.chain_bound},
              {"W_total", s.W_total},
              {"considered", str(s.considered)},
              {"sifted_out", str(s.sifted_out)},
              {"positive", str(s.positive)},
              {"nonpositive", str(s.nonpositive)},
              {"squarefull_excluded", str(s.squarefull_excluded)},
              {"squarefull_census", str(s.squarefull_census)},
              {"with_small_nonmember", str(s.with_small_nonmember)},
              {"quarantined", str(s.quarantined)},
              {"violations", violations},
              {"ok", s.ok()}};
}

json to_json(const lab::ExperimentReport& rep) {
  json h_list = json::array();
  for (u64 h : rep.h_list) h_list.push_back(str(h));
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  json delta = json::array();
  for (const auto& d : rep.delta_comparison) delta.push_back(to_json(d));
  json certs = json::array();
  for (const auto& c : rep.certificates) certs.push_back(to_json(c));

  json j;
  j["schema"] = kExperimentSchema;
  j["tool_version"] = rep.tool_version;
  j["params"] = {{"k1", rep.k1},
                 {"k2", rep.k2},
                 {"k", rep.k},
                 {"X", str(rep.X)},
                 {"sign", lab::to_string(rep.sign)},
                 {"sieve_floor", str(rep.sieve_floor)},
                 {"seed", str(rep.seed)},
                 {"h_list", h_list}};
  j["counts"] = {{"primes_considered", str(rep.counts.primes_considered)},
                 {"zero_difference", str(rep.counts.zero_difference)},
                 {"quarantined", str(rep.counts.quarantined)},
                 {"pi_star", count_map(rep.counts.pi_star)},
                 {"pi_h", count_map(rep.counts.pi_h)},
                 {"bounds", to_json(rep.counts.tally)}};
  j["rows"] = rows;
  j["delta_comparison"] = delta;
  j["certificates"] = certs;
  j["timestamps"] = {{"started", rep.started_at}, {"finished", rep.finished_at}};
  return j;
}

json to_json(const lab::CongruenceReport& rep) {
  json j;
  j["schema"] = kCongruenceSchema;
  j["k1"] = rep.k1;
  j["k2"] = rep.k2;
  j["n_primes"] = str(rep.n_primes);
  j["confirm_primes"] = str(rep.confirm_primes);
  j["D"] = str(rep.D);
  j["congruence_detected"] = rep.congruence_detected();
  j["stable_since"] = str(rep.stable_since);
  j["factorization"] = rep.factorization ? json(rep.factorization->to_string()) : json(nullptr);
  j["unfactored"] = rep.unfactored.empty() ? json(nullptr) : json(rep.unfactored);
  j["omega_D"] = optional_count(rep.omega_D);
  j["b_omega"] = std::to_string(rep.b_omega);
  j["omega_within_bound"] = rep.omega_within_bound;
  j["confirm_checked"] = str(rep.confirm_checked);
  j["confirm_failures"] = str(rep.confirm_failures);
  j["first_failure"] = rep.first_failure ? json(str(*rep.first_failure)) : json(nullptr);
  j["confirmed"] = rep.confirmed;
  return j;
}

arith::Factorization parse_factor_string(const std::string& text) {
  arith::Factorization f;
  f.value = 1;
  if (text == "1") return f;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, '*')) {
    arith::PrimePower pp;
    const auto caret = part.find('^');
    const std::string base = part.substr(0, caret);
    if (base.empty() || pp.prime.set_str(base, 10) != 0 || pp.prime < 2) {
      throw invalid_input("bad factor string '" + text + "'");
    }
    pp.exponent = 1;
    if (caret != std::string::npos) {
      const std::string e = part.substr(caret + 1);
      if (e.empty() || e.find_first_not_of("0123456789") != std::string::npos) {
        throw invalid_input("bad factor string '" + text + "'");
      }
      pp.exponent = static_cast<unsigned>(std::stoul(e));
    }
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
    f.value *= power;
    f.factors.push_back(std::move(pp));
  }
  if (f.factors.empty()) throw invalid_input("bad factor string '" + text + "'");
  return f;
}

lab::PrimeRecord record_from_json(const json& j) {
  lab::PrimeRecord r;
  r.p = parse_u64(j, "p");
  r.a1 = parse_mpz(j, "a1");
  r.a2 = parse_mpz(j, "a2");
  r.d = parse_mpz(j, "d");
  if (!j.at("omega").is_null()) r.omega = static_cast<unsigned>(parse_u64(j, "omega"));
  if (!j.at("big_omega").is_null()) {
    r.big_omega = static_cast<unsigned>(parse_u64(j, "big_omega"));
  }
  for (const auto& name : j.at("flags")) r.flags |= lab::parse_flag(name.get<std::string>());
  const std::string fs = j.at("factor_string").get<std::string>();
  if (!fs.empty()) {
    r.factorization = parse_factor_string(fs);
    if (!j.value("certified", true)) {
      for (auto& pp : r.factorization->factors) pp.certified = false;
    }
  }
  return r;
}

lab::ExperimentReport experiment_from_json(const json& j) {
  if (j.value("schema", std::string()) != kExperimentSchema) {
    throw invalid_input(std::string("not a ") + kExperimentSchema + " document");
  }
  lab::ExperimentReport rep;
  rep.tool_version = j.at("tool_version").get<std::string>();
  const json& p = j.at("params");
  rep.k1 = p.at("k1").get<int>();
  rep.k2 = p.at("k2").get<int>();
  rep.k = p.at("k").get<int>();
  rep.X = parse_u64(p, "X");
  rep.sign = lab::parse_sign_mode(p.at("sign").get<std::string>());
  rep.sieve_floor = parse_u64(p, "sieve_floor");
  rep.seed = parse_u64(p, "seed");
  for (const auto& h : p.at("h_list")) rep.h_list.push_back(parse_u64(json{{"h", h}}, "h"));

  const json& c = j.at("counts");
  rep.counts.primes_considered = parse_u64(c, "primes_considered");
  rep.counts.zero_difference = parse_u64(c, "zero_difference");
  rep.counts.quarantined = parse_u64(c, "quarantined");
  rep.counts.pi_star = count_map_from_json(c.at("pi_star"));
  rep.counts.pi_h = count_map_from_json(c.at("pi_h"));
  rep.counts.tally = tally_from_json(c.at("bounds"));

  for (const auto& row : j.at("rows")) rep.rows.push_back(record_from_json(row));
  for (const auto& row : j.at("delta_comparison")) {
    rep.delta_comparison.push_back(delta_row_from_json(row));
  }
  const json& ts = j.at("timestamps");
  rep.started_at = ts.at("started").get<std::string>();
  rep.finished_at = ts.at("finished").get<std::string>();
  return rep;
}

std::string rows_csv(std::span<const lab::PrimeRecord> rows) {
  std::ostringstream out;
  out << "p,a1,a2,d,omega,big_omega,factor_string,flags\n";
  for (const auto& r : rows) {
    out << r.p << ',' << r.a1.get_str() << ',' << r.a2.get_str() << ',' << r.d.get_str() << ',';
    if (r.omega) out << *r.omega;
    out << ',';
    if (r.big_omega) out << *r.big_omega;
    out << ',';
    if (r.factorization) out << r.factorization->to_string();
    out << ',';
    const auto names = lab::flag_names(r.flags);
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "|" : "") << names[i];
    out << '\n';
  }
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing: " +
                                   std::strerror(errno));
  }
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void export_report(const lab::ExperimentReport& rep, Format format,
                   const std::filesystem::path& path) {
  write_text(path, format == Format::Json ? dump(to_json(rep)) : rows_csv(rep.rows));
}

lab::ExperimentReport import_report(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw invalid_input(path.string() + ": " + e.what());
  }
  try {
    return experiment_from_json(j);
  } catch (const json::exception& e) {
    throw invalid_input(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace mflab::report
