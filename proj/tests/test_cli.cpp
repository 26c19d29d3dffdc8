#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "mflab/cli.hpp"
#include "mflab/report_io.hpp"

using namespace mflab;
using namespace mflab::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args, const KeyValues& env = {}) {
  std::ostringstream out, err;
  const EnvLookup lookup = [env](const std::string& name) -> std::optional<std::string> {
    const auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  const int code = run(args, out, err, lookup);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("mflab_cli_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("sieve bounds") {
  const auto r = invoke({"sieve", "bounds", "--k", "2"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("b_omega") == "15");
  CHECK(j.at("b_big_omega") == "27");
  CHECK(j.at("b_omega_sqrtlog").is_null());
  CHECK(invoke({"sieve", "bounds", "--k", "1"}).code == 2);
}

TEST_CASE("sieve f") {
  const auto r = invoke({"sieve", "f", "--k", "12"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("positive") == true);
  CHECK(j.at("threshold").get<double>() > 1.70);
  const auto v = invoke({"sieve", "f", "--k", "1.003", "--variant"});
  CHECK(v.code == 0);
  CHECK(nlohmann::json::parse(v.out).at("positive") == false);
  CHECK(invoke({"sieve", "f", "--k", "1"}).code == 2);
}

TEST_CASE("coeffs") {
  const auto r = invoke({"coeffs", "--weight", "12", "--n", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "n,a\n0,0\n1,1\n2,-24\n3,252\n");
  const auto j = invoke({"coeffs", "--weight", "16", "--n", "3", "--format", "json"});
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).at("coefficients") ==
        nlohmann::json::array({"0", "1", "216"}));

  const auto bad = invoke({"coeffs", "--weight", "11", "--n", "10"});
  CHECK(bad.code == 2);
  const auto e = nlohmann::json::parse(bad.err);
  CHECK(e.at("error").at("kind") == "invalid_input");
  CHECK(invoke({"coeffs", "--weight", "12", "--n", "10", "--format", "xml"}).code == 2);
  CHECK(invoke({"coeffs", "--weight", "12", "--n", "500", "--n-terms-cap", "100"}).code == 2);
}

TEST_CASE("coeffs through the disk cache") {
  const auto dir = scratch_dir("cache");
  const auto a = invoke({"coeffs", "--weight", "18", "--n", "30", "--cache-dir", dir.string()});
  CHECK(a.code == 0);
  CHECK(std::filesystem::exists(dir / "f18_30.qexp"));
  const auto b = invoke({"coeffs", "--weight", "18", "--n", "30"},
                        {{"MFLAB_CACHE_DIR", dir.string()}});
  CHECK(b.out == a.out);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gl2 verify and delta") {
  const auto r = invoke({"gl2", "verify", "--ell-max", "7", "--n", "1"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("pass") == true);
  CHECK(invoke({"gl2", "verify", "--ell-max", "5", "--n", "3"}).code == 2);

  const auto d = invoke({"gl2", "delta", "--ell", "5", "--n", "1", "--k1", "12", "--k2", "16",
                         "--sample", "2000", "--seed", "3"});
  CHECK(d.code == 0);
  const auto j = nlohmann::json::parse(d.out);
  CHECK(j.at("delta") == "119/576");
  CHECK(j.at("card_A") == "57600");
  CHECK(j.at("sample").at("trials") == "2000");
  const auto d2 = invoke({"gl2", "delta", "--ell", "5", "--n", "1", "--k1", "12", "--k2", "16",
                          "--sample", "2000", "--seed", "3"});
  CHECK(d2.out == d.out);
  CHECK(invoke({"gl2", "delta", "--ell", "4", "--n", "1", "--k1", "12", "--k2", "16"}).code == 2);
}

TEST_CASE("help lists every flag") {
  const std::vector<std::vector<std::string>> cmds = {
      {"coeffs"},       {"gl2", "verify"},      {"gl2", "delta"}, {"sieve", "bounds"},
      {"sieve", "f"},   {"experiment", "run"},  {"congruence"}};
  for (auto cmd : cmds) {
    cmd.push_back("--help");
    const auto r = invoke(cmd);
    CHECK(r.code == 0);
    for (const char* flag : {"--config", "--cache-dir", "--n-terms-cap", "--factor-timeout-secs",
                             "--threads", "--seed"}) {
      CHECK(r.out.find(flag) != std::string::npos);
    }
  }
  CHECK(invoke({"experiment", "run", "--help"}).out.find("--h-list") != std::string::npos);
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"coeffs", "--weight", "12", "--n", "4", "--bogus"}).code == 2);
}

TEST_CASE("configuration precedence and validation") {
  const auto dir = scratch_dir("config");
  const auto file = dir / "mflab.conf";
  report::write_text(file, "# comment\nseed = 5\nthreads = 2\nn_terms_cap=5000\n");
  KeyValues env = {{"MFLAB_SEED", "6"}};
  const EnvLookup lookup = [&env](const std::string& name) -> std::optional<std::string> {
    const auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };

  auto cfg = resolve_config({}, lookup, file);
  CHECK(cfg.seed == 6);
  CHECK(cfg.threads == 2U);
  CHECK(cfg.n_terms_cap == 5000);
  cfg = resolve_config({{"seed", "7"}}, lookup, file);
  CHECK(cfg.seed == 7);
  env.erase("MFLAB_SEED");
  CHECK(resolve_config({}, lookup, file).seed == 5);
  env["MFLAB_CONFIG"] = file.string();
  CHECK(resolve_config({}, lookup, std::nullopt).n_terms_cap == 5000);
  env.clear();
  const auto defaults = resolve_config({}, lookup, std::nullopt);
  CHECK_FALSE(defaults.threads.has_value());
  CHECK(defaults.factor_timeout_secs == 10);
  CHECK_FALSE(defaults.cache_dir.has_value());

  auto message_of = [&](const KeyValues& flags) {
    try {
      resolve_config(flags, lookup, std::nullopt);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidInput);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of({{"threads", "0"}}).find("threads") != std::string::npos);
  CHECK(message_of({{"threads", "many"}}).find("threads") != std::string::npos);
  CHECK(message_of({{"seed", "-1"}}).find("seed") != std::string::npos);
  CHECK(message_of({{"factor_timeout_secs", "0"}}).find("factor_timeout_secs") !=
        std::string::npos);
  CHECK(message_of({{"n_terms_cap", "1"}}).find("n_terms_cap") != std::string::npos);

  report::write_text(dir / "bad.conf", "colour = blue\n");
  try {
    resolve_config({}, lookup, dir / "bad.conf");
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  const auto r = invoke({"sieve", "bounds", "--k", "2", "--threads", "zero"});
  CHECK(r.code == 2);
  CHECK(r.err.find("threads") != std::string::npos);
  const auto envbad = invoke({"sieve", "bounds", "--k", "2"}, {{"MFLAB_N_TERMS_CAP", "x"}});
  CHECK(envbad.code == 2);
  CHECK(envbad.err.find("MFLAB_N_TERMS_CAP") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment run is deterministic apart from timestamps") {
  const auto dir = scratch_dir("experiment");
  const auto a = dir / "a.json";
  const auto b = dir / "b.json";
  const auto r1 = invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "400",
                          "--out", a.string(), "--threads", "1"});
  const auto r2 = invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "400",
                          "--out", b.string(), "--threads", "4"});
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  auto ja = nlohmann::json::parse(report::read_text(a));
  auto jb = nlohmann::json::parse(report::read_text(b));
  CHECK(ja.at("timestamps").contains("started"));
  ja.erase("timestamps");
  jb.erase("timestamps");
  CHECK(ja.dump() == jb.dump());
  CHECK(nlohmann::json::parse(r1.out).at("out") == a.string());

  const auto csv = invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "10",
                           "--out", (dir / "t.csv").string(), "--format", "csv"});
  CHECK(csv.code == 0);
  const auto text = report::read_text(dir / "t.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);

  CHECK(invoke({"experiment", "run", "--k1", "12", "--k2", "12", "--x", "10", "--out",
                (dir / "x.json").string()})
            .code == 2);
  CHECK(invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "10", "--sign", "times",
                "--out", (dir / "x.json").string()})
            .code == 2);
  CHECK(invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "10", "--h-list", "2,,3",
                "--out", (dir / "x.json").string()})
            .code == 2);
  CHECK(invoke({"experiment", "run", "--k1", "12", "--k2", "16", "--x", "10", "--out",
                (dir / "no" / "such" / "x.json").string()})
            .code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("congruence") {
  const auto r = invoke({"congruence", "--k1", "12", "--k2", "16", "--primes", "30",
                         "--confirm", "20"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("confirmed") == true);
  CHECK(invoke({"congruence", "--k1", "12", "--k2", "16", "--primes", "5", "--confirm", "5"})
            .code == 2);
}
