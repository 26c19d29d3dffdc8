#include "mflab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "mflab/error.hpp"
#include "mflab/report_io.hpp"

namespace mflab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value,
                             const std::string& source, std::uint64_t min_value) {
  const bool digits = !value.empty() && std::all_of(value.begin(), value.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
  std::uint64_t v = 0;
  bool ok = digits;
  if (digits) {
    try {
      v = std::stoull(value);
    } catch (const std::out_of_range&) {
      ok = false;
    }
  }
  if (!ok || v < min_value) {
    throw invalid_input("config key '" + key + "' (" + source + "): expected an integer >= " +
                        std::to_string(min_value) + ", got '" + value + "'");
  }
  return v;
}

}  // namespace

unsigned CliConfig::effective_threads() const {
  if (threads) return *threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

lab::LabOptions CliConfig::lab_options() const {
  lab::LabOptions o;
  o.cache_dir = cache_dir;
  o.terms_cap = n_terms_cap;
  o.threads = effective_threads();
  o.factor.timeout = std::chrono::seconds(factor_timeout_secs);
  o.factor.seed = seed;
  return o;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"cache_dir", "n_terms_cap",
                                                "factor_timeout_secs", "threads", "seed"};
  return keys;
}

std::string env_name(const std::string& key) {
  std::string out = "MFLAB_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

KeyValues parse_config_text(const std::string& text, const std::string& source) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw invalid_input(where + ": expected key = value, got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw invalid_input(where + ": unknown config key '" + key + "'");
    }
    out[key] = trim(body.substr(eq + 1));
  }
  return out;
}

void apply(CliConfig& cfg, const std::string& key, const std::string& value,
           const std::string& source) {
  if (key == "cache_dir") {
    if (value.empty()) {
      throw invalid_input("config key 'cache_dir' (" + source + "): empty path");
    }
    cfg.cache_dir = std::filesystem::path(value);
  } else if (key == "n_terms_cap") {
    cfg.n_terms_cap = static_cast<std::size_t>(parse_unsigned(key, value, source, 2));
  } else if (key == "factor_timeout_secs") {
    const auto v = parse_unsigned(key, value, source, 1);
    if (v > 86400) {
      throw invalid_input("config key 'factor_timeout_secs' (" + source +
                          "): at most 86400, got " + value);
    }
    cfg.factor_timeout_secs = static_cast<unsigned>(v);
  } else if (key == "threads") {
    if (value == "auto") {
      cfg.threads.reset();
    } else {
      const auto v = parse_unsigned(key, value, source, 1);
      if (v > 1024) {
        throw invalid_input("config key 'threads' (" + source + "): at most 1024, got " + value);
      }
      cfg.threads = static_cast<unsigned>(v);
    }
  } else if (key == "seed") {
    cfg.seed = parse_unsigned(key, value, source, 0);
  } else {
    throw invalid_input("unknown config key '" + key + "' (" + source + ")");
  }
}

CliConfig resolve_config(const KeyValues& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file) {
  CliConfig cfg;
  std::optional<std::filesystem::path> file = config_file;
  if (!file) {
    if (auto v = env("MFLAB_CONFIG"); v && !v->empty()) file = *v;
  }
  if (file) {
    const std::string source = file->string();
    for (const auto& [key, value] : parse_config_text(report::read_text(*file), source)) {
      apply(cfg, key, value, source);
    }
  }
  for (const auto& key : config_keys()) {
    const std::string name = env_name(key);
    if (auto v = env(name)) apply(cfg, key, *v, "environment " + name);
  }
  for (const auto& [key, value] : flags) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    apply(cfg, key, value, "flag --" + flag);
  }
  return cfg;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

}  // namespace mflab::cli
