#pragma once

// Runtime configuration for the command-line tool.
//
// Keys, their environment variables and defaults:
//
//   cache_dir            MFLAB_CACHE_DIR            (unset: no disk cache)
//   n_terms_cap          MFLAB_N_TERMS_CAP          100000
//   factor_timeout_secs  MFLAB_FACTOR_TIMEOUT_SECS  10
//   threads              MFLAB_THREADS              auto
//   seed                 MFLAB_SEED                 469869814114
//
// Precedence: command-line flags, then environment, then the key=value file
// named by --config or MFLAB_CONFIG, then defaults.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "mflab/lab.hpp"

namespace mflab::cli {

struct CliConfig {
  std::optional<std::filesystem::path> cache_dir;
  std::size_t n_terms_cap = qexp::kDefaultTermsCap;
  unsigned factor_timeout_secs = 10;
  std::optional<unsigned> threads;  // empty = auto
  std::uint64_t seed = arith::FactorOptions{}.seed;

  unsigned effective_threads() const;
  lab::LabOptions lab_options() const;
};

using KeyValues = std::map<std::string, std::string>;
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// The known configuration keys in documentation order.
const std::vector<std::string>& config_keys();

/// Environment variable for a key: MFLAB_ + upper-cased key.
std::string env_name(const std::string& key);

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
/// Unknown keys and malformed lines are rejected with the line number.
KeyValues parse_config_text(const std::string& text, const std::string& source);

/// Validates and stores one value. Errors name the key and the source.
void apply(CliConfig& cfg, const std::string& key, const std::string& value,
           const std::string& source);

/// Layers file < environment < flags on top of the defaults.
CliConfig resolve_config(const KeyValues& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file);

EnvLookup process_env();

}  // namespace mflab::cli
