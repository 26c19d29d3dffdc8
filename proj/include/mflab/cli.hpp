#pragma once

// The mflab command line.
//
//   mflab coeffs --weight K --n N [--format csv|json]
//   mflab gl2 verify --ell-max L [--n 1|2]
//   mflab gl2 delta --ell L --n N --k1 A --k2 B [--sample T] [--seed S]
//   mflab sieve bounds --k K
//   mflab sieve f --k K [--variant]
//   mflab experiment run --k1 A --k2 B --x X [--sign minus|plus] [--h-list 2,3,...] --out PATH
//   mflab congruence --k1 A --k2 B --primes N --confirm M
//
// Exit status 0 on success, 1 when a check fails, 2 for invalid input. Errors
// are reported as one JSON line on stderr.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mflab/config.hpp"
#include "mflab/error.hpp"

namespace mflab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidInput = 2;

int exit_code_for(ErrorKind kind) noexcept;

/// {"error":{"kind":...,"message":...}}
std::string error_line(const std::string& kind, const std::string& message);

struct VerifyCase {
  std::string check;
  std::uint64_t ell = 0;
  unsigned n = 0;
  std::string detail;  // weights or relation, when relevant
  std::uint64_t cases = 0;
  std::uint64_t mismatches = 0;
  bool skipped = false;  // beyond an enumeration budget

  bool pass() const noexcept { return skipped || mismatches == 0; }
};

/// Formula-vs-enumeration checks for every odd prime l <= ell_max and each n
/// in `ns`, within the enumeration budgets.
std::vector<VerifyCase> gl2_verify_suite(std::uint64_t ell_max, const std::vector<unsigned>& ns);

nlohmann::json to_json(const VerifyCase& c);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

int run(int argc, char** argv);

}  // namespace mflab::cli
