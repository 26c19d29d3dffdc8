#pragma once

// Report serialization.
//
// JSON layout (schema "mflab.experiment/1"):
//
//   schema, tool_version,
//   params      {k1, k2, k, X, sign, sieve_floor, seed, h_list}
//   counts      {primes_considered, zero_difference, quarantined,
//                pi_star{h: n}, pi_h{h: n}, bounds{...}}
//   rows        [{p, a1, a2, d, omega, big_omega, factor_string, certified, flags[]}]
//   delta_comparison, certificates
//   timestamps  {started, finished}
//
// Every exact integer is written as a decimal string; omega/big_omega are
// null for quarantined rows. Reals are JSON numbers. "timestamps" is the only
// field that differs between identical runs.
//
// CSV columns: p,a1,a2,d,omega,big_omega,factor_string,flags (flags joined
// with '|').

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mflab/lab.hpp"

namespace mflab::report {

inline constexpr const char* kExperimentSchema = "mflab.experiment/1";
inline constexpr const char* kCongruenceSchema = "mflab.congruence/1";

using nlohmann::json;

enum class Format { Json, Csv };

Format parse_format(const std::string& text);

json to_json(const lab::PrimeRecord& r);
json to_json(const lab::BoundTally& t);
json to_json(const lab::DeltaComparisonRow& row);
json to_json(const lab::CertificateSummary& s);
json to_json(const lab::ExperimentReport& rep);
json to_json(const lab::CongruenceReport& rep);

lab::PrimeRecord record_from_json(const json& j);
lab::ExperimentReport experiment_from_json(const json& j);

/// Inverse of Factorization::to_string ("2^4*3*5", "1").
arith::Factorization parse_factor_string(const std::string& text);

std::string rows_csv(std::span<const lab::PrimeRecord> rows);

/// Pretty JSON with a trailing newline.
std::string dump(const json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void export_report(const lab::ExperimentReport& rep, Format format,
                   const std::filesystem::path& path);
/// Reads a JSON report back. Counts are taken from the file as written.
lab::ExperimentReport import_report(const std::filesystem::path& path);

}  // namespace mflab::report
