#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcf/pcfverify.hpp"
#include "pcf/preper.hpp"
#include "pcf/sievedb.hpp"

namespace pcf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  /// Explicit primes win over prime_count when non-empty.
  std::vector<std::uint32_t> primes;
  std::size_t prime_count = 130;
  unsigned long h1 = 10;
  unsigned long h2 = 20;
  std::size_t verify_budget = 64;
  Integer verify_cutoff = 1000000;
  unsigned long preper_height = 16;
  std::size_t preper_steps = 32;
  Integer preper_cutoff = 10000;
  /// 0 means one worker per hardware thread.
  unsigned workers = 1;
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> db_path;

  std::vector<std::uint32_t> resolved_primes() const;
  unsigned resolved_workers() const;
  VerifyOptions verify_options() const;
  PreperOptions preper_options() const;

  /// Throws ConfigError on violated invariants (heights >= 1, odd distinct primes).
  void validate() const;

  /// Output-affecting settings as sorted "key=value" lines. Worker count and
  /// paths are excluded since they never change results.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string digest() const;
};

/// "pcf-config v1" followed by "key = value" lines; '#' starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
std::vector<std::uint32_t> parse_prime_list(const std::string& text);

struct PipelineResult {
  std::vector<SieveCandidate> survivors;
  std::vector<PcfStatus> statuses;
  SieveStats stats;

  std::size_t verified_count() const;
};

PipelineResult run_pipeline(const RunConfig& cfg, const Database& db);

/// Survivor TSV with a leading "# config <digest>" line and a trailing status column.
std::string pipeline_tsv(const PipelineResult& result, const RunConfig& cfg);
/// JSON summary with stable key order.
std::string pipeline_json(const PipelineResult& result, const RunConfig& cfg);

}  // namespace pcf
