#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcf/sievedb.hpp"

namespace pcf {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;

  /// "PASS [n] title: detail" or "FAIL [n] ...".
  std::string line() const;
};

struct AcceptanceOptions {
  unsigned workers = 1;
  /// Prebuilt database covering every odd prime up to 750; built in memory
  /// when absent.
  std::optional<std::filesystem::path> db_path;
  /// Progress messages.
  std::ostream* log = nullptr;
};

/// Primes used by the local-global suite; a superset of the first 130 odd primes.
std::vector<std::uint32_t> acceptance_primes();

/// All eight criteria in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// Individual criteria, for callers that already hold a database.
CriterionResult check_classification(const Database& db, unsigned workers);
CriterionResult check_sub_bounds(const Database& db, unsigned workers);
CriterionResult check_portraits();
CriterionResult check_preperiodic_graphs();
CriterionResult check_symmetry_locus();
CriterionResult check_root_of_unity_catalogs();
CriterionResult check_local_global(const Database& db);
CriterionResult check_oracle_equivalence(const Database& db, unsigned workers);

}  // namespace pcf
