#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcf/exact_arith.hpp"
#include "pcf/ffdyn.hpp"
#include "pcf/projmap.hpp"

namespace pcf {

/// Error categories surfaced by the database and the sieve.
class DbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UncoveredPrimeError : public DbError {
 public:
  explicit UncoveredPrimeError(std::uint32_t p) : DbError("prime " + std::to_string(p) + " is not covered by the database"), prime(p) {}
  std::uint32_t prime;
};

class DbFormatError : public DbError {
 public:
  using DbError::DbError;
};

class DbIoError : public DbError {
 public:
  using DbError::DbError;
};

/// A good prime with rational critical points whose reduction is missing
/// from the database; contradicts how the database is built.
class DbInconsistencyError : public DbError {
 public:
  using DbError::DbError;
};

struct CriticalRecord {
  FpPoint point;
  PeriodSet periods;
};

/// Present only for degree-2 maps whose critical points are F_p-rational.
/// A double critical point is stored once.
struct DbEntry {
  std::uint8_t count = 0;
  std::array<CriticalRecord, 2> records{};

  /// Period set stored for `pt`, or nullopt if pt is not a stored critical point.
  std::optional<PeriodSet> periods_for(FpPoint pt) const;
};

/// Per-prime block: entries sorted by key b * p + c.
struct PrimeTable {
  std::uint32_t p = 0;
  std::vector<std::uint32_t> keys;
  std::vector<DbEntry> entries;
};

class Database {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  Database() = default;
  explicit Database(std::vector<PrimeTable> tables);

  /// Covered primes in build order.
  const std::vector<std::uint32_t>& primes() const { return primes_; }
  bool covers(std::uint32_t p) const;
  void require_covers(const std::vector<std::uint32_t>& primes) const;

  /// nullptr means ABSENT; throws UncoveredPrimeError for primes not built.
  const DbEntry* lookup(std::uint32_t p, std::uint32_t b, std::uint32_t c) const;

  const PrimeTable& table(std::uint32_t p) const;
  std::size_t entry_count() const;

  void save(const std::filesystem::path& path) const;
  static Database load(const std::filesystem::path& path);
  void write_binary(std::ostream& out) const;
  static Database read_binary(std::istream& in);
  /// Lossless text dump: one line per entry, "p b c pt{periods} [pt{periods}]".
  void dump_text(std::ostream& out) const;
  static Database parse_text(std::istream& in);

  friend bool operator==(const Database& a, const Database& b);

 private:
  std::vector<std::uint32_t> primes_;
  std::vector<PrimeTable> tables_;
  std::vector<int> index_;  // prime -> position in tables_, -1 if absent
};

/// Every (b, c) in F_p^2 for one prime.
PrimeTable build_prime_table(std::uint32_t p);

/// Parallel over primes, deterministic merge in input order.
Database build_db(const std::vector<std::uint32_t>& primes, unsigned workers = 1);

/// Running period set; nullopt is the not-yet-initialized state.
using RunningPeriods = std::optional<PeriodSet>;

struct RationalCheck {
  bool survives = true;
  std::array<RunningPeriods, 2> running;
  std::size_t good_primes = 0;
};

struct IrrationalCheck {
  bool survives = true;
  RunningPeriods running;
  std::size_t good_primes = 0;
  /// Good primes whose reduction was present in the database.
  std::size_t informative_primes = 0;
};

/// (b, c) key of the database form matching a good reduction of a
/// normal-form map.
std::pair<std::uint32_t, std::uint32_t> db_key(const NormalizedQuadMap& map, std::uint32_t p);

RationalCheck check_rational_periods(const NormalizedQuadMap& map, const Point& gamma1, const Point& gamma2,
                                     const std::vector<std::uint32_t>& primes, const Integer& res, const Database& db);

IrrationalCheck check_irrational_periods(const NormalizedQuadMap& map, const std::vector<std::uint32_t>& primes,
                                         const Integer& res, const Database& db);

struct SieveCandidate {
  SigmaPair sigmas;
  NormalizedQuadMap map;
  Integer resultant;
  bool rational_critical = false;
  /// Empty when the critical points are complex conjugates.
  std::vector<Point> critical;
  /// Two running sets for rational critical points, one shared set otherwise.
  std::vector<RunningPeriods> periods;
  /// Irrational candidate never present in the database at any good prime.
  bool no_modular_information = false;

  /// Tab-separated survivor line.
  std::string to_tsv() const;
};

struct SieveStats {
  std::uint64_t pairs = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t rational_tested = 0;
  std::uint64_t irrational_tested = 0;
};

std::vector<SieveCandidate> sieve(unsigned long h1, unsigned long h2, const std::vector<std::uint32_t>& primes,
                                  const Database& db, unsigned workers = 1, SieveStats* stats = nullptr);

/// Single candidate test used by sieve; nullopt when filtered or degenerate.
std::optional<SieveCandidate> sieve_one(const Rational& sigma1, const Rational& sigma2,
                                        const std::vector<std::uint32_t>& primes, const Database& db);

std::string sieve_tsv_header();

}  // namespace pcf
