#include "pcf/sievedb.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace pcf {

namespace {

constexpr char kMagic[8] = {'P', 'C', 'F', 'S', 'V', 'D', 'B', '\0'};

/// FNV-1a over the payload, so truncated or corrupted files are rejected.
class Fnv64 {
 public:
  void update(const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 1099511628211ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <class T>
  void put(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
    hash_.update(buf, sizeof(T));
  }
  void raw(const char* data, std::size_t n) {
    out_.write(data, static_cast<std::streamsize>(n));
    hash_.update(data, n);
  }
  std::uint64_t digest() const { return hash_.value(); }

 private:
  std::ostream& out_;
  Fnv64 hash_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <class T>
  T get() {
    unsigned char buf[sizeof(T)];
    in_.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in_) throw DbFormatError("database file truncated");
    hash_.update(buf, sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
  }
  void raw(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (!in_) throw DbFormatError("database file truncated");
    hash_.update(data, n);
  }
  std::uint64_t digest() const { return hash_.value(); }

 private:
  std::istream& in_;
  Fnv64 hash_;
};

void check_normal_form(const NormalizedQuadMap& map) {
  const auto& f = map.f();
  const auto& g = map.g();
  // L * [2, b, b | -1, 4 - b, c] for some scalar L.
  if (f[1] != f[2] || 2 * g[0] != -f[0] || f[1] + g[1] != 2 * f[0] || f[0] == 0) {
    throw std::invalid_argument("map is not in the sigma normal form: " + map.to_string());
  }
}

/// Rationality of the critical points from the Wronskian discriminant alone.
bool critical_points_rational(const NormalizedQuadMap& map) {
  IntForm w = wronskian(map);
  if (w[0] == 0) return true;
  Integer disc = w[1] * w[1] - 4 * w[0] * w[2];
  return sgn(disc) >= 0 && mpz_perfect_square_p(disc.get_mpz_t());
}

bool critical_points_real(const NormalizedQuadMap& map) {
  IntForm w = wronskian(map);
  if (w[0] == 0) return true;
  Integer disc = w[1] * w[1] - 4 * w[0] * w[2];
  return sgn(disc) >= 0;
}

std::string running_to_string(const RunningPeriods& r) { return r ? r->to_string() : std::string("unset"); }

enum class Outcome { degenerate, filtered, survived };

struct OneResult {
  Outcome outcome;
  bool rational = false;
  std::optional<SieveCandidate> candidate;
};

OneResult test_sigma_pair(const Rational& sigma1, const Rational& sigma2, const std::vector<std::uint32_t>& primes,
                          const Database& db) {
  NormalizedQuadMap map = from_sigmas(sigma1, sigma2);
  Integer res = resultant(map);
  if (res == 0) return {Outcome::degenerate, false, std::nullopt};
  OneResult out{Outcome::filtered, critical_points_rational(map), std::nullopt};
  SieveCandidate cand{{sigma1, sigma2}, map, res, out.rational, {}, {}, false};
  if (out.rational) {
    auto crit = critical_points(map);
    auto check = check_rational_periods(map, crit.points[0], crit.points[1], primes, res, db);
    if (!check.survives) return out;
    cand.critical = {crit.points[0], crit.points[1]};
    cand.periods = {check.running[0], check.running[1]};
  } else {
    auto check = check_irrational_periods(map, primes, res, db);
    if (!check.survives) return out;
    if (critical_points_real(map)) {
      auto crit = critical_points(map);
      cand.critical = {crit.points[0], crit.points[1]};
    }
    cand.periods = {check.running};
    cand.no_modular_information = check.informative_primes == 0;
  }
  out.outcome = Outcome::survived;
  out.candidate = std::move(cand);
  return out;
}

template <class Fn>
void run_parallel(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

// ---------------------------------------------------------------------------
// Database

std::optional<PeriodSet> DbEntry::periods_for(FpPoint pt) const {
  for (std::size_t i = 0; i < count; ++i) {
    if (records[i].point == pt) return records[i].periods;
  }
  return std::nullopt;
}

Database::Database(std::vector<PrimeTable> tables) : tables_(std::move(tables)) {
  std::uint32_t max_p = 0;
  for (const auto& t : tables_) {
    primes_.push_back(t.p);
    max_p = std::max(max_p, t.p);
  }
  index_.assign(max_p + 1, -1);
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (index_[tables_[i].p] != -1) throw DbFormatError("duplicate prime " + std::to_string(tables_[i].p));
    index_[tables_[i].p] = static_cast<int>(i);
  }
}

bool Database::covers(std::uint32_t p) const { return p < index_.size() && index_[p] >= 0; }

void Database::require_covers(const std::vector<std::uint32_t>& primes) const {
  for (auto p : primes) {
    if (!covers(p)) throw UncoveredPrimeError(p);
  }
}

const PrimeTable& Database::table(std::uint32_t p) const {
  if (!covers(p)) throw UncoveredPrimeError(p);
  return tables_[static_cast<std::size_t>(index_[p])];
}

const DbEntry* Database::lookup(std::uint32_t p, std::uint32_t b, std::uint32_t c) const {
  const PrimeTable& t = table(p);
  if (b >= p || c >= p) throw std::out_of_range("lookup: key outside F_p");
  std::uint32_t key = b * p + c;
  auto it = std::lower_bound(t.keys.begin(), t.keys.end(), key);
  if (it == t.keys.end() || *it != key) return nullptr;
  return &t.entries[static_cast<std::size_t>(it - t.keys.begin())];
}

std::size_t Database::entry_count() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.entries.size();
  return n;
}

bool operator==(const Database& a, const Database& b) {
  if (a.primes_ != b.primes_) return false;
  for (std::size_t i = 0; i < a.tables_.size(); ++i) {
    const auto& x = a.tables_[i];
    const auto& y = b.tables_[i];
    if (x.keys != y.keys || x.entries.size() != y.entries.size()) return false;
    for (std::size_t j = 0; j < x.entries.size(); ++j) {
      const auto& ex = x.entries[j];
      const auto& ey = y.entries[j];
      if (ex.count != ey.count) return false;
      for (std::size_t k = 0; k < ex.count; ++k) {
        if (ex.records[k].point != ey.records[k].point || !(ex.records[k].periods == ey.records[k].periods)) return false;
      }
    }
  }
  return true;
}

void Database::write_binary(std::ostream& out) const {
  Writer w(out);
  w.raw(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(primes_.size()));
  for (auto p : primes_) w.put<std::uint32_t>(p);
  for (const auto& t : tables_) {
    w.put<std::uint32_t>(t.p);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.entries.size()));
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      w.put<std::uint16_t>(static_cast<std::uint16_t>(t.keys[i] / t.p));
      w.put<std::uint16_t>(static_cast<std::uint16_t>(t.keys[i] % t.p));
      const auto& e = t.entries[i];
      w.put<std::uint8_t>(e.count);
      for (std::size_t k = 0; k < e.count; ++k) {
        w.put<std::uint16_t>(static_cast<std::uint16_t>(e.records[k].point.index));
        const auto& ps = e.records[k].periods;
        w.put<std::uint8_t>(static_cast<std::uint8_t>(ps.size()));
        for (std::size_t j = 0; j < ps.size(); ++j) w.put<std::uint32_t>(ps[j]);
      }
    }
  }
  std::uint64_t digest = w.digest();
  Writer tail(out);
  tail.put<std::uint64_t>(digest);
  if (!out) throw DbIoError("failed writing database");
}

Database Database::read_binary(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw DbFormatError("not a sieve database (bad magic)");
  auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) throw DbFormatError("unsupported database version " + std::to_string(version));
  auto nprimes = r.get<std::uint32_t>();
  if (nprimes > 10000) throw DbFormatError("implausible prime count");
  std::vector<std::uint32_t> primes(nprimes);
  for (auto& p : primes) p = r.get<std::uint32_t>();
  std::vector<PrimeTable> tables;
  for (auto p : primes) {
    PrimeTable t;
    t.p = r.get<std::uint32_t>();
    if (t.p != p || p < 3 || p >= (1u << 16)) throw DbFormatError("prime block mismatch");
    auto n = r.get<std::uint32_t>();
    if (static_cast<std::uint64_t>(n) > static_cast<std::uint64_t>(p) * p) throw DbFormatError("implausible entry count");
    t.keys.reserve(n);
    t.entries.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto b = r.get<std::uint16_t>();
      auto c = r.get<std::uint16_t>();
      if (b >= p || c >= p) throw DbFormatError("key outside F_p");
      std::uint32_t key = static_cast<std::uint32_t>(b) * p + c;
      if (!t.keys.empty() && key <= t.keys.back()) throw DbFormatError("keys not strictly sorted");
      DbEntry e;
      e.count = r.get<std::uint8_t>();
      if (e.count < 1 || e.count > 2) throw DbFormatError("bad critical point count");
      for (std::size_t k = 0; k < e.count; ++k) {
        auto pt = r.get<std::uint16_t>();
        if (pt > p) throw DbFormatError("point outside P^1(F_p)");
        auto size = r.get<std::uint8_t>();
        if (size < 1 || size > 2) throw DbFormatError("bad period set size");
        std::uint32_t v0 = r.get<std::uint32_t>();
        std::uint32_t v1 = size == 2 ? r.get<std::uint32_t>() : 0;
        if (size == 2 && (v1 <= v0 || v1 % v0 != 0)) throw DbFormatError("bad period set");
        e.records[k] = {FpPoint{pt}, size == 2 ? PeriodSet(v0, v1 / v0) : PeriodSet(v0)};
      }
      t.keys.push_back(key);
      t.entries.push_back(e);
    }
    tables.push_back(std::move(t));
  }
  std::uint64_t expect = r.digest();
  Reader tail(in);
  if (tail.get<std::uint64_t>() != expect) throw DbFormatError("database checksum mismatch");
  return Database(std::move(tables));
}

void Database::save(const std::filesystem::path& path) const {
  // Write to a sibling file and rename, so a crashed build never leaves a
  // partial database under the final name.
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DbIoError("cannot open " + tmp.string() + " for writing");
    write_binary(out);
    out.flush();
    if (!out) throw DbIoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DbIoError("cannot move database into place: " + ec.message());
}

Database Database::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DbIoError("cannot open database " + path.string());
  return read_binary(in);
}

void Database::dump_text(std::ostream& out) const {
  out << "# pcf-sieve-db v" << kFormatVersion << " primes=";
  for (std::size_t i = 0; i < primes_.size(); ++i) out << (i ? "," : "") << primes_[i];
  out << '\n';
  for (const auto& t : tables_) {
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      out << t.p << ' ' << t.keys[i] / t.p << ' ' << t.keys[i] % t.p;
      const auto& e = t.entries[i];
      for (std::size_t k = 0; k < e.count; ++k) {
        out << ' ' << to_string(e.records[k].point, t.p) << e.records[k].periods.to_string();
      }
      out << '\n';
    }
  }
}

Database Database::parse_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DbFormatError("empty text dump");
  const std::string prefix = "# pcf-sieve-db v" + std::to_string(kFormatVersion) + " primes=";
  if (line.rfind(prefix, 0) != 0) throw DbFormatError("bad text dump header");
  std::vector<PrimeTable> tables;
  {
    std::stringstream ss(line.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
      PrimeTable t;
      t.p = static_cast<std::uint32_t>(std::stoul(item));
      tables.push_back(std::move(t));
    }
  }
  std::size_t cur = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::uint32_t p, b, c;
    if (!(ss >> p >> b >> c)) throw DbFormatError("bad text line: " + line);
    while (cur < tables.size() && tables[cur].p != p) ++cur;
    if (cur == tables.size()) throw DbFormatError("entry for unlisted or out-of-order prime: " + line);
    DbEntry e;
    std::string rec;
    while (ss >> rec) {
      if (e.count == 2) throw DbFormatError("too many critical points: " + line);
      auto brace = rec.find('{');
      if (brace == std::string::npos) throw DbFormatError("bad record: " + rec);
      std::string pt = rec.substr(0, brace);
      FpPoint point = pt == "inf" ? FpPoint::infinity(p) : FpPoint::finite(static_cast<std::uint32_t>(std::stoul(pt)));
      e.records[e.count++] = {point, PeriodSet::parse(rec.substr(brace))};
    }
    if (e.count == 0) throw DbFormatError("entry without critical points: " + line);
    tables[cur].keys.push_back(b * p + c);
    tables[cur].entries.push_back(e);
  }
  return Database(std::move(tables));
}

// ---------------------------------------------------------------------------
// Building

PrimeTable build_prime_table(std::uint32_t p) {
  if (p < 3 || p >= (1u << 16) || !is_prime(p)) throw std::invalid_argument("build_prime_table: bad prime " + std::to_string(p));
  OrbitWorkspace ws(p);
  PrimeTable t;
  t.p = p;
  for (std::uint32_t b = 0; b < p; ++b) {
    const std::uint32_t four_minus_b = (4 % p + p - b) % p;
    for (std::uint32_t c = 0; c < p; ++c) {
      FpMap map(FpMap::Unchecked{}, p, {2 % p, b, b}, {p - 1, four_minus_b, c});
      if (map.resultant() == 0) continue;
      auto crit = map.critical_points(ws);
      if (!crit) continue;
      DbEntry e;
      e.count = (*crit)[0] == (*crit)[1] ? 1 : 2;
      for (std::size_t k = 0; k < e.count; ++k) {
        OrbitData od = ws.orbit(map, (*crit)[k]);
        e.records[k] = {(*crit)[k], possible_periods(od)};
      }
      t.keys.push_back(b * p + c);
      t.entries.push_back(e);
    }
  }
  return t;
}

Database build_db(const std::vector<std::uint32_t>& primes, unsigned workers) {
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (primes[i] == primes[j]) throw std::invalid_argument("build_db: duplicate prime " + std::to_string(primes[i]));
    }
  }
  // Largest primes first so the slowest blocks start early; results are
  // stored by input position.
  std::vector<std::size_t> order(primes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return primes[a] > primes[b]; });
  std::vector<PrimeTable> tables(primes.size());
  run_parallel(order.size(), workers, [&](std::size_t i) { tables[order[i]] = build_prime_table(primes[order[i]]); });
  return Database(std::move(tables));
}

// ---------------------------------------------------------------------------
// Sieving

std::pair<std::uint32_t, std::uint32_t> db_key(const NormalizedQuadMap& map, std::uint32_t p) {
  auto f2 = static_cast<std::uint32_t>(mpz_fdiv_ui(map.f()[0].get_mpz_t(), p));
  if (f2 == 0) throw std::domain_error("db_key: leading coefficient vanishes mod p (bad reduction)");
  auto f1 = static_cast<std::uint64_t>(mpz_fdiv_ui(map.f()[1].get_mpz_t(), p));
  auto g0 = static_cast<std::uint64_t>(mpz_fdiv_ui(map.g()[2].get_mpz_t(), p));
  std::uint64_t scale = 2ULL * mod_inv(f2, p) % p;
  return {static_cast<std::uint32_t>(f1 * scale % p), static_cast<std::uint32_t>(g0 * scale % p)};
}

RationalCheck check_rational_periods(const NormalizedQuadMap& map, const Point& gamma1, const Point& gamma2,
                                     const std::vector<std::uint32_t>& primes, const Integer& res, const Database& db) {
  check_normal_form(map);
  if (res == 0) throw std::invalid_argument("check_rational_periods: zero resultant");
  if (gamma1.is_quadratic() || gamma2.is_quadratic()) throw std::invalid_argument("check_rational_periods: irrational critical point");
  RationalCheck out;
  const std::array<const Point*, 2> gammas = {&gamma1, &gamma2};
  for (auto p : primes) {
    if (mpz_fdiv_ui(res.get_mpz_t(), p) == 0) continue;
    ++out.good_primes;
    auto [b, c] = db_key(map, p);
    const DbEntry* entry = db.lookup(p, b, c);
    if (!entry) {
      throw DbInconsistencyError("no database entry at good prime " + std::to_string(p) + " for " + map.to_string());
    }
    for (std::size_t i = 0; i < 2; ++i) {
      FpPoint ci = reduce_point(*gammas[i], p);
      auto periods = entry->periods_for(ci);
      if (!periods) {
        throw DbInconsistencyError("reduced critical point " + to_string(ci, p) + " not stored at p = " + std::to_string(p));
      }
      out.running[i] = out.running[i] ? out.running[i]->intersect(*periods) : *periods;
      if (out.running[i]->empty()) {
        out.survives = false;
        return out;
      }
    }
  }
  return out;
}

IrrationalCheck check_irrational_periods(const NormalizedQuadMap& map, const std::vector<std::uint32_t>& primes,
                                         const Integer& res, const Database& db) {
  check_normal_form(map);
  if (res == 0) throw std::invalid_argument("check_irrational_periods: zero resultant");
  IrrationalCheck out;
  for (auto p : primes) {
    if (mpz_fdiv_ui(res.get_mpz_t(), p) == 0) continue;
    ++out.good_primes;
    auto [b, c] = db_key(map, p);
    const DbEntry* entry = db.lookup(p, b, c);
    if (!entry) continue;
    ++out.informative_primes;
    PeriodSet both = entry->records[0].periods;
    if (entry->count == 2) both = both.intersect(entry->records[1].periods);
    out.running = out.running ? out.running->intersect(both) : both;
    if (out.running->empty()) {
      out.survives = false;
      return out;
    }
  }
  return out;
}

std::optional<SieveCandidate> sieve_one(const Rational& sigma1, const Rational& sigma2,
                                        const std::vector<std::uint32_t>& primes, const Database& db) {
  db.require_covers(primes);
  return test_sigma_pair(sigma1, sigma2, primes, db).candidate;
}

std::vector<SieveCandidate> sieve(unsigned long h1, unsigned long h2, const std::vector<std::uint32_t>& primes,
                                  const Database& db, unsigned workers, SieveStats* stats) {
  if (h1 < 1 || h2 < 1) throw std::invalid_argument("sieve: height bounds must be positive");
  db.require_covers(primes);
  const auto s1 = enumerate_rationals(h1);
  const auto s2 = enumerate_rationals(h2);
  std::vector<std::vector<SieveCandidate>> per_row(s1.size());
  std::vector<SieveStats> row_stats(s1.size());
  run_parallel(s1.size(), workers, [&](std::size_t i) {
    SieveStats& st = row_stats[i];
    for (const auto& sigma2 : s2) {
      ++st.pairs;
      OneResult r = test_sigma_pair(s1[i], sigma2, primes, db);
      if (r.outcome == Outcome::degenerate) {
        ++st.degenerate;
        continue;
      }
      ++(r.rational ? st.rational_tested : st.irrational_tested);
      if (r.candidate) per_row[i].push_back(std::move(*r.candidate));
    }
  });
  std::vector<SieveCandidate> out;
  SieveStats total;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    for (auto& c : per_row[i]) out.push_back(std::move(c));
    total.pairs += row_stats[i].pairs;
    total.degenerate += row_stats[i].degenerate;
    total.rational_tested += row_stats[i].rational_tested;
    total.irrational_tested += row_stats[i].irrational_tested;
  }
  if (stats) *stats = total;
  return out;
}

std::string sieve_tsv_header() { return "sigma1\tsigma2\tmap\tresultant\tcritical\tperiods"; }

std::string SieveCandidate::to_tsv() const {
  std::string flag = rational_critical ? "rational" : (no_modular_information ? "irrational-no-modular-info" : "irrational");
  std::string per;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (i) per += ';';
    per += running_to_string(periods[i]);
  }
  return sigmas.sigma1.get_str() + '\t' + sigmas.sigma2.get_str() + '\t' + map.to_string() + '\t' + resultant.get_str() + '\t' +
         flag + '\t' + per;
}

}  // namespace pcf
