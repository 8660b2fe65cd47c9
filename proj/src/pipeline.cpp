#include "pcf/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace pcf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

unsigned long parse_ulong(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    unsigned long out = std::stoul(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": expected a non-negative integer, got '" + v + "'");
  }
}

Integer parse_integer(const std::string& key, const std::string& v) {
  Integer out;
  if (out.set_str(v, 10) != 0) throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
  return out;
}

std::string join(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::vector<std::uint32_t> parse_prime_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<std::uint32_t>(parse_ulong("primes", item)));
  }
  return out;
}

std::vector<std::uint32_t> RunConfig::resolved_primes() const {
  return primes.empty() ? first_odd_primes(prime_count) : primes;
}

unsigned RunConfig::resolved_workers() const {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

VerifyOptions RunConfig::verify_options() const { return {verify_budget, verify_cutoff}; }

PreperOptions RunConfig::preper_options() const { return {preper_height, preper_steps, preper_cutoff}; }

void RunConfig::validate() const {
  if (h1 < 1 || h2 < 1) throw ConfigError("height bounds must be at least 1");
  if (verify_budget < 1) throw ConfigError("verifier budget must be at least 1");
  if (primes.empty() && prime_count < 1) throw ConfigError("prime count must be at least 1");
  std::set<std::uint32_t> seen;
  for (auto p : primes) {
    if (p < 3 || p >= (1u << 16) || !is_prime(p)) throw ConfigError("not an odd prime below 65536: " + std::to_string(p));
    if (!seen.insert(p).second) throw ConfigError("duplicate prime " + std::to_string(p));
  }
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"h1", std::to_string(h1)},
      {"h2", std::to_string(h2)},
      {"primes", join(resolved_primes())},
      {"verify_budget", std::to_string(verify_budget)},
      {"verify_cutoff", verify_cutoff.get_str()},
      {"preper_height", std::to_string(preper_height)},
      {"preper_steps", std::to_string(preper_steps)},
      {"preper_cutoff", preper_cutoff.get_str()},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::digest() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::stringstream in(text);
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "pcf-config v1") throw ConfigError("config must start with 'pcf-config v1'");
      header = true;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "primes") cfg.primes = parse_prime_list(value);
    else if (key == "prime_count") cfg.prime_count = parse_ulong(key, value);
    else if (key == "h1") cfg.h1 = parse_ulong(key, value);
    else if (key == "h2") cfg.h2 = parse_ulong(key, value);
    else if (key == "verify_budget") cfg.verify_budget = parse_ulong(key, value);
    else if (key == "verify_cutoff") cfg.verify_cutoff = parse_integer(key, value);
    else if (key == "preper_height") cfg.preper_height = parse_ulong(key, value);
    else if (key == "preper_steps") cfg.preper_steps = parse_ulong(key, value);
    else if (key == "preper_cutoff") cfg.preper_cutoff = parse_integer(key, value);
    else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_ulong(key, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "db") cfg.db_path = value;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (!header) throw ConfigError("config must start with 'pcf-config v1'");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::size_t PipelineResult::verified_count() const {
  return static_cast<std::size_t>(std::count_if(statuses.begin(), statuses.end(), [](const PcfStatus& s) { return s.verified(); }));
}

PipelineResult run_pipeline(const RunConfig& cfg, const Database& db) {
  cfg.validate();
  PipelineResult out;
  out.survivors = sieve(cfg.h1, cfg.h2, cfg.resolved_primes(), db, cfg.resolved_workers(), &out.stats);
  for (const auto& c : out.survivors) out.statuses.push_back(critical_orbit_portrait(c.map, cfg.verify_options()));
  return out;
}

std::string pipeline_tsv(const PipelineResult& result, const RunConfig& cfg) {
  std::string out = "# config " + cfg.digest() + "\n" + sieve_tsv_header() + "\tstatus\n";
  for (std::size_t i = 0; i < result.survivors.size(); ++i) {
    const auto& st = result.statuses[i];
    out += result.survivors[i].to_tsv() + "\t" + (st.verified() ? "VERIFIED_PCF" : "UNDETERMINED") + "\n";
  }
  return out;
}

std::string pipeline_json(const PipelineResult& result, const RunConfig& cfg) {
  using json = nlohmann::ordered_json;
  json j;
  j["config_digest"] = cfg.digest();
  j["h1"] = cfg.h1;
  j["h2"] = cfg.h2;
  j["prime_count"] = cfg.resolved_primes().size();
  j["pairs_examined"] = result.stats.pairs;
  j["degenerate"] = result.stats.degenerate;
  j["survivors"] = result.survivors.size();
  j["verified"] = result.verified_count();
  j["undetermined"] = result.survivors.size() - result.verified_count();
  json maps = json::array();
  for (std::size_t i = 0; i < result.survivors.size(); ++i) {
    const auto& c = result.survivors[i];
    const auto& st = result.statuses[i];
    json m;
    m["sigma1"] = c.sigmas.sigma1.get_str();
    m["sigma2"] = c.sigmas.sigma2.get_str();
    m["map"] = c.map.to_string();
    m["affine"] = c.map.to_affine_string();
    m["status"] = st.verified() ? "VERIFIED_PCF" : "UNDETERMINED";
    if (st.verified()) {
      json edges = json::array();
      for (const auto& e : st.portrait->edges()) edges.push_back({e.from.to_string(), e.to.to_string(), e.ramification});
      m["portrait"] = edges;
    } else {
      m["reason"] = st.reason;
    }
    maps.push_back(m);
  }
  j["maps"] = maps;
  return j.dump(2) + "\n";
}

}  // namespace pcf
