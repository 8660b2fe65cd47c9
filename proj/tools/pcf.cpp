// Command-line front end: database builds, sieving, verification and the
// preperiodic catalogs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcf/acceptance.hpp"
#include "pcf/pcfverify.hpp"
#include "pcf/pipeline.hpp"
#include "pcf/preper.hpp"
#include "pcf/sievedb.hpp"

namespace fs = std::filesystem;
using namespace pcf;

namespace {

enum Exit { ok = 0, other = 1, usage = 2, missing_db = 3, uncovered = 4, io = 5, failed = 6 };

struct CliError : std::runtime_error {
  CliError(int code, std::string category, const std::string& msg)
      : std::runtime_error(msg), code(code), category(std::move(category)) {}
  int code;
  std::string category;
};

/// Shared flags; each is applied over the config file only when given.
struct Common {
  std::string config_path;
  std::size_t prime_count = 0;
  std::string prime_list;
  unsigned long h1 = 0, h2 = 0;
  std::size_t budget = 0;
  std::string cutoff;
  unsigned long preper_height = 0;
  std::size_t preper_steps = 0;
  std::string preper_cutoff;
  unsigned workers = 1;
  std::string out_dir;
  std::string db;

  CLI::App* app = nullptr;
};

void add_prime_flags(CLI::App* sub, Common& c) {
  sub->add_option("--primes", c.prime_count, "Use the first N odd primes");
  sub->add_option("--prime-list", c.prime_list, "Explicit comma-separated odd primes");
}

void add_height_flags(CLI::App* sub, Common& c) {
  sub->add_option("--h1", c.h1, "Height bound for sigma1");
  sub->add_option("--h2", c.h2, "Height bound for sigma2");
}

void add_verify_flags(CLI::App* sub, Common& c) {
  sub->add_option("--budget", c.budget, "Verifier iteration budget per critical orbit");
  sub->add_option("--cutoff", c.cutoff, "Verifier height cutoff");
}

void add_preper_flags(CLI::App* sub, Common& c) {
  sub->add_option("--height", c.preper_height, "Search every rational of height <= B");
  sub->add_option("--steps", c.preper_steps, "Iteration budget per candidate");
  sub->add_option("--preper-cutoff", c.preper_cutoff, "Height at which an orbit counts as wandering");
}

bool given(CLI::App* sub, const std::string& name) {
  try {
    return sub->get_option(name)->count() > 0;
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
}

RunConfig make_config(CLI::App* sub, const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg = load_config(c.config_path);
  if (given(sub, "--primes")) {
    cfg.prime_count = c.prime_count;
    cfg.primes.clear();
  }
  if (given(sub, "--prime-list")) cfg.primes = parse_prime_list(c.prime_list);
  if (given(sub, "--h1")) cfg.h1 = c.h1;
  if (given(sub, "--h2")) cfg.h2 = c.h2;
  if (given(sub, "--budget")) cfg.verify_budget = c.budget;
  if (given(sub, "--cutoff")) cfg.verify_cutoff = Integer(c.cutoff);
  if (given(sub, "--height")) cfg.preper_height = c.preper_height;
  if (given(sub, "--steps")) cfg.preper_steps = c.preper_steps;
  if (given(sub, "--preper-cutoff")) cfg.preper_cutoff = Integer(c.preper_cutoff);
  if (given(c.app, "--workers")) cfg.workers = c.workers;
  if (given(sub, "--out-dir")) cfg.out_dir = c.out_dir;
  if (const char* env = std::getenv("PCF_SIEVE_DB"); env && *env) cfg.db_path = fs::path(env);
  if (given(sub, "--db")) cfg.db_path = fs::path(c.db);
  cfg.validate();
  return cfg;
}

Database load_db(const fs::path& path) {
  if (!fs::exists(path)) throw CliError(missing_db, "missing-db", "database file " + path.string() + " does not exist");
  return Database::load(path);
}

/// Loads the configured database, or builds one in memory for the run's primes.
Database obtain_db(const RunConfig& cfg) {
  if (cfg.db_path) return load_db(*cfg.db_path);
  std::cerr << "no database configured; building one in memory for " << cfg.resolved_primes().size() << " primes\n";
  return build_db(cfg.resolved_primes(), cfg.resolved_workers());
}

NormalizedQuadMap map_from_flags(const std::string& map_text, const std::string& sigma_text) {
  if (!map_text.empty() && !sigma_text.empty()) throw CLI::ValidationError("give either --map or --sigma, not both");
  if (!map_text.empty()) return NormalizedQuadMap::parse(map_text);
  if (sigma_text.empty()) throw CLI::ValidationError("one of --map or --sigma is required");
  auto comma = sigma_text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--sigma expects 's1,s2'");
  return from_sigmas(parse_rational(sigma_text.substr(0, comma)), parse_rational(sigma_text.substr(comma + 1)));
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw DbIoError("cannot write " + path.string());
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") std::cout << content;
  else write_file(out_path, content);
}

void print_status(const NormalizedQuadMap& map, const PcfStatus& st) {
  std::cout << "map " << map.to_string() << "  " << map.to_affine_string() << "\n";
  std::cout << "status " << st.summary() << "\n";
  if (st.verified()) {
    std::cout << st.portrait->to_text();
    std::cout << "postcritical";
    for (const auto& p : postcritical_set(st)) std::cout << " " << p.to_string();
    std::cout << "\n";
  }
}

std::string graph_text(const PointGraph& g, const std::string& format, const std::string& name) {
  if (format == "dot") return g.to_dot(name);
  if (format == "edges") return g.to_edge_list();
  throw CLI::ValidationError("--format must be dot or edges");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search and certification of quadratic post-critically finite maps over Q"};
  app.require_subcommand(1);
  // --config and --workers may also follow the subcommand name.
  app.fallthrough();
  Common c;
  c.app = &app;
  app.add_option("--config", c.config_path, "Config file ('pcf-config v1' key = value lines)");
  app.add_option("--workers", c.workers, "Worker threads (0 = one per hardware thread)");

  // build-db
  auto* build = app.add_subcommand("build-db", "Build the per-prime database of reduced maps");
  std::string db_out, text_out;
  add_prime_flags(build, c);
  build->add_option("--out", db_out, "Database file to write")->required();
  build->add_option("--text", text_out, "Also write a lossless text dump");

  // sieve
  auto* sieve_cmd = app.add_subcommand("sieve", "Run the modular sieve and print survivors as TSV");
  std::string sieve_out;
  add_prime_flags(sieve_cmd, c);
  add_height_flags(sieve_cmd, c);
  sieve_cmd->add_option("--db", c.db, "Database file (overrides PCF_SIEVE_DB)");
  sieve_cmd->add_option("--out", sieve_out, "TSV output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Certify a map by exact critical-orbit iteration");
  std::string map_text, sigma_text;
  verify->add_option("--map", map_text, "Map as [f2,f1,f0]/[g2,g1,g0]");
  verify->add_option("--sigma", sigma_text, "Normal form from 's1,s2'");
  add_verify_flags(verify, c);

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Sieve then verify; writes survivors.tsv and summary.json");
  add_prime_flags(pipeline, c);
  add_height_flags(pipeline, c);
  add_verify_flags(pipeline, c);
  pipeline->add_option("--db", c.db, "Database file (overrides PCF_SIEVE_DB)");
  pipeline->add_option("--out-dir", c.out_dir, "Directory for artifacts");

  // portrait
  auto* portrait = app.add_subcommand("portrait", "Critical portrait as Graphviz DOT");
  std::string portrait_out;
  portrait->add_option("--map", map_text, "Map as [f2,f1,f0]/[g2,g1,g0]");
  portrait->add_option("--sigma", sigma_text, "Normal form from 's1,s2'");
  portrait->add_option("--out", portrait_out, "Output file (default stdout)");
  add_verify_flags(portrait, c);

  // preper
  auto* preper = app.add_subcommand("preper", "Rational preperiodic points of a map");
  std::string preper_format = "dot", preper_out;
  preper->add_option("--map", map_text, "Map as [f2,f1,f0]/[g2,g1,g0]");
  preper->add_option("--sigma", sigma_text, "Normal form from 's1,s2'");
  preper->add_option("--format", preper_format, "dot or edges");
  preper->add_option("--out", preper_out, "Output file (default stdout)");
  add_preper_flags(preper, c);

  // classify-twist
  auto* classify = app.add_subcommand("classify-twist", "Classify a twist of z^2 or 1/z^2");
  bool psi1 = false, psi2 = false;
  std::string b_text, t_text, d_text, k_text, twist_format = "edges";
  classify->add_flag("--psi1", psi1, "Twist z/2 + b/z of z^2");
  classify->add_flag("--psi2", psi2, "Map conjugate to 1/z^2");
  classify->add_option("-b,--b", b_text, "psi1 parameter b");
  classify->add_option("-t,--t", t_text, "psi2 map t/z^2");
  classify->add_option("-d,--d", d_text, "theta parameter d");
  classify->add_option("-k,--k", k_text, "theta parameter k");
  classify->add_option("--map", map_text, "psi2 map as [f2,f1,f0]/[g2,g1,g0]");
  classify->add_option("--format", twist_format, "dot or edges");
  add_preper_flags(classify, c);

  // catalog
  auto* catalog = app.add_subcommand("catalog", "Print the reference structure catalogs");
  std::string catalog_table = "all", catalog_format = "edges", roots;
  unsigned roots_degree = 0;
  catalog->add_option("--table", catalog_table, "2, 3, 4 or all");
  catalog->add_option("--format", catalog_format, "dot or edges");
  catalog->add_option("--roots", roots, "square or inverse-square: root-of-unity catalog instead");
  catalog->add_option("--degree", roots_degree, "Maximum algebraic degree for --roots (default 2 or 6)");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the full acceptance suite");
  selftest->add_option("--db", c.db, "Prebuilt database covering the odd primes up to 750");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return usage;
  }

  try {
    if (*build) {
      RunConfig cfg = make_config(build, c);
      auto primes = cfg.resolved_primes();
      Database db = build_db(primes, cfg.resolved_workers());
      db.save(db_out);
      if (!text_out.empty()) {
        std::ofstream out(text_out);
        if (!out) throw DbIoError("cannot write " + text_out);
        db.dump_text(out);
      }
      std::cout << "wrote " << db_out << ": " << primes.size() << " primes, " << db.entry_count() << " entries\n";
    } else if (*sieve_cmd) {
      RunConfig cfg = make_config(sieve_cmd, c);
      Database db = obtain_db(cfg);
      SieveStats stats;
      auto survivors = sieve(cfg.h1, cfg.h2, cfg.resolved_primes(), db, cfg.resolved_workers(), &stats);
      std::string tsv = "# config " + cfg.digest() + "\n" + sieve_tsv_header() + "\n";
      for (const auto& s : survivors) tsv += s.to_tsv() + "\n";
      emit(sieve_out, tsv);
      std::cerr << stats.pairs << " pairs, " << stats.degenerate << " degenerate, " << survivors.size() << " survivors\n";
    } else if (*verify) {
      RunConfig cfg = make_config(verify, c);
      NormalizedQuadMap map = map_from_flags(map_text, sigma_text);
      PcfStatus st = critical_orbit_portrait(map, cfg.verify_options());
      print_status(map, st);
      if (!st.verified()) return failed;
    } else if (*pipeline) {
      RunConfig cfg = make_config(pipeline, c);
      Database db = obtain_db(cfg);
      PipelineResult r = run_pipeline(cfg, db);
      write_file(cfg.out_dir / "survivors.tsv", pipeline_tsv(r, cfg));
      write_file(cfg.out_dir / "summary.json", pipeline_json(r, cfg));
      for (std::size_t i = 0; i < r.survivors.size(); ++i) {
        const auto& s = r.survivors[i];
        std::cout << s.sigmas.sigma1.get_str() << "\t" << s.sigmas.sigma2.get_str() << "\t" << s.map.to_affine_string() << "\t"
                  << (r.statuses[i].verified() ? "VERIFIED_PCF" : "UNDETERMINED") << "\n";
      }
      std::cout << r.verified_count() << " verified, " << r.survivors.size() - r.verified_count() << " undetermined (config "
                << cfg.digest() << ")\n";
      if (r.verified_count() != r.survivors.size()) return failed;
    } else if (*portrait) {
      RunConfig cfg = make_config(portrait, c);
      NormalizedQuadMap map = map_from_flags(map_text, sigma_text);
      PcfStatus st = critical_orbit_portrait(map, cfg.verify_options());
      if (!st.verified()) {
        std::cerr << "error[undetermined]: " << st.summary() << "\n";
        return failed;
      }
      emit(portrait_out, st.portrait->to_dot(map.to_affine_string()));
    } else if (*preper) {
      RunConfig cfg = make_config(preper, c);
      NormalizedQuadMap map = map_from_flags(map_text, sigma_text);
      PreperResult r = rational_preperiodic_graph(map, cfg.preper_options());
      emit(preper_out, graph_text(r.graph, preper_format, map.to_affine_string()));
      std::cerr << r.graph.size() << " rational preperiodic points (search height " << cfg.preper_height << ")\n";
      for (const auto& u : r.unresolved) std::cerr << "unresolved " << u.to_string() << "\n";
    } else if (*classify) {
      RunConfig cfg = make_config(classify, c);
      if (psi1 == psi2) throw CLI::ValidationError("give exactly one of --psi1 or --psi2");
      if (psi1) {
        if (b_text.empty()) throw CLI::ValidationError("--psi1 needs -b");
        Rational b = parse_rational(b_text);
        const StructureClass& cls = classify_psi1_twist(b);
        PreperResult r = rational_preperiodic_graph(psi1_twist_map(b), cfg.preper_options());
        std::cout << cls.id << "\t" << cls.description << "\n";
        std::cout << graph_text(r.graph, twist_format, cls.id);
      } else {
        NormalizedQuadMap map = [&] {
          if (!t_text.empty()) return psi2_map_from_t(parse_rational(t_text));
          if (!d_text.empty() || !k_text.empty()) {
            if (d_text.empty() || k_text.empty()) throw CLI::ValidationError("theta needs both -d and -k");
            return psi2_map_from_theta(parse_rational(d_text), parse_rational(k_text));
          }
          if (!map_text.empty()) return NormalizedQuadMap::parse(map_text);
          throw CLI::ValidationError("--psi2 needs -t, -d/-k or --map");
        }();
        Psi2Classification r = classify_psi2_map(map, cfg.preper_options());
        std::cout << r.cls->id << "\t" << r.cls->description << "\n";
        std::cout << graph_text(r.computed.graph, twist_format, r.cls->id);
      }
    } else if (*catalog) {
      if (!roots.empty()) {
        PowerMap v;
        if (roots == "square") v = PowerMap::square;
        else if (roots == "inverse-square") v = PowerMap::inverse_square;
        else throw CLI::ValidationError("--roots must be square or inverse-square");
        unsigned deg = roots_degree ? roots_degree : (v == PowerMap::square ? 2 : 6);
        RootGraph g = power_map_low_degree_preperiodic(v, deg);
        if (catalog_format == "dot") {
          std::cout << g.to_dot(roots);
        } else {
          std::cout << "# " << g.size() << " points\n";
          for (const auto& comp : g.components()) {
            std::cout << "# component of " << comp.size() << "\n";
            for (const auto& v2 : comp) std::cout << v2.to_string() << " -> " << g.successor(v2).to_string() << "\n";
          }
        }
      } else {
        std::vector<const std::vector<StructureClass>*> cats;
        if (catalog_table == "2" || catalog_table == "all") cats.push_back(&trivial_stabilizer_catalog());
        if (catalog_table == "3" || catalog_table == "all") cats.push_back(&psi1_twist_catalog());
        if (catalog_table == "4" || catalog_table == "all") cats.push_back(&psi2_twist_catalog());
        if (cats.empty()) throw CLI::ValidationError("--table must be 2, 3, 4 or all");
        for (const auto* cat : cats) {
          for (const auto& cls : *cat) {
            std::cout << "## " << cls.id << "\t" << cls.description << "\t" << cls.map << "\n";
            std::cout << graph_text(cls.reference, catalog_format, cls.id);
          }
        }
      }
    } else if (*selftest) {
      RunConfig cfg = make_config(selftest, c);
      AcceptanceOptions opts;
      opts.workers = cfg.resolved_workers();
      if (cfg.db_path) {
        if (!fs::exists(*cfg.db_path)) throw CliError(missing_db, "missing-db", "database file " + cfg.db_path->string() + " does not exist");
        opts.db_path = cfg.db_path;
      }
      opts.log = &std::cerr;
      bool all = true;
      for (const auto& r : run_acceptance(opts)) {
        std::cout << r.line() << "\n";
        all = all && r.passed;
      }
      if (!all) {
        std::cerr << "error[selftest]: acceptance failures\n";
        return failed;
      }
    }
  } catch (const CliError& e) {
    std::cerr << "error[" << e.category << "]: " << e.what() << "\n";
    return e.code;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return usage;
  } catch (const ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return usage;
  } catch (const UncoveredPrimeError& e) {
    std::cerr << "error[uncovered-prime]: " << e.what() << "\n";
    return uncovered;
  } catch (const DbIoError& e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    return io;
  } catch (const DbFormatError& e) {
    std::cerr << "error[db-format]: " << e.what() << "\n";
    return io;
  } catch (const NoCatalogMatchError& e) {
    std::cerr << "error[no-catalog-match]: " << e.what() << "\n";
    return failed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[invalid-input]: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return other;
  }
  return ok;
}
