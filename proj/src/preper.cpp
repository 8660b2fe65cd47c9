#include "pcf/preper.hpp"

#include <numeric>
#include <set>

namespace pcf {

PointGraph graph_from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
  PointGraph g;
  for (const auto& [from, to] : edges) g.add_edge(parse_point(from), parse_point(to));
  return g;
}

PreperResult rational_preperiodic_graph(const NormalizedQuadMap& map, const PreperOptions& opts) {
  if (resultant(map) == 0) throw std::invalid_argument("rational_preperiodic_graph: degenerate map " + map.to_string());
  PreperResult out;
  std::set<Point, PointLess> wandering;

  std::vector<Point> candidates{Point::infinity()};
  for (const auto& r : enumerate_rationals(opts.height_bound)) candidates.emplace_back(r);

  for (const auto& start : candidates) {
    if (out.graph.contains(start) || wandering.count(start)) continue;
    std::vector<Point> path{start};
    std::set<Point, PointLess> on_path{start};
    bool preperiodic = false;
    bool resolved = false;
    for (std::size_t step = 0; step < opts.step_budget; ++step) {
      Point next = apply(map, path.back());
      if (out.graph.contains(next) || on_path.count(next)) {
        path.push_back(next);
        preperiodic = resolved = true;
        break;
      }
      if (wandering.count(next) || next.height() > opts.height_cutoff) {
        resolved = true;
        break;
      }
      path.push_back(next);
      on_path.insert(next);
    }
    if (!resolved) {
      out.unresolved.push_back(start);
      continue;
    }
    if (preperiodic) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) out.graph.add_edge(path[i], path[i + 1]);
    } else {
      wandering.insert(path.begin(), path.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalogs

namespace {

using Edges = std::vector<std::pair<std::string, std::string>>;

StructureClass make_class(std::string id, std::string description, std::string map, const Edges& edges,
                          const std::optional<Edges>& printed = std::nullopt) {
  // Normalize the representative so the catalog prints canonical forms.
  std::string canonical = NormalizedQuadMap::parse(map).to_string();
  PointGraph reference = graph_from_edges(edges);
  PointGraph as_printed = printed ? graph_from_edges(*printed) : reference;
  return {std::move(id), std::move(description), std::move(canonical), std::move(reference), std::move(as_printed)};
}

}  // namespace

const std::vector<StructureClass>& trivial_stabilizer_catalog() {
  static const std::vector<StructureClass> catalog = {
      make_class("T2.1", "z^2 - 2", "[1,0,-2]/[0,0,1]",
                 {{"inf", "inf"}, {"1", "-1"}, {"-1", "-1"}, {"0", "-2"}, {"-2", "2"}, {"2", "2"}}),
      make_class("T2.2", "z^2 - 1", "[1,0,-1]/[0,0,1]", {{"inf", "inf"}, {"1", "0"}, {"0", "-1"}, {"-1", "0"}}),
      make_class("T2.3", "1/(2(z-1)^2)", "[0,0,1]/[2,-4,2]",
                 {{"1", "inf"}, {"inf", "0"}, {"0", "1/2"}, {"1/2", "2"}, {"2", "1/2"}, {"3/2", "2"}}),
      make_class("T2.4", "1/(z-1)^2", "[0,0,1]/[1,-2,1]", {{"inf", "0"}, {"0", "1"}, {"1", "inf"}, {"2", "1"}}),
      make_class("T2.5", "-1/(4z^2-4z)", "[0,0,-1]/[4,-4,0]", {{"1/2", "1"}, {"1", "inf"}, {"inf", "0"}, {"0", "inf"}}),
      make_class("T2.6", "-4/(9z^2-12z)", "[0,0,-4]/[9,-12,0]",
                 {{"2/3", "1"}, {"1", "4/3"}, {"4/3", "inf"}, {"1/3", "4/3"}, {"inf", "0"}, {"0", "inf"}}),
      make_class("T2.7", "2/(z-1)^2", "[0,0,2]/[1,-2,1]", {{"1", "inf"}, {"inf", "0"}, {"0", "2"}, {"2", "2"}}),
      make_class("T2.8", "(2z+1)/(4z-2z^2)", "[0,2,1]/[-2,4,0]", {{"-1/2", "0"}, {"2", "inf"}, {"0", "inf"}, {"inf", "0"}}),
      make_class("T2.9", "-2z/(2z^2-4z+1)", "[0,-2,0]/[2,-4,1]", {{"inf", "0"}, {"0", "0"}}),
      // Printed with the 2-cycle labelled -2 <-> -1; the map sends 1/3 -> 0 -> 1 -> 0.
      make_class("T2.10", "(3z^2-4z+1)/(1-4z)", "[3,-4,1]/[0,-4,1]",
                 {{"1/2", "1/4"}, {"1/4", "inf"}, {"inf", "inf"}, {"1/3", "0"}, {"0", "1"}, {"1", "0"}},
                 Edges{{"1/2", "1/4"}, {"1/4", "inf"}, {"inf", "inf"}, {"1/3", "-2"}, {"-2", "-1"}, {"-1", "-2"}}),
  };
  return catalog;
}

const std::vector<StructureClass>& psi1_twist_catalog() {
  static const std::vector<StructureClass> catalog = {
      make_class("T3.generic", "b not in any special square class (b = 1)", "[1,0,2]/[0,2,0]", {{"inf", "inf"}, {"0", "inf"}}),
      make_class("T3.fixed-point", "2b is a square (b = 1/2)", "[1,0,1]/[0,2,0]",
                 {{"inf", "inf"}, {"0", "inf"}, {"1", "1"}, {"-1", "-1"}}),
      // Printed with tails 2 -> 1 and -2 -> -1, but z/2 - 3/(2z) = 1 gives z^2 - 2z - 3 = 0.
      make_class("T3.2-cycle", "-6b is a square (b = -3/2)", "[1,0,-3]/[0,2,0]",
                 {{"inf", "inf"}, {"0", "inf"}, {"-3", "-1"}, {"3", "1"}, {"-1", "1"}, {"1", "-1"}},
                 Edges{{"inf", "inf"}, {"0", "inf"}, {"-2", "-1"}, {"2", "1"}, {"-1", "1"}, {"1", "-1"}}),
      make_class("T3.type-1_2", "-2b is a square (b = -1/2)", "[1,0,-1]/[0,2,0]",
                 {{"inf", "inf"}, {"0", "inf"}, {"1", "0"}, {"-1", "0"}}),
  };
  return catalog;
}

const std::vector<StructureClass>& psi2_twist_catalog() {
  static const std::vector<StructureClass> catalog = {
      make_class("T4.2-cycle-fixed", "1/z^2", "[0,0,1]/[1,0,0]", {{"1", "1"}, {"-1", "1"}, {"0", "inf"}, {"inf", "0"}}),
      make_class("T4.2-cycle", "2/z^2", "[0,0,2]/[1,0,0]", {{"0", "inf"}, {"inf", "0"}}),
      make_class("T4.empty", "theta with d = 2, k = 1", "[1,-4,2]/[1,-2,2]", {}),
      make_class("T4.fixed-1_1", "theta with d = 2, k = 0", "[0,-4,0]/[1,0,2]", {{"0", "0"}, {"inf", "0"}}),
      make_class("T4.fixed-1_2", "(-z^2+2z+1)/(z^2+2z-1)", "[-1,2,1]/[1,2,-1]",
                 {{"1", "1"}, {"-1", "1"}, {"0", "-1"}, {"inf", "-1"}}),
      make_class("T4.three-fixed", "-(z-2)z/(2z-1)", "[-1,2,0]/[0,2,-1]",
                 {{"0", "0"}, {"1", "1"}, {"inf", "inf"}, {"2", "0"}, {"-1", "1"}, {"1/2", "inf"}}),
      make_class("T4.3-cycle", "(2z-1)/(z^2-1)", "[0,2,-1]/[1,0,-1]",
                 {{"0", "1"}, {"1", "inf"}, {"inf", "0"}, {"1/2", "0"}, {"2", "1"}, {"-1", "inf"}}),
  };
  return catalog;
}

const StructureClass& catalog_class(const std::string& id) {
  for (const auto* cat : {&trivial_stabilizer_catalog(), &psi1_twist_catalog(), &psi2_twist_catalog()}) {
    for (const auto& c : *cat) {
      if (c.id == id) return c;
    }
  }
  throw std::out_of_range("unknown catalog class " + id);
}

// ---------------------------------------------------------------------------
// Twists

bool is_rational_square(const Rational& r) {
  return sgn(r) > 0 && mpz_perfect_square_p(r.get_num_mpz_t()) && mpz_perfect_square_p(r.get_den_mpz_t());
}

NormalizedQuadMap psi1_twist_map(const Rational& b) {
  if (b == 0) throw std::invalid_argument("psi1 twist parameter must be nonzero");
  return NormalizedQuadMap::from_rational({1, 0, 2 * b}, {0, 2, 0});
}

const StructureClass& classify_psi1_twist(const Rational& b) {
  if (b == 0) throw std::invalid_argument("psi1 twist parameter must be nonzero");
  const auto& cat = psi1_twist_catalog();
  bool fixed = is_rational_square(2 * b);
  bool two_cycle = is_rational_square(-6 * b);
  bool tail = is_rational_square(-2 * b);
  if (fixed + two_cycle + tail > 1) throw std::logic_error("square classes overlap for b = " + b.get_str());
  if (fixed) return cat[1];
  if (two_cycle) return cat[2];
  if (tail) return cat[3];
  return cat[0];
}

NormalizedQuadMap psi2_map_from_t(const Rational& t) {
  if (t == 0) throw std::invalid_argument("t must be nonzero");
  return NormalizedQuadMap::from_rational({0, 0, t}, {1, 0, 0});
}

NormalizedQuadMap psi2_map_from_theta(const Rational& d, const Rational& k) {
  if (d == 0) throw std::invalid_argument("d must be nonzero");
  if (k * k == d) throw std::invalid_argument("theta needs k^2 != d");
  return NormalizedQuadMap::from_rational({k, -2 * d, d * k}, {1, -2 * k, d});
}

Psi2Classification classify_psi2_map(const NormalizedQuadMap& map, const PreperOptions& opts) {
  if (resultant(map) == 0) throw std::invalid_argument("degenerate map " + map.to_string());
  SigmaPair s = sigma_invariants(map);
  if (s.sigma1 != -6 || s.sigma2 != 12) {
    throw std::invalid_argument("map " + map.to_string() + " has sigma invariants (" + s.to_string() +
                                "), not those of 1/z^2 (-6,12)");
  }
  Psi2Classification out;
  out.computed = rational_preperiodic_graph(map, opts);
  for (const auto& c : psi2_twist_catalog()) {
    if (isomorphic(out.computed.graph, c.reference)) {
      out.cls = &c;
      return out;
    }
  }
  throw NoCatalogMatchError("preperiodic structure of " + map.to_string() + " matches no catalog class:\n" +
                            out.computed.graph.to_edge_list());
}

// ---------------------------------------------------------------------------
// Roots of unity

std::uint64_t euler_phi(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t result = n;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    while (n % q == 0) n /= q;
    result -= result / q;
  }
  if (n > 1) result -= result / n;
  return result;
}

RootOfUnityPoint RootOfUnityPoint::root(std::uint64_t order, std::int64_t exponent) {
  if (order == 0) throw std::invalid_argument("root of unity order must be positive");
  auto n = static_cast<std::int64_t>(order);
  auto j = static_cast<std::uint64_t>(((exponent % n) + n) % n);
  std::uint64_t g = std::gcd(j, order);
  if (j == 0) return RootOfUnityPoint(Kind::root, 1, 0);
  return RootOfUnityPoint(Kind::root, order / g, j / g);
}

std::uint64_t RootOfUnityPoint::degree() const { return kind_ == Kind::root ? euler_phi(order_) : 1; }

std::string RootOfUnityPoint::to_string() const {
  switch (kind_) {
    case Kind::zero:
      return "0";
    case Kind::infinity:
      return "inf";
    case Kind::root:
      break;
  }
  if (order_ == 1) return "1";
  if (order_ == 2) return "-1";
  return "zeta_" + std::to_string(order_) + "^" + std::to_string(exponent_);
}

RootGraph power_map_low_degree_preperiodic(PowerMap variant, unsigned max_degree) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be positive");
  RootGraph g;
  const bool inverse = variant == PowerMap::inverse_square;
  g.add_edge(RootOfUnityPoint::zero(), inverse ? RootOfUnityPoint::infinity() : RootOfUnityPoint::zero());
  g.add_edge(RootOfUnityPoint::infinity(), inverse ? RootOfUnityPoint::zero() : RootOfUnityPoint::infinity());
  // phi(N) >= sqrt(N / 2), so no order beyond 2 d^2 has degree <= d.
  const std::uint64_t limit = 2ULL * max_degree * max_degree;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (euler_phi(n) > max_degree) continue;
    for (std::uint64_t j = 0; j < n; ++j) {
      if (std::gcd(j, n) != 1 && !(n == 1 && j == 0)) continue;
      auto e = static_cast<std::int64_t>(j);
      g.add_edge(RootOfUnityPoint::root(n, e), RootOfUnityPoint::root(n, inverse ? -2 * e : 2 * e));
    }
  }
  return g;
}

}  // namespace pcf
