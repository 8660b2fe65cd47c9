#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>
#include <set>

#include "pcf/preper.hpp"

using namespace pcf;

namespace {

NormalizedQuadMap parse(const std::string& s) { return NormalizedQuadMap::parse(s); }

std::vector<std::size_t> component_sizes(const RootGraph& g) {
  std::vector<std::size_t> out;
  for (const auto& c : g.components()) out.push_back(c.size());
  std::sort(out.begin(), out.end());
  return out;
}

/// Maps conjugate to 1/z^2 used by the sampling properties.
std::vector<NormalizedQuadMap> psi2_samples() {
  std::vector<NormalizedQuadMap> out;
  for (const auto& t : enumerate_rationals(5)) {
    if (t != 0) out.push_back(psi2_map_from_t(t));
  }
  for (const auto& d : enumerate_rationals(3)) {
    for (const auto& k : enumerate_rationals(3)) {
      if (d == 0 || k * k == d) continue;
      out.push_back(psi2_map_from_theta(d, k));
    }
  }
  for (const auto& cls : psi2_twist_catalog()) out.push_back(parse(cls.map));
  return out;
}

}  // namespace

TEST_CASE("z^2 - 2 has six rational preperiodic points") {
  auto r = rational_preperiodic_graph(parse("[1,0,-2]/[0,0,1]"));
  CHECK(r.unresolved.empty());
  auto want = graph_from_edges({{"inf", "inf"}, {"1", "-1"}, {"-1", "-1"}, {"0", "-2"}, {"-2", "2"}, {"2", "2"}});
  CHECK(r.graph == want);
  CHECK(r.graph.to_edge_list().find("0 -> -2\n") != std::string::npos);
}

TEST_CASE("two small trivial-stabilizer structures") {
  auto small = rational_preperiodic_graph(parse("[0,-2,0]/[2,-4,1]"));
  CHECK(small.graph == graph_from_edges({{"inf", "0"}, {"0", "0"}}));
  auto six = rational_preperiodic_graph(parse("[3,-4,1]/[0,-4,1]"));
  CHECK(six.graph.size() == 6);
  // 1/2 -> 1/4 -> inf loop, and a 2-cycle fed by a single tail.
  CHECK(six.graph.successor(Point(make_rational(1, 2))) == Point(make_rational(1, 4)));
  CHECK(six.graph.successor(Point(make_rational(1, 4))).is_infinite());
  CHECK(six.graph.type_of(Point(make_rational(1, 3))) == TypeTag{2, 1});
}

TEST_CASE("catalog reference graphs are reproduced exactly") {
  for (const auto* cat : {&trivial_stabilizer_catalog(), &psi1_twist_catalog(), &psi2_twist_catalog()}) {
    for (const auto& cls : *cat) {
      auto r = rational_preperiodic_graph(parse(cls.map));
      CHECK_MESSAGE(r.unresolved.empty(), cls.id);
      CHECK_MESSAGE(r.graph == cls.reference, cls.id);
      CHECK_MESSAGE(isomorphic(r.graph, cls.printed), cls.id);
      CHECK(r.graph.is_closed());
      CHECK(r.graph.size() <= 6);
    }
  }
  CHECK(trivial_stabilizer_catalog().size() == 10);
  CHECK(psi1_twist_catalog().size() == 4);
  CHECK(psi2_twist_catalog().size() == 7);
  CHECK(catalog_class("T4.empty").reference.empty());
  CHECK_THROWS(catalog_class("T9.none"));
}

TEST_CASE("types of points") {
  auto g1 = rational_preperiodic_graph(psi1_twist_map(1)).graph;
  CHECK(g1.type_of(Point(0)) == TypeTag{1, 1});
  CHECK(g1.type_of(Point::infinity()) == TypeTag{1, 0});
  auto g2 = rational_preperiodic_graph(psi1_twist_map(make_rational(-1, 2))).graph;
  CHECK(g2.type_of(Point(1)) == TypeTag{1, 2});
  CHECK(g2.type_of(Point(-1)) == TypeTag{1, 2});
  CHECK_THROWS(g2.type_of(Point(7)));
  CHECK(TypeTag{3, 1}.to_string() == "3_1");
}

TEST_CASE("closure and reachability") {
  for (const auto& s1 : enumerate_rationals(3)) {
    for (const auto& s2 : enumerate_rationals(3)) {
      auto map = from_sigmas(s1, s2);
      if (resultant(map) == 0) continue;
      auto r = rational_preperiodic_graph(map, PreperOptions{8, 32, 10000});
      CHECK(r.graph.is_closed());
      for (const auto& v : r.graph.vertices()) {
        CHECK(apply(map, v) == r.graph.successor(v));
        auto t = r.graph.type_of(v);
        CHECK(t.m >= 1);
      }
    }
  }
}

TEST_CASE("canonical forms ignore labels") {
  auto a = graph_from_edges({{"0", "1"}, {"1", "0"}, {"2", "0"}});
  auto b = graph_from_edges({{"5", "7"}, {"7", "5"}, {"9", "7"}});
  auto c = graph_from_edges({{"5", "7"}, {"7", "5"}, {"9", "9"}});
  CHECK(isomorphic(a, b));
  CHECK_FALSE(isomorphic(a, c));
  PointGraph g;
  g.add_edge(Point(1), Point(2));
  CHECK_THROWS_AS(g.add_edge(Point(1), Point(3)), std::invalid_argument);
  CHECK_FALSE(g.is_closed());
  CHECK_THROWS(g.canonical_form());
}

TEST_CASE("square classes of b") {
  CHECK(is_rational_square(make_rational(9, 4)));
  CHECK_FALSE(is_rational_square(-4));
  CHECK_FALSE(is_rational_square(2));
  CHECK(classify_psi1_twist(1).id == "T3.generic");
  CHECK(classify_psi1_twist(make_rational(1, 2)).id == "T3.fixed-point");
  CHECK(classify_psi1_twist(make_rational(1, 2)).reference.size() == 4);
  CHECK(classify_psi1_twist(make_rational(-3, 2)).id == "T3.2-cycle");
  CHECK(classify_psi1_twist(make_rational(-3, 2)).reference.size() == 6);
  CHECK(classify_psi1_twist(-6).id == "T3.2-cycle");
  CHECK(classify_psi1_twist(make_rational(-1, 2)).id == "T3.type-1_2");
  CHECK(classify_psi1_twist(-8).id == "T3.type-1_2");
  CHECK_THROWS(classify_psi1_twist(0));
}

TEST_CASE("square-class classification agrees with the computed graphs") {
  for (const auto& b : enumerate_rationals(6)) {
    if (b == 0) continue;
    const auto& cls = classify_psi1_twist(b);
    auto r = rational_preperiodic_graph(psi1_twist_map(b));
    CHECK_MESSAGE(isomorphic(r.graph, cls.reference), b.get_str());
    // No rational periodic point of least period above 2.
    for (const auto& v : r.graph.periodic_points()) CHECK(r.graph.type_of(v).m <= 2);
  }
}

TEST_CASE("maps conjugate to 1/z^2") {
  CHECK(classify_psi2_map(psi2_map_from_t(1)).cls->id == "T4.2-cycle-fixed");
  CHECK(classify_psi2_map(psi2_map_from_theta(2, 1)).cls->id == "T4.empty");
  CHECK(classify_psi2_map(parse("[0,2,-1]/[1,0,-1]")).cls->id == "T4.3-cycle");
  CHECK_THROWS_AS(classify_psi2_map(parse("[1,0,-2]/[0,0,1]")), std::invalid_argument);
  CHECK_THROWS(psi2_map_from_theta(1, 1));
  CHECK_THROWS(psi2_map_from_t(0));
}

TEST_CASE("structure of 1/z^2 conjugates") {
  for (const auto& map : psi2_samples()) {
    auto res = classify_psi2_map(map);
    REQUIRE(res.cls);
    const auto& g = res.computed.graph;
    std::map<std::uint32_t, std::size_t> period_count, tail1_count;
    std::size_t fixed = 0;
    for (const auto& v : g.vertices()) {
      auto t = g.type_of(v);
      CHECK_FALSE((t.m == 2 && t.n >= 1));
      if (t.n == 0) ++period_count[t.m];
      if (t.n == 1) ++tail1_count[t.m];
      if (t.m == 1 && t.n == 0) ++fixed;
    }
    for (std::uint32_t m : {1u, 3u}) CHECK_MESSAGE(period_count[m] == tail1_count[m], map.to_string());
    CHECK((fixed == 0 || fixed == 1 || fixed == 3));
    for (const auto& [m, c] : period_count) CHECK(m <= 3);
  }
}

TEST_CASE("t/z^2 has a rational fixed point iff t is a cube") {
  for (const auto& t : enumerate_rationals(9)) {
    if (t == 0) continue;
    auto g = rational_preperiodic_graph(psi2_map_from_t(t)).graph;
    bool has_fixed = false;
    for (const auto& v : g.vertices()) has_fixed |= g.successor(v) == v;
    Integer n = t.get_num(), d = t.get_den(), rn, rd;
    bool cube = mpz_root(rn.get_mpz_t(), n.get_mpz_t(), 3) != 0 && mpz_root(rd.get_mpz_t(), d.get_mpz_t(), 3) != 0;
    CHECK_MESSAGE(has_fixed == cube, t.get_str());
  }
}

TEST_CASE("roots of unity") {
  CHECK(RootOfUnityPoint::root(1, 0).to_string() == "1");
  CHECK(RootOfUnityPoint::root(2, 1).to_string() == "-1");
  CHECK(RootOfUnityPoint::root(6, 4).to_string() == "zeta_3^2");
  CHECK(RootOfUnityPoint::root(6, -1) == RootOfUnityPoint::root(6, 5));
  CHECK(RootOfUnityPoint::root(12, 3).degree() == 2);
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(18) == 6);
  CHECK(euler_phi(12) == 4);

  auto sq1 = power_map_low_degree_preperiodic(PowerMap::square, 1);
  CHECK(sq1.size() == 4);
  CHECK(sq1.successor(RootOfUnityPoint::root(2, 1)) == RootOfUnityPoint::root(1, 0));

  auto sq2 = power_map_low_degree_preperiodic(PowerMap::square, 2);
  CHECK(sq2.size() == 10);
  CHECK(component_sizes(sq2) == std::vector<std::size_t>{1, 1, 4, 4});
  CHECK(sq2.type_of(RootOfUnityPoint::root(3, 1)) == TypeTag{2, 0});
  CHECK(sq2.type_of(RootOfUnityPoint::root(6, 1)) == TypeTag{2, 1});

  auto inv6 = power_map_low_degree_preperiodic(PowerMap::inverse_square, 6);
  CHECK(inv6.size() == 50);
  CHECK(component_sizes(inv6) == std::vector<std::size_t>{2, 4, 4, 6, 6, 8, 8, 12});
  CHECK(inv6.is_closed());
  for (const auto& v : inv6.periodic_points()) {
    if (v.kind() == RootOfUnityPoint::Kind::root) CHECK(v.order() % 2 == 1);
  }
  // The order count for degree <= 6 by direct search.
  std::size_t total = 2;
  for (std::uint64_t n = 1; n <= 72; ++n) {
    if (euler_phi(n) <= 6) total += euler_phi(n);
  }
  CHECK(total == 50);
}
