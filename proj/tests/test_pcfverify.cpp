#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "pcf/pcfverify.hpp"

using namespace pcf;

namespace {

std::set<std::string> edge_strings(const Portrait& p) {
  std::set<std::string> out;
  for (const auto& e : p.edges()) out.insert(e.from.to_string() + ">" + e.to.to_string() + ":" + std::to_string(e.ramification));
  return out;
}

NormalizedQuadMap parse(const char* s) { return NormalizedQuadMap::parse(s); }

}  // namespace

TEST_CASE("z^2 and 1/z^2") {
  auto st = critical_orbit_portrait(parse("[1,0,0]/[0,0,1]"));
  REQUIRE(st.verified());
  CHECK(edge_strings(*st.portrait) == std::set<std::string>{"0>0:2", "inf>inf:2"});

  auto inv = critical_orbit_portrait(parse("[0,0,1]/[1,0,0]"));
  REQUIRE(inv.verified());
  CHECK(edge_strings(*inv.portrait) == std::set<std::string>{"0>inf:2", "inf>0:2"});
  CHECK(eventual_period(*inv.portrait, Point(0)) == 2);
}

TEST_CASE("z^2 - 2") {
  PcfStatus st;
  REQUIRE(is_pcf(parse("[1,0,-2]/[0,0,1]"), {}, &st));
  CHECK(edge_strings(*st.portrait) == std::set<std::string>{"0>-2:2", "-2>2:1", "2>2:1", "inf>inf:2"});
  auto post = postcritical_set(st);
  std::set<std::string> names;
  for (const auto& q : post) names.insert(q.to_string());
  CHECK(post.size() == 3);
  CHECK(names == std::set<std::string>{"-2", "2", "inf"});
  CHECK(std::is_sorted(post.begin(), post.end(), PointLess{}));
  CHECK(eventual_period(*st.portrait, Point(0)) == 1);
  CHECK(st.portrait->to_text().find("0 -(2)-> -2") != std::string::npos);
  CHECK(st.portrait->to_dot().rfind("digraph", 0) == 0);
  const auto* e = st.portrait->edge_from(Point(-2));
  REQUIRE(e);
  CHECK(e->to == Point(2));
  CHECK(st.portrait->edge_from(Point(5)) == nullptr);
}

TEST_CASE("the ten trivial-stabilizer maps have the expected portraits") {
  const auto& known = trivial_stabilizer_pcf_maps();
  REQUIRE(known.size() == 10);
  for (const auto& k : known) {
    auto map = from_sigmas(k.sigmas.sigma1, k.sigmas.sigma2);
    CHECK(map.to_affine_string() == k.affine);
    auto st = critical_orbit_portrait(map);
    REQUIRE_MESSAGE(st.verified(), k.sigmas.to_string());
    std::set<std::string> want;
    for (const auto& [from, to, e] : k.portrait) {
      want.insert(parse_point(from).to_string() + ">" + parse_point(to).to_string() + ":" + std::to_string(e));
    }
    CHECK_MESSAGE(edge_strings(*st.portrait) == want, k.sigmas.to_string());
  }
}

TEST_CASE("sigma (-2,2) sends -2-sqrt(2) to -sqrt(2)") {
  auto map = from_sigmas(-2, 2);
  CHECK(apply(map, parse_point("-2-1*sqrt(2)")) == parse_point("0-1*sqrt(2)"));
  CHECK(apply(map, parse_point("-2+1*sqrt(2)")) == parse_point("0+1*sqrt(2)"));
}

TEST_CASE("a non-PCF map runs past the height cutoff") {
  auto st = critical_orbit_portrait(from_sigmas(2, -12));
  CHECK_FALSE(st.verified());
  CHECK(st.max_height > 1000000);
  CHECK_FALSE(st.reason.empty());
  CHECK_THROWS_AS(postcritical_set(st), std::logic_error);
  CHECK(st.summary().find("UNDETERMINED") != std::string::npos);

  // A tight iteration budget is reported the same way.
  auto cut = critical_orbit_portrait(from_sigmas(2, -8), VerifyOptions{1, 1000000});
  CHECK_FALSE(cut.verified());
}

TEST_CASE("complex critical points are left undetermined") {
  int found = 0;
  for (const auto& s1 : enumerate_rationals(4)) {
    for (const auto& s2 : enumerate_rationals(4)) {
      auto map = from_sigmas(s1, s2);
      if (resultant(map) == 0) continue;
      auto w = wronskian(map);
      if (w[0] == 0 || sgn(w[1] * w[1] - 4 * w[0] * w[2]) >= 0) continue;
      ++found;
      auto st = critical_orbit_portrait(map);
      CHECK_FALSE(st.verified());
      CHECK_FALSE(st.portrait.has_value());
    }
  }
  CHECK(found > 0);
}

TEST_CASE("ramification is 2 exactly at critical points") {
  for (const auto& k : trivial_stabilizer_pcf_maps()) {
    auto map = from_sigmas(k.sigmas.sigma1, k.sigmas.sigma2);
    auto st = critical_orbit_portrait(map);
    REQUIRE(st.verified());
    auto crit = critical_points(map);
    std::set<std::string> cs{crit.points[0].to_string(), crit.points[1].to_string()};
    for (const auto& e : st.portrait->edges()) {
      CHECK(apply(map, e.from) == e.to);
      CHECK((e.ramification == 2) == (cs.count(e.from.to_string()) == 1));
    }
    for (const auto& c : crit.points) CHECK(st.portrait->edge_from(c) != nullptr);
    // Closed under the map.
    for (const auto& e : st.portrait->edges()) CHECK(st.portrait->edge_from(e.to) != nullptr);
  }
}

TEST_CASE("portraits move with conjugation") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> dist(-3, 3);
  const auto& known = trivial_stabilizer_pcf_maps();
  for (const auto& k : known) {
    auto map = from_sigmas(k.sigmas.sigma1, k.sigmas.sigma2);
    if (!critical_points(map).rational) continue;
    auto base = critical_orbit_portrait(map);
    REQUIRE(base.verified());
    for (int i = 0; i < 5; ++i) {
      long a = dist(rng), b = dist(rng), c = dist(rng), d = dist(rng);
      if (a * d - b * c == 0) continue;
      MobiusTransform f(a, b, c, d);
      auto moved = critical_orbit_portrait(conjugate(map, f), VerifyOptions{64, Integer("1000000000000")});
      REQUIRE(moved.verified());
      std::set<std::string> want;
      for (const auto& e : base.portrait->edges()) {
        want.insert(f.apply(e.from).to_string() + ">" + f.apply(e.to).to_string() + ":" + std::to_string(e.ramification));
      }
      CHECK(edge_strings(*moved.portrait) == want);
    }
  }
}
