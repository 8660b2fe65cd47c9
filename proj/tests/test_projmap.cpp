#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "pcf/projmap.hpp"

using namespace pcf;

namespace {

NormalizedQuadMap parse(const char* s) { return NormalizedQuadMap::parse(s); }

std::multiset<std::string> multiplier_strings(const NormalizedQuadMap& m) {
  std::multiset<std::string> out;
  for (const auto& v : fixed_point_multipliers(m).values) out.insert(v.to_string());
  return out;
}

/// Determinant of the 4x4 Sylvester matrix, expanded by hand.
Integer sylvester(const IntForm& f, const IntForm& g) {
  Rational m[4][4] = {{f[0], f[1], f[2], 0}, {0, f[0], f[1], f[2]}, {g[0], g[1], g[2], 0}, {0, g[0], g[1], g[2]}};
  Rational det = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = -1;
    for (int r = c; r < 4; ++r) {
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return 0;
    if (piv != c) {
      for (int k = 0; k < 4; ++k) std::swap(m[piv][k], m[c][k]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      Rational f2 = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f2 * m[c][k];
    }
  }
  return det.get_num();
}

}  // namespace

TEST_CASE("normal form from sigma invariants") {
  auto m = from_sigmas(2, -8);
  CHECK(m.f() == IntForm{2, 0, 0});
  CHECK(m.g() == IntForm{-1, 4, 8});
  CHECK(m.to_affine_string() == "(2z^2)/(-z^2+4z+8)");
  REQUIRE(m.provenance());
  CHECK(*m.provenance() == SigmaPair{2, -8});
  CHECK(from_sigmas(make_rational(-2, 3), make_rational(4, 3)).to_affine_string() == "(6z^2+8z+8)/(-3z^2+4z+4)");
  CHECK(from_sigmas(-6, 4).to_affine_string() == "(2z^2+8z+8)/(-z^2-4z+4)");
}

TEST_CASE("content and sign normalization") {
  NormalizedQuadMap m({-4, 0, 2}, {0, 0, -6});
  CHECK(m.f() == IntForm{2, 0, -1});
  CHECK(m.g() == IntForm{0, 0, 3});
  CHECK(m == parse("[2,0,-1]/[0,0,3]"));
  CHECK(parse("[0,0,-1]/[4,-4,0]").to_string() == "[0,0,1]/[-4,4,0]");
  CHECK(NormalizedQuadMap::from_rational({make_rational(1, 2), 0, 0}, {0, 0, make_rational(1, 3)}).to_string() == "[3,0,0]/[0,0,2]");
  CHECK_THROWS(parse("[1,2]/[3,4,5]"));
  CHECK_THROWS(parse("garbage"));
}

TEST_CASE("resultant") {
  CHECK(resultant(from_sigmas(2, -8)) == 256);
  CHECK(resultant(from_sigmas(2, 0)) == 0);
  CHECK(resultant(from_sigmas(-6, 12)) == 0);
  // Against the Sylvester determinant over a grid of sigma pairs.
  for (const auto& s1 : enumerate_rationals(4)) {
    for (const auto& s2 : enumerate_rationals(4)) {
      auto m = from_sigmas(s1, s2);
      CHECK(abs(resultant(m)) == abs(sylvester(m.f(), m.g())));
    }
  }
}

TEST_CASE("critical points") {
  auto c = critical_points(from_sigmas(2, -8));
  CHECK(c.rational);
  CHECK(std::set<std::string>{c.points[0].to_string(), c.points[1].to_string()} == std::set<std::string>{"0", "-4"});

  auto sq = critical_points(parse("[1,0,0]/[0,0,1]"));
  CHECK(std::set<std::string>{sq.points[0].to_string(), sq.points[1].to_string()} == std::set<std::string>{"0", "inf"});

  auto sqrt5 = critical_points(from_sigmas(-2, 0));
  CHECK_FALSE(sqrt5.rational);
  CHECK(std::set<std::string>{sqrt5.points[0].to_string(), sqrt5.points[1].to_string()} ==
        std::set<std::string>{"-3+1*sqrt(5)", "-3-1*sqrt(5)"});

  CHECK_THROWS(critical_points(parse("[1,0,0]/[1,0,0]")));
}

TEST_CASE("fixed point multipliers") {
  CHECK(multiplier_strings(parse("[1,0,-2]/[0,0,1]")) == std::multiset<std::string>{"4", "-2", "0"});
  CHECK(multiplier_strings(parse("[1,0,0]/[0,0,1]")) == std::multiset<std::string>{"2", "0", "0"});
  CHECK(multiplier_strings(parse("[0,0,1]/[1,0,0]")) == std::multiset<std::string>{"-2", "-2", "-2"});
  // z^2 - 1: multipliers 1 +- sqrt(5) and 0 at infinity.
  CHECK(multiplier_strings(parse("[1,0,-1]/[0,0,1]")) == std::multiset<std::string>{"0", "1+1*sqrt(5)", "1-1*sqrt(5)"});
}

TEST_CASE("sigma invariants") {
  CHECK(sigma_invariants(parse("[1,0,-2]/[0,0,1]")) == SigmaPair{2, -8});
  CHECK(sigma_invariants(parse("[1,0,-1]/[0,0,1]")) == SigmaPair{2, -4});
  CHECK(sigma_invariants(parse("[0,0,1]/[1,0,0]")) == SigmaPair{-6, 12});
}

TEST_CASE("sigma round trip on the height-6 grid") {
  for (const auto& s1 : enumerate_rationals(6)) {
    for (const auto& s2 : enumerate_rationals(6)) {
      auto m = from_sigmas(s1, s2);
      if (resultant(m) == 0) continue;
      CHECK(sigma_invariants(m) == SigmaPair{s1, s2});
    }
  }
}

TEST_CASE("apply") {
  auto m = from_sigmas(2, -8);
  CHECK(apply(m, Point(-4)) == Point(make_rational(-4, 3)));
  CHECK(apply(m, Point(4)) == Point(4));
  CHECK(apply(m, Point::infinity()) == Point(-2));
  auto pole = from_sigmas(-6, 8);
  CHECK(apply(pole, Point(0)).is_infinite());
  auto sqrt5 = from_sigmas(-2, 0);
  CHECK(apply(sqrt5, parse_point("-3-1*sqrt(5)")) == parse_point("-1/2-1/2*sqrt(5)"));
}

TEST_CASE("conjugation") {
  auto sq = parse("[1,0,0]/[0,0,1]");
  CHECK(conjugate(sq, MobiusTransform::identity()) == sq);
  // 8/z^2 conjugated by z -> z/2 gives 1/z^2.
  auto t8 = parse("[0,0,8]/[1,0,0]");
  CHECK(conjugate(t8, MobiusTransform::from_rational(make_rational(1, 2), 0, 0, 1)) == parse("[0,0,1]/[1,0,0]"));
  CHECK_THROWS(MobiusTransform(1, 2, 2, 4));
}

TEST_CASE("conjugation invariance on random Mobius maps") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> dist(-4, 4);
  // Rational multipliers, then multipliers in Q(sqrt(5)).
  for (auto [s1, s2] : std::vector<std::pair<long, long>>{{2, -8}, {2, -4}}) {
    auto base = from_sigmas(s1, s2);
    auto crit = critical_points(base);
    for (int i = 0; i < 40; ++i) {
      long a = dist(rng), b = dist(rng), c = dist(rng), d = dist(rng);
      if (a * d - b * c == 0) continue;
      MobiusTransform f(a, b, c, d);
      auto conj = conjugate(base, f);
      CHECK(sigma_invariants(conj) == SigmaPair{s1, s2});
      CHECK(multiplier_strings(conj) == multiplier_strings(base));
      // Critical points move by f.
      auto moved = critical_points(conj);
      std::set<std::string> want{f.apply(crit.points[0]).to_string(), f.apply(crit.points[1]).to_string()};
      CHECK(std::set<std::string>{moved.points[0].to_string(), moved.points[1].to_string()} == want);
      // f o phi = phi^f o f on sample points.
      for (long x : {-3L, 0L, 2L, 5L}) CHECK(f.apply(apply(base, Point(x))) == apply(conj, f.apply(Point(x))));
    }
  }
  // Cubic-irrational multipliers are rejected, but the sigma pair still transports.
  auto cubic = from_sigmas(-6, 4);
  CHECK_THROWS_AS(fixed_point_multipliers(cubic), std::domain_error);
  CHECK(sigma_invariants(conjugate(cubic, MobiusTransform(1, 1, 0, 2))) == SigmaPair{-6, 4});
}

TEST_CASE("critical values have a single preimage") {
  for (auto [s1, s2] : std::vector<std::pair<long, long>>{{2, -8}, {2, -4}, {-6, 4}, {-6, 8}, {-2, 4}, {-6, 10}}) {
    auto m = from_sigmas(s1, s2);
    for (const auto& g : critical_points(m).points) {
      CHECK(local_derivative(m, g) == Point(0));
      Point v = apply(m, g);
      // Preimages of v: roots of F - v G (or G when v is infinite).
      const auto& f = m.f();
      const auto& gg = m.g();
      std::array<Point, 2> pre = v.is_infinite() ? quad_roots(gg[0], gg[1], gg[2])
                                                 : quad_roots(Rational(f[0] - v.rational() * gg[0]), Rational(f[1] - v.rational() * gg[1]),
                                                              Rational(f[2] - v.rational() * gg[2]));
      CHECK(pre[0] == pre[1]);
      CHECK(pre[0] == g);
    }
  }
}

TEST_CASE("reduction modulo p") {
  auto m = from_sigmas(2, -8);
  auto r = reduce_mod_p(m, 7);
  REQUIRE(r);
  CHECK(r->f() == std::array<std::uint32_t, 3>{2, 0, 0});
  CHECK(r->g() == std::array<std::uint32_t, 3>{6, 4, 1});
  CHECK_FALSE(reduce_mod_p(from_sigmas(make_rational(-2, 3), make_rational(4, 3)), 3));
  CHECK(reduce_point(Point(make_rational(-4, 3)), 7) == FpPoint::finite(1));
  CHECK(reduce_point(Point(make_rational(1, 7)), 7) == FpPoint::infinity(7));
  CHECK(reduce_point(Point::infinity(), 7) == FpPoint::infinity(7));
}

TEST_CASE("bad reduction exactly at primes dividing the resultant") {
  for (const auto& s1 : enumerate_rationals(5)) {
    for (const auto& s2 : enumerate_rationals(5)) {
      auto m = from_sigmas(s1, s2);
      Integer res = resultant(m);
      if (res == 0) continue;
      for (auto p : odd_primes_up_to(100)) {
        bool bad = mpz_fdiv_ui(res.get_mpz_t(), p) == 0;
        CHECK(bad == !reduce_mod_p(m, p).has_value());
      }
    }
  }
}

TEST_CASE("denominator primes are bad primes") {
  for (const auto& s1 : enumerate_rationals(12)) {
    for (const auto& s2 : {make_rational(1, 5), make_rational(-7, 9), make_rational(4, 11), Rational(3)}) {
      auto m = from_sigmas(s1, s2);
      Integer res = resultant(m);
      if (res == 0) continue;
      Integer dens = s1.get_den() * s2.get_den();
      for (auto p : odd_primes_up_to(50)) {
        if (mpz_fdiv_ui(dens.get_mpz_t(), p) == 0) CHECK(mpz_fdiv_ui(res.get_mpz_t(), p) == 0);
      }
    }
  }
}
