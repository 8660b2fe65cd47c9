#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "pcf/exact_arith.hpp"

using namespace pcf;

TEST_CASE("height of reduced fractions") {
  CHECK(height(Rational(0)) == 1);
  CHECK(height(make_rational(-10, 3)) == 10);
  CHECK(height(make_rational(20, 3)) == 20);
  CHECK(height(make_rational(-6, 4)) == 3);
  CHECK(height(ExtendedRational::infinity()) == 1);
  CHECK(height(Rational(1)) == 1);
  CHECK(height(Rational(-1)) == 1);
}

TEST_CASE("make_rational reduces and fixes the sign") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> dist(-10000, 10000);
  for (int i = 0; i < 500; ++i) {
    long p = dist(rng), q = dist(rng);
    if (q == 0) continue;
    Rational r = make_rational(p, q);
    CHECK(sgn(r.get_den()) > 0);
    Integer g;
    mpz_gcd(g.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    CHECK(g == 1);
    CHECK(r * q == p);
  }
  CHECK_THROWS(make_rational(1, 0));
}

TEST_CASE("extended rationals") {
  CHECK(ExtendedRational::infinity() == ExtendedRational::infinity());
  CHECK(ExtendedRational::infinity() != ExtendedRational(0));
  CHECK(ExtendedRational(0).to_string() == "0");
  CHECK(ExtendedRational(4, -6).to_string() == "-2/3");
  CHECK_THROWS_AS(ExtendedRational::infinity().value(), std::logic_error);
  CHECK(parse_extended_rational("inf").is_infinite());
  CHECK(parse_extended_rational("-4/6") == ExtendedRational(-2, 3));
}

TEST_CASE("enumerate_rationals small cases") {
  auto one = enumerate_rationals(1);
  REQUIRE(one.size() == 3);
  CHECK(one[0] == -1);
  CHECK(std::set<Rational>(one.begin(), one.end()) == std::set<Rational>{0, 1, -1});

  auto two = enumerate_rationals(2);
  std::set<Rational> want{0, 1, -1, 2, -2, make_rational(1, 2), make_rational(-1, 2)};
  CHECK(two.size() == 7);
  CHECK(std::set<Rational>(two.begin(), two.end()) == want);
}

TEST_CASE("enumerate_rationals matches brute force") {
  for (unsigned long h : {1UL, 2UL, 3UL, 5UL, 10UL, 23UL}) {
    std::set<Rational> brute;
    for (long q = 1; q <= static_cast<long>(h); ++q) {
      for (long p = -static_cast<long>(h); p <= static_cast<long>(h); ++p) {
        if (std::gcd(p, q) == 1 || (p == 0 && q == 1)) brute.insert(make_rational(p, q));
      }
    }
    auto got = enumerate_rationals(h);
    CHECK(got.size() == brute.size());
    CHECK(std::set<Rational>(got.begin(), got.end()) == brute);
    CHECK(count_rationals(h) == brute.size());
    for (const auto& r : got) CHECK(height(r) <= h);
    // (height, denominator, numerator) ascending
    for (std::size_t i = 1; i < got.size(); ++i) {
      auto key = [](const Rational& r) { return std::make_tuple(Integer(height(r)), Integer(r.get_den()), Integer(r.get_num())); };
      CHECK(key(got[i - 1]) < key(got[i]));
    }
  }
  CHECK(enumerate_rationals(20) == enumerate_rationals(20));
}

TEST_CASE("height is submultiplicative") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> num(-500, 500), den(1, 500);
  for (int i = 0; i < 1000; ++i) {
    Rational x = make_rational(num(rng), den(rng));
    Rational y = make_rational(num(rng), den(rng));
    CHECK(height(Rational(x * y)) <= height(x) * height(y));
  }
}

TEST_CASE("squarefree decomposition") {
  Integer s, d;
  squarefree_decompose(72, s, d);
  CHECK(s == 6);
  CHECK(d == 2);
  squarefree_decompose(-20, s, d);
  CHECK(s == 2);
  CHECK(d == -5);
  CHECK(is_squarefree(30));
  CHECK_FALSE(is_squarefree(12));
}

TEST_CASE("quadratic field arithmetic") {
  QuadFieldElement x(make_rational(1, 2), 3, 5);
  QuadFieldElement y(-2, make_rational(1, 3), 5);
  CHECK(x * x.conjugate() == QuadFieldElement::embed(x.norm(), 5));
  CHECK(x.norm() == Rational(make_rational(1, 4) - 45));
  CHECK((x * y).conjugate() == x.conjugate() * y.conjugate());
  CHECK((x + y).conjugate() == x.conjugate() + y.conjugate());
  CHECK(x * x.inverse() == QuadFieldElement::embed(1, 5));
  CHECK((x / y) * y == x);
  CHECK(QuadFieldElement(3, 0, 2) == Rational(3));
  CHECK_THROWS(QuadFieldElement(1, 1, 4));
  CHECK_THROWS(QuadFieldElement(1, 1, 1));
  CHECK_THROWS(QuadFieldElement(1, 1, 2) + QuadFieldElement(1, 1, 3));
}

TEST_CASE("quadratic field ring laws on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> dist(-30, 30), den(1, 9);
  for (int i = 0; i < 200; ++i) {
    auto r = [&] { return make_rational(dist(rng), den(rng)); };
    QuadFieldElement a(r(), r(), 7), b(r(), r(), 7), c(r(), r(), 7);
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a - b).conjugate() == a.conjugate() - b.conjugate());
  }
}

TEST_CASE("quad_roots") {
  auto r = quad_roots(1, 0, -2);
  REQUIRE(r[0].is_quadratic());
  CHECK(r[0].field() == 2);
  CHECK(((r[0] == Point(QuadFieldElement(0, 1, 2)) && r[1] == Point(QuadFieldElement(0, -1, 2))) ||
         (r[1] == Point(QuadFieldElement(0, 1, 2)) && r[0] == Point(QuadFieldElement(0, -1, 2)))));

  auto lin = quad_roots(0, 1, -4);
  CHECK(lin[0] == Point(4));
  CHECK(lin[1].is_infinite());

  auto sqrt5 = quad_roots(1, 6, 4);
  std::set<std::string> s{sqrt5[0].to_string(), sqrt5[1].to_string()};
  CHECK(s == std::set<std::string>{"-3+1*sqrt(5)", "-3-1*sqrt(5)"});

  auto rational = quad_roots(1, 4, 0);
  CHECK(rational[0].is_rational());
  CHECK(rational[1].is_rational());

  CHECK_THROWS_AS(quad_roots(1, 0, 1), ComplexRootsError);
  CHECK_THROWS(quad_roots(0, 0, 0));
}

TEST_CASE("point text encoding round-trips") {
  for (const char* t : {"inf", "0", "-4/3", "7", "-3-1*sqrt(5)", "-1/2+1/2*sqrt(5)", "0-1*sqrt(2)"}) {
    Point p = parse_point(t);
    CHECK(p.to_string() == t);
    CHECK(parse_point(p.to_string()) == p);
  }
  CHECK(parse_point("0+0*sqrt(2)") == Point(0));
  CHECK(parse_point("-3-1*sqrt(5)").height() == 3);
}
