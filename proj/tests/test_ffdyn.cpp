#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "pcf/ffdyn.hpp"

using namespace pcf;

namespace {

FpMap sample_map() { return FpMap(7, {2, 0, 0}, {6, 4, 1}); }

struct BruteOrbit {
  std::uint32_t tail, m, lambda;
};

/// Naive orbit: map evaluation and derivative computed from scratch with
/// homogeneous coordinates, cycle detected with std::map.
BruteOrbit brute_orbit(std::uint32_t p, const std::array<std::uint32_t, 3>& f, const std::array<std::uint32_t, 3>& g,
                       std::uint32_t start) {
  auto ev = [&](const std::array<std::uint32_t, 3>& h, std::uint64_t x, std::uint64_t y) {
    return (h[0] * x % p * x + h[1] * x % p * y + h[2] * y % p * y) % p;
  };
  auto step = [&](std::uint32_t i) -> std::uint32_t {
    std::uint64_t x = i == p ? 1 : i, y = i == p ? 0 : 1;
    std::uint64_t a = ev(f, x, y), b = ev(g, x, y);
    if (b == 0) return p;
    return static_cast<std::uint32_t>(a * mod_inv(static_cast<std::uint32_t>(b), p) % p);
  };
  // Derivative by the quotient rule in the affine chart, swapping to 1/z
  // coordinates at infinity on either side.
  auto deriv = [&](std::uint32_t i) -> std::uint64_t {
    auto poly = [&](const std::array<std::uint32_t, 3>& h, std::uint64_t t, bool inv) {
      // h(z,1) if !inv, h(1,w) if inv
      return inv ? (h[0] + h[1] * t + h[2] * t % p * t) % p : (h[0] * t % p * t + h[1] * t + h[2]) % p;
    };
    auto dpoly = [&](const std::array<std::uint32_t, 3>& h, std::uint64_t t, bool inv) {
      return inv ? (h[1] + 2 * h[2] * t) % p : (2 * h[0] * t + h[1]) % p;
    };
    bool src_inf = i == p;
    std::uint64_t t = src_inf ? 0 : i;
    std::uint64_t F = poly(f, t, src_inf), G = poly(g, t, src_inf);
    std::uint64_t dF = dpoly(f, t, src_inf), dG = dpoly(g, t, src_inf);
    bool dst_inf = step(i) == p;
    std::uint64_t num, den;
    if (!dst_inf) {
      num = (dF * G % p + p - F * dG % p) % p;
      den = G * G % p;
    } else {
      num = (dG * F % p + p - G * dF % p) % p;
      den = F * F % p;
    }
    return num * mod_inv(static_cast<std::uint32_t>(den), p) % p;
  };
  std::map<std::uint32_t, std::uint32_t> seen;
  std::vector<std::uint32_t> path;
  std::uint32_t x = start;
  while (!seen.count(x)) {
    seen[x] = static_cast<std::uint32_t>(path.size());
    path.push_back(x);
    x = step(x);
  }
  std::uint32_t tail = seen[x];
  std::uint32_t m = static_cast<std::uint32_t>(path.size()) - tail;
  std::uint64_t lambda = 1;
  for (std::uint32_t k = tail; k < path.size(); ++k) lambda = lambda * deriv(path[k]) % p;
  return {tail, m, static_cast<std::uint32_t>(lambda)};
}

}  // namespace

TEST_CASE("modular helpers") {
  CHECK(mod_pow(3, 6, 7) == 1);
  CHECK(mod_inv(3, 7) == 5);
  CHECK(is_prime(7919));
  CHECK_FALSE(is_prime(7917));
  CHECK(first_odd_primes(5) == std::vector<std::uint32_t>{3, 5, 7, 11, 13});
  CHECK(first_odd_primes(130).back() == 739);
  CHECK(odd_primes_up_to(20) == std::vector<std::uint32_t>{3, 5, 7, 11, 13, 17, 19});
}

TEST_CASE("orbit examples modulo 7") {
  auto m = sample_map();
  auto o = orbit_data(m, FpPoint::finite(3));
  CHECK(o.tail == 2);
  CHECK(o.cycle_length == 1);
  CHECK(o.multiplier == 4);
  CHECK(o.order == 3);
  CHECK(o.cycle_entry == FpPoint::finite(4));
  CHECK(possible_periods(o) == PeriodSet(1, 3));
  CHECK(possible_periods(o).to_string() == "{1,3}");

  auto z = orbit_data(m, FpPoint::finite(0));
  CHECK(z.tail == 0);
  CHECK(z.cycle_length == 1);
  CHECK(z.superattracting());
  CHECK(possible_periods(z) == PeriodSet(1));
}

TEST_CASE("critical points over F_7") {
  auto c = sample_map().critical_points();
  REQUIRE(c);
  CHECK((*c)[0] == FpPoint::finite(0));
  CHECK((*c)[1] == FpPoint::finite(3));
  for (auto pt : *c) CHECK(sample_map().local_derivative(pt) == 0);
}

TEST_CASE("multiplicative order") {
  CHECK(mult_order(4, 7) == 3);
  for (auto p : first_odd_primes(40)) {
    CHECK(mult_order(1, p) == 1);
    CHECK(mult_order(p - 1, p) == 2);
    OrbitWorkspace ws(p);
    for (std::uint32_t a = 1; a < p; ++a) {
      std::uint32_t r = 1;
      std::uint64_t x = a;
      while (x != 1) {
        x = x * a % p;
        ++r;
      }
      CHECK(mult_order(a, p) == r);
      CHECK(ws.order(a) == r);
      CHECK((p - 1) % r == 0);
    }
  }
}

TEST_CASE("period sets") {
  CHECK(PeriodSet(2, 1) == PeriodSet(2));
  CHECK(PeriodSet(1, 3).intersect(PeriodSet(3)) == PeriodSet(3));
  CHECK(PeriodSet(1, 3).intersect(PeriodSet(2)).empty());
  CHECK(PeriodSet(2, 2).intersect(PeriodSet(2, 3)) == PeriodSet(2));
  CHECK(PeriodSet::parse("{1,3}") == PeriodSet(1, 3));
  CHECK(PeriodSet::parse("{}").empty());
  CHECK_THROWS(PeriodSet::parse("1,3"));
}

TEST_CASE("workspace square roots") {
  for (auto p : first_odd_primes(30)) {
    OrbitWorkspace ws(p);
    for (std::uint32_t a = 0; a < p; ++a) {
      bool residue = a == 0 || mod_pow(a, (p - 1) / 2, p) == 1;
      auto s = ws.sqrt(a);
      CHECK(s.has_value() == residue);
      if (s) CHECK(static_cast<std::uint64_t>(*s) * *s % p == a);
      if (a) CHECK(ws.inverse(a) == mod_inv(a, p));
    }
  }
}

TEST_CASE("orbits agree with a brute-force oracle") {
  std::mt19937 rng(17);
  for (auto p : first_odd_primes(25)) {
    std::uniform_int_distribution<std::uint32_t> coef(0, p - 1);
    OrbitWorkspace ws(p);
    int tried = 0;
    while (tried < 20) {
      std::array<std::uint32_t, 3> f{coef(rng), coef(rng), coef(rng)}, g{coef(rng), coef(rng), coef(rng)};
      FpMap map(p, f, g);
      if (!map.has_degree_two()) continue;
      ++tried;
      for (std::uint32_t s = 0; s <= p; ++s) {
        auto want = brute_orbit(p, f, g, s);
        auto got = orbit_data(map, FpPoint{s});
        CHECK(got.tail == want.tail);
        CHECK(got.cycle_length == want.m);
        CHECK(got.multiplier == want.lambda);
        CHECK(got.tail + got.cycle_length <= p + 2);
        CHECK(got.superattracting() == (got.multiplier == 0));
        auto again = ws.orbit(map, FpPoint{s});
        CHECK(again.tail == got.tail);
        CHECK(again.cycle_length == got.cycle_length);
        CHECK(again.multiplier == got.multiplier);
      }
    }
  }
}

TEST_CASE("multipliers are invariant under conjugation") {
  std::mt19937 rng(23);
  for (auto p : {7u, 11u, 101u, 401u}) {
    std::uniform_int_distribution<std::uint32_t> coef(0, p - 1);
    for (int i = 0; i < 15; ++i) {
      std::array<std::uint32_t, 3> f{coef(rng), coef(rng), coef(rng)}, g{coef(rng), coef(rng), coef(rng)};
      FpMap map(p, f, g);
      if (!map.has_degree_two()) continue;
      std::uint32_t a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
      if ((static_cast<std::uint64_t>(a) * d + p * static_cast<std::uint64_t>(p) - static_cast<std::uint64_t>(b) * c) % p == 0) continue;
      FpMap conj = map.conjugate(a, b, c, d);
      // Mobius image of a point.
      auto move = [&](std::uint32_t s) -> FpPoint {
        std::uint64_t x = s == p ? 1 : s, y = s == p ? 0 : 1;
        std::uint64_t nx = (a * x + b * y) % p, ny = (c * x + d * y) % p;
        if (ny == 0) return FpPoint::infinity(p);
        return FpPoint::finite(static_cast<std::uint32_t>(nx * mod_inv(static_cast<std::uint32_t>(ny), p) % p));
      };
      for (std::uint32_t s = 0; s <= p; ++s) {
        auto o1 = orbit_data(map, FpPoint{s});
        auto o2 = orbit_data(conj, move(s));
        CHECK(o1.tail == o2.tail);
        CHECK(o1.cycle_length == o2.cycle_length);
        CHECK(o1.multiplier == o2.multiplier);
      }
    }
  }
}

TEST_CASE("key form") {
  auto m = FpMap::from_key(7, 0, 1);
  CHECK(m.f() == std::array<std::uint32_t, 3>{2, 0, 0});
  CHECK(m.g() == std::array<std::uint32_t, 3>{6, 4, 1});
  CHECK(m == sample_map());
}
