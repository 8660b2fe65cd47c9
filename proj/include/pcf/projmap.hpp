#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pcf/exact_arith.hpp"
#include "pcf/ffdyn.hpp"

namespace pcf {

/// c2 x^2 + c1 xy + c0 y^2, coefficients stored as (c2, c1, c0).
using IntForm = std::array<Integer, 3>;
using RatForm = std::array<Rational, 3>;

struct SigmaPair {
  Rational sigma1;
  Rational sigma2;

  std::string to_string() const { return sigma1.get_str() + "," + sigma2.get_str(); }
  friend bool operator==(const SigmaPair& a, const SigmaPair& b) { return a.sigma1 == b.sigma1 && a.sigma2 == b.sigma2; }
  friend bool operator!=(const SigmaPair& a, const SigmaPair& b) { return !(a == b); }
};

/// z -> F(z, 1) / G(z, 1) with integer forms, content 1, and the first nonzero
/// coefficient of (f2, f1, f0, g2, g1, g0) positive. Map equality is therefore
/// coefficient equality.
class NormalizedQuadMap {
 public:
  NormalizedQuadMap(IntForm f, IntForm g);
  /// Clears denominators, then normalizes.
  static NormalizedQuadMap from_rational(const RatForm& f, const RatForm& g);
  /// "[f2,f1,f0]/[g2,g1,g0]"
  static NormalizedQuadMap parse(std::string_view text);

  const IntForm& f() const { return f_; }
  const IntForm& g() const { return g_; }
  const std::optional<SigmaPair>& provenance() const { return provenance_; }
  void set_provenance(SigmaPair s) { provenance_ = std::move(s); }

  std::string to_string() const;
  /// Human-readable affine form, e.g. "(2z^2)/(-z^2+4z+8)".
  std::string to_affine_string() const;

  friend bool operator==(const NormalizedQuadMap& a, const NormalizedQuadMap& b) { return a.f_ == b.f_ && a.g_ == b.g_; }
  friend bool operator!=(const NormalizedQuadMap& a, const NormalizedQuadMap& b) { return !(a == b); }

 private:
  IntForm f_;
  IntForm g_;
  std::optional<SigmaPair> provenance_;
};

/// z -> (a z + b) / (c z + d) with ad - bc != 0.
class MobiusTransform {
 public:
  MobiusTransform(Integer a, Integer b, Integer c, Integer d);
  static MobiusTransform from_rational(const Rational& a, const Rational& b, const Rational& c, const Rational& d);
  static MobiusTransform identity() { return {1, 0, 0, 1}; }

  const Integer& a() const { return a_; }
  const Integer& b() const { return b_; }
  const Integer& c() const { return c_; }
  const Integer& d() const { return d_; }

  Point apply(const Point& pt) const;
  MobiusTransform inverse() const { return {d_, -b_, -c_, a_}; }

 private:
  Integer a_, b_, c_, d_;
};

/// Fixed-point multipliers counted with multiplicity. Entries are finite
/// points (rational or quadratic).
struct MultiplierTriple {
  std::array<Point, 3> values;
};

struct CriticalPoints {
  std::array<Point, 2> points;
  bool rational = false;
};

NormalizedQuadMap from_sigmas(const Rational& sigma1, const Rational& sigma2);

/// Sylvester resultant of the two binary quadratics.
Integer resultant(const NormalizedQuadMap& map);

/// F_x G_y - F_y G_x as a binary quadratic.
IntForm wronskian(const NormalizedQuadMap& map);

/// Throws std::domain_error when the Wronskian vanishes identically.
CriticalPoints critical_points(const NormalizedQuadMap& map);

/// Throws std::domain_error for degenerate maps and when the multipliers do
/// not lie in Q or a real quadratic field.
MultiplierTriple fixed_point_multipliers(const NormalizedQuadMap& map);

/// (sigma1, sigma2) from traces in Q[z]/(fixed-point polynomial); no roots are
/// extracted.
SigmaPair sigma_invariants(const NormalizedQuadMap& map);

Point apply(const NormalizedQuadMap& map, const Point& pt);

/// Local derivative at pt using the chart z at finite points and 1/z at
/// infinity, on both source and target.
Point local_derivative(const NormalizedQuadMap& map, const Point& pt);

/// f o phi o f^{-1}, content-normalized.
NormalizedQuadMap conjugate(const NormalizedQuadMap& map, const MobiusTransform& f);

/// nullopt signals bad reduction (p divides the resultant). p must be an odd
/// prime.
std::optional<FpMap> reduce_mod_p(const NormalizedQuadMap& map, std::uint32_t p);

/// Reduction of a rational point into P^1(F_p).
FpPoint reduce_point(const Point& pt, std::uint32_t p);

}  // namespace pcf
