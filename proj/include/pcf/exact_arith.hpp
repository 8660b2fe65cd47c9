#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pcf {

using Integer = mpz_class;
using Rational = mpq_class;

/// Builds p/q in lowest terms with a positive denominator.
Rational make_rational(const Integer& num, const Integer& den);

/// A point of P^1(Q): a reduced fraction or the point at infinity (1 : 0).
class ExtendedRational {
 public:
  ExtendedRational() = default;
  ExtendedRational(const Rational& v);  // NOLINT(google-explicit-constructor)
  ExtendedRational(long num, long den = 1);

  static ExtendedRational infinity();

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error for infinity.
  const Rational& value() const;
  const Integer& numerator() const;
  const Integer& denominator() const;

  std::string to_string() const;

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b);
  friend bool operator!=(const ExtendedRational& a, const ExtendedRational& b) { return !(a == b); }

 private:
  bool infinite_ = false;
  Rational value_ = 0;
};

/// Multiplicative height max(|p|, q) of a reduced fraction; 1 for infinity.
Integer height(const Rational& x);
Integer height(const ExtendedRational& x);

/// Every finite rational of height <= h_max, ordered by (height, denominator,
/// numerator) ascending.
std::vector<Rational> enumerate_rationals(unsigned long h_max);

/// Number of reduced fractions of height <= h_max, counted without
/// materializing them.
std::uint64_t count_rationals(unsigned long h_max);

bool is_squarefree(long n);

/// Writes n = s^2 * d with d squarefree (sign carried by d). Throws
/// std::range_error if |n| has a prime factor we cannot split by trial
/// division within the internal bound.
void squarefree_decompose(const Integer& n, Integer& square_root_part, Integer& squarefree_part);

/// a + b*sqrt(D) with D squarefree and D not in {0, 1}.
class QuadFieldElement {
 public:
  QuadFieldElement(const Rational& a, const Rational& b, long d);
  /// The rational r embedded in Q(sqrt(d)).
  static QuadFieldElement embed(const Rational& r, long d) { return {r, 0, d}; }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long d() const { return d_; }

  bool is_rational() const { return b_ == 0; }
  QuadFieldElement conjugate() const { return {a_, -b_, d_}; }
  /// a^2 - D b^2
  Rational norm() const;
  QuadFieldElement inverse() const;

  std::string to_string() const;
  /// Floating approximation; only used for diagnostics and numeric ordering.
  long double approx() const;

  QuadFieldElement& operator+=(const QuadFieldElement& o);
  QuadFieldElement& operator-=(const QuadFieldElement& o);
  QuadFieldElement& operator*=(const QuadFieldElement& o);
  QuadFieldElement& operator/=(const QuadFieldElement& o);
  QuadFieldElement operator-() const { return {-a_, -b_, d_}; }

  friend QuadFieldElement operator+(QuadFieldElement x, const QuadFieldElement& y) { return x += y; }
  friend QuadFieldElement operator-(QuadFieldElement x, const QuadFieldElement& y) { return x -= y; }
  friend QuadFieldElement operator*(QuadFieldElement x, const QuadFieldElement& y) { return x *= y; }
  friend QuadFieldElement operator/(QuadFieldElement x, const QuadFieldElement& y) { return x /= y; }

  friend bool operator==(const QuadFieldElement& x, const QuadFieldElement& y);
  friend bool operator!=(const QuadFieldElement& x, const QuadFieldElement& y) { return !(x == y); }
  friend bool operator==(const QuadFieldElement& x, const Rational& r) { return x.b_ == 0 && x.a_ == r; }

 private:
  void check_field(const QuadFieldElement& o) const;

  Rational a_;
  Rational b_;
  long d_;
};

/// A point of P^1 over Q or over a real quadratic field Q(sqrt(D)).
/// Quadratic values with zero irrational part collapse to rationals, so
/// equality is a structural comparison.
class Point {
 public:
  struct Infinity {
    friend bool operator==(Infinity, Infinity) { return true; }
  };

  Point() : v_(Rational(0)) {}
  Point(const Rational& r) : v_(r) {}  // NOLINT(google-explicit-constructor)
  Point(long r) : v_(Rational(r)) {}   // NOLINT(google-explicit-constructor)
  Point(const ExtendedRational& r);    // NOLINT(google-explicit-constructor)
  Point(const QuadFieldElement& q);    // NOLINT(google-explicit-constructor)
  static Point infinity();

  bool is_infinite() const { return std::holds_alternative<Infinity>(v_); }
  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  bool is_quadratic() const { return std::holds_alternative<QuadFieldElement>(v_); }

  const Rational& rational() const;
  const QuadFieldElement& quadratic() const;
  /// Field discriminant D for quadratic points, 0 otherwise.
  long field() const;

  /// Canonical textual encoding: "inf", "p/q" or "a+b*sqrt(D)".
  std::string to_string() const;
  /// max(H(a), H(b)) for a + b sqrt(D); H for rationals; 1 for infinity.
  Integer height() const;
  ExtendedRational to_extended() const;

  friend bool operator==(const Point& a, const Point& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

 private:
  std::variant<Infinity, Rational, QuadFieldElement> v_;
};

/// Strict weak order on points by canonical encoding; used for sorted output.
struct PointLess {
  bool operator()(const Point& a, const Point& b) const;
};

class ComplexRootsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Roots in P^1 of a z^2 + b z + c. A vanishing leading coefficient puts a root
/// at infinity. Irrational roots come back as a conjugate pair over Q(sqrt(D)).
std::array<Point, 2> quad_roots(const Rational& a, const Rational& b, const Rational& c);

Rational parse_rational(std::string_view text);
ExtendedRational parse_extended_rational(std::string_view text);
Point parse_point(std::string_view text);

std::string to_string(const Rational& r);

}  // namespace pcf
