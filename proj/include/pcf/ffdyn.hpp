#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pcf {

/// A point of P^1(F_p) stored as a single index: x in [0, p) for the affine
/// point (x : 1) and p for (1 : 0).
struct FpPoint {
  std::uint32_t index = 0;

  static FpPoint finite(std::uint32_t x) { return {x}; }
  static FpPoint infinity(std::uint32_t p) { return {p}; }
  bool is_infinite(std::uint32_t p) const { return index == p; }

  friend bool operator==(FpPoint a, FpPoint b) { return a.index == b.index; }
  friend bool operator!=(FpPoint a, FpPoint b) { return a.index != b.index; }
  friend bool operator<(FpPoint a, FpPoint b) { return a.index < b.index; }
};

std::string to_string(FpPoint pt, std::uint32_t p);

/// Modular helpers for odd primes p < 2^16.
std::uint32_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint32_t p);
std::uint32_t mod_inv(std::uint32_t a, std::uint32_t p);
bool is_prime(std::uint64_t n);
/// The first `count` odd primes: 3, 5, 7, ...
std::vector<std::uint32_t> first_odd_primes(std::size_t count);
std::vector<std::uint32_t> odd_primes_up_to(std::uint32_t bound);

class OrbitWorkspace;

/// phi = [f2 x^2 + f1 xy + f0 y^2 : g2 x^2 + g1 xy + g0 y^2] over F_p.
class FpMap {
 public:
  FpMap(std::uint32_t p, std::array<std::uint32_t, 3> f, std::array<std::uint32_t, 3> g);
  /// Skips the primality check and reduction; coefficients must already lie in [0, p).
  struct Unchecked {};
  FpMap(Unchecked, std::uint32_t p, std::array<std::uint32_t, 3> f, std::array<std::uint32_t, 3> g)
      : p_(p), f_(f), g_(g) {}
  /// Database key form [2x^2 + bxy + by^2, -x^2 + (4-b)xy + cy^2].
  static FpMap from_key(std::uint32_t p, std::uint32_t b, std::uint32_t c);

  std::uint32_t prime() const { return p_; }
  const std::array<std::uint32_t, 3>& f() const { return f_; }
  const std::array<std::uint32_t, 3>& g() const { return g_; }

  std::uint32_t resultant() const;
  bool has_degree_two() const { return resultant() != 0; }
  /// Half the Wronskian F_x G_y - F_y G_x, as (x^2, xy, y^2) coefficients.
  std::array<std::uint32_t, 3> half_wronskian() const;
  /// Both critical points (sorted; equal for a double root), or nullopt when
  /// the Wronskian is irreducible over F_p.
  std::optional<std::array<FpPoint, 2>> critical_points() const;
  /// Same, using the workspace's square-root table.
  std::optional<std::array<FpPoint, 2>> critical_points(const OrbitWorkspace& ws) const;

  FpPoint apply(FpPoint pt) const;
  /// Derivative of the map at pt in the charts z (finite) or 1/z (infinity) on
  /// source and target.
  std::uint32_t local_derivative(FpPoint pt) const;

  /// f o phi o f^{-1} for f = [[a, b], [c, d]] invertible mod p.
  FpMap conjugate(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) const;

  friend bool operator==(const FpMap& x, const FpMap& y) {
    return x.p_ == y.p_ && x.f_ == y.f_ && x.g_ == y.g_;
  }

 private:
  std::uint32_t p_;
  std::array<std::uint32_t, 3> f_;
  std::array<std::uint32_t, 3> g_;
};

/// Tail/cycle decomposition of a finite-field orbit plus the cycle multiplier.
struct OrbitData {
  std::uint32_t tail = 0;
  std::uint32_t cycle_length = 0;  // m
  std::uint32_t multiplier = 0;    // lambda in F_p
  std::uint32_t order = 0;         // r; 0 marks a superattracting cycle
  FpPoint cycle_entry{};

  bool superattracting() const { return multiplier == 0; }
};

/// A set {m} or {m, m*r} of candidate global periods. Intersections of such
/// sets never exceed two elements, so storage is inline.
class PeriodSet {
 public:
  PeriodSet() = default;
  explicit PeriodSet(std::uint32_t m) : values_{m, 0}, size_(1) {}
  PeriodSet(std::uint32_t m, std::uint32_t r);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(std::uint32_t n) const;
  std::uint32_t operator[](std::size_t i) const { return values_[i]; }
  std::vector<std::uint32_t> values() const { return {values_.begin(), values_.begin() + size_}; }

  PeriodSet intersect(const PeriodSet& o) const;
  /// "{1,3}"
  std::string to_string() const;
  static PeriodSet parse(const std::string& text);

  friend bool operator==(const PeriodSet& a, const PeriodSet& b) {
    return a.size_ == b.size_ && a.values_[0] == b.values_[0] && (a.size_ < 2 || a.values_[1] == b.values_[1]);
  }

 private:
  std::array<std::uint32_t, 2> values_{0, 0};
  std::uint8_t size_ = 0;
};

OrbitData orbit_data(const FpMap& map, FpPoint start);
std::uint32_t mult_order(std::uint32_t lambda, std::uint32_t p);
PeriodSet possible_periods(const OrbitData& orbit);

/// Per-prime scratch state for repeated orbit computations: a stamped visit
/// table (no clearing between orbits) and the factorization of p - 1.
class OrbitWorkspace {
 public:
  explicit OrbitWorkspace(std::uint32_t p);

  std::uint32_t prime() const { return p_; }
  OrbitData orbit(const FpMap& map, FpPoint start);
  std::uint32_t order(std::uint32_t lambda) const;
  std::uint32_t inverse(std::uint32_t a) const { return inv_[a]; }
  /// Square root of a quadratic residue, or nullopt for non-residues.
  std::optional<std::uint32_t> sqrt(std::uint32_t a) const;

 private:
  std::uint32_t p_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::int32_t> sqrt_;
  std::vector<std::uint32_t> order_factors_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> position_;
  std::vector<FpPoint> path_;
  std::uint32_t generation_ = 0;
};

}  // namespace pcf
