#include "pcf/projmap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pcf {

namespace {

Integer content_of(const IntForm& f, const IntForm& g) {
  Integer c = 0;
  for (const auto& v : f) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), v.get_mpz_t());
  for (const auto& v : g) mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), v.get_mpz_t());
  return c;
}

std::string poly_string(const IntForm& c) {
  std::string out;
  const char* mono[3] = {"z^2", "z", ""};
  for (int i = 0; i < 3; ++i) {
    if (c[i] == 0) continue;
    Integer a = abs(c[i]);
    if (sgn(c[i]) < 0) {
      out += '-';
    } else if (!out.empty()) {
      out += '+';
    }
    if (a != 1 || i == 2) out += a.get_str();
    out += mono[i];
  }
  return out.empty() ? "0" : out;
}

// Scalar helpers so evaluation works over Q and Q(sqrt(D)) with one template.
template <class T>
T lift(const Integer& v, long d);

template <>
Rational lift<Rational>(const Integer& v, long) {
  return Rational(v);
}

template <>
QuadFieldElement lift<QuadFieldElement>(const Integer& v, long d) {
  return QuadFieldElement::embed(Rational(v), d);
}

inline bool is_zero(const Rational& r) { return r == 0; }
inline bool is_zero(const QuadFieldElement& q) { return q.a() == 0 && q.b() == 0; }

template <class T>
T eval_form(const IntForm& c, const T& x, const T& y, long d) {
  return lift<T>(c[0], d) * x * x + lift<T>(c[1], d) * x * y + lift<T>(c[2], d) * y * y;
}

template <class T>
Point apply_homogeneous(const NormalizedQuadMap& map, const T& x, const T& y, long d) {
  T fv = eval_form(map.f(), x, y, d);
  T gv = eval_form(map.g(), x, y, d);
  if (is_zero(gv)) {
    if (is_zero(fv)) throw std::domain_error("apply: both forms vanish at the point (degenerate map)");
    return Point::infinity();
  }
  T q = fv / gv;
  return Point(q);
}

template <class T>
Point derivative_homogeneous(const NormalizedQuadMap& map, const T& x, const T& y, bool src_inf, long d) {
  IntForm w = wronskian(map);
  T hw = eval_form(w, x, y, d) / lift<T>(2, d);
  T fv = eval_form(map.f(), x, y, d);
  T gv = eval_form(map.g(), x, y, d);
  bool dst_inf = is_zero(gv);
  const T& base = dst_inf ? fv : gv;
  if (is_zero(base)) throw std::domain_error("local_derivative: degenerate map");
  T val = hw / (base * base);
  if (src_inf != dst_inf) val = lift<T>(0, d) - val;
  return Point(val);
}

// --- Q[z]/(P) with P monic cubic, used for multiplier symmetric functions.

using Residue = std::array<Rational, 3>;  // coefficients of 1, z, z^2
using Mat3 = std::array<std::array<Rational, 3>, 3>;

Residue times_z(const Residue& r, const Residue& p) {
  // z^3 = -(p0 + p1 z + p2 z^2)
  return {-r[2] * p[0], r[0] - r[2] * p[1], r[1] - r[2] * p[2]};
}

Mat3 multiplication_matrix(const Residue& h, const Residue& p) {
  Mat3 m;
  Residue col = h;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) m[i][k] = col[i];
    col = times_z(col, p);
  }
  return m;
}

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Rational s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  }
  return c;
}

Rational det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m) {
  Rational det = det3(m);
  if (det == 0) throw std::domain_error("singular multiplication matrix");
  Mat3 inv;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
    }
  }
  return inv;
}

Rational trace(const Mat3& m) { return m[0][0] + m[1][1] + m[2][2]; }

/// Moves a fixed point at infinity into the affine chart by conjugation.
NormalizedQuadMap without_fixed_infinity(const NormalizedQuadMap& map) {
  if (map.g()[0] != 0) return map;
  for (long a = 0;; ++a) {
    Point image = apply(map, Point(a));
    if (image != Point(a)) return conjugate(map, MobiusTransform(0, 1, 1, -a));
  }
}

/// Matrix of multiplication by the multiplier function on Q[z]/(fixed-point
/// polynomial); its eigenvalues are the fixed-point multipliers.
Mat3 multiplier_operator(const NormalizedQuadMap& input) {
  if (resultant(input) == 0) throw std::domain_error("multipliers of a degenerate map");
  NormalizedQuadMap map = without_fixed_infinity(input);
  const auto& f = map.f();
  const auto& g = map.g();
  // P(z) = z G(z) - F(z) = g2 z^3 + (g1 - f2) z^2 + (g0 - f1) z - f0
  Rational lead(g[0]);
  Residue p = {Rational(-f[2]) / lead, Rational(g[2] - f[1]) / lead, Rational(g[1] - f[0]) / lead};
  IntForm w = wronskian(map);
  Residue hw = {Rational(w[2]) / 2, Rational(w[1]) / 2, Rational(w[0]) / 2};
  Residue gr = {Rational(g[2]), Rational(g[1]), Rational(g[0])};
  Mat3 mg_inv = inverse3(multiplication_matrix(gr, p));
  return matmul(multiplication_matrix(hw, p), matmul(mg_inv, mg_inv));
}

std::vector<Integer> positive_divisors(const Integer& n) {
  Integer m = abs(n);
  if (m > Integer("1000000000000")) throw std::range_error("divisor enumeration bound exceeded");
  std::vector<std::pair<Integer, unsigned>> fac;
  for (Integer q = 2; q * q <= m; ++q) {
    unsigned e = 0;
    while (m % q == 0) {
      m /= q;
      ++e;
    }
    if (e) fac.emplace_back(q, e);
  }
  if (m > 1) fac.emplace_back(m, 1);
  std::vector<Integer> out{1};
  for (auto& [q, e] : fac) {
    std::size_t n0 = out.size();
    Integer pw = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pw *= q;
      for (std::size_t i = 0; i < n0; ++i) out.push_back(out[i] * pw);
    }
  }
  return out;
}

Rational eval_poly(const std::array<Rational, 4>& c, const Rational& t) {
  return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
}

/// Real roots of a cubic with nonzero leading coefficient, approximately.
std::vector<long double> approx_real_roots(const std::array<Rational, 4>& c) {
  long double a3 = c[3].get_d(), a2 = c[2].get_d(), a1 = c[1].get_d(), a0 = c[0].get_d();
  auto f = [&](long double x) { return ((a3 * x + a2) * x + a1) * x + a0; };
  long double bound = 1;
  for (long double v : {a2, a1, a0}) bound = std::max(bound, 1 + std::fabs(v / a3));
  std::vector<long double> cuts{-bound};
  long double da = 3 * a3, db = 2 * a2, dc = a1;
  long double disc = db * db - 4 * da * dc;
  if (disc > 0) {
    long double s = std::sqrt(disc);
    long double r1 = (-db - s) / (2 * da), r2 = (-db + s) / (2 * da);
    if (r1 > r2) std::swap(r1, r2);
    cuts.push_back(r1);
    cuts.push_back(r2);
  }
  cuts.push_back(bound);
  std::vector<long double> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    long double lo = cuts[i], hi = cuts[i + 1];
    long double flo = f(lo), fhi = f(hi);
    if (flo == 0) {
      out.push_back(lo);
      continue;
    }
    if ((flo < 0) == (fhi < 0)) continue;
    for (int it = 0; it < 200; ++it) {
      long double mid = (lo + hi) / 2;
      long double fm = f(mid);
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    out.push_back((lo + hi) / 2);
  }
  return out;
}

std::optional<Rational> rational_root(const std::array<Rational, 4>& c) {
  if (c[0] == 0) return Rational(0);
  Integer lcm = 1;
  for (const auto& v : c) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
  Integer lead = Integer(c[3] * lcm);
  for (long double r : approx_real_roots(c)) {
    for (const Integer& e : positive_divisors(lead)) {
      Integer center;
      mpz_set_d(center.get_mpz_t(), static_cast<double>(std::llround(r * e.get_d())));
      for (int delta = -1; delta <= 1; ++delta) {
        Rational t = make_rational(center + delta, e);
        if (eval_poly(c, t) == 0) return t;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// NormalizedQuadMap

NormalizedQuadMap::NormalizedQuadMap(IntForm f, IntForm g) : f_(std::move(f)), g_(std::move(g)) {
  Integer c = content_of(f_, g_);
  if (c == 0) throw std::domain_error("NormalizedQuadMap: all coefficients are zero");
  for (auto& v : f_) v /= c;
  for (auto& v : g_) v /= c;
  int sign = 0;
  for (const auto& v : f_) {
    if (!sign && v != 0) sign = sgn(v);
  }
  for (const auto& v : g_) {
    if (!sign && v != 0) sign = sgn(v);
  }
  if (sign < 0) {
    for (auto& v : f_) v = -v;
    for (auto& v : g_) v = -v;
  }
}

NormalizedQuadMap NormalizedQuadMap::from_rational(const RatForm& f, const RatForm& g) {
  Integer l = 1;
  for (const auto& v : f) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  for (const auto& v : g) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  IntForm fi, gi;
  for (int i = 0; i < 3; ++i) {
    fi[i] = Integer(f[i] * l);
    gi[i] = Integer(g[i] * l);
  }
  return {fi, gi};
}

NormalizedQuadMap NormalizedQuadMap::parse(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') s += ch;
  }
  auto parse_form = [](const std::string& part) {
    if (part.size() < 2 || part.front() != '[' || part.back() != ']') throw std::invalid_argument("malformed form: " + part);
    IntForm out;
    std::stringstream ss(part.substr(1, part.size() - 2));
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
      if (n == 3) throw std::invalid_argument("form has more than three coefficients: " + part);
      if (item.empty() || out[n].set_str(item, 10) != 0) throw std::invalid_argument("bad coefficient: " + item);
      ++n;
    }
    if (n != 3) throw std::invalid_argument("form needs three coefficients: " + part);
    return out;
  };
  auto slash = s.find("]/[");
  if (slash == std::string::npos) throw std::invalid_argument("malformed map: " + s);
  return {parse_form(s.substr(0, slash + 1)), parse_form(s.substr(slash + 2))};
}

std::string NormalizedQuadMap::to_string() const {
  auto form = [](const IntForm& c) { return "[" + c[0].get_str() + "," + c[1].get_str() + "," + c[2].get_str() + "]"; };
  return form(f_) + "/" + form(g_);
}

std::string NormalizedQuadMap::to_affine_string() const {
  if (g_[0] == 0 && g_[1] == 0 && g_[2] == 1) return poly_string(f_);
  return "(" + poly_string(f_) + ")/(" + poly_string(g_) + ")";
}

// ---------------------------------------------------------------------------
// MobiusTransform

MobiusTransform::MobiusTransform(Integer a, Integer b, Integer c, Integer d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_ * d_ - b_ * c_ == 0) throw std::domain_error("MobiusTransform: zero determinant");
}

MobiusTransform MobiusTransform::from_rational(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
  Integer l = 1;
  for (const Rational* v : {&a, &b, &c, &d}) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v->get_den_mpz_t());
  return {Integer(a * l), Integer(b * l), Integer(c * l), Integer(d * l)};
}

Point MobiusTransform::apply(const Point& pt) const {
  if (pt.is_infinite()) {
    if (c_ == 0) return Point::infinity();
    return Point(make_rational(a_, c_));
  }
  if (pt.is_rational()) {
    Rational den = Rational(c_) * pt.rational() + Rational(d_);
    if (den == 0) return Point::infinity();
    return Point(Rational((Rational(a_) * pt.rational() + Rational(b_)) / den));
  }
  const auto& z = pt.quadratic();
  long d = z.d();
  auto den = QuadFieldElement::embed(Rational(c_), d) * z + QuadFieldElement::embed(Rational(d_), d);
  if (is_zero(den)) return Point::infinity();
  return Point((QuadFieldElement::embed(Rational(a_), d) * z + QuadFieldElement::embed(Rational(b_), d)) / den);
}

// ---------------------------------------------------------------------------
// Operations

NormalizedQuadMap from_sigmas(const Rational& sigma1, const Rational& sigma2) {
  RatForm f = {Rational(2), Rational(2 - sigma1), Rational(2 - sigma1)};
  RatForm g = {Rational(-1), Rational(2 + sigma1), Rational(2 - sigma1 - sigma2)};
  auto map = NormalizedQuadMap::from_rational(f, g);
  map.set_provenance({sigma1, sigma2});
  return map;
}

Integer resultant(const NormalizedQuadMap& map) {
  const auto& f = map.f();
  const auto& g = map.g();
  Integer a = f[0] * g[2] - f[2] * g[0];
  Integer b = f[0] * g[1] - f[1] * g[0];
  Integer c = f[1] * g[2] - f[2] * g[1];
  return a * a - b * c;
}

IntForm wronskian(const NormalizedQuadMap& map) {
  const auto& f = map.f();
  const auto& g = map.g();
  return {2 * (f[0] * g[1] - f[1] * g[0]), 4 * (f[0] * g[2] - f[2] * g[0]), 2 * (f[1] * g[2] - f[2] * g[1])};
}

CriticalPoints critical_points(const NormalizedQuadMap& map) {
  IntForm w = wronskian(map);
  if (w[0] == 0 && w[1] == 0 && w[2] == 0) throw std::domain_error("critical_points: Wronskian vanishes identically");
  CriticalPoints out;
  out.points = quad_roots(Rational(w[0]), Rational(w[1]), Rational(w[2]));
  out.rational = !out.points[0].is_quadratic() && !out.points[1].is_quadratic();
  return out;
}

SigmaPair sigma_invariants(const NormalizedQuadMap& map) {
  Mat3 lam = multiplier_operator(map);
  Rational t1 = trace(lam);
  Rational t2 = trace(matmul(lam, lam));
  return {t1, Rational((t1 * t1 - t2) / 2)};
}

MultiplierTriple fixed_point_multipliers(const NormalizedQuadMap& map) {
  Mat3 lam = multiplier_operator(map);
  Rational s1 = trace(lam);
  Rational s2 = (s1 * s1 - trace(matmul(lam, lam))) / 2;
  Rational s3 = det3(lam);
  // T^3 + b T^2 + c T + d
  const Rational b = -s1, c = s2, d = -s3;
  MultiplierTriple out;
  Rational shape = b * b - 3 * c;
  Rational disc = 18 * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * c * c * c - 27 * d * d;
  if (disc == 0) {
    if (shape == 0) {
      Rational r = -b / 3;
      out.values = {Point(r), Point(r), Point(r)};
    } else {
      Rational dbl = (9 * d - b * c) / (2 * shape);
      Rational single = (4 * b * c - 9 * d - b * b * b) / shape;
      out.values = {Point(single), Point(dbl), Point(dbl)};
    }
    return out;
  }
  std::array<Rational, 4> coeffs = {d, c, b, Rational(1)};
  auto root = rational_root(coeffs);
  if (!root) throw std::domain_error("fixed_point_multipliers: multipliers are cubic irrationals");
  // Deflate by (T - root): T^2 + (b + root) T + (c + root (b + root)).
  Rational q1 = b + *root;
  Rational q0 = c + *root * q1;
  auto rest = quad_roots(1, q1, q0);
  out.values = {Point(*root), rest[0], rest[1]};
  return out;
}

Point apply(const NormalizedQuadMap& map, const Point& pt) {
  if (pt.is_infinite()) {
    const Integer& x = map.f()[0];
    const Integer& y = map.g()[0];
    if (y == 0) {
      if (x == 0) throw std::domain_error("apply: both forms vanish at infinity (degenerate map)");
      return Point::infinity();
    }
    return Point(make_rational(x, y));
  }
  if (pt.is_rational()) return apply_homogeneous<Rational>(map, pt.rational(), Rational(1), 0);
  long d = pt.quadratic().d();
  return apply_homogeneous<QuadFieldElement>(map, pt.quadratic(), QuadFieldElement::embed(1, d), d);
}

Point local_derivative(const NormalizedQuadMap& map, const Point& pt) {
  if (pt.is_infinite()) return derivative_homogeneous<Rational>(map, Rational(1), Rational(0), true, 0);
  if (pt.is_rational()) return derivative_homogeneous<Rational>(map, pt.rational(), Rational(1), false, 0);
  long d = pt.quadratic().d();
  return derivative_homogeneous<QuadFieldElement>(map, pt.quadratic(), QuadFieldElement::embed(1, d), false, d);
}

NormalizedQuadMap conjugate(const NormalizedQuadMap& map, const MobiusTransform& m) {
  // f^{-1} up to scalar: (x, y) -> (d x - b y, -c x + a y)
  const Integer al = m.d(), be = -m.b(), ga = -m.c(), de = m.a();
  auto subst = [&](const IntForm& k) {
    IntForm out;
    out[0] = k[0] * al * al + k[1] * al * ga + k[2] * ga * ga;
    out[1] = 2 * k[0] * al * be + k[1] * (al * de + be * ga) + 2 * k[2] * ga * de;
    out[2] = k[0] * be * be + k[1] * be * de + k[2] * de * de;
    return out;
  };
  IntForm fs = subst(map.f());
  IntForm gs = subst(map.g());
  IntForm nf, ng;
  for (int i = 0; i < 3; ++i) {
    nf[i] = m.a() * fs[i] + m.b() * gs[i];
    ng[i] = m.c() * fs[i] + m.d() * gs[i];
  }
  return {nf, ng};
}

std::optional<FpMap> reduce_mod_p(const NormalizedQuadMap& map, std::uint32_t p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("reduce_mod_p: p must be an odd prime");
  Integer res = resultant(map);
  if (mpz_fdiv_ui(res.get_mpz_t(), p) == 0) return std::nullopt;
  std::array<std::uint32_t, 3> f, g;
  for (int i = 0; i < 3; ++i) {
    f[i] = static_cast<std::uint32_t>(mpz_fdiv_ui(map.f()[i].get_mpz_t(), p));
    g[i] = static_cast<std::uint32_t>(mpz_fdiv_ui(map.g()[i].get_mpz_t(), p));
  }
  return FpMap(p, f, g);
}

FpPoint reduce_point(const Point& pt, std::uint32_t p) {
  if (pt.is_infinite()) return FpPoint::infinity(p);
  const Rational& r = pt.rational();
  auto den = static_cast<std::uint32_t>(mpz_fdiv_ui(r.get_den_mpz_t(), p));
  if (den == 0) return FpPoint::infinity(p);
  auto num = static_cast<std::uint32_t>(mpz_fdiv_ui(r.get_num_mpz_t(), p));
  return FpPoint::finite(static_cast<std::uint32_t>(static_cast<std::uint64_t>(num) * mod_inv(den, p) % p));
}

}  // namespace pcf
