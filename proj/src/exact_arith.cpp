#include "pcf/exact_arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcf {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// ExtendedRational

ExtendedRational::ExtendedRational(const Rational& v) : value_(v) { value_.canonicalize(); }

ExtendedRational::ExtendedRational(long num, long den) : value_(make_rational(num, den)) {}

ExtendedRational ExtendedRational::infinity() {
  ExtendedRational r;
  r.infinite_ = true;
  return r;
}

const Rational& ExtendedRational::value() const {
  if (infinite_) throw std::logic_error("value() of infinity");
  return value_;
}

const Integer& ExtendedRational::numerator() const { return value().get_num(); }
const Integer& ExtendedRational::denominator() const { return value().get_den(); }

std::string ExtendedRational::to_string() const { return infinite_ ? "inf" : value_.get_str(); }

bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

// ---------------------------------------------------------------------------
// Heights and enumeration

Integer height(const Rational& x) {
  Integer n = abs(x.get_num());
  return n > x.get_den() ? n : Integer(x.get_den());
}

Integer height(const ExtendedRational& x) { return x.is_infinite() ? Integer(1) : height(x.value()); }

std::vector<Rational> enumerate_rationals(unsigned long h_max) {
  std::vector<Rational> out;
  if (h_max == 0) return out;
  out.reserve(static_cast<std::size_t>(count_rationals(h_max)));
  const long hm = static_cast<long>(h_max);
  for (long h = 1; h <= hm; ++h) {
    // Denominators below h carry numerator +-h; denominator h carries |p| < h.
    for (long q = 1; q <= h; ++q) {
      if (q < h) {
        if (std::gcd(h, q) != 1) continue;
        out.push_back(make_rational(-h, q));
        out.push_back(make_rational(h, q));
      } else {
        for (long p = -h; p <= h; ++p) {
          long ap = p < 0 ? -p : p;
          if (std::gcd(ap, h) != 1) continue;
          if (ap == h && h != 1) continue;
          out.push_back(make_rational(p, q));
        }
      }
    }
  }
  return out;
}

std::uint64_t count_rationals(unsigned long h_max) {
  if (h_max == 0) return 0;
  // phi via a sieve; height h >= 2 contributes 4 * phi(h) fractions.
  std::vector<unsigned long> phi(h_max + 1);
  std::iota(phi.begin(), phi.end(), 0UL);
  for (unsigned long i = 2; i <= h_max; ++i) {
    if (phi[i] != i) continue;
    for (unsigned long j = i; j <= h_max; j += i) phi[j] -= phi[j] / i;
  }
  std::uint64_t total = 3;
  for (unsigned long h = 2; h <= h_max; ++h) total += 4 * phi[h];
  return total;
}

// ---------------------------------------------------------------------------
// Squarefree parts

bool is_squarefree(long n) {
  if (n == 0) return false;
  unsigned long m = n < 0 ? static_cast<unsigned long>(-(n + 1)) + 1 : static_cast<unsigned long>(n);
  for (unsigned long p = 2; p * p <= m; ++p) {
    if (m % (p * p) == 0) return false;
    if (m % p == 0) m /= p;
  }
  return true;
}

void squarefree_decompose(const Integer& n, Integer& square_root_part, Integer& squarefree_part) {
  if (n == 0) throw std::domain_error("squarefree part of zero");
  Integer r = abs(n);
  Integer s = 1;
  Integer d = sgn(n);
  constexpr unsigned long kTrialLimit = 20'000'000;
  unsigned long p = 2;
  for (;;) {
    Integer cube = Integer(p) * p * p;
    if (cube > r) break;
    if (p > kTrialLimit) throw std::range_error("squarefree_decompose: cofactor too large");
    Integer p2 = Integer(p) * p;
    while (mpz_divisible_p(r.get_mpz_t(), p2.get_mpz_t())) {
      r /= p2;
      s *= p;
    }
    if (mpz_divisible_ui_p(r.get_mpz_t(), p)) {
      r /= p;
      d *= p;
    }
    p = (p == 2) ? 3 : p + 2;
  }
  // What is left has at most two prime factors, all of them >= p.
  if (r > 1) {
    if (mpz_perfect_square_p(r.get_mpz_t())) {
      Integer root;
      mpz_sqrt(root.get_mpz_t(), r.get_mpz_t());
      s *= root;
    } else {
      d *= r;
    }
  }
  square_root_part = s;
  squarefree_part = d;
}

// ---------------------------------------------------------------------------
// QuadFieldElement

QuadFieldElement::QuadFieldElement(const Rational& a, const Rational& b, long d) : a_(a), b_(b), d_(d) {
  a_.canonicalize();
  b_.canonicalize();
  if (d == 0 || d == 1 || !is_squarefree(d)) {
    throw std::domain_error("QuadFieldElement: D must be squarefree and not 0 or 1, got " + std::to_string(d));
  }
}

void QuadFieldElement::check_field(const QuadFieldElement& o) const {
  if (d_ != o.d_ && b_ != 0 && o.b_ != 0) {
    throw std::domain_error("mixed quadratic fields: " + std::to_string(d_) + " vs " + std::to_string(o.d_));
  }
}

Rational QuadFieldElement::norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

QuadFieldElement QuadFieldElement::inverse() const {
  Rational n = norm();
  if (n == 0) throw std::domain_error("inverse of zero");
  return {a_ / n, -b_ / n, d_};
}

QuadFieldElement& QuadFieldElement::operator+=(const QuadFieldElement& o) {
  check_field(o);
  if (b_ == 0) d_ = o.d_;
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadFieldElement& QuadFieldElement::operator-=(const QuadFieldElement& o) {
  check_field(o);
  if (b_ == 0) d_ = o.d_;
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadFieldElement& QuadFieldElement::operator*=(const QuadFieldElement& o) {
  check_field(o);
  long d = b_ == 0 ? o.d_ : d_;
  Rational na = a_ * o.a_ + Rational(d) * b_ * o.b_;
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  d_ = d;
  return *this;
}

QuadFieldElement& QuadFieldElement::operator/=(const QuadFieldElement& o) { return *this *= o.inverse(); }

bool operator==(const QuadFieldElement& x, const QuadFieldElement& y) {
  if (x.b_ == 0 && y.b_ == 0) return x.a_ == y.a_;
  return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
}

std::string QuadFieldElement::to_string() const {
  std::string out = a_.get_str();
  out += sgn(b_) < 0 ? '-' : '+';
  Rational ab = abs(b_);
  out += ab.get_str();
  out += "*sqrt(" + std::to_string(d_) + ")";
  return out;
}

long double QuadFieldElement::approx() const {
  return static_cast<long double>(a_.get_d()) +
         static_cast<long double>(b_.get_d()) * std::sqrt(static_cast<long double>(d_));
}

// ---------------------------------------------------------------------------
// Point

Point::Point(const ExtendedRational& r) {
  if (r.is_infinite()) {
    v_ = Infinity{};
  } else {
    v_ = r.value();
  }
}

Point::Point(const QuadFieldElement& q) {
  if (q.is_rational()) {
    v_ = q.a();
  } else {
    v_ = q;
  }
}

Point Point::infinity() {
  Point p;
  p.v_ = Infinity{};
  return p;
}

const Rational& Point::rational() const {
  if (!is_rational()) throw std::logic_error("point is not rational: " + to_string());
  return std::get<Rational>(v_);
}

const QuadFieldElement& Point::quadratic() const {
  if (!is_quadratic()) throw std::logic_error("point is not quadratic: " + to_string());
  return std::get<QuadFieldElement>(v_);
}

long Point::field() const { return is_quadratic() ? quadratic().d() : 0; }

std::string Point::to_string() const {
  if (is_infinite()) return "inf";
  if (is_rational()) return rational().get_str();
  return quadratic().to_string();
}

Integer Point::height() const {
  if (is_infinite()) return 1;
  if (is_rational()) return pcf::height(rational());
  Integer ha = pcf::height(quadratic().a());
  Integer hb = pcf::height(quadratic().b());
  return ha > hb ? ha : hb;
}

ExtendedRational Point::to_extended() const {
  if (is_infinite()) return ExtendedRational::infinity();
  return ExtendedRational(rational());
}

bool PointLess::operator()(const Point& a, const Point& b) const {
  // Infinity first, then rationals by value, then quadratic points.
  auto rank = [](const Point& p) { return p.is_infinite() ? 0 : (p.is_rational() ? 1 : 2); };
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb;
  if (ra == 1) return a.rational() < b.rational();
  if (ra == 2) {
    const auto& qa = a.quadratic();
    const auto& qb = b.quadratic();
    if (qa.d() != qb.d()) return qa.d() < qb.d();
    if (qa.a() != qb.a()) return qa.a() < qb.a();
    return qa.b() < qb.b();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Quadratic roots

std::array<Point, 2> quad_roots(const Rational& a, const Rational& b, const Rational& c) {
  if (a == 0 && b == 0 && c == 0) throw std::domain_error("quad_roots: zero polynomial");
  if (a == 0) {
    if (b == 0) return {Point::infinity(), Point::infinity()};
    return {Point(Rational(-c / b)), Point::infinity()};
  }
  Rational disc = b * b - 4 * a * c;
  if (sgn(disc) < 0) throw ComplexRootsError("complex roots: discriminant " + disc.get_str());
  Rational center = -b / (2 * a);
  if (disc == 0) return {Point(center), Point(center)};
  Integer nm = disc.get_num() * disc.get_den();
  Integer s, d;
  squarefree_decompose(nm, s, d);
  // sqrt(disc) = s sqrt(d) / den
  Rational offset = make_rational(s, disc.get_den()) / (2 * a);
  if (d == 1) return {Point(Rational(center + offset)), Point(Rational(center - offset))};
  if (!d.fits_slong_p()) throw std::range_error("quad_roots: field discriminant out of range");
  long dl = d.get_si();
  return {Point(QuadFieldElement(center, offset, dl)), Point(QuadFieldElement(center, -offset, dl))};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational");
  std::string s(text);
  if (s.front() == '+') s.erase(0, 1);
  auto slash = s.find('/');
  auto valid_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') return false;
    }
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw std::invalid_argument("malformed rational: " + s);
  Integer n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  return make_rational(n, d);
}

ExtendedRational parse_extended_rational(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "infinity") return ExtendedRational::infinity();
  return ExtendedRational(parse_rational(text));
}

Point parse_point(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "infinity") return Point::infinity();
  auto star = text.find("*sqrt(");
  if (star == std::string_view::npos) return Point(parse_rational(text));
  if (text.back() != ')') throw std::invalid_argument("malformed quadratic point");
  std::string_view dtext = text.substr(star + 6, text.size() - star - 7);
  std::size_t sign = std::string_view::npos;
  for (std::size_t i = star; i-- > 1;) {
    if (text[i] == '+' || text[i] == '-') {
      sign = i;
      break;
    }
  }
  if (sign == std::string_view::npos) throw std::invalid_argument("malformed quadratic point");
  std::size_t a_end = sign;
  if (text[sign] == '-' && text[sign - 1] == '+') a_end = sign - 1;
  Rational a = parse_rational(text.substr(0, a_end));
  Rational b = parse_rational(text.substr(sign, star - sign));
  long d = std::stol(std::string(dtext));
  return Point(QuadFieldElement(a, b, d));
}

}  // namespace pcf
