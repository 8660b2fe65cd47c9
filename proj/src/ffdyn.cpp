#include "pcf/ffdyn.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pcf {

namespace {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

inline u32 mulm(u64 a, u64 b, u32 p) { return static_cast<u32>(a * b % p); }
inline u32 addm(u64 a, u64 b, u32 p) { return static_cast<u32>((a + b) % p); }
inline u32 subm(u64 a, u64 b, u32 p) { return static_cast<u32>((a + p - b % p) % p); }

/// F(x, y) for a binary quadratic with coefficients (c2, c1, c0).
inline u32 eval_form(const std::array<u32, 3>& c, u32 x, u32 y, u32 p) {
  u64 v = static_cast<u64>(c[0]) * x % p * x + static_cast<u64>(c[1]) * x % p * y + static_cast<u64>(c[2]) * y % p * y;
  return static_cast<u32>(v % p);
}

inline void homogeneous(FpPoint pt, u32 p, u32& x, u32& y) {
  if (pt.is_infinite(p)) {
    x = 1;
    y = 0;
  } else {
    x = pt.index;
    y = 1;
  }
}

std::vector<u32> distinct_prime_factors(u32 n) {
  std::vector<u32> out;
  for (u32 q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::optional<u32> tonelli_shanks(u32 a, u32 p) {
  a %= p;
  if (a == 0) return 0u;
  if (mod_pow(a, (p - 1) / 2, p) != 1) return std::nullopt;
  u32 q = p - 1, s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u32 z = 2;
  while (mod_pow(z, (p - 1) / 2, p) != p - 1) ++z;
  u32 m = s, c = mod_pow(z, q, p), t = mod_pow(a, q, p), r = mod_pow(a, (q + 1) / 2, p);
  while (t != 1) {
    u32 i = 0;
    u32 tt = t;
    while (tt != 1) {
      tt = mulm(tt, tt, p);
      ++i;
    }
    u32 b = c;
    for (u32 j = 0; j + 1 < m - i; ++j) b = mulm(b, b, p);
    m = i;
    c = mulm(b, b, p);
    t = mulm(t, c, p);
    r = mulm(r, b, p);
  }
  return r;
}

template <class SqrtFn>
std::optional<std::array<FpPoint, 2>> roots_of_form(const std::array<u32, 3>& w, u32 p, SqrtFn&& sqrt_fn) {
  const u32 a = w[0], b = w[1], c = w[2];
  std::array<FpPoint, 2> out;
  if (a == 0) {
    if (b == 0) {
      if (c == 0) return std::nullopt;
      out = {FpPoint::infinity(p), FpPoint::infinity(p)};
    } else {
      u32 x = mulm(p - c == p ? 0 : p - c, mod_inv(b, p), p);
      out = {FpPoint::finite(x), FpPoint::infinity(p)};
    }
  } else {
    u32 disc = subm(mulm(b, b, p), mulm(4, mulm(a, c, p), p), p);
    auto s = sqrt_fn(disc);
    if (!s) return std::nullopt;
    u32 inv2a = mod_inv(mulm(2, a, p), p);
    u32 nb = (p - b) % p;
    out = {FpPoint::finite(mulm(addm(nb, *s, p), inv2a, p)), FpPoint::finite(mulm(subm(nb, *s, p), inv2a, p))};
  }
  if (out[1] < out[0]) std::swap(out[0], out[1]);
  return out;
}

struct DerivativeParts {
  u32 num;
  u32 den;
};

DerivativeParts derivative_parts(const FpMap& map, FpPoint pt) {
  const u32 p = map.prime();
  u32 x, y;
  homogeneous(pt, p, x, y);
  u32 fv = eval_form(map.f(), x, y, p);
  u32 gv = eval_form(map.g(), x, y, p);
  u32 hw = eval_form(map.half_wronskian(), x, y, p);
  bool src_inf = pt.is_infinite(p);
  bool dst_inf = gv == 0;
  u32 base = dst_inf ? fv : gv;
  u32 num = (src_inf != dst_inf) ? (p - hw) % p : hw;
  return {num, mulm(base, base, p)};
}

}  // namespace

std::string to_string(FpPoint pt, std::uint32_t p) {
  return pt.is_infinite(p) ? std::string("inf") : std::to_string(pt.index);
}

std::uint32_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint32_t p) {
  u64 result = 1 % p;
  base %= p;
  while (exp) {
    if (exp & 1) result = result * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return static_cast<u32>(result);
}

std::uint32_t mod_inv(std::uint32_t a, std::uint32_t p) {
  a %= p;
  if (a == 0) throw std::domain_error("mod_inv of zero");
  long long t = 0, nt = 1, r = p, nr = a;
  while (nr) {
    long long q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  if (t < 0) t += p;
  return static_cast<u32>(t);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint32_t> first_odd_primes(std::size_t count) {
  std::vector<u32> out;
  for (u32 n = 3; out.size() < count; n += 2) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

std::vector<std::uint32_t> odd_primes_up_to(std::uint32_t bound) {
  std::vector<u32> out;
  for (u32 n = 3; n <= bound; n += 2) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FpMap

FpMap::FpMap(std::uint32_t p, std::array<std::uint32_t, 3> f, std::array<std::uint32_t, 3> g) : p_(p), f_(f), g_(g) {
  if (p < 3 || p >= (1u << 16) || !is_prime(p)) throw std::invalid_argument("FpMap: p must be an odd prime < 65536");
  for (auto& v : f_) v %= p;
  for (auto& v : g_) v %= p;
}

FpMap FpMap::from_key(std::uint32_t p, std::uint32_t b, std::uint32_t c) {
  return FpMap(p, {2 % p, b % p, b % p}, {p - 1, subm(4, b, p), c % p});
}

std::uint32_t FpMap::resultant() const {
  const u32 p = p_;
  u32 a = subm(mulm(f_[0], g_[2], p), mulm(f_[2], g_[0], p), p);
  u32 b = subm(mulm(f_[0], g_[1], p), mulm(f_[1], g_[0], p), p);
  u32 c = subm(mulm(f_[1], g_[2], p), mulm(f_[2], g_[1], p), p);
  return subm(mulm(a, a, p), mulm(b, c, p), p);
}

std::array<std::uint32_t, 3> FpMap::half_wronskian() const {
  const u32 p = p_;
  u32 x2 = subm(mulm(f_[0], g_[1], p), mulm(f_[1], g_[0], p), p);
  u32 xy = mulm(2, subm(mulm(f_[0], g_[2], p), mulm(f_[2], g_[0], p), p), p);
  u32 y2 = subm(mulm(f_[1], g_[2], p), mulm(f_[2], g_[1], p), p);
  return {x2, xy, y2};
}

std::optional<std::array<FpPoint, 2>> FpMap::critical_points() const {
  return roots_of_form(half_wronskian(), p_, [this](u32 d) { return tonelli_shanks(d, p_); });
}

std::optional<std::array<FpPoint, 2>> FpMap::critical_points(const OrbitWorkspace& ws) const {
  if (ws.prime() != p_) throw std::invalid_argument("critical_points: prime mismatch");
  return roots_of_form(half_wronskian(), p_, [&ws](u32 d) { return ws.sqrt(d); });
}

FpPoint FpMap::apply(FpPoint pt) const {
  u32 x, y;
  homogeneous(pt, p_, x, y);
  u32 fv = eval_form(f_, x, y, p_);
  u32 gv = eval_form(g_, x, y, p_);
  if (gv == 0) {
    if (fv == 0) throw std::domain_error("FpMap::apply: both forms vanish (degenerate map)");
    return FpPoint::infinity(p_);
  }
  return FpPoint::finite(mulm(fv, mod_inv(gv, p_), p_));
}

std::uint32_t FpMap::local_derivative(FpPoint pt) const {
  auto parts = derivative_parts(*this, pt);
  if (parts.den == 0) throw std::domain_error("FpMap::local_derivative: degenerate map");
  return mulm(parts.num, mod_inv(parts.den, p_), p_);
}

FpMap FpMap::conjugate(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) const {
  const u32 p = p_;
  a %= p;
  b %= p;
  c %= p;
  d %= p;
  if (subm(mulm(a, d, p), mulm(b, c, p), p) == 0) throw std::domain_error("FpMap::conjugate: singular matrix");
  // f^{-1} up to scalar: (x, y) -> (d x - b y, -c x + a y)
  const u32 al = d, be = (p - b) % p, ga = (p - c) % p, de = a;
  auto subst = [&](const std::array<u32, 3>& k) {
    std::array<u32, 3> out;
    out[0] = addm(addm(mulm(k[0], mulm(al, al, p), p), mulm(k[1], mulm(al, ga, p), p), p), mulm(k[2], mulm(ga, ga, p), p), p);
    u32 cross = addm(mulm(al, de, p), mulm(be, ga, p), p);
    out[1] = addm(addm(mulm(mulm(2, k[0], p), mulm(al, be, p), p), mulm(k[1], cross, p), p),
                  mulm(mulm(2, k[2], p), mulm(ga, de, p), p), p);
    out[2] = addm(addm(mulm(k[0], mulm(be, be, p), p), mulm(k[1], mulm(be, de, p), p), p), mulm(k[2], mulm(de, de, p), p), p);
    return out;
  };
  auto fs = subst(f_);
  auto gs = subst(g_);
  std::array<u32, 3> nf, ng;
  for (int i = 0; i < 3; ++i) {
    nf[i] = addm(mulm(a, fs[i], p), mulm(b, gs[i], p), p);
    ng[i] = addm(mulm(c, fs[i], p), mulm(d, gs[i], p), p);
  }
  return FpMap(p, nf, ng);
}

// ---------------------------------------------------------------------------
// PeriodSet

PeriodSet::PeriodSet(std::uint32_t m, std::uint32_t r) : values_{m, 0}, size_(1) {
  if (r > 1) {
    values_[1] = m * r;
    size_ = 2;
  }
}

bool PeriodSet::contains(std::uint32_t n) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (values_[i] == n) return true;
  }
  return false;
}

PeriodSet PeriodSet::intersect(const PeriodSet& o) const {
  PeriodSet out;
  for (std::size_t i = 0; i < size_; ++i) {
    if (o.contains(values_[i])) out.values_[out.size_++] = values_[i];
  }
  return out;
}

std::string PeriodSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < size_; ++i) {
    if (i) s += ',';
    s += std::to_string(values_[i]);
  }
  return s + "}";
}

PeriodSet PeriodSet::parse(const std::string& text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') throw std::invalid_argument("malformed period set: " + text);
  PeriodSet out;
  std::stringstream ss(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (out.size_ == 2) throw std::invalid_argument("period set too large: " + text);
    out.values_[out.size_++] = static_cast<u32>(std::stoul(item));
  }
  if (out.size_ == 2 && out.values_[0] >= out.values_[1]) throw std::invalid_argument("unsorted period set: " + text);
  return out;
}

// ---------------------------------------------------------------------------
// Orbits

OrbitWorkspace::OrbitWorkspace(std::uint32_t p)
    : p_(p), inv_(p, 0), sqrt_(p, -1), order_factors_(distinct_prime_factors(p - 1)), stamp_(p + 1, 0), position_(p + 1, 0) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("OrbitWorkspace: p must be an odd prime");
  for (u32 a = 1; a < p; ++a) inv_[a] = mod_inv(a, p);
  for (u32 x = 0; x <= p / 2; ++x) sqrt_[mulm(x, x, p)] = static_cast<std::int32_t>(x);
  path_.reserve(p + 2);
}

std::optional<std::uint32_t> OrbitWorkspace::sqrt(std::uint32_t a) const {
  auto s = sqrt_[a % p_];
  if (s < 0) return std::nullopt;
  return static_cast<u32>(s);
}

std::uint32_t OrbitWorkspace::order(std::uint32_t lambda) const {
  if (lambda % p_ == 0) throw std::domain_error("multiplicative order of zero");
  u32 r = p_ - 1;
  for (u32 q : order_factors_) {
    while (r % q == 0 && mod_pow(lambda, r / q, p_) == 1) r /= q;
  }
  return r;
}

OrbitData OrbitWorkspace::orbit(const FpMap& map, FpPoint start) {
  if (map.prime() != p_) throw std::invalid_argument("OrbitWorkspace: prime mismatch");
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  path_.clear();
  const u32 p = p_;
  const auto& f = map.f();
  const auto& g = map.g();
  FpPoint cur = start;
  while (stamp_[cur.index] != generation_) {
    stamp_[cur.index] = generation_;
    position_[cur.index] = static_cast<u32>(path_.size());
    path_.push_back(cur);
    u32 x, y;
    homogeneous(cur, p, x, y);
    u32 fv = eval_form(f, x, y, p);
    u32 gv = eval_form(g, x, y, p);
    cur = gv == 0 ? FpPoint::infinity(p) : FpPoint::finite(mulm(fv, inv_[gv], p));
  }
  OrbitData out;
  out.tail = position_[cur.index];
  out.cycle_length = static_cast<u32>(path_.size()) - out.tail;
  out.cycle_entry = cur;
  u32 num = 1, den = 1;
  for (std::size_t i = out.tail; i < path_.size(); ++i) {
    auto parts = derivative_parts(map, path_[i]);
    num = mulm(num, parts.num, p);
    den = mulm(den, parts.den, p);
  }
  out.multiplier = num == 0 ? 0 : mulm(num, inv_[den], p);
  out.order = out.multiplier == 0 ? 0 : order(out.multiplier);
  return out;
}

OrbitData orbit_data(const FpMap& map, FpPoint start) {
  OrbitWorkspace ws(map.prime());
  return ws.orbit(map, start);
}

std::uint32_t mult_order(std::uint32_t lambda, std::uint32_t p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("mult_order: p must be an odd prime");
  lambda %= p;
  if (lambda == 0) throw std::domain_error("multiplicative order of zero");
  u32 r = p - 1;
  for (u32 q : distinct_prime_factors(p - 1)) {
    while (r % q == 0 && mod_pow(lambda, r / q, p) == 1) r /= q;
  }
  return r;
}

PeriodSet possible_periods(const OrbitData& orbit) {
  if (orbit.superattracting()) return PeriodSet(orbit.cycle_length);
  return PeriodSet(orbit.cycle_length, orbit.order);
}

}  // namespace pcf
