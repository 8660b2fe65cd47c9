#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcf/exact_arith.hpp"
#include "pcf/projmap.hpp"

namespace pcf {

/// Point entering an m-cycle after exactly n steps.
struct TypeTag {
  std::uint32_t m = 1;
  std::uint32_t n = 0;

  std::string to_string() const { return std::to_string(m) + "_" + std::to_string(n); }
  friend bool operator==(const TypeTag& a, const TypeTag& b) { return a.m == b.m && a.n == b.n; }
};

/// Finite directed graph with out-degree at most one. Vertices need a
/// strict weak order and a to_string() member for output.
template <class V, class Less>
class FunctionalGraph {
 public:
  using Vertex = V;

  /// Throws std::invalid_argument if `from` already has a different successor.
  void add_edge(const V& from, const V& to) {
    auto [it, inserted] = succ_.emplace(from, to);
    if (!inserted && !equal(it->second, to)) {
      throw std::invalid_argument("vertex " + from.to_string() + " already has a successor");
    }
  }

  std::size_t size() const { return succ_.size(); }
  bool empty() const { return succ_.empty(); }
  bool contains(const V& v) const { return succ_.count(v) != 0; }
  const V& successor(const V& v) const {
    auto it = succ_.find(v);
    if (it == succ_.end()) throw std::out_of_range("vertex " + v.to_string() + " is not in the graph");
    return it->second;
  }

  std::vector<V> vertices() const {
    std::vector<V> out;
    for (const auto& kv : succ_) out.push_back(kv.first);
    return out;
  }
  std::vector<std::pair<V, V>> edges() const { return {succ_.begin(), succ_.end()}; }

  /// Every successor is itself a vertex.
  bool is_closed() const {
    for (const auto& kv : succ_) {
      if (!succ_.count(kv.second)) return false;
    }
    return true;
  }

  TypeTag type_of(const V& v) const {
    std::map<V, std::uint32_t, Less> seen;
    V cur = v;
    for (std::uint32_t i = 0;; ++i) {
      auto it = seen.find(cur);
      if (it != seen.end()) return {i - it->second, it->second};
      seen.emplace(cur, i);
      cur = successor(cur);
    }
  }

  std::vector<V> periodic_points() const {
    std::vector<V> out;
    for (const auto& kv : succ_) {
      if (type_of(kv.first).n == 0) out.push_back(kv.first);
    }
    return out;
  }

  /// Weakly connected components, each sorted; components ordered by their
  /// least vertex.
  std::vector<std::vector<V>> components() const {
    std::map<V, V, Less> parent;
    for (const auto& kv : succ_) parent.emplace(kv.first, kv.first);
    auto find = [&](V x) {
      while (!equal(parent.at(x), x)) x = parent.at(x);
      return x;
    };
    for (const auto& kv : succ_) {
      if (!parent.count(kv.second)) continue;
      V a = find(kv.first), b = find(kv.second);
      if (equal(a, b)) continue;
      if (Less{}(a, b)) parent.at(b) = a;
      else parent.at(a) = b;
    }
    std::map<V, std::vector<V>, Less> groups;
    for (const auto& kv : succ_) groups[find(kv.first)].push_back(kv.first);
    std::vector<std::vector<V>> out;
    for (auto& g : groups) out.push_back(std::move(g.second));
    return out;
  }

  /// Label-free encoding: equal strings iff the graphs are isomorphic.
  /// Requires a closed graph.
  std::string canonical_form() const {
    if (!is_closed()) throw std::logic_error("canonical_form needs a closed graph");
    std::map<V, std::vector<V>, Less> preds;
    for (const auto& kv : succ_) preds[kv.second].push_back(kv.first);
    std::map<V, bool, Less> on_cycle;
    for (const auto& v : periodic_points()) on_cycle[v] = true;

    // Tree hanging off a vertex, ignoring the cycle predecessor.
    auto tree = [&](auto&& self, const V& v) -> std::string {
      std::vector<std::string> kids;
      auto it = preds.find(v);
      if (it != preds.end()) {
        for (const auto& u : it->second) {
          if (!on_cycle.count(u)) kids.push_back(self(self, u));
        }
      }
      std::sort(kids.begin(), kids.end());
      std::string s = "(";
      for (const auto& k : kids) s += k;
      return s + ")";
    };

    std::vector<std::string> cycles;
    std::map<V, bool, Less> done;
    for (const auto& kv : on_cycle) {
      if (done.count(kv.first)) continue;
      std::vector<std::string> seq;
      V cur = kv.first;
      do {
        done[cur] = true;
        seq.push_back(tree(tree, cur));
        cur = successor(cur);
      } while (!equal(cur, kv.first));
      std::string best;
      for (std::size_t r = 0; r < seq.size(); ++r) {
        std::string s = "[";
        for (std::size_t i = 0; i < seq.size(); ++i) s += seq[(r + i) % seq.size()];
        s += "]";
        if (r == 0 || s < best) best = s;
      }
      cycles.push_back(best);
    }
    std::sort(cycles.begin(), cycles.end());
    std::string out;
    for (const auto& c : cycles) out += c;
    return out;
  }

  /// Sorted edge list, one "P -> Q" per line.
  std::string to_edge_list() const {
    std::string out;
    for (const auto& kv : succ_) out += kv.first.to_string() + " -> " + kv.second.to_string() + "\n";
    return out;
  }

  std::string to_dot(const std::string& name = "preperiodic") const {
    std::ostringstream out;
    out << "digraph \"" << name << "\" {\n";
    for (const auto& kv : succ_) out << "  \"" << kv.first.to_string() << "\";\n";
    for (const auto& kv : succ_) out << "  \"" << kv.first.to_string() << "\" -> \"" << kv.second.to_string() << "\";\n";
    out << "}\n";
    return out.str();
  }

  friend bool operator==(const FunctionalGraph& a, const FunctionalGraph& b) {
    if (a.size() != b.size()) return false;
    auto ia = a.succ_.begin();
    for (auto ib = b.succ_.begin(); ib != b.succ_.end(); ++ia, ++ib) {
      if (!equal(ia->first, ib->first) || !equal(ia->second, ib->second)) return false;
    }
    return true;
  }

 private:
  static bool equal(const V& a, const V& b) { return !Less{}(a, b) && !Less{}(b, a); }

  std::map<V, V, Less> succ_;
};

using PointGraph = FunctionalGraph<Point, PointLess>;

template <class V, class L>
bool isomorphic(const FunctionalGraph<V, L>& a, const FunctionalGraph<V, L>& b) {
  return a.size() == b.size() && a.canonical_form() == b.canonical_form();
}

/// Builds a graph from "P -> Q" pairs in text form, e.g. {{"1", "inf"}}.
PointGraph graph_from_edges(const std::vector<std::pair<std::string, std::string>>& edges);

struct PreperOptions {
  unsigned long height_bound = 16;
  std::size_t step_budget = 32;
  Integer height_cutoff = 10000;
};

struct PreperResult {
  PointGraph graph;
  /// Candidates neither repeating nor exceeding the cutoff within the budget.
  std::vector<Point> unresolved;
};

/// Bounded search over P^1(Q): every rational of height <= B plus infinity.
PreperResult rational_preperiodic_graph(const NormalizedQuadMap& map, const PreperOptions& opts = {});

/// A catalogued rational preperiodic structure with its reference graph.
struct StructureClass {
  std::string id;
  std::string description;
  /// Representative map in "[f2,f1,f0]/[g2,g1,g0]" form.
  std::string map;
  /// The structure of the representative, recomputed and checked point by point.
  PointGraph reference;
  /// The graph with the literature labels. Differs from `reference`
  /// only where the printed vertex labels do not fit the printed map.
  PointGraph printed;
};

class NoCatalogMatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Preperiodic structures of the ten trivial-stabilizer maps, in their
/// simple conjugate forms.
const std::vector<StructureClass>& trivial_stabilizer_catalog();
/// The four structures of phi_b(z) = z/2 + b/z.
const std::vector<StructureClass>& psi1_twist_catalog();
/// The seven structures of maps conjugate to 1/z^2.
const std::vector<StructureClass>& psi2_twist_catalog();
/// Lookup by stable id across all catalogs.
const StructureClass& catalog_class(const std::string& id);

/// r in (Q^*)^2
bool is_rational_square(const Rational& r);

/// phi_b(z) = (z^2 + 2b) / (2z)
NormalizedQuadMap psi1_twist_map(const Rational& b);
/// Square-class classification of phi_b.
const StructureClass& classify_psi1_twist(const Rational& b);

/// t / z^2
NormalizedQuadMap psi2_map_from_t(const Rational& t);
/// theta_{d,k}(z) = (k z^2 - 2 d z + d k) / (z^2 - 2 k z + d)
NormalizedQuadMap psi2_map_from_theta(const Rational& d, const Rational& k);

struct Psi2Classification {
  const StructureClass* cls = nullptr;
  PreperResult computed;
};

/// Runs the preperiodic search and matches the result against the seven
/// reference structures. Throws std::invalid_argument unless the map has the
/// multiplier invariants of 1/z^2, and NoCatalogMatchError when nothing matches.
Psi2Classification classify_psi2_map(const NormalizedQuadMap& map, const PreperOptions& opts = {});

/// zeta_N^j with gcd(j, N) = 1, or one of the markers zero and infinity.
class RootOfUnityPoint {
 public:
  enum class Kind { zero, infinity, root };

  static RootOfUnityPoint zero() { return RootOfUnityPoint(Kind::zero, 0, 0); }
  static RootOfUnityPoint infinity() { return RootOfUnityPoint(Kind::infinity, 0, 0); }
  /// zeta_N^j, reduced to the exact order.
  static RootOfUnityPoint root(std::uint64_t order, std::int64_t exponent);

  Kind kind() const { return kind_; }
  std::uint64_t order() const { return order_; }
  std::uint64_t exponent() const { return exponent_; }
  /// Algebraic degree over Q: Euler phi of the order; 1 for the markers.
  std::uint64_t degree() const;

  /// "0", "inf", "1", "-1", or "zeta_N^j".
  std::string to_string() const;

  friend bool operator==(const RootOfUnityPoint& a, const RootOfUnityPoint& b) {
    return a.kind_ == b.kind_ && a.order_ == b.order_ && a.exponent_ == b.exponent_;
  }
  friend bool operator<(const RootOfUnityPoint& a, const RootOfUnityPoint& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.order_ != b.order_) return a.order_ < b.order_;
    return a.exponent_ < b.exponent_;
  }

 private:
  RootOfUnityPoint(Kind k, std::uint64_t n, std::uint64_t j) : kind_(k), order_(n), exponent_(j) {}

  Kind kind_;
  std::uint64_t order_;
  std::uint64_t exponent_;
};

using RootGraph = FunctionalGraph<RootOfUnityPoint, std::less<RootOfUnityPoint>>;

enum class PowerMap { square, inverse_square };

/// Dynamics of z^2 or 1/z^2 on 0, infinity and every root of unity of degree
/// at most max_degree, via the exponent maps j -> 2j and j -> -2j.
RootGraph power_map_low_degree_preperiodic(PowerMap variant, unsigned max_degree);

std::uint64_t euler_phi(std::uint64_t n);

}  // namespace pcf
