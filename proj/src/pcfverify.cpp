#include "pcf/pcfverify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcf {

Portrait::Portrait(std::vector<PortraitEdge> edges, std::vector<Point> critical)
    : edges_(std::move(edges)), critical_(std::move(critical)) {
  std::sort(edges_.begin(), edges_.end(), [](const PortraitEdge& a, const PortraitEdge& b) { return PointLess{}(a.from, b.from); });
  std::sort(critical_.begin(), critical_.end(), PointLess{});
}

std::vector<Point> Portrait::vertices() const {
  std::vector<Point> out;
  for (const auto& e : edges_) out.push_back(e.from);
  return out;
}

const PortraitEdge* Portrait::edge_from(const Point& v) const {
  for (const auto& e : edges_) {
    if (e.from == v) return &e;
  }
  return nullptr;
}

std::string Portrait::to_text() const {
  std::string out;
  for (const auto& e : edges_) out += e.from.to_string() + " -(" + std::to_string(e.ramification) + ")-> " + e.to.to_string() + "\n";
  return out;
}

std::string Portrait::to_dot(const std::string& name) const {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  for (const auto& v : vertices()) {
    bool crit = std::find(critical_.begin(), critical_.end(), v) != critical_.end();
    out << "  \"" << v.to_string() << "\"" << (crit ? " [shape=box]" : "") << ";\n";
  }
  for (const auto& e : edges_) {
    out << "  \"" << e.from.to_string() << "\" -> \"" << e.to.to_string() << "\" [label=\"" << e.ramification << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string PcfStatus::summary() const {
  if (verified()) return "VERIFIED_PCF (" + std::to_string(portrait->size()) + " vertices)";
  return "UNDETERMINED: " + reason + " (iterations " + std::to_string(iterations) + ", max height " + max_height.get_str() + ")";
}

PcfStatus critical_orbit_portrait(const NormalizedQuadMap& map, const VerifyOptions& opts) {
  if (opts.budget < 1) throw std::invalid_argument("verifier budget must be positive");
  if (resultant(map) == 0) throw std::invalid_argument("critical_orbit_portrait: degenerate map " + map.to_string());
  PcfStatus status;
  CriticalPoints crit;
  try {
    crit = critical_points(map);
  } catch (const ComplexRootsError&) {
    status.reason = "complex critical points";
    return status;
  } catch (const std::range_error& e) {
    status.reason = std::string("critical points not representable: ") + e.what();
    return status;
  }

  std::map<Point, Point, PointLess> next;
  for (const auto& c : crit.points) {
    Point cur = c;
    std::size_t steps = 0;
    while (!next.count(cur)) {
      if (steps == opts.budget) {
        status.iterations += steps;
        status.reason = "iteration budget exhausted";
        return status;
      }
      Point img = apply(map, cur);
      ++steps;
      Integer h = img.height();
      if (h > status.max_height) status.max_height = h;
      if (h > opts.height_cutoff) {
        status.iterations += steps;
        status.reason = "height cutoff exceeded";
        return status;
      }
      next.emplace(cur, img);
      cur = img;
    }
    status.iterations += steps;
  }

  std::vector<PortraitEdge> edges;
  for (const auto& [from, to] : next) {
    bool critical = from == crit.points[0] || from == crit.points[1];
    edges.push_back({from, to, critical ? 2 : 1});
  }
  status.kind = PcfStatus::Kind::verified;
  status.portrait = Portrait(std::move(edges), {crit.points[0], crit.points[1]});
  return status;
}

bool is_pcf(const NormalizedQuadMap& map, const VerifyOptions& opts, PcfStatus* status) {
  PcfStatus s = critical_orbit_portrait(map, opts);
  bool ok = s.verified();
  if (status) *status = std::move(s);
  return ok;
}

std::vector<Point> postcritical_set(const PcfStatus& status) {
  if (!status.verified()) throw std::logic_error("postcritical_set needs a verified portrait");
  std::set<Point, PointLess> out;
  for (const auto& c : status.portrait->critical()) {
    Point cur = status.portrait->edge_from(c)->to;
    while (out.insert(cur).second) cur = status.portrait->edge_from(cur)->to;
  }
  return {out.begin(), out.end()};
}

std::size_t eventual_period(const Portrait& portrait, const Point& pt) {
  std::map<Point, std::size_t, PointLess> seen;
  Point cur = pt;
  for (std::size_t i = 0;; ++i) {
    auto it = seen.find(cur);
    if (it != seen.end()) return i - it->second;
    seen.emplace(cur, i);
    const PortraitEdge* e = portrait.edge_from(cur);
    if (!e) throw std::invalid_argument("point " + pt.to_string() + " is not in the portrait");
    cur = e->to;
  }
}

}  // namespace pcf

namespace pcf {

const std::vector<KnownPcfMap>& trivial_stabilizer_pcf_maps() {
  auto q = [](long n, long d = 1) { return make_rational(n, d); };
  static const std::vector<KnownPcfMap> maps = {
      {{q(2), q(-8)}, "(2z^2)/(-z^2+4z+8)", {{"0", "0", 2}, {"-4", "-4/3", 2}, {"-4/3", "4", 1}, {"4", "4", 1}}, "T2.1"},
      {{q(2), q(-4)}, "(2z^2)/(-z^2+4z+4)", {{"0", "0", 2}, {"-2", "-1", 2}, {"-1", "-2", 1}}, "T2.2"},
      {{q(-6), q(4)},
       "(2z^2+8z+8)/(-z^2-4z+4)",
       {{"inf", "-2", 2}, {"-2", "0", 2}, {"0", "2", 1}, {"2", "-4", 1}, {"-4", "2", 1}},
       "T2.3"},
      {{q(-6), q(8)}, "(2z^2+8z+8)/(-z^2-4z)", {{"-2", "0", 2}, {"0", "inf", 1}, {"inf", "-2", 2}}, "T2.4"},
      {{q(-2), q(4)}, "(2z^2+4z+4)/(-z^2)", {{"0", "inf", 2}, {"inf", "-2", 1}, {"-2", "-1", 2}, {"-1", "-2", 1}}, "T2.5"},
      {{q(-2, 3), q(4, 3)},
       "(6z^2+8z+8)/(-3z^2+4z+4)",
       {{"0", "2", 2}, {"2", "inf", 1}, {"inf", "-2", 1}, {"-2", "-1", 2}, {"-1", "-2", 1}},
       "T2.6"},
      {{q(-6), q(10)}, "(2z^2+8z+8)/(-z^2-4z-2)", {{"inf", "-2", 2}, {"-2", "0", 2}, {"0", "-4", 1}, {"-4", "-4", 1}}, "T2.7"},
      {{q(-2), q(0)},
       "(2z^2+4z+4)/(-z^2+4)",
       {{"-3-1*sqrt(5)", "-1/2-1/2*sqrt(5)", 2},
        {"-3+1*sqrt(5)", "-1/2+1/2*sqrt(5)", 2},
        {"-1/2-1/2*sqrt(5)", "2", 1},
        {"-1/2+1/2*sqrt(5)", "2", 1},
        {"2", "inf", 1},
        {"inf", "-2", 1},
        {"-2", "inf", 1}},
       "T2.8"},
      {{q(-2), q(2)},
       "(2z^2+4z+4)/(-z^2+2)",
       {{"-2-1*sqrt(2)", "0-1*sqrt(2)", 2},
        {"-2+1*sqrt(2)", "0+1*sqrt(2)", 2},
        {"0-1*sqrt(2)", "inf", 1},
        {"0+1*sqrt(2)", "inf", 1},
        {"inf", "-2", 1},
        {"-2", "-2", 1}},
       "T2.9"},
      {{q(-10, 3), q(20, 3)},
       "(6z^2+16z+16)/(-3z^2-4z-4)",
       {{"0", "-4", 2}, {"-4", "-4/3", 1}, {"-4/3", "-4/3", 1}, {"-2", "-1", 2}, {"-1", "-2", 1}},
       "T2.10"},
  };
  return maps;
}

}  // namespace pcf
