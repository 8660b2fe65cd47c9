#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pcf/exact_arith.hpp"
#include "pcf/projmap.hpp"

namespace pcf {

struct PortraitEdge {
  Point from;
  Point to;
  int ramification = 1;
};

/// Union of the critical orbits. Vertices are kept sorted by PointLess, and
/// every vertex has exactly one outgoing edge.
class Portrait {
 public:
  Portrait() = default;
  Portrait(std::vector<PortraitEdge> edges, std::vector<Point> critical);

  const std::vector<PortraitEdge>& edges() const { return edges_; }
  const std::vector<Point>& critical() const { return critical_; }
  std::vector<Point> vertices() const;
  std::size_t size() const { return edges_.size(); }
  /// Outgoing edge of v, or nullptr.
  const PortraitEdge* edge_from(const Point& v) const;

  /// One line per edge: "P -(e)-> Q".
  std::string to_text() const;
  std::string to_dot(const std::string& name = "portrait") const;

 private:
  std::vector<PortraitEdge> edges_;
  std::vector<Point> critical_;
};

struct VerifyOptions {
  std::size_t budget = 64;
  Integer height_cutoff = 1000000;
};

struct PcfStatus {
  enum class Kind { verified, undetermined };

  Kind kind = Kind::undetermined;
  std::optional<Portrait> portrait;
  /// Undetermined diagnostics.
  std::size_t iterations = 0;
  Integer max_height = 0;
  std::string reason;

  bool verified() const { return kind == Kind::verified; }
  std::string summary() const;
};

PcfStatus critical_orbit_portrait(const NormalizedQuadMap& map, const VerifyOptions& opts = {});

bool is_pcf(const NormalizedQuadMap& map, const VerifyOptions& opts = {}, PcfStatus* status = nullptr);

/// Strict forward orbits of both critical points, sorted. Throws
/// std::logic_error unless the status is verified.
std::vector<Point> postcritical_set(const PcfStatus& status);

/// Exact period of the cycle eventually reached from pt in the portrait.
std::size_t eventual_period(const Portrait& portrait, const Point& pt);

/// The ten PCF maps with trivial stabilizer: sigma pair, printed affine form,
/// critical portrait edges (from, to, ramification) and the catalog id of the
/// simple conjugate form.
struct KnownPcfMap {
  SigmaPair sigmas;
  std::string affine;
  std::vector<std::tuple<std::string, std::string, int>> portrait;
  std::string conjugate_class;
};

const std::vector<KnownPcfMap>& trivial_stabilizer_pcf_maps();

}  // namespace pcf
