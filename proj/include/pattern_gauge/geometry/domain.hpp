#pragma once

#include <map>
#include <string>
#include <vector>

#include "pattern_gauge/geometry/curve.hpp"

namespace pattern_gauge::geometry {

struct DomainSpec {
  std::vector<BoundaryLoop> loops;  // loops[0] is the outer loop
  std::string gallery_id;           // empty for user-built domains
  std::map<std::string, double> params;

  const BoundaryLoop& outer() const { return loops.front(); }
  // True when some loop is only piecewise smooth (corner domains).
  bool has_corners() const;
  double diameter() const;
  DomainSpec scaled(double eta) const;
  // Winding-number membership test against dense polylines of the loops.
  bool contains(const Vec2& p, int samples_per_loop = 2048) const;
};

// Gallery ids: disk(r), ellipse(a,b), perturbed_disk(r,delta,k), peanut(d),
// annulus(r_in,r_out), rectangle(lx,ly). Parameters are passed by name.
DomainSpec make_gallery_domain(const std::string& name, const std::map<std::string, double>& params);

DomainSpec make_spline_domain(const std::vector<Vec2>& outer, const std::vector<std::vector<Vec2>>& holes = {});

// Checks orientation, simplicity and nesting at sampling resolution; throws ParameterError.
void validate_domain(const DomainSpec& spec, int samples_per_loop = 512);

}  // namespace pattern_gauge::geometry
