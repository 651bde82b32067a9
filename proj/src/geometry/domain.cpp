#include "pattern_gauge/geometry/domain.hpp"

#include <cmath>
#include <numbers>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::geometry {

namespace {

double require(const std::map<std::string, double>& params, const std::string& gallery,
               const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ParameterError(gallery + ": missing parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw ParameterError(gallery + ": parameter '" + key + "' is not finite");
  return it->second;
}

void reject_unknown(const std::map<std::string, double>& params, const std::string& gallery,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ParameterError(gallery + ": unknown parameter '" + k + "'");
  }
}

std::vector<Vec2> sample(const BoundaryLoop& loop, int n) {
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = loop.position(static_cast<double>(i) / n);
  return pts;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
  double d1 = cross(q - p, r - p), d2 = cross(q - p, s - p);
  double d3 = cross(s - r, p - r), d4 = cross(s - r, q - r);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double winding(const std::vector<Vec2>& poly, const Vec2& p) {
  double w = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i] - p, b = poly[(i + 1) % n] - p;
    w += std::atan2(cross(a, b), a.dot(b));
  }
  return w / (2.0 * std::numbers::pi);
}

}  // namespace

bool DomainSpec::has_corners() const {
  for (const auto& l : loops)
    if (!l.is_c2()) return true;
  return false;
}

double DomainSpec::diameter() const {
  auto pts = sample(outer(), 512);
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

DomainSpec DomainSpec::scaled(double eta) const {
  DomainSpec out = *this;
  out.loops.clear();
  for (const auto& l : loops) out.loops.push_back(l.scaled(eta));
  if (!gallery_id.empty()) out.params["scale"] = eta * (params.count("scale") ? params.at("scale") : 1.0);
  return out;
}

bool DomainSpec::contains(const Vec2& p, int samples_per_loop) const {
  double w = 0.0;
  for (const auto& l : loops) w += winding(sample(l, samples_per_loop), p);
  return w > 0.5;
}

DomainSpec make_gallery_domain(const std::string& name, const std::map<std::string, double>& params) {
  DomainSpec spec;
  spec.gallery_id = name;
  spec.params = params;
  if (name == "disk") {
    reject_unknown(params, name, {"r"});
    double r = require(params, name, "r");
    if (!(r > 0.0)) throw ParameterError("disk: r must be > 0");
    spec.loops.emplace_back(std::make_shared<EllipseCurve>(r, r), Orientation::outer_ccw);
  } else if (name == "ellipse") {
    reject_unknown(params, name, {"a", "b"});
    double a = require(params, name, "a"), b = require(params, name, "b");
    if (!(a > 0.0)) throw ParameterError("ellipse: a must be > 0");
    if (!(b > 0.0)) throw ParameterError("ellipse: b must be > 0");
    spec.loops.emplace_back(std::make_shared<EllipseCurve>(a, b), Orientation::outer_ccw);
  } else if (name == "perturbed_disk") {
    reject_unknown(params, name, {"r", "delta", "k"});
    double r = require(params, name, "r"), delta = require(params, name, "delta");
    double k = require(params, name, "k");
    if (!(r > 0.0)) throw ParameterError("perturbed_disk: r must be > 0");
    if (k < 1.0 || k != std::floor(k)) throw ParameterError("perturbed_disk: k must be an integer >= 1");
    if (!(delta >= 0.0 && delta < 1.0)) throw ParameterError("perturbed_disk: delta must satisfy 0 <= delta < 1");
    spec.loops.emplace_back(std::make_shared<PolarCosineCurve>(r, delta, static_cast<int>(k)),
                            Orientation::outer_ccw);
  } else if (name == "peanut") {
    reject_unknown(params, name, {"d"});
    double d = require(params, name, "d");
    if (!(d > 0.0 && d < 1.0)) throw ParameterError("peanut: d must satisfy 0 < d < 1");
    spec.loops.emplace_back(std::make_shared<PolarCosineCurve>(1.0, d, 2), Orientation::outer_ccw);
  } else if (name == "annulus") {
    reject_unknown(params, name, {"r_in", "r_out"});
    double ri = require(params, name, "r_in"), ro = require(params, name, "r_out");
    if (!(ri > 0.0)) throw ParameterError("annulus: r_in must be > 0");
    if (!(ro > ri)) throw ParameterError("annulus: r_out must be > r_in");
    spec.loops.emplace_back(std::make_shared<EllipseCurve>(ro, ro), Orientation::outer_ccw);
    spec.loops.emplace_back(std::make_shared<EllipseCurve>(ri, ri), Orientation::inner_cw);
  } else if (name == "rectangle") {
    reject_unknown(params, name, {"lx", "ly"});
    double lx = require(params, name, "lx"), ly = require(params, name, "ly");
    if (!(lx > 0.0)) throw ParameterError("rectangle: lx must be > 0");
    if (!(ly > 0.0)) throw ParameterError("rectangle: ly must be > 0");
    spec.loops.emplace_back(std::make_shared<RectangleCurve>(lx, ly), Orientation::outer_ccw);
  } else {
    throw ParameterError("unknown gallery domain '" + name + "'");
  }
  return spec;
}

DomainSpec make_spline_domain(const std::vector<Vec2>& outer, const std::vector<std::vector<Vec2>>& holes) {
  DomainSpec spec;
  spec.loops.emplace_back(std::make_shared<PeriodicSplineCurve>(outer), Orientation::outer_ccw);
  for (const auto& h : holes)
    spec.loops.emplace_back(std::make_shared<PeriodicSplineCurve>(h), Orientation::inner_cw);
  validate_domain(spec);
  return spec;
}

void validate_domain(const DomainSpec& spec, int samples_per_loop) {
  if (spec.loops.empty()) throw ParameterError("domain has no boundary loops");
  if (spec.loops[0].orientation() != Orientation::outer_ccw)
    throw ParameterError("first loop must be the outer counterclockwise loop");
  std::vector<std::vector<Vec2>> polys;
  for (std::size_t i = 0; i < spec.loops.size(); ++i) {
    const auto& l = spec.loops[i];
    if (i > 0 && l.orientation() != Orientation::inner_cw)
      throw ParameterError("loop " + std::to_string(i) + ": only one outer loop is allowed");
    double a = l.signed_area();
    if (l.orientation() == Orientation::outer_ccw ? !(a > 0.0) : !(a < 0.0))
      throw ParameterError("loop " + std::to_string(i) + ": signed area has the wrong sign");
    polys.push_back(sample(l, samples_per_loop));
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (std::size_t j = i; j < polys.size(); ++j) {
      const auto& P = polys[i];
      const auto& Q = polys[j];
      const std::size_t n = P.size(), m = Q.size();
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = (i == j ? a + 2 : 0); b < m; ++b) {
          if (i == j && a == 0 && b == m - 1) continue;
          if (segments_cross(P[a], P[(a + 1) % n], Q[b], Q[(b + 1) % m]))
            throw ParameterError(i == j ? "loop " + std::to_string(i) + " self-intersects"
                                        : "loops " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
      }
    }
    if (i > 0 && std::abs(winding(polys[0], polys[i][0])) < 0.5)
      throw ParameterError("inner loop " + std::to_string(i) + " is not inside the outer loop");
  }
}

}  // namespace pattern_gauge::geometry
