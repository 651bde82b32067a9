#include "pattern_gauge/geometry/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pattern_gauge::geometry {

namespace {

struct LoopSamples {
  std::vector<Vec2> pts;
  std::vector<double> ts;
};

LoopSamples dense(const BoundaryLoop& loop, int n) {
  LoopSamples s;
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / n;
    s.ts.push_back(t);
    s.pts.push_back(loop.position(t));
  }
  return s;
}

// Minimizes |c(t) - p|^2 near t by safeguarded Newton steps inside [t - dt, t + dt].
double polish(const BoundaryLoop& loop, const Vec2& p, double t, double dt) {
  const double lo = t - dt, hi = t + dt;
  double best = (loop.position(t) - p).norm();
  for (int it = 0; it < 20; ++it) {
    Vec2 r = loop.position(t) - p, d1 = loop.d1(t), d2 = loop.d2(t);
    double g = r.dot(d1), H = d1.squaredNorm() + r.dot(d2);
    double step = H > 0.0 ? -g / H : -g / d1.squaredNorm();
    double tn = std::clamp(t + step, lo, hi);
    double dn = (loop.position(tn) - p).norm();
    if (dn >= best) break;
    best = dn;
    t = tn;
  }
  return best;
}

double nearest(const std::vector<LoopSamples>& loops, const DomainSpec& spec, const Vec2& p, bool refine) {
  double best = std::numeric_limits<double>::infinity();
  int bl = 0, bi = 0;
  for (std::size_t l = 0; l < loops.size(); ++l) {
    const auto& pts = loops[l].pts;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d = (pts[i] - p).squaredNorm();
      if (d < best) {
        best = d;
        bl = static_cast<int>(l);
        bi = static_cast<int>(i);
      }
    }
  }
  best = std::sqrt(best);
  if (!refine) return best;
  const auto& L = loops[bl];
  double dt = 1.0 / static_cast<double>(L.ts.size());
  return std::min(best, polish(spec.loops[bl], p, L.ts[bi], dt));
}

}  // namespace

CurvatureField sample_curvature(const Mesh& mesh, const DomainSpec& spec) {
  CurvatureField f;
  f.num_edges = static_cast<int>(mesh.boundary_edges.size());
  const double g = 0.5 / std::sqrt(3.0);
  f.gamma_min = std::numeric_limits<double>::infinity();
  for (int e = 0; e < f.num_edges; ++e) {
    const auto& be = mesh.boundary_edges[e];
    const auto& loop = spec.loops[be.loop];
    const double dt = be.t1 - be.t0;
    for (double s : {0.5 - g, 0.5 + g}) {
      double t = be.t0 + s * dt;
      CurvatureSample cs;
      cs.edge = e;
      cs.s = s;
      cs.t = t;
      cs.gamma = loop.curvature(t);
      cs.ds = 0.5 * dt * loop.speed(t);
      f.total += cs.gamma * cs.ds;
      f.gamma_min = std::min(f.gamma_min, cs.gamma);
      f.samples.push_back(cs);
    }
    // Corners carry no curvature sample; elsewhere the edge endpoints tighten the minimum.
    if (loop.is_c2()) f.gamma_min = std::min(f.gamma_min, loop.curvature(be.t0));
  }
  return f;
}

double distance_to_boundary(const DomainSpec& spec, const Vec2& p, int samples_per_loop) {
  std::vector<LoopSamples> loops;
  for (const auto& l : spec.loops) loops.push_back(dense(l, samples_per_loop));
  return nearest(loops, spec, p, true);
}

GeometryStats geometry_stats(const Mesh& mesh, const DomainSpec& spec, const CurvatureField& curvature) {
  GeometryStats st;
  st.area = mesh.area();
  for (const auto& s : curvature.samples) st.perimeter += s.ds;
  st.gamma_min = curvature.gamma_min;
  st.gauss_bonnet_total = curvature.total;
  st.corner_flag = spec.has_corners();
  const double diam = spec.diameter();
  st.tol_convex = 1e-9 / diam;
  st.convex = st.gamma_min >= -st.tol_convex && spec.loops.size() == 1;

  const int per_loop = std::max(2048, 8 * static_cast<int>(mesh.boundary_edges.size()));
  std::vector<LoopSamples> loops;
  for (const auto& l : spec.loops) loops.push_back(dense(l, per_loop));
  const auto boundary = mesh.boundary_mask();
  std::vector<std::pair<double, int>> coarse;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!boundary[v]) coarse.emplace_back(nearest(loops, spec, mesh.vertices[v], false), v);
  std::sort(coarse.begin(), coarse.end(), std::greater<>());
  const std::size_t keep = std::min<std::size_t>(coarse.size(), 32);
  for (std::size_t i = 0; i < keep; ++i)
    st.in_radius = std::max(st.in_radius, nearest(loops, spec, mesh.vertices[coarse[i].second], true));
  st.in_radius_resolution = mesh.max_edge_length();
  return st;
}

GeometryStats geometry_stats(const Mesh& mesh, const DomainSpec& spec) {
  return geometry_stats(mesh, spec, sample_curvature(mesh, spec));
}

}  // namespace pattern_gauge::geometry
