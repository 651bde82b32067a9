#include "pattern_gauge/geometry/mesher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geometry/triangulator.hpp"
#include "pattern_gauge/error.hpp"

namespace pattern_gauge::geometry {

namespace {

double min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto ang = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

std::string where(const Vec2& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
}

const RectangleCurve* as_rectangle(const DomainSpec& spec) {
  if (spec.loops.size() != 1) return nullptr;
  // Scaled rectangles are meshed by scaling the unit mesh, so only the bare curve is recognised.
  return dynamic_cast<const RectangleCurve*>(spec.loops[0].curve().get());
}

}  // namespace

std::vector<double> sample_loop(const BoundaryLoop& loop, double h, double curvature_length) {
  std::vector<double> cuts = loop.breakpoints();
  if (cuts.empty() || cuts.front() != 0.0) cuts.insert(cuts.begin(), 0.0);
  const double ell = curvature_length;
  std::vector<double> out;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    double a = cuts[k], b = (k + 1 < cuts.size()) ? cuts[k + 1] : 1.0;
    // Cumulative density |c'| max(1, |kappa| l) / h by the midpoint rule.
    const int nf = 8192;
    std::vector<double> cum(nf + 1, 0.0);
    for (int i = 0; i < nf; ++i) {
      double t = a + (b - a) * (i + 0.5) / nf;
      double kappa = std::abs(loop.curvature(t));
      cum[i + 1] = cum[i] + loop.speed(t) * std::max(1.0, kappa * ell) / h * (b - a) / nf;
    }
    int n = std::max(1, static_cast<int>(std::ceil(cum[nf] * 1.02)));
    if (cuts.size() == 1) n = std::max(n, 8);
    for (int j = 0; j < n; ++j) {
      double target = cum[nf] * j / n;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      int i = std::clamp(static_cast<int>(it - cum.begin()), 1, nf);
      double w = (cum[i] - cum[i - 1]) > 0 ? (target - cum[i - 1]) / (cum[i] - cum[i - 1]) : 0.0;
      double t = j == 0 ? a : a + (b - a) * (i - 1 + w) / nf;
      out.push_back(t);
    }
  }
  return out;
}

Mesh mesh_rectangle(const DomainSpec& spec, double h) {
  const auto* rect = as_rectangle(spec);
  if (!rect) throw MeshingError("structured meshing needs a single rectangle loop");
  const double lx = rect->lx(), ly = rect->ly(), P = 2.0 * (lx + ly);
  const Vec2 o = rect->origin();
  const int nx = std::max(1, static_cast<int>(std::ceil(lx / h - 1e-12)));
  const int ny = std::max(1, static_cast<int>(std::ceil(ly / h - 1e-12)));
  Mesh m;
  m.h_target = h;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.push_back(o + Vec2(lx * i / nx, ly * j / ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int i = 0; i < nx; ++i)
    m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), 0, lx * i / nx / P, lx * (i + 1) / nx / P});
  for (int j = 0; j < ny; ++j)
    m.boundary_edges.push_back({id(nx, j), id(nx, j + 1), 0, (lx + ly * j / ny) / P, (lx + ly * (j + 1) / ny) / P});
  for (int i = nx; i > 0; --i)
    m.boundary_edges.push_back({id(i, ny), id(i - 1, ny), 0, (lx + ly + lx * (nx - i) / nx) / P,
                                (lx + ly + lx * (nx - i + 1) / nx) / P});
  for (int j = ny; j > 0; --j)
    m.boundary_edges.push_back({id(0, j), id(0, j - 1), 0, (2 * lx + ly + ly * (ny - j) / ny) / P,
                                (2 * lx + ly + ly * (ny - j + 1) / ny) / P});
  m.boundary_edges.back().t1 = 1.0;
  return m;
}

void smooth_mesh(Mesh& mesh, int sweeps) {
  const int nv = mesh.num_vertices();
  std::vector<std::vector<int>> star(nv), nbrs(nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      star[tr[i]].push_back(t);
      nbrs[tr[i]].push_back(tr[(i + 1) % 3]);
      nbrs[tr[i]].push_back(tr[(i + 2) % 3]);
    }
  }
  for (auto& n : nbrs) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  const auto boundary = mesh.boundary_mask();
  auto local_quality = [&](int v, bool& valid) {
    double q = std::numbers::pi;
    valid = true;
    for (int t : star[v]) {
      const auto& tr = mesh.triangles[t];
      const Vec2& a = mesh.vertices[tr[0]];
      const Vec2& b = mesh.vertices[tr[1]];
      const Vec2& c = mesh.vertices[tr[2]];
      if (!(signed_area2(a, b, c) > 0.0)) valid = false;
      q = std::min(q, min_angle(a, b, c));
    }
    return q;
  };
  for (int s = 0; s < sweeps; ++s) {
    for (int v = 0; v < nv; ++v) {
      if (boundary[v] || nbrs[v].empty()) continue;
      bool ok;
      const double before = local_quality(v, ok);
      const Vec2 old = mesh.vertices[v];
      Vec2 avg = Vec2::Zero();
      for (int w : nbrs[v]) avg += mesh.vertices[w];
      mesh.vertices[v] = avg / static_cast<double>(nbrs[v].size());
      const double after = local_quality(v, ok);
      if (!ok || after < before) mesh.vertices[v] = old;
    }
  }
}

Mesh mesh_domain(const DomainSpec& spec, double h, const MesherOptions& opts) {
  const double diam = spec.diameter();
  if (!(h > 0.0)) throw ParameterError("mesh: h must be > 0");
  if (!(h < diam / 4.0)) throw ParameterError("mesh: h must be < diameter/4 (diameter = " + std::to_string(diam) + ")");

  if (as_rectangle(spec)) {
    Mesh m = mesh_rectangle(spec, h);
    validate_mesh(m, spec);
    return m;
  }
  if (spec.has_corners()) throw MeshingError("corner domains other than the rectangle are not supported");

  std::vector<std::vector<double>> samples;
  Vec2 lo = spec.outer().position(0.0), hi = lo;
  for (const auto& loop : spec.loops) {
    samples.push_back(sample_loop(loop, h, opts.curvature_length * diam));
    for (double t : samples.back()) {
      lo = lo.cwiseMin(loop.position(t));
      hi = hi.cwiseMax(loop.position(t));
    }
  }
  detail::ConformingDelaunay cdt(spec, lo, hi);
  for (std::size_t l = 0; l < spec.loops.size(); ++l) cdt.add_loop(static_cast<int>(l), samples[l]);
  cdt.recover_boundary();
  detail::RefineOptions ro;
  ro.min_angle_deg = opts.refine_min_angle_deg;
  ro.max_circumradius = opts.max_circumradius_factor * h;
  ro.max_vertices = opts.max_vertices;
  ro.min_segment_length = 1e-4 * h;
  cdt.refine(ro);

  Mesh m = cdt.extract();
  m.h_target = h;
  smooth_mesh(m, opts.smoothing_sweeps);

  int worst = -1;
  double worst_angle = 180.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    double a = min_angle(m.vertices[tr[0]], m.vertices[tr[1]], m.vertices[tr[2]]) * 180.0 / std::numbers::pi;
    if (a < worst_angle) {
      worst_angle = a;
      worst = t;
    }
  }
  if (worst >= 0 && worst_angle < opts.accept_min_angle_deg) {
    const auto& tr = m.triangles[worst];
    Vec2 c = (m.vertices[tr[0]] + m.vertices[tr[1]] + m.vertices[tr[2]]) / 3.0;
    throw MeshingError("minimum angle " + std::to_string(worst_angle) + " deg below " +
                       std::to_string(opts.accept_min_angle_deg) + " deg near " + where(c));
  }
  validate_mesh(m, spec);
  return m;
}

}  // namespace pattern_gauge::geometry
