#include "geometry/triangulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geometry/predicates.hpp"
#include "pattern_gauge/error.hpp"

namespace pattern_gauge::geometry::detail {

namespace {

double tri_cross(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

std::string where(const Vec2& p) {
  return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
}

}  // namespace

std::uint64_t ConformingDelaunay::key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b)), hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

ConformingDelaunay::ConformingDelaunay(const DomainSpec& spec, const Vec2& lo, const Vec2& hi) : spec_(spec) {
  Vec2 c = 0.5 * (lo + hi);
  double r = 50.0 * std::max((hi - lo).norm(), 1e-300);
  for (double deg : {90.0, 210.0, 330.0}) {
    double a = deg * std::numbers::pi / 180.0;
    pts_.push_back(c + r * Vec2(std::cos(a), std::sin(a)));
  }
  Tri t;
  t.v = {0, 1, 2};
  tris_.push_back(t);
  vtri_ = {0, 0, 0};
  mark_.assign(1, 0);
}

int ConformingDelaunay::locate(const Vec2& p, int hint) const {
  int t = (hint >= 0 && hint < static_cast<int>(tris_.size()) && tris_[hint].alive) ? hint : last_;
  if (!tris_[t].alive) {
    for (t = static_cast<int>(tris_.size()) - 1; t >= 0 && !tris_[t].alive; --t) {
    }
  }
  const std::size_t limit = 4 * tris_.size() + 64;
  for (std::size_t step = 0; step < limit; ++step) {
    const Tri& T = tris_[t];
    int next = -2;
    for (int k = 0; k < 3; ++k) {
      int i = static_cast<int>((k + step) % 3);
      int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      if (orient2d(pts_[a], pts_[b], p) < 0) {
        next = T.nb[i];
        break;
      }
    }
    if (next == -2) return t;
    if (next < 0) return -1;
    t = next;
  }
  return -1;
}

void ConformingDelaunay::cavity(const Vec2& p, int start, std::vector<int>& out) {
  out.clear();
  if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
  std::vector<int> stack{start};
  mark_[start] = 1;
  out.push_back(start);
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    for (int i = 0; i < 3; ++i) {
      int n = tris_[t].nb[i];
      if (n < 0 || mark_[n]) continue;
      const auto& v = tris_[n].v;
      if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0) {
        mark_[n] = 1;
        out.push_back(n);
        stack.push_back(n);
      }
    }
  }
}

int ConformingDelaunay::insert_with_cavity(const Vec2& p, std::vector<int>& cav,
                                           std::vector<std::uint64_t>* touched) {
  auto clear = [&] {
    for (int t : cav) mark_[t] = 0;
  };
  struct BEdge {
    int a, b, outer, old;
  };
  std::vector<BEdge> be;
  const double dup_tol = 1e-13 * (pts_[0] - pts_[1]).norm() / 50.0;
  for (int t : cav) {
    const Tri& T = tris_[t];
    for (int i = 0; i < 3; ++i) {
      if ((pts_[T.v[i]] - p).norm() <= dup_tol) {
        clear();
        return -1;
      }
      int n = T.nb[i];
      int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      if (touched && segs_.count(key(a, b))) touched->push_back(key(a, b));
      if (n < 0 || !mark_[n]) {
        if (orient2d(pts_[a], pts_[b], p) <= 0) {
          clear();
          return -1;
        }
        be.push_back({a, b, n, t});
      }
    }
  }
  const int id = static_cast<int>(pts_.size());
  pts_.push_back(p);
  vtri_.push_back(-1);
  const int first = static_cast<int>(tris_.size());
  for (const auto& e : be) {
    Tri nt;
    nt.v = {id, e.a, e.b};
    nt.nb = {e.outer, -1, -1};
    nt.inside = tris_[e.old].inside;
    const int ni = static_cast<int>(tris_.size());
    tris_.push_back(nt);
    if (e.outer >= 0) {
      Tri& O = tris_[e.outer];
      for (int j = 0; j < 3; ++j)
        if (O.nb[j] == e.old) O.nb[j] = ni;
    }
  }
  const int count = static_cast<int>(be.size());
  for (int i = 0; i < count; ++i) {
    Tri& T = tris_[first + i];
    for (int j = 0; j < count; ++j) {
      const Tri& S = tris_[first + j];
      if (S.v[1] == T.v[2]) T.nb[1] = first + j;  // shares edge (b, id)
      if (S.v[2] == T.v[1]) T.nb[2] = first + j;  // shares edge (id, a)
    }
  }
  for (int t : cav) {
    tris_[t].alive = false;
    mark_[t] = 0;
  }
  mark_.resize(tris_.size(), 0);
  for (int i = first; i < static_cast<int>(tris_.size()); ++i)
    for (int v : tris_[i].v) vtri_[v] = i;
  last_ = first;
  return id;
}

int ConformingDelaunay::insert(const Vec2& p, int hint) {
  int t = locate(p, hint);
  if (t < 0) return -1;
  std::vector<int> cav;
  cavity(p, t, cav);
  return insert_with_cavity(p, cav, nullptr);
}

bool ConformingDelaunay::find_edge(int a, int b, int& tri, int& idx) const {
  const int start = vtri_[a];
  int t = start;
  do {
    const Tri& T = tris_[t];
    int i = T.v[0] == a ? 0 : (T.v[1] == a ? 1 : 2);
    if (T.v[(i + 1) % 3] == b || T.v[(i + 2) % 3] == b) {
      tri = t;
      idx = i;
      return true;
    }
    t = T.nb[(i + 2) % 3];
  } while (t >= 0 && t != start);
  return false;
}

bool ConformingDelaunay::encroached(const Segment& s) const {
  const Vec2& pa = pts_[s.a];
  const Vec2& pb = pts_[s.b];
  const int start = vtri_[s.a];
  int t = start, hits = 0;
  do {
    const Tri& T = tris_[t];
    int i = T.v[0] == s.a ? 0 : (T.v[1] == s.a ? 1 : 2);
    int apex = -1;
    if (T.v[(i + 1) % 3] == s.b) apex = T.v[(i + 2) % 3];
    if (T.v[(i + 2) % 3] == s.b) apex = T.v[(i + 1) % 3];
    if (apex >= 0) {
      ++hits;
      const Vec2& c = pts_[apex];
      if ((pa - c).dot(pb - c) < 0.0) return true;
    }
    t = T.nb[(i + 2) % 3];
  } while (t >= 0 && t != start);
  return hits == 0;
}

void ConformingDelaunay::add_loop(int loop, const std::vector<double>& ts) {
  const auto& L = spec_.loops[loop];
  std::vector<int> ids;
  for (double t : ts) {
    int id = insert(L.position(t), last_);
    if (id < 0) throw MeshingError("boundary sample could not be inserted near " + where(L.position(t)));
    ids.push_back(id);
  }
  const int n = static_cast<int>(ids.size());
  for (int i = 0; i < n; ++i) {
    int a = ids[i], b = ids[(i + 1) % n];
    double t1 = (i + 1 < n) ? ts[i + 1] : 1.0 + ts[0];
    segs_[key(a, b)] = {a, b, loop, ts[i], t1};
  }
}

void ConformingDelaunay::fix_split_flags(int m, int a, int b) {
  int start = -1;
  int t = vtri_[m];
  const int first = t;
  do {
    const Tri& T = tris_[t];
    int i = T.v[0] == m ? 0 : (T.v[1] == m ? 1 : 2);
    if (T.v[(i + 1) % 3] == b) {
      start = t;
      break;
    }
    t = T.nb[(i + 1) % 3];
  } while (t >= 0 && t != first);
  if (start < 0) return;
  bool state = true;
  t = start;
  do {
    Tri& T = tris_[t];
    int i = T.v[0] == m ? 0 : (T.v[1] == m ? 1 : 2);
    T.inside = state;
    if (T.v[(i + 2) % 3] == a) state = false;
    t = T.nb[(i + 1) % 3];
  } while (t >= 0 && t != start);
}

void ConformingDelaunay::split(std::uint64_t k, std::vector<std::uint64_t>& queue) {
  auto it = segs_.find(k);
  if (it == segs_.end()) return;
  Segment s = it->second;
  if ((pts_[s.a] - pts_[s.b]).norm() < min_seg_) return;
  double tm = 0.5 * (s.t0 + s.t1);
  Vec2 m = spec_.loops[s.loop].position(tm);
  int t = locate(m, vtri_[s.a]);
  if (t < 0) throw MeshingError("boundary split point fell outside the triangulation near " + where(m));
  std::vector<int> cav;
  cavity(m, t, cav);
  std::vector<std::uint64_t> touched;
  int id = insert_with_cavity(m, cav, &touched);
  if (id < 0) throw MeshingError("boundary segment could not be split near " + where(m));
  segs_.erase(k);
  segs_[key(s.a, id)] = {s.a, id, s.loop, s.t0, tm};
  segs_[key(id, s.b)] = {id, s.b, s.loop, tm, s.t1};
  if (classified_) fix_split_flags(id, s.a, s.b);
  queue.push_back(key(s.a, id));
  queue.push_back(key(id, s.b));
  for (auto tk : touched) queue.push_back(tk);
}

void ConformingDelaunay::drain(std::vector<std::uint64_t>& queue) {
  while (!queue.empty()) {
    auto k = queue.back();
    queue.pop_back();
    auto it = segs_.find(k);
    if (it == segs_.end()) continue;
    if (encroached(it->second)) {
      if ((pts_[it->second.a] - pts_[it->second.b]).norm() < min_seg_) {
        int tri, idx;
        if (!find_edge(it->second.a, it->second.b, tri, idx))
          throw MeshingError("boundary segment cannot be recovered near " + where(pts_[it->second.a]));
        continue;
      }
      split(k, queue);
    }
  }
}

void ConformingDelaunay::recover_boundary() {
  std::vector<std::uint64_t> queue;
  for (const auto& [k, s] : segs_) queue.push_back(k);
  std::sort(queue.begin(), queue.end(), std::greater<>());
  drain(queue);
  classify();
  classified_ = true;
}

void ConformingDelaunay::classify() {
  const int nt = static_cast<int>(tris_.size());
  std::vector<int> comp(nt, -1);
  auto flood = [&](int seed, int id) {
    std::vector<int> stack{seed};
    comp[seed] = id;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      const Tri& T = tris_[t];
      for (int i = 0; i < 3; ++i) {
        int n = T.nb[i];
        if (n < 0 || comp[n] >= 0) continue;
        if (segs_.count(key(T.v[(i + 1) % 3], T.v[(i + 2) % 3]))) continue;
        comp[n] = id;
        stack.push_back(n);
      }
    }
  };
  for (int t = 0; t < nt; ++t) {
    if (!tris_[t].alive || comp[t] >= 0) continue;
    const auto& v = tris_[t].v;
    if (v[0] < 3 || v[1] < 3 || v[2] < 3) flood(t, 0);
  }
  int next = 1;
  std::vector<char> inside_comp{0};
  for (int t = 0; t < nt; ++t) {
    if (!tris_[t].alive || comp[t] >= 0) continue;
    flood(t, next++);
    const auto& v = tris_[t].v;
    Vec2 c = (pts_[v[0]] + pts_[v[1]] + pts_[v[2]]) / 3.0;
    double w = 0.0;
    for (const auto& [k, s] : segs_) {
      Vec2 a = pts_[s.a] - c, b = pts_[s.b] - c;
      w += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    }
    inside_comp.push_back(w / (2.0 * std::numbers::pi) > 0.5);
  }
  for (int t = 0; t < nt; ++t)
    if (tris_[t].alive) tris_[t].inside = inside_comp[comp[t]] != 0;
}

Vec2 ConformingDelaunay::circumcenter(int t) const {
  const auto& v = tris_[t].v;
  const Vec2& a = pts_[v[0]];
  Vec2 b = pts_[v[1]] - a, c = pts_[v[2]] - a;
  double d = 2.0 * (b.x() * c.y() - b.y() * c.x());
  double b2 = b.squaredNorm(), c2 = c.squaredNorm();
  return a + Vec2((c.y() * b2 - b.y() * c2) / d, (b.x() * c2 - c.x() * b2) / d);
}

bool ConformingDelaunay::is_bad(int t, const RefineOptions& opts) const {
  const auto& v = tris_[t].v;
  const Vec2& a = pts_[v[0]];
  const Vec2& b = pts_[v[1]];
  const Vec2& c = pts_[v[2]];
  double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  double area = 0.5 * tri_cross(a, b, c);
  double R = la * lb * lc / (4.0 * area);
  double shortest = std::min({la, lb, lc});
  // Smallest angle theta satisfies shortest = 2 R sin(theta).
  double sin_min = shortest / (2.0 * R);
  if (sin_min < std::sin(opts.min_angle_deg * std::numbers::pi / 180.0)) return true;
  return opts.max_circumradius > 0.0 && R > opts.max_circumradius;
}

void ConformingDelaunay::refine(const RefineOptions& opts) {
  min_seg_ = opts.min_segment_length;
  std::vector<std::uint64_t> queue;
  std::vector<char> gave_up;
  std::vector<int> cav;
  for (int pass = 0; pass < 10000; ++pass) {
    gave_up.resize(tris_.size(), 0);
    std::vector<int> bad;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive && tris_[t].inside && !gave_up[t] && is_bad(t, opts)) bad.push_back(t);
    if (bad.empty()) return;
    for (int t : bad) {
      if (!tris_[t].alive) continue;
      if (num_vertices() > opts.max_vertices) {
        const auto& v = tris_[t].v;
        throw MeshingError("refinement budget of " + std::to_string(opts.max_vertices) +
                           " vertices exhausted near " + where(pts_[v[0]]));
      }
      Vec2 c = circumcenter(t);
      int loc = locate(c, t);
      if (loc < 0) {
        gave_up.resize(tris_.size(), 0);
        gave_up[t] = 1;
        continue;
      }
      cavity(c, loc, cav);
      std::vector<std::uint64_t> enc;
      for (int ct : cav) {
        const Tri& T = tris_[ct];
        for (int i = 0; i < 3; ++i) {
          int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
          auto k = key(a, b);
          if (!segs_.count(k)) continue;
          int n = T.nb[i];
          bool interior = n >= 0 && mark_[n];
          if (interior || (pts_[a] - c).dot(pts_[b] - c) < 0.0) enc.push_back(k);
        }
      }
      if (!enc.empty() || !tris_[loc].inside) {
        for (int ct : cav) mark_[ct] = 0;
        std::sort(enc.begin(), enc.end());
        enc.erase(std::unique(enc.begin(), enc.end()), enc.end());
        bool progressed = false;
        for (auto k : enc) {
          auto it = segs_.find(k);
          if (it == segs_.end()) continue;
          if ((pts_[it->second.a] - pts_[it->second.b]).norm() < min_seg_) continue;
          split(k, queue);
          progressed = true;
        }
        drain(queue);
        if (!progressed) {
          gave_up.resize(tris_.size(), 0);
          if (tris_[t].alive) gave_up[t] = 1;
        }
        continue;
      }
      std::vector<std::uint64_t> touched;
      int id = insert_with_cavity(c, cav, &touched);
      if (id < 0) {
        gave_up.resize(tris_.size(), 0);
        gave_up[t] = 1;
        continue;
      }
      for (auto k : touched) queue.push_back(k);
      drain(queue);
    }
  }
  throw MeshingError("quality refinement did not terminate");
}

Mesh ConformingDelaunay::extract() const {
  Mesh m;
  std::vector<int> remap(pts_.size(), -1);
  for (const auto& T : tris_)
    if (T.alive && T.inside)
      for (int v : T.v) remap[v] = 0;
  for (const auto& [k, s] : segs_) remap[s.a] = remap[s.b] = 0;
  for (std::size_t v = 3; v < pts_.size(); ++v) {
    if (remap[v] < 0) continue;
    remap[v] = static_cast<int>(m.vertices.size());
    m.vertices.push_back(pts_[v]);
  }
  for (const auto& T : tris_) {
    if (!T.alive || !T.inside) continue;
    for (int v : T.v)
      if (v < 3) throw MeshingError("domain triangle touches the enclosing triangle; boundary is not closed");
    m.triangles.push_back({remap[T.v[0]], remap[T.v[1]], remap[T.v[2]]});
  }
  std::vector<Segment> segs;
  for (const auto& [k, s] : segs_) segs.push_back(s);
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) {
    return x.loop != y.loop ? x.loop < y.loop : x.t0 < y.t0;
  });
  for (const auto& s : segs) {
    // Loops are sampled from t = 0, so the closing edge ends exactly at t = 1.
    double t0 = s.t0, t1 = s.t1;
    m.boundary_edges.push_back({remap[s.a], remap[s.b], s.loop, t0, t1});
  }
  return m;
}

}  // namespace pattern_gauge::geometry::detail
