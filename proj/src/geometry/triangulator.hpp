#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "pattern_gauge/geometry/domain.hpp"
#include "pattern_gauge/geometry/mesh.hpp"

namespace pattern_gauge::geometry::detail {

struct RefineOptions {
  double min_angle_deg = 25.0;
  double max_circumradius = 0.0;  // 0 disables the size test
  int max_vertices = 500000;
  double min_segment_length = 0.0;
};

// Conforming Delaunay triangulation of a domain bounded by parametric loops.
// Boundary segments are kept Delaunay by splitting them at parametric
// midpoints whenever they go missing or get encroached, so no constrained
// flips are needed and every boundary vertex lies exactly on its curve.
class ConformingDelaunay {
 public:
  ConformingDelaunay(const DomainSpec& spec, const Vec2& lo, const Vec2& hi);

  // Boundary polyline of one loop: vertices at parameters ts (ascending in [0,1)).
  void add_loop(int loop, const std::vector<double>& ts);

  // Splits missing or encroached segments until none are left, then classifies triangles.
  void recover_boundary();

  void refine(const RefineOptions& opts);

  Mesh extract() const;

  int num_vertices() const { return static_cast<int>(pts_.size()) - 3; }

 private:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{{-1, -1, -1}};  // nb[i] is across the edge opposite v[i]
    bool alive = true;
    bool inside = false;
  };
  struct Segment {
    int a, b, loop;
    double t0, t1;
  };

  static std::uint64_t key(int a, int b);
  int locate(const Vec2& p, int hint) const;
  void cavity(const Vec2& p, int start, std::vector<int>& out);
  int insert(const Vec2& p, int hint);
  int insert_with_cavity(const Vec2& p, std::vector<int>& cav, std::vector<std::uint64_t>* touched);
  bool find_edge(int a, int b, int& tri, int& idx) const;
  bool encroached(const Segment& s) const;
  void split(std::uint64_t k, std::vector<std::uint64_t>& queue);
  void drain(std::vector<std::uint64_t>& queue);
  void classify();
  void fix_split_flags(int m, int a, int b);
  bool is_bad(int t, const RefineOptions& opts) const;
  Vec2 circumcenter(int t) const;

  const DomainSpec& spec_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::unordered_map<std::uint64_t, Segment> segs_;
  std::vector<char> mark_;
  int last_ = 0;
  double min_seg_ = 0.0;
  bool classified_ = false;
};

}  // namespace pattern_gauge::geometry::detail
