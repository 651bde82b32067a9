#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pattern_gauge::geometry {

using Vec2 = Eigen::Vector2d;

// A closed planar curve parametrized over t in [0,1). Implementations are
// counterclockwise; BoundaryLoop applies the orientation of the loop.
class Curve {
 public:
  virtual ~Curve() = default;

  virtual Vec2 position(double t) const = 0;
  virtual Vec2 d1(double t) const = 0;
  virtual Vec2 d2(double t) const = 0;

  // Parameters where the curve is only piecewise smooth (corners).
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual bool is_c2() const { return true; }
  virtual std::string describe() const = 0;
};

using CurvePtr = std::shared_ptr<const Curve>;

class EllipseCurve final : public Curve {
 public:
  EllipseCurve(double a, double b, Vec2 center = Vec2::Zero());
  Vec2 position(double t) const override;
  Vec2 d1(double t) const override;
  Vec2 d2(double t) const override;
  std::string describe() const override;

 private:
  double a_, b_;
  Vec2 c_;
};

// r(theta) = r0 (1 + delta cos(k theta)), theta = 2 pi t.
class PolarCosineCurve final : public Curve {
 public:
  PolarCosineCurve(double r0, double delta, int k);
  Vec2 position(double t) const override;
  Vec2 d1(double t) const override;
  Vec2 d2(double t) const override;
  std::string describe() const override;

  // Analytic curvature of the polar graph, used as an independent check.
  double polar_curvature(double theta) const;

 private:
  void radial(double theta, double& r, double& dr, double& ddr) const;
  double r0_, delta_;
  int k_;
};

// Axis-aligned rectangle [x0, x0+lx] x [y0, y0+ly], parametrized by arc length
// starting at the lower-left corner.
class RectangleCurve final : public Curve {
 public:
  RectangleCurve(double lx, double ly, Vec2 origin = Vec2::Zero());
  Vec2 position(double t) const override;
  Vec2 d1(double t) const override;
  Vec2 d2(double t) const override;
  std::vector<double> breakpoints() const override;
  bool is_c2() const override { return false; }
  std::string describe() const override;

  double lx() const { return lx_; }
  double ly() const { return ly_; }
  const Vec2& origin() const { return o_; }

 private:
  int side(double t, double& local) const;
  double lx_, ly_;
  Vec2 o_;
};

// Periodic cubic spline through user points, chord-length parametrized.
class PeriodicSplineCurve final : public Curve {
 public:
  explicit PeriodicSplineCurve(std::vector<Vec2> points);
  Vec2 position(double t) const override;
  Vec2 d1(double t) const override;
  Vec2 d2(double t) const override;
  std::string describe() const override;

 private:
  int locate(double t, double& s, double& len) const;
  std::vector<Vec2> p_;
  std::vector<Vec2> m_;  // second derivatives with respect to the knot parameter
  std::vector<double> knots_;
};

class ScaledCurve final : public Curve {
 public:
  ScaledCurve(CurvePtr base, double eta);
  Vec2 position(double t) const override { return eta_ * base_->position(t); }
  Vec2 d1(double t) const override { return eta_ * base_->d1(t); }
  Vec2 d2(double t) const override { return eta_ * base_->d2(t); }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool is_c2() const override { return base_->is_c2(); }
  std::string describe() const override;

 private:
  CurvePtr base_;
  double eta_;
};

enum class Orientation { outer_ccw, inner_cw };

// One boundary component. Increasing t always keeps the domain on the left,
// so the outward normal is the right-hand normal of position'(t).
class BoundaryLoop {
 public:
  BoundaryLoop(CurvePtr curve, Orientation orientation);

  Vec2 position(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;
  double speed(double t) const { return d1(t).norm(); }
  Vec2 outward_normal(double t) const;

  // Signed curvature, positive on arcs that are convex seen from the domain.
  double curvature(double t) const;

  std::vector<double> breakpoints() const;
  bool is_c2() const { return curve_->is_c2(); }
  Orientation orientation() const { return orientation_; }
  const CurvePtr& curve() const { return curve_; }
  double diameter() const { return diameter_; }
  double signed_area() const;
  double length() const;

  BoundaryLoop scaled(double eta) const;

 private:
  double map(double t) const;
  CurvePtr curve_;
  Orientation orientation_;
  double diameter_ = 0.0;
};

}  // namespace pattern_gauge::geometry
