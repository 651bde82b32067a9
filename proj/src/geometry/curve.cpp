#include "pattern_gauge/geometry/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "pattern_gauge/error.hpp"

namespace pattern_gauge::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double t) {
  double w = t - std::floor(t);
  return w >= 1.0 ? 0.0 : w;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

EllipseCurve::EllipseCurve(double a, double b, Vec2 center) : a_(a), b_(b), c_(center) {
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("ellipse: semi-axes must be > 0");
}

Vec2 EllipseCurve::position(double t) const {
  double th = kTwoPi * t;
  return c_ + Vec2(a_ * std::cos(th), b_ * std::sin(th));
}

Vec2 EllipseCurve::d1(double t) const {
  double th = kTwoPi * t;
  return kTwoPi * Vec2(-a_ * std::sin(th), b_ * std::cos(th));
}

Vec2 EllipseCurve::d2(double t) const {
  double th = kTwoPi * t;
  return -kTwoPi * kTwoPi * Vec2(a_ * std::cos(th), b_ * std::sin(th));
}

std::string EllipseCurve::describe() const { return "ellipse(" + fmt(a_) + "," + fmt(b_) + ")"; }

PolarCosineCurve::PolarCosineCurve(double r0, double delta, int k) : r0_(r0), delta_(delta), k_(k) {
  if (!(r0 > 0.0)) throw ParameterError("polar curve: r0 must be > 0");
  if (!(std::abs(delta) < 1.0)) throw ParameterError("polar curve: |delta| must be < 1 so that r > 0");
  if (k < 0) throw ParameterError("polar curve: k must be >= 0");
}

void PolarCosineCurve::radial(double theta, double& r, double& dr, double& ddr) const {
  double c = std::cos(k_ * theta), s = std::sin(k_ * theta);
  r = r0_ * (1.0 + delta_ * c);
  dr = -r0_ * delta_ * k_ * s;
  ddr = -r0_ * delta_ * k_ * k_ * c;
}

Vec2 PolarCosineCurve::position(double t) const {
  double th = kTwoPi * t, r, dr, ddr;
  radial(th, r, dr, ddr);
  return Vec2(r * std::cos(th), r * std::sin(th));
}

Vec2 PolarCosineCurve::d1(double t) const {
  double th = kTwoPi * t, r, dr, ddr;
  radial(th, r, dr, ddr);
  double c = std::cos(th), s = std::sin(th);
  return kTwoPi * Vec2(dr * c - r * s, dr * s + r * c);
}

Vec2 PolarCosineCurve::d2(double t) const {
  double th = kTwoPi * t, r, dr, ddr;
  radial(th, r, dr, ddr);
  double c = std::cos(th), s = std::sin(th);
  return kTwoPi * kTwoPi * Vec2(ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s);
}

double PolarCosineCurve::polar_curvature(double theta) const {
  double r, dr, ddr;
  radial(theta, r, dr, ddr);
  return (r * r + 2.0 * dr * dr - r * ddr) / std::pow(r * r + dr * dr, 1.5);
}

std::string PolarCosineCurve::describe() const {
  return "polar_cosine(" + fmt(r0_) + "," + fmt(delta_) + "," + std::to_string(k_) + ")";
}

RectangleCurve::RectangleCurve(double lx, double ly, Vec2 origin) : lx_(lx), ly_(ly), o_(origin) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw ParameterError("rectangle: side lengths must be > 0");
}

int RectangleCurve::side(double t, double& local) const {
  double p = 2.0 * (lx_ + ly_);
  double s = wrap01(t) * p;
  if (s < lx_) { local = s; return 0; }
  s -= lx_;
  if (s < ly_) { local = s; return 1; }
  s -= ly_;
  if (s < lx_) { local = s; return 2; }
  local = std::min(s - lx_, ly_);
  return 3;
}

Vec2 RectangleCurve::position(double t) const {
  double s;
  switch (side(t, s)) {
    case 0: return o_ + Vec2(s, 0.0);
    case 1: return o_ + Vec2(lx_, s);
    case 2: return o_ + Vec2(lx_ - s, ly_);
    default: return o_ + Vec2(0.0, ly_ - s);
  }
}

Vec2 RectangleCurve::d1(double t) const {
  double p = 2.0 * (lx_ + ly_), s;
  switch (side(t, s)) {
    case 0: return Vec2(p, 0.0);
    case 1: return Vec2(0.0, p);
    case 2: return Vec2(-p, 0.0);
    default: return Vec2(0.0, -p);
  }
}

Vec2 RectangleCurve::d2(double) const { return Vec2::Zero(); }

std::vector<double> RectangleCurve::breakpoints() const {
  double p = 2.0 * (lx_ + ly_);
  return {0.0, lx_ / p, (lx_ + ly_) / p, (2.0 * lx_ + ly_) / p};
}

std::string RectangleCurve::describe() const { return "rectangle(" + fmt(lx_) + "," + fmt(ly_) + ")"; }

PeriodicSplineCurve::PeriodicSplineCurve(std::vector<Vec2> points) : p_(std::move(points)) {
  if (p_.size() >= 2 && (p_.front() - p_.back()).norm() == 0.0) p_.pop_back();
  const int n = static_cast<int>(p_.size());
  if (n < 4) throw ParameterError("spline: at least 4 distinct points are required");

  // Orient counterclockwise; BoundaryLoop handles inner loops.
  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = p_[i];
    const Vec2& b = p_[(i + 1) % n];
    area += a.x() * b.y() - a.y() * b.x();
  }
  if (area < 0.0) std::reverse(p_.begin(), p_.end());

  knots_.assign(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    double len = (p_[(i + 1) % n] - p_[i]).norm();
    if (len <= 0.0) throw ParameterError("spline: consecutive points must be distinct");
    knots_[i + 1] = knots_[i] + len;
  }
  const double total = knots_[n];
  for (double& k : knots_) k /= total;

  // Periodic second-derivative system: h_{i-1} m_{i-1} + 2(h_{i-1}+h_i) m_i + h_i m_{i+1}
  //   = 6((p_{i+1}-p_i)/h_i - (p_i-p_{i-1})/h_{i-1}).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) {
    int im = (i + n - 1) % n, ip = (i + 1) % n;
    double hm = knots_[im + 1] - knots_[im];
    double hp = knots_[i + 1] - knots_[i];
    A(i, im) += hm;
    A(i, i) += 2.0 * (hm + hp);
    A(i, ip) += hp;
    Vec2 r = 6.0 * ((p_[ip] - p_[i]) / hp - (p_[i] - p_[im]) / hm);
    rhs(i, 0) = r.x();
    rhs(i, 1) = r.y();
  }
  Eigen::MatrixXd m = A.partialPivLu().solve(rhs);
  m_.resize(n);
  for (int i = 0; i < n; ++i) m_[i] = Vec2(m(i, 0), m(i, 1));
}

int PeriodicSplineCurve::locate(double t, double& s, double& len) const {
  double w = wrap01(t);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
  int i = static_cast<int>(it - knots_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(p_.size()) - 1);
  len = knots_[i + 1] - knots_[i];
  s = w - knots_[i];
  return i;
}

Vec2 PeriodicSplineCurve::position(double t) const {
  double s, h;
  int i = locate(t, s, h);
  int j = (i + 1) % static_cast<int>(p_.size());
  double a = (h - s) / h, b = s / h;
  return a * p_[i] + b * p_[j] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * (h * h / 6.0);
}

Vec2 PeriodicSplineCurve::d1(double t) const {
  double s, h;
  int i = locate(t, s, h);
  int j = (i + 1) % static_cast<int>(p_.size());
  double a = (h - s) / h, b = s / h;
  return (p_[j] - p_[i]) / h + (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[j]) * (h / 6.0);
}

Vec2 PeriodicSplineCurve::d2(double t) const {
  double s, h;
  int i = locate(t, s, h);
  int j = (i + 1) % static_cast<int>(p_.size());
  double a = (h - s) / h, b = s / h;
  return a * m_[i] + b * m_[j];
}

std::string PeriodicSplineCurve::describe() const {
  return "spline(" + std::to_string(p_.size()) + " points)";
}

ScaledCurve::ScaledCurve(CurvePtr base, double eta) : base_(std::move(base)), eta_(eta) {
  if (!(eta > 0.0)) throw ParameterError("scale factor must be > 0");
}

std::string ScaledCurve::describe() const { return fmt(eta_) + "*" + base_->describe(); }

BoundaryLoop::BoundaryLoop(CurvePtr curve, Orientation orientation)
    : curve_(std::move(curve)), orientation_(orientation) {
  constexpr int n = 256;
  Vec2 lo = curve_->position(0.0), hi = lo;
  for (int i = 1; i < n; ++i) {
    Vec2 p = curve_->position(static_cast<double>(i) / n);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  diameter_ = (hi - lo).norm();
}

double BoundaryLoop::map(double t) const {
  return orientation_ == Orientation::outer_ccw ? t : wrap01(1.0 - t);
}

Vec2 BoundaryLoop::position(double t) const { return curve_->position(map(t)); }

Vec2 BoundaryLoop::d1(double t) const {
  Vec2 d = curve_->d1(map(t));
  return orientation_ == Orientation::outer_ccw ? d : Vec2(-d);
}

Vec2 BoundaryLoop::d2(double t) const { return curve_->d2(map(t)); }

Vec2 BoundaryLoop::outward_normal(double t) const {
  Vec2 d = d1(t);
  return Vec2(d.y(), -d.x()).normalized();
}

double BoundaryLoop::curvature(double t) const {
  Vec2 a = d1(t), b = d2(t);
  double sp = a.norm();
  if (sp < 1e-12 * diameter_) {
    throw DegenerateParametrizationError("curvature: vanishing speed at t=" + fmt(t));
  }
  return (a.x() * b.y() - a.y() * b.x()) / (sp * sp * sp);
}

std::vector<double> BoundaryLoop::breakpoints() const {
  std::vector<double> out;
  for (double b : curve_->breakpoints()) out.push_back(map(b));
  std::sort(out.begin(), out.end());
  return out;
}

double BoundaryLoop::signed_area() const {
  // Green's formula with a composite Gauss rule; exact enough for orientation checks.
  constexpr int n = 2048;
  const double g = 0.5 / std::sqrt(3.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (double off : {0.5 - g, 0.5 + g}) {
      double t = (i + off) / n;
      Vec2 p = position(t), d = d1(t);
      acc += 0.5 * (p.x() * d.y() - p.y() * d.x()) * 0.5 / n;
    }
  }
  return acc;
}

double BoundaryLoop::length() const {
  constexpr int n = 4096;
  const double g = 0.5 / std::sqrt(3.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (double off : {0.5 - g, 0.5 + g}) acc += speed((i + off) / n) * 0.5 / n;
  }
  return acc;
}

BoundaryLoop BoundaryLoop::scaled(double eta) const {
  return BoundaryLoop(std::make_shared<ScaledCurve>(curve_, eta), orientation_);
}

}  // namespace pattern_gauge::geometry
