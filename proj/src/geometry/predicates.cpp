#include "geometry/predicates.hpp"

#include <cmath>
#include <limits>

#include <gmpxx.h>

namespace pattern_gauge::geometry::detail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53
// Forward error bounds for the plain floating-point determinants.
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign(const mpq_class& v) { return sgn(v); }

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  double detl = (a.x() - c.x()) * (b.y() - c.y());
  double detr = (a.y() - c.y()) * (b.x() - c.x());
  double det = detl - detr;
  double bound = kOrientBound * (std::abs(detl) + std::abs(detr));
  if (det > bound) return 1;
  if (-det > bound) return -1;

  mpq_class ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  mpq_class v = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
  return sign(v);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double adx = a.x() - d.x(), ady = a.y() - d.y();
  double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  double cdx = c.x() - d.x(), cdy = c.y() - d.y();

  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double alift = adx * adx + ady * ady;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double blift = bdx * bdx + bdy * bdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double clift = cdx * cdx + cdy * cdy;

  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                     (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  double bound = kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;

  mpq_class qdx(d.x()), qdy(d.y());
  mpq_class ax = mpq_class(a.x()) - qdx, ay = mpq_class(a.y()) - qdy;
  mpq_class bx = mpq_class(b.x()) - qdx, by = mpq_class(b.y()) - qdy;
  mpq_class cx = mpq_class(c.x()) - qdx, cy = mpq_class(c.y()) - qdy;
  mpq_class v = (ax * ax + ay * ay) * (bx * cy - cx * by) + (bx * bx + by * by) * (cx * ay - ax * cy) +
                (cx * cx + cy * cy) * (ax * by - bx * ay);
  return sign(v);
}

}  // namespace pattern_gauge::geometry::detail
