#include "srefi/geometry.hpp"

#include <gmpxx.h>

#include <algorithm>

#include "srefi/error.hpp"

namespace srefi {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

int sign_of(const mpq_class& v) {
  int s = sgn(v);
  return (s > 0) - (s < 0);
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;

  // Static filter (Shewchuk-style bound for a 2x2 difference determinant).
  const double detsum = std::abs(detleft) + std::abs(detright);
  const double errbound = 3.3306690738754716e-16 * detsum;
  if (det > errbound || -det > errbound) return sign_of(det);

  mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  mpq_class exact = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
  return sign_of(exact);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);

  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double errbound = 1.1102230246251565e-15 * permanent;
  if (det > errbound || -det > errbound) return sign_of(det);

  mpq_class qadx(a.x), qady(a.y), qbdx(b.x), qbdy(b.y);
  mpq_class qcdx(c.x), qcdy(c.y), qdx(d.x), qdy(d.y);
  qadx -= qdx; qady -= qdy;
  qbdx -= qdx; qbdy -= qdy;
  qcdx -= qdx; qcdy -= qdy;
  mpq_class qalift = qadx * qadx + qady * qady;
  mpq_class qblift = qbdx * qbdx + qbdy * qbdy;
  mpq_class qclift = qcdx * qcdx + qcdy * qcdy;
  mpq_class exact = qalift * (qbdx * qcdy - qcdx * qbdy) +
                    qblift * (qcdx * qady - qadx * qcdy) +
                    qclift * (qadx * qbdy - qbdx * qady);
  return sign_of(exact);
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;

  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && orient2d(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient2d(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  int ref = 0;
  for (size_t i = 0; i < n; ++i) {
    const int s = orient2d(poly[i], poly[(i + 1) % n], p);
    if (s == 0) continue;  // on the edge line; boundary counts as inside
    if (ref == 0) {
      ref = s;
    } else if (s != ref) {
      return false;
    }
  }
  return true;
}

std::vector<Vec2> dilate_polygon(const std::vector<Vec2>& poly, double margin) {
  if (poly.empty() || margin == 0.0) return poly;
  Vec2 centroid{0, 0};
  for (const Vec2& v : poly) centroid = centroid + v;
  centroid = centroid * (1.0 / static_cast<double>(poly.size()));

  std::vector<Vec2> out;
  out.reserve(poly.size());
  for (const Vec2& v : poly) {
    Vec2 dir = v - centroid;
    const double len = norm(dir);
    if (len < 1e-12) {
      out.push_back(v);
    } else {
      out.push_back(v + dir * (margin / len));
    }
  }
  return out;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double acc = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    acc += cross(poly[i], poly[(i + 1) % n]);
  }
  return std::abs(acc) * 0.5;
}

}  // namespace srefi
