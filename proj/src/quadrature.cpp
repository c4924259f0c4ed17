#include "lsfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace lsfem {

const TriangleRule& triangle_rule_deg2() {
  static const TriangleRule rule{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}},
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  return rule;
}

const TriangleRule& triangle_rule_deg4() {
  // Dunavant
  static const TriangleRule rule = [] {
    const double a = 0.445948490915965, wa = 0.223381589678011;
    const double b = 0.091576213509771, wb = 0.109951743655322;
    TriangleRule r;
    r.points = {{a, a, 1 - 2 * a}, {a, 1 - 2 * a, a}, {1 - 2 * a, a, a},
                {b, b, 1 - 2 * b}, {b, 1 - 2 * b, b}, {1 - 2 * b, b, b}};
    r.weights = {wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  LineRule r;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points.push_back(0.5 * (1.0 - x));
    r.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

Point map_point(const std::array<Point, 3>& c, const std::array<double, 3>& lam) {
  return {lam[0] * c[0].x + lam[1] * c[1].x + lam[2] * c[2].x, lam[0] * c[0].y + lam[1] * c[1].y + lam[2] * c[2].y};
}

std::vector<Point> clip_to_box(const std::array<Point, 3>& corners, const Box& box) {
  std::vector<Point> poly(corners.begin(), corners.end());
  // side: 0 x>=x0, 1 x<=x1, 2 y>=y0, 3 y<=y1
  auto dist = [&](const Point& p, int side) {
    switch (side) {
      case 0: return p.x - box.x0;
      case 1: return box.x1 - p.x;
      case 2: return p.y - box.y0;
      default: return box.y1 - p.y;
    }
  };
  for (int side = 0; side < 4 && !poly.empty(); ++side) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point& p = poly[i];
      const Point& q = poly[(i + 1) % poly.size()];
      const double dp = dist(p, side), dq = dist(q, side);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        const double s = dp / (dp - dq);
        out.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)});
      }
    }
    poly = std::move(out);
  }
  return poly;
}

std::vector<std::array<Point, 3>> fan(const std::vector<Point>& polygon) {
  std::vector<std::array<Point, 3>> out;
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) out.push_back({polygon[0], polygon[i], polygon[i + 1]});
  return out;
}

}  // namespace lsfem
