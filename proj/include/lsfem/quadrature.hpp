#pragma once

#include <array>
#include <vector>

#include "lsfem/mesh.hpp"

namespace lsfem {

/// Rule on a triangle in barycentric coordinates; weights sum to 1 and are
/// scaled by the area on use.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// 3-point rule, exact for degree 2.
const TriangleRule& triangle_rule_deg2();
/// 6-point rule, exact for degree 4.
const TriangleRule& triangle_rule_deg4();

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre(int n);

Point map_point(const std::array<Point, 3>& corners, const std::array<double, 3>& lam);

/// Sutherland-Hodgman clip of a triangle against an axis-aligned box; the
/// result is a convex polygon (possibly empty).
std::vector<Point> clip_to_box(const std::array<Point, 3>& corners, const Box& box);
/// Fan triangulation of a convex polygon.
std::vector<std::array<Point, 3>> fan(const std::vector<Point>& polygon);

}  // namespace lsfem
