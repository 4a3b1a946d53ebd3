#pragma once

#include "amm/mechanism.hpp"

#include <vector>

namespace amm {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Polygon = std::vector<Point2>;

// Keeps the part of a convex polygon where nx*x + ny*y <= rhs.
Polygon clip_halfplane(const Polygon& poly, double nx, double ny, double rhs);

struct PolygonMoments {
    double area = 0.0;
    double first_x = 0.0;  // integral of x over the polygon
    double first_y = 0.0;
};

PolygonMoments polygon_moments(const Polygon& poly);

// Region of [0,1]^2 where item i is the trader's choice (ties to lower index).
Polygon choice_region(const Menu& menu, std::size_t i);

// Exact expected profit of a 2-good menu for uniform values on [0,1]^2 and a
// linear belief update: each choice region is an intersection of half-planes,
// and profit is affine in x on it, so area and first moments suffice.
double exact_profit_uniform_2d(const Menu& menu, const UpdateModel& upd);

}  // namespace amm
