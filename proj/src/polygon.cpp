#include "amm/polygon.hpp"

#include "amm/errors.hpp"

#include <cmath>

namespace amm {

Polygon clip_halfplane(const Polygon& poly, double nx, double ny, double rhs) {
    Polygon out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        const double sp = nx * p.x + ny * p.y - rhs;
        const double sq = nx * q.x + ny * q.y - rhs;
        if (sp <= 0.0) out.push_back(p);
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out.size() < 3 ? Polygon{} : out;
}

PolygonMoments polygon_moments(const Polygon& poly) {
    PolygonMoments m;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        const double cross = p.x * q.y - q.x * p.y;
        m.area += cross;
        m.first_x += (p.x + q.x) * cross;
        m.first_y += (p.y + q.y) * cross;
    }
    m.area *= 0.5;
    m.first_x /= 6.0;
    m.first_y /= 6.0;
    if (m.area < 0.0) {
        m.area = -m.area;
        m.first_x = -m.first_x;
        m.first_y = -m.first_y;
    }
    return m;
}

Polygon choice_region(const Menu& menu, std::size_t i) {
    if (menu.dim() != 2) throw ValidationError("choice_region needs a 2-good menu");
    Polygon region{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const auto ai = menu.alloc(i);
    for (std::size_t j = 0; j < menu.size() && !region.empty(); ++j) {
        if (j == i) continue;
        const auto aj = menu.alloc(j);
        // Item i beats j where (a_j - a_i) . x <= p_j - p_i.
        const double nx = aj[0] - ai[0];
        const double ny = aj[1] - ai[1];
        const double rhs = menu.price(j) - menu.price(i);
        if (nx == 0.0 && ny == 0.0) {
            // Parallel offers: the cheaper one wins everywhere; exact duplicates go to the lower index.
            if (rhs < 0.0 || (rhs == 0.0 && j < i)) return {};
            continue;
        }
        region = clip_halfplane(region, nx, ny, rhs);
    }
    return region;
}

double exact_profit_uniform_2d(const Menu& menu, const UpdateModel& upd) {
    if (menu.dim() != 2 || upd.dim() != 2) throw ValidationError("exact_profit_uniform_2d needs d = 2");
    const double lam = upd.lambda;
    double total = 0.0;
    for (std::size_t i = 0; i < menu.size(); ++i) {
        const Polygon region = choice_region(menu, i);
        if (region.empty()) continue;
        const PolygonMoments m = polygon_moments(region);
        const auto a = menu.alloc(i);
        // integral of p - a.(lambda c + (1 - lambda) x) over the region
        total += (menu.price(i) - lam * (a[0] * upd.belief[0] + a[1] * upd.belief[1])) * m.area -
                 (1.0 - lam) * (a[0] * m.first_x + a[1] * m.first_y);
    }
    return total;
}

}  // namespace amm
