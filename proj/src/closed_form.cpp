#include "amm/closed_form.hpp"

#include "amm/errors.hpp"
#include "amm/transport.hpp"

#include <cmath>
#include <string>

namespace amm {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0,1]");
}

Menu to_menu(const std::vector<ExactItem>& exact) {
    std::vector<MenuItem> items;
    items.reserve(exact.size() + 1);
    items.push_back({{0.0, 0.0}, 0.0});
    for (const auto& it : exact) {
        items.push_back({{static_cast<double>(it.alloc[0]), static_cast<double>(it.alloc[1])}, it.price.value()});
    }
    return Menu(2, items);
}

}  // namespace

double Sqrt2Expr::value() const { return rational + sqrt2 * kSqrt2; }

Menu bid_ask_1d(double c, double lambda) {
    require_unit(c, "bid_ask_1d: c");
    require_unit(lambda, "bid_ask_1d: lambda");
    const double ask = (1.0 + lambda * c) / (lambda + 1.0);
    const double bid = lambda * c / (lambda + 1.0);
    return Menu(1, {{{0.0}, 0.0}, {{1.0}, ask}, {{-1.0}, -bid}});
}

double profit_1d(double c, double lambda) {
    require_unit(c, "profit_1d: c");
    require_unit(lambda, "profit_1d: lambda");
    return (2.0 * (c - 1.0) * c + 1.0) * lambda * lambda / (2.0 * (lambda + 1.0));
}

std::vector<ExactItem> symmetric_2d_prices(double lambda) {
    require_unit(lambda, "symmetric_2d_prices: lambda");
    const double den = 4.0 * lambda + 2.0;
    const Sqrt2Expr buy_one{(3.0 * lambda + 2.0) / den, 0.0};
    const Sqrt2Expr sell_one{-lambda / den, 0.0};
    const Sqrt2Expr buy_both{(6.0 * lambda + 4.0) / den, -lambda / den};
    const Sqrt2Expr sell_both{-2.0 * lambda / den, -lambda / den};
    const Sqrt2Expr swap{(2.0 * lambda + 2.0) / den, -lambda / den};
    return {
        {{1, 0}, buy_one},   {{0, 1}, buy_one},    {{-1, 0}, sell_one}, {{0, -1}, sell_one},
        {{1, 1}, buy_both},  {{-1, -1}, sell_both}, {{1, -1}, swap},     {{-1, 1}, swap},
    };
}

Menu symmetric_2d_menu(double lambda) { return to_menu(symmetric_2d_prices(lambda)); }

Menu separate_pricing_menu(const std::vector<double>& belief, double lambda) {
    if (belief.size() != 2) throw ValidationError("separate_pricing_menu: two goods expected");
    std::vector<MenuItem> items;
    const Menu g1 = bid_ask_1d(belief[0], lambda);
    const Menu g2 = bid_ask_1d(belief[1], lambda);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        for (std::size_t j = 0; j < g2.size(); ++j) {
            items.push_back({{g1.alloc(i)[0], g2.alloc(j)[0]}, g1.price(i) + g2.price(j)});
        }
    }
    return Menu(2, items);
}

Menu offcenter_menu() {
    const OffCenterSolution s = solve_offcenter();
    // Indifference with no trade along the hexagon's edges:
    // x2 = b (sell good 2), x1 = b (sell good 1), through H = (a, b) (sell both),
    // through X = (1 - e, d) for the swap and for the bundle.
    const std::vector<MenuItem> items{
        {{0.0, 0.0}, 0.0},
        {{-1.0, 0.0}, -s.b},
        {{0.0, -1.0}, -s.b},
        {{-1.0, -1.0}, -(s.a + s.b)},
        {{1.0, -1.0}, s.p},
        {{-1.0, 1.0}, s.p},
        {{1.0, 1.0}, (1.0 - s.e) + s.d},
    };
    Menu menu(2, items);
    const auto ref = offcenter_reference_prices();
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (!(std::abs(menu.price(i + 1) - ref[i]) <= 1e-10)) {
            throw NumericalError("offcenter_menu: derived price disagrees with its surd expression");
        }
    }
    return menu;
}

std::array<double, 6> offcenter_reference_prices() {
    const double s = kSqrt2;
    const double r1 = std::sqrt(2.0 * (67.0 - 41.0 * s));
    const double r2 = std::sqrt(2.0 * (155.0 + 107.0 * s));
    const double swap = 2.0 / 63.0 * (-r1 - 9.0 * s + r2 + 6.0);
    const double bundle = 2.0 / 63.0 * (r1 - 15.0 * s + r2 + 31.0);
    return {-1.0 / 9.0, -1.0 / 9.0, (-2.0 - s) / 9.0, swap, swap, bundle};
}

double profit_gap_closed_form(double lambda) {
    const double den = 2.0 * lambda + 1.0;
    return lambda * lambda * lambda * ((2.0 * kSqrt2 - 3.0) * lambda + 2.0 * kSqrt2) /
           (6.0 * (lambda + 1.0) * den * den);
}

ProfitGap profit_gap_2d(double lambda) {
    require_unit(lambda, "profit_gap_2d: lambda");
    ProfitGap g;
    g.optimal = symmetric_cost_closed_form(lambda);
    g.separate = 2.0 * profit_1d(0.5, lambda);
    g.absolute = g.optimal - g.separate;
    g.relative = g.separate > 0.0 ? g.absolute / g.separate : 0.0;
    if (!(std::abs(g.absolute - profit_gap_closed_form(lambda)) <= 1e-12)) {
        throw NumericalError("profit_gap_2d: gap disagrees with its closed form");
    }
    return g;
}

}  // namespace amm
