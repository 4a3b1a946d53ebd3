#pragma once

#include "amm/mechanism.hpp"

#include <array>
#include <vector>

namespace amm {

// rational + sqrt2 * sqrt(2). Menu prices in the symmetric family have this
// form for every lambda; keeping the parts apart avoids accumulated drift.
struct Sqrt2Expr {
    double rational = 0.0;
    double sqrt2 = 0.0;

    double value() const;
};

struct ExactItem {
    std::vector<int> alloc;
    Sqrt2Expr price;
};

enum class ClosedFormFamily { BidAsk1D, Symmetric2D, OffCenter2D };

// One good, belief c, update strength lambda: ask (1 + lambda c)/(lambda + 1),
// bid lambda c/(lambda + 1). Items: no-trade, +1 at the ask, -1 at minus the bid.
Menu bid_ask_1d(double c, double lambda);
double profit_1d(double c, double lambda);

// Two goods, c = (1/2, 1/2). No-trade first, then
// (+1,0) (0,+1) (-1,0) (0,-1) (+1,+1) (-1,-1) (+1,-1) (-1,+1).
std::vector<ExactItem> symmetric_2d_prices(double lambda);
Menu symmetric_2d_menu(double lambda);

// Product mechanism: the one-good bid/ask applied to each good independently.
Menu separate_pricing_menu(const std::vector<double>& belief, double lambda);

// Two goods, c = (1/3, 1/3), lambda = 1. No-trade first, then
// (-1,0) (0,-1) (-1,-1) (+1,-1) (-1,+1) (+1,+1). Prices follow from the
// solved partition geometry through the indifference conditions.
Menu offcenter_menu();

// Surd expressions for the off-centre prices, in offcenter_menu() item order
// (no-trade excluded).
std::array<double, 6> offcenter_reference_prices();

struct ProfitGap {
    double optimal = 0.0;
    double separate = 0.0;
    double absolute = 0.0;
    double relative = 0.0;  // absolute / separate, 0 when separate is 0
};

// lambda^3 ((2 sqrt2 - 3) lambda + 2 sqrt2) / (6 (lambda + 1) (2 lambda + 1)^2)
double profit_gap_closed_form(double lambda);
ProfitGap profit_gap_2d(double lambda);

}  // namespace amm
