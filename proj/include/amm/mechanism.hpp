#pragma once

#include "amm/distributions.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace amm {

struct MenuItem {
    std::vector<double> alloc;  // units of each good the trader receives, in [-1, 1]
    double price = 0.0;         // numeraire paid by the trader
};

// A finite menu of (allocation, price) offers. The induced trader utility is
// u(x) = max_i alloc_i . x - price_i. Construction checks shape only; the
// economic constraints are audited by check_feasibility().
class Menu {
public:
    Menu() = default;
    Menu(std::size_t dim, const std::vector<MenuItem>& items);

    static Menu no_trade(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return prices_.size(); }
    bool empty() const { return prices_.empty(); }

    std::span<const double> alloc(std::size_t i) const { return {allocs_.data() + i * dim_, dim_}; }
    double price(std::size_t i) const { return prices_[i]; }
    MenuItem item(std::size_t i) const;
    std::vector<MenuItem> items() const;

    bool is_no_trade(std::size_t i) const;

    // Flat storage, row-major size() x dim().
    std::span<const double> allocs() const { return allocs_; }
    std::span<const double> prices() const { return prices_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> allocs_;
    std::vector<double> prices_;
};

// Belief update pi(c, x) = lambda c + (1 - lambda) x.
// lambda = 1: noise trading (pi = c); lambda = 0: full adverse selection (pi = x).
struct UpdateModel {
    std::vector<double> belief;
    double lambda = 1.0;

    UpdateModel() = default;
    UpdateModel(std::vector<double> c, double lam);

    std::size_t dim() const { return belief.size(); }
    void posterior(std::span<const double> x, std::span<double> out) const;
    std::vector<double> posterior(std::span<const double> x) const;
};

struct Choice {
    std::size_t index = 0;
    double utility = 0.0;
};

// Trader's best item; ties go to the lowest index.
Choice choose(const Menu& menu, std::span<const double> x);
double utility(const Menu& menu, std::span<const double> x);

// Market-maker profit price - alloc . pi(c, x) for the item the trader picks.
double profit_at(const Menu& menu, std::span<const double> x, const UpdateModel& upd);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultChunk = std::size_t{1} << 16;

// Monte Carlo estimate of expected profit. Sample i reads RNG stream i under
// `seed`; chunk partial moments are merged in chunk order.
McEstimate expected_profit_mc(const Menu& menu, const ValuationDistribution& dist, const UpdateModel& upd,
                              std::size_t n, std::uint64_t seed, std::size_t chunk = kDefaultChunk);

struct FeasibilityReport {
    bool alloc_bounds_ok = false;
    std::size_t no_trade_count = 0;
    bool has_no_trade = false;        // exactly one no-trade item
    bool zero_utility_at_belief = false;
    double max_gain_at_belief = 0.0;  // max_i alloc_i . c - price_i over all items

    bool all_ok() const { return alloc_bounds_ok && has_no_trade && zero_utility_at_belief; }
};

inline constexpr double kBeliefTolerance = 1e-9;

FeasibilityReport check_feasibility(const Menu& menu, const UpdateModel& upd, double tol = kBeliefTolerance);

struct GridCell {
    std::vector<double> point;
    std::size_t index = 0;
    std::vector<double> alloc;
    double payment = 0.0;
    double utility = 0.0;
};

// choose() on the r^d lattice {0, 1/(r-1), ..., 1}^d, first coordinate outermost.
// Supports d in {1, 2}.
std::vector<GridCell> utility_grid(const Menu& menu, std::size_t resolution);

// Two-dimensional slice of a 3-good menu with coordinate `fixed_axis` pinned to `value`.
// Cell points hold the two free coordinates; allocations are reported for those too.
std::vector<GridCell> utility_grid_slice(const Menu& menu, std::size_t resolution, std::size_t fixed_axis,
                                         double value);

}  // namespace amm
