#include "amm/mechanism.hpp"

#include "amm/errors.hpp"
#include "amm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace amm {

Menu::Menu(std::size_t dim, const std::vector<MenuItem>& items) : dim_(dim) {
    if (dim_ == 0) throw ValidationError("menu dimension must be positive");
    allocs_.reserve(items.size() * dim_);
    prices_.reserve(items.size());
    for (const auto& it : items) {
        if (it.alloc.size() != dim_) {
            throw ValidationError("menu item has " + std::to_string(it.alloc.size()) + " allocation entries, expected " +
                                  std::to_string(dim_));
        }
        for (double a : it.alloc) {
            if (!std::isfinite(a)) throw ValidationError("menu allocation is not finite");
        }
        if (!std::isfinite(it.price)) throw ValidationError("menu price is not finite");
        allocs_.insert(allocs_.end(), it.alloc.begin(), it.alloc.end());
        prices_.push_back(it.price);
    }
}

Menu Menu::no_trade(std::size_t dim) { return Menu(dim, {MenuItem{std::vector<double>(dim, 0.0), 0.0}}); }

MenuItem Menu::item(std::size_t i) const {
    const auto a = alloc(i);
    return {std::vector<double>(a.begin(), a.end()), prices_[i]};
}

std::vector<MenuItem> Menu::items() const {
    std::vector<MenuItem> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(item(i));
    return out;
}

bool Menu::is_no_trade(std::size_t i) const {
    if (prices_[i] != 0.0) return false;
    const auto a = alloc(i);
    return std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
}

UpdateModel::UpdateModel(std::vector<double> c, double lam) : belief(std::move(c)), lambda(lam) {
    if (belief.empty()) throw ValidationError("belief vector must be nonempty");
    for (double v : belief) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("belief entries must lie in [0,1]");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0,1]");
}

void UpdateModel::posterior(std::span<const double> x, std::span<double> out) const {
    for (std::size_t k = 0; k < belief.size(); ++k) out[k] = lambda * belief[k] + (1.0 - lambda) * x[k];
}

std::vector<double> UpdateModel::posterior(std::span<const double> x) const {
    std::vector<double> out(belief.size());
    posterior(x, out);
    return out;
}

namespace {

void require_dims(const Menu& menu, std::size_t n, const char* what) {
    if (menu.empty()) throw ValidationError(std::string(what) + ": menu has no items");
    if (menu.dim() != n) {
        throw ValidationError(std::string(what) + ": value vector has dimension " + std::to_string(n) +
                              ", menu has " + std::to_string(menu.dim()));
    }
}

Choice choose_unchecked(const Menu& menu, std::span<const double> x) {
    const std::size_t d = menu.dim();
    const double* a = menu.allocs().data();
    const double* p = menu.prices().data();
    Choice best{0, -p[0]};
    for (std::size_t k = 0; k < d; ++k) best.utility += a[k] * x[k];
    for (std::size_t i = 1; i < menu.size(); ++i) {
        double u = -p[i];
        for (std::size_t k = 0; k < d; ++k) u += a[i * d + k] * x[k];
        if (u > best.utility) best = {i, u};
    }
    return best;
}

double profit_unchecked(const Menu& menu, std::span<const double> x, const UpdateModel& upd) {
    const Choice ch = choose_unchecked(menu, x);
    const auto a = menu.alloc(ch.index);
    double profit = menu.price(ch.index);
    for (std::size_t k = 0; k < a.size(); ++k) {
        profit -= a[k] * (upd.lambda * upd.belief[k] + (1.0 - upd.lambda) * x[k]);
    }
    return profit;
}

struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v) {
        n += 1.0;
        const double delta = v - mean;
        mean += delta / n;
        m2 += delta * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * (o.n / total);
        m2 += o.m2 + delta * delta * (n * o.n / total);
        n = total;
    }
};

}  // namespace

Choice choose(const Menu& menu, std::span<const double> x) {
    require_dims(menu, x.size(), "choose");
    return choose_unchecked(menu, x);
}

double utility(const Menu& menu, std::span<const double> x) { return choose(menu, x).utility; }

double profit_at(const Menu& menu, std::span<const double> x, const UpdateModel& upd) {
    require_dims(menu, x.size(), "profit_at");
    if (upd.dim() != menu.dim()) throw ValidationError("profit_at: belief dimension mismatch");
    return profit_unchecked(menu, x, upd);
}

McEstimate expected_profit_mc(const Menu& menu, const ValuationDistribution& dist, const UpdateModel& upd,
                              std::size_t n, std::uint64_t seed, std::size_t chunk) {
    if (n == 0) throw ValidationError("expected_profit_mc: need at least one sample");
    if (chunk == 0) throw ValidationError("expected_profit_mc: chunk size must be positive");
    require_dims(menu, dist.dim(), "expected_profit_mc");
    if (upd.dim() != menu.dim()) throw ValidationError("expected_profit_mc: belief dimension mismatch");

    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Moments> partial(n_chunks);
    for_each_chunk(n_chunks, [&](std::size_t c) {
        std::vector<double> x(menu.dim());
        Moments m;
        const std::size_t end = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
            dist.sample_point(seed, i, x);
            m.push(profit_unchecked(menu, x, upd));
        }
        partial[c] = m;
    });
    Moments total;
    for (const auto& m : partial) total.merge(m);

    McEstimate est;
    est.mean = total.mean;
    est.samples = n;
    est.std_error = n > 1 ? std::sqrt(total.m2 / (total.n - 1.0) / total.n) : 0.0;
    return est;
}

FeasibilityReport check_feasibility(const Menu& menu, const UpdateModel& upd, double tol) {
    FeasibilityReport rep;
    rep.alloc_bounds_ok = std::all_of(menu.allocs().begin(), menu.allocs().end(),
                                      [](double a) { return a >= -1.0 && a <= 1.0; });
    for (std::size_t i = 0; i < menu.size(); ++i) {
        if (menu.is_no_trade(i)) ++rep.no_trade_count;
    }
    rep.has_no_trade = rep.no_trade_count == 1;
    if (menu.empty() || upd.dim() != menu.dim()) {
        rep.zero_utility_at_belief = false;
        rep.max_gain_at_belief = menu.empty() ? 0.0 : HUGE_VAL;
        return rep;
    }
    rep.max_gain_at_belief = choose_unchecked(menu, upd.belief).utility;
    rep.zero_utility_at_belief = rep.max_gain_at_belief <= tol && rep.max_gain_at_belief >= -tol;
    return rep;
}

namespace {

GridCell make_cell(const Menu& menu, std::vector<double> point, std::span<const double> x_full,
                   std::span<const std::size_t> axes) {
    GridCell cell;
    const Choice ch = choose_unchecked(menu, x_full);
    cell.point = std::move(point);
    cell.index = ch.index;
    cell.utility = ch.utility;
    cell.payment = menu.price(ch.index);
    const auto a = menu.alloc(ch.index);
    for (std::size_t ax : axes) cell.alloc.push_back(a[ax]);
    return cell;
}

}  // namespace

std::vector<GridCell> utility_grid(const Menu& menu, std::size_t resolution) {
    if (menu.empty()) throw ValidationError("utility_grid: menu has no items");
    if (resolution < 2) throw ValidationError("utility_grid: resolution must be at least 2");
    const std::size_t d = menu.dim();
    if (d > 2) throw ValidationError("utility_grid supports d <= 2; slice 3-good menus with utility_grid_slice");
    const double step = 1.0 / static_cast<double>(resolution - 1);
    std::vector<GridCell> grid;
    if (d == 1) {
        const std::size_t axes[] = {0};
        for (std::size_t i = 0; i < resolution; ++i) {
            const std::vector<double> x{static_cast<double>(i) * step};
            grid.push_back(make_cell(menu, x, x, axes));
        }
        return grid;
    }
    const std::size_t axes[] = {0, 1};
    grid.reserve(resolution * resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            const std::vector<double> x{static_cast<double>(i) * step, static_cast<double>(j) * step};
            grid.push_back(make_cell(menu, x, x, axes));
        }
    }
    return grid;
}

std::vector<GridCell> utility_grid_slice(const Menu& menu, std::size_t resolution, std::size_t fixed_axis,
                                         double value) {
    if (menu.empty()) throw ValidationError("utility_grid_slice: menu has no items");
    if (menu.dim() != 3) throw ValidationError("utility_grid_slice needs a 3-good menu");
    if (fixed_axis >= 3) throw ValidationError("utility_grid_slice: fixed axis out of range");
    if (!(value >= 0.0 && value <= 1.0)) throw ValidationError("utility_grid_slice: slice value outside [0,1]");
    if (resolution < 2) throw ValidationError("utility_grid_slice: resolution must be at least 2");
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < 3; ++k) {
        if (k != fixed_axis) free.push_back(k);
    }
    const double step = 1.0 / static_cast<double>(resolution - 1);
    std::vector<GridCell> grid;
    grid.reserve(resolution * resolution);
    std::vector<double> x(3, value);
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            x[free[0]] = static_cast<double>(i) * step;
            x[free[1]] = static_cast<double>(j) * step;
            grid.push_back(make_cell(menu, {x[free[0]], x[free[1]]}, x, free));
        }
    }
    return grid;
}

}  // namespace amm
