#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace amm {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1), strictly interior
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule, computed by Newton iteration on P_n.
const GaussRule& gauss_legendre(std::size_t n);

// Composite Gauss-Legendre on [lo, hi] with `panels` equal panels.
// Returns nodes and weights already mapped to the interval.
GaussRule composite_gauss(double lo, double hi, std::size_t panels, std::size_t order);

// Adaptive Simpson on [a, b] to absolute tolerance `tol`. The integrand is
// never evaluated exactly at b: the left limit b^- is used instead, so a
// right-continuous step at b does not leak into [a, b).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

}  // namespace amm
