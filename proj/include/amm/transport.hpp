#pragma once

#include "amm/distributions.hpp"
#include "amm/mechanism.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace amm {

// A cumulative distribution of nonnegative mass on [0, 1]. `breakpoints`
// lists every point where the CDF jumps or changes slope.
struct Cdf1D {
    std::function<double(double)> cdf;
    std::vector<double> breakpoints;

    double total_mass() const { return cdf(1.0); }
};

Cdf1D point_mass_cdf(double location, double mass = 1.0);

// Earth mover's cost between two equal-mass measures on [0, 1]:
// integral of |C1 - C2|, by adaptive Simpson between the merged breakpoints.
double cdf_cost_1d(const Cdf1D& first, const Cdf1D& second, double tol = 1e-10);

// Positive side of the one-good certificate: endpoint masses lambda*c at 0 and
// lambda*(1-c) at 1, plus the unit point mass at c spread uniformly over the
// no-trade interval [lambda c/(1+lambda), (1 + lambda c)/(1+lambda)].
Cdf1D spread_positive_cdf_1d(double c, double lambda);
// Negative side: (1 + lambda) spread uniformly on [0, 1].
Cdf1D negative_cdf_1d(double lambda);

enum class CertificateKind { OneD, Symmetric2D, OffCenter2D };

struct RegionCost {
    std::string label;
    double cost = 0.0;
};

struct TransportCertificate {
    CertificateKind kind = CertificateKind::OneD;
    std::vector<std::pair<std::string, double>> params;
    std::vector<RegionCost> regions;
    double total = 0.0;
};

std::string to_string(CertificateKind kind);

TransportCertificate certificate_1d(double c, double lambda);

// Geometry of the symmetric two-good partition (c = (1/2, 1/2), uniform values).
struct AbSolution {
    double a = 0.0;
    double b = 0.0;
    bool degenerate = false;          // lambda == 0: no partition
    std::array<double, 3> residuals{};  // the three mass-balance equations
};

AbSolution solve_ab(double lambda);
// Residuals of the rectangle, triangle and strip balance equations at (a, b).
std::array<double, 3> ab_balance_residuals(double lambda, double a, double b);

// Closed-form optimal cost lambda^2 ((9 + 2 sqrt2) lambda + 3) / (6 (2 lambda + 1)^2).
double symmetric_cost_closed_form(double lambda);

// Four rectangles plus four pentagons; checked against the closed form to 1e-12.
TransportCertificate transport_cost_2d(double lambda);

// Geometry of the off-centre partition (c = (1/3, 1/3), lambda = 1).
struct OffCenterSolution {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
    double e = 0.0;
    double f = 0.0;
    double p = 0.0;  // price of the (+1, -1) and (-1, +1) offers
    double residual_inf = 0.0;
    int iterations = 0;

    std::array<double, 6> as_array() const { return {a, b, d, e, f, p}; }
};

using OffCenterVector = std::array<double, 6>;

OffCenterVector offcenter_residuals(const OffCenterVector& v);
std::array<OffCenterVector, 6> offcenter_jacobian(const OffCenterVector& v);

// Closed-form surd values of (a, b, d, e, f).
OffCenterVector offcenter_reference();

inline constexpr OffCenterVector kOffCenterInitialGuess{0.26, 0.11, 0.45, 0.15, 0.25, 0.30};

// Damped Newton on the four region balances plus the two indifference
// conditions; step halves while the residual grows.
OffCenterSolution solve_offcenter(const OffCenterVector& guess = kOffCenterInitialGuess, int max_iter = 200);

// Region costs of the off-centre plan. Rectangles and the lower-left pentagon
// use explicit straight-line plans; the remaining pentagons move mass
// monotonically towards the no-trade hexagon, so their cost is the integral
// of the region's sign pattern against the signed measure.
TransportCertificate offcenter_certificate();

struct DualityReport {
    double profit = 0.0;
    double profit_se = 0.0;
    double cost = 0.0;
    double gap = 0.0;             // cost - profit
    bool weak_duality_ok = false;  // gap >= -5 SE
    bool certified = false;       // |gap| < 5 SE
};

inline constexpr double kDualitySigmas = 5.0;

DualityReport duality_gap(const Menu& menu, double cost, const ValuationDistribution& dist, const UpdateModel& upd,
                          std::size_t n, std::uint64_t seed);

}  // namespace amm
