#include "amm/transport.hpp"

#include "amm/errors.hpp"
#include "amm/polygon.hpp"
#include "amm/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace amm {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_lambda(double lambda, const char* what) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError(std::string(what) + ": lambda must lie in [0,1]");
}

double inf_norm(const OffCenterVector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Integral of s . x over a region against the uniform-density signed measure:
// edge masses minus interior density times the polygon's first moments.
double directional_cost(double sx, double sy, double edge_term, const Polygon& region, double interior_density) {
    const PolygonMoments m = polygon_moments(region);
    return edge_term - interior_density * (sx * m.first_x + sy * m.first_y);
}

}  // namespace

Cdf1D point_mass_cdf(double location, double mass) {
    return {[location, mass](double x) { return x >= location ? mass : 0.0; }, {location}};
}

double cdf_cost_1d(const Cdf1D& first, const Cdf1D& second, double tol) {
    const double m1 = first.total_mass();
    const double m2 = second.total_mass();
    if (std::abs(m1 - m2) > 1e-9) {
        throw ValidationError("cdf_cost_1d: total masses differ (" + std::to_string(m1) + " vs " + std::to_string(m2) +
                              ")");
    }
    std::vector<double> cuts{0.0, 1.0};
    for (const auto* g : {&first, &second}) {
        for (double b : g->breakpoints) {
            if (b > 0.0 && b < 1.0) cuts.push_back(b);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto gap = [&](double x) { return std::abs(first.cdf(x) - second.cdf(x)); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double width = cuts[i + 1] - cuts[i];
        total += adaptive_simpson(gap, cuts[i], cuts[i + 1], tol * width);
    }
    return total;
}

Cdf1D spread_positive_cdf_1d(double c, double lambda) {
    require_lambda(lambda, "spread_positive_cdf_1d");
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("spread_positive_cdf_1d: c must lie in [0,1]");
    const double lo = c * lambda / (1.0 + lambda);
    const double hi = (1.0 + c * lambda) / (1.0 + lambda);
    const double left_mass = c * lambda;
    return {[=](double x) {
                if (x < 0.0) return 0.0;
                if (x < lo) return left_mass;
                if (x < hi) return left_mass + (x - lo) / (hi - lo);
                if (x < 1.0) return left_mass + 1.0;
                return lambda + 1.0;
            },
            {0.0, lo, hi, 1.0}};
}

Cdf1D negative_cdf_1d(double lambda) {
    require_lambda(lambda, "negative_cdf_1d");
    return {[lambda](double x) { return (1.0 + lambda) * std::clamp(x, 0.0, 1.0); }, {0.0, 1.0}};
}

std::string to_string(CertificateKind kind) {
    switch (kind) {
        case CertificateKind::OneD: return "one-d";
        case CertificateKind::Symmetric2D: return "symmetric-2d";
        case CertificateKind::OffCenter2D: return "offcenter-2d";
    }
    return "unknown";
}

TransportCertificate certificate_1d(double c, double lambda) {
    TransportCertificate cert;
    cert.kind = CertificateKind::OneD;
    cert.params = {{"c", c}, {"lambda", lambda}};
    const double cost = cdf_cost_1d(spread_positive_cdf_1d(c, lambda), negative_cdf_1d(lambda));
    cert.regions = {{"line", cost}};
    cert.total = cost;
    return cert;
}

std::array<double, 3> ab_balance_residuals(double lambda, double a, double b) {
    const double neg = 2.0 * lambda + 1.0;
    return {lambda * (1.0 - 2.0 * a) / 2.0 - neg * (1.0 - 2.0 * a) * b,
            lambda * b / 2.0 - neg * (a - b) * (a - b) / 2.0,
            lambda * a / 2.0 - neg * a * b};
}

AbSolution solve_ab(double lambda) {
    require_lambda(lambda, "solve_ab");
    AbSolution sol;
    if (lambda == 0.0) {
        sol.degenerate = true;
        return sol;
    }
    // The strip balance fixes b; the triangle balance then gives a - b = sqrt2 b.
    sol.b = lambda / (4.0 * lambda + 2.0);
    sol.a = (1.0 + kSqrt2) * sol.b;
    sol.residuals = ab_balance_residuals(lambda, sol.a, sol.b);
    for (double r : sol.residuals) {
        if (!(std::abs(r) < 1e-12)) throw NumericalError("solve_ab: balance residual " + std::to_string(r));
    }
    return sol;
}

double symmetric_cost_closed_form(double lambda) {
    const double den = 2.0 * lambda + 1.0;
    return lambda * lambda * ((9.0 + 2.0 * kSqrt2) * lambda + 3.0) / (6.0 * den * den);
}

TransportCertificate transport_cost_2d(double lambda) {
    const AbSolution ab = solve_ab(lambda);
    TransportCertificate cert;
    cert.kind = CertificateKind::Symmetric2D;
    cert.params = {{"lambda", lambda}, {"a", ab.a}, {"b", ab.b}};
    const double rect = lambda * (1.0 - 2.0 * ab.a) * ab.b / 4.0;
    const double pent = lambda * (5.0 * ab.a + ab.b) * ab.b / 6.0;
    for (const char* side : {"bottom", "right", "top", "left"}) cert.regions.push_back({std::string("rectangle-") + side, rect});
    for (const char* corner : {"lower-left", "lower-right", "upper-right", "upper-left"}) {
        cert.regions.push_back({std::string("pentagon-") + corner, pent});
    }
    cert.regions.push_back({"octagon", 0.0});
    for (const auto& r : cert.regions) cert.total += r.cost;
    const double closed = symmetric_cost_closed_form(lambda);
    if (!(std::abs(cert.total - closed) <= 1e-12)) {
        throw NumericalError("transport_cost_2d: region sum disagrees with closed form");
    }
    return cert;
}

OffCenterVector offcenter_residuals(const OffCenterVector& v) {
    const auto [a, b, d, e, f, p] = v;
    return {
        (1.0 - a - f) / 3.0 - 3.0 * b * (1.0 - a - f),
        2.0 * d / 3.0 + f / 3.0 - 3.0 * (d * f - (d - b) * (f - e) / 2.0),
        2.0 * a / 3.0 - 3.0 * (a * a - (a - b) * (a - b) / 2.0),
        4.0 * (1.0 - d) / 3.0 - 3.0 * ((1.0 - d) * (1.0 - d) - (1.0 - d - e) * (1.0 - d - e) / 2.0),
        (1.0 - e) - d - p,
        (1.0 - f) - b - p,
    };
}

std::array<OffCenterVector, 6> offcenter_jacobian(const OffCenterVector& v) {
    const auto [a, b, d, e, f, p] = v;
    (void)p;
    std::array<OffCenterVector, 6> j{};
    // columns: a, b, d, e, f, p
    j[0] = {-(1.0 / 3.0 - 3.0 * b), -3.0 * (1.0 - a - f), 0.0, 0.0, -(1.0 / 3.0 - 3.0 * b), 0.0};
    j[1] = {0.0, -1.5 * (f - e), 2.0 / 3.0 - 3.0 * (f - (f - e) / 2.0), -1.5 * (d - b),
            1.0 / 3.0 - 3.0 * (d - (d - b) / 2.0), 0.0};
    j[2] = {2.0 / 3.0 - 3.0 * (2.0 * a - (a - b)), -3.0 * (a - b), 0.0, 0.0, 0.0, 0.0};
    j[3] = {0.0, 0.0, -4.0 / 3.0 - 3.0 * (-2.0 * (1.0 - d) + (1.0 - d - e)), -3.0 * (1.0 - d - e), 0.0, 0.0};
    j[4] = {0.0, 0.0, -1.0, -1.0, 0.0, -1.0};
    j[5] = {0.0, -1.0, 0.0, 0.0, -1.0, -1.0};
    return j;
}

OffCenterVector offcenter_reference() {
    const double s = kSqrt2;
    const double a = (1.0 + s) / 9.0;
    const double b = 1.0 / 9.0;
    const double d = (25.0 - 6.0 * s + 2.0 * std::sqrt(134.0 - 82.0 * s)) / 63.0;
    const double e = (26.0 + 24.0 * s - 2.0 * std::sqrt(310.0 + 214.0 * s)) / 63.0;
    const double f = (44.0 + 18.0 * s - 4.0 * std::sqrt(74.0 + 22.0 * s)) / 63.0;
    return {a, b, d, e, f, 1.0 - e - d};
}

OffCenterSolution solve_offcenter(const OffCenterVector& guess, int max_iter) {
    OffCenterVector v = guess;
    OffCenterVector r = offcenter_residuals(v);
    double norm = inf_norm(r);
    int iter = 0;
    while (norm >= 1e-14 && iter < max_iter) {
        ++iter;
        const auto jac = offcenter_jacobian(v);
        Eigen::Matrix<double, 6, 6> jm;
        Eigen::Matrix<double, 6, 1> rv;
        for (int i = 0; i < 6; ++i) {
            rv(i) = r[i];
            for (int k = 0; k < 6; ++k) jm(i, k) = jac[i][k];
        }
        const Eigen::Matrix<double, 6, 1> step = jm.partialPivLu().solve(-rv);
        if (!step.allFinite()) throw NumericalError("solve_offcenter: singular Jacobian");
        double t = 1.0;
        OffCenterVector trial{};
        double trial_norm = 0.0;
        for (int halvings = 0;; ++halvings) {
            for (int i = 0; i < 6; ++i) trial[i] = v[i] + t * step(i);
            trial_norm = inf_norm(offcenter_residuals(trial));
            if (trial_norm <= norm || halvings == 40) break;
            t *= 0.5;
        }
        if (trial_norm >= norm && norm < 1e-12) break;  // already at round-off level
        v = trial;
        r = offcenter_residuals(v);
        norm = trial_norm;
    }
    if (norm >= 1e-12) {
        throw NumericalError("solve_offcenter: no convergence after " + std::to_string(iter) +
                             " iterations (residual " + std::to_string(norm) + ")");
    }
    const auto [a, b, d, e, f, p] = v;
    const bool in_box = std::all_of(v.begin(), v.begin() + 5, [](double x) { return x >= 0.0 && x <= 1.0; });
    if (!in_box || !(e < f) || !(1.0 - a - f > 0.0)) {
        throw NumericalError("solve_offcenter: converged to a root violating the geometric constraints");
    }
    const auto ref = offcenter_reference();
    for (int i = 0; i < 5; ++i) {
        if (!(std::abs(v[i] - ref[i]) <= 1e-10)) throw NumericalError("solve_offcenter: root differs from surd values");
    }
    return {a, b, d, e, f, p, norm, iter};
}

TransportCertificate offcenter_certificate() {
    const OffCenterSolution s = solve_offcenter();
    const double a = s.a, b = s.b, d = s.d, e = s.e, f = s.f;
    constexpr double kNeg = 3.0;  // interior density (2 lambda + 1) at lambda = 1
    constexpr double kLow = 1.0 / 3.0;  // edge density on the left and bottom sides
    constexpr double kHigh = 2.0 / 3.0;  // edge density on the right and top sides

    TransportCertificate cert;
    cert.kind = CertificateKind::OffCenter2D;
    cert.params = {{"a", a}, {"b", b}, {"d", d}, {"e", e}, {"f", f}, {"p", s.p}};

    // Bottom and left strips: edge mass pushed straight in over height b.
    const double rect = kLow * (1.0 - a - f) * b / 2.0;
    // Lower-left corner pentagon, same plan as the symmetric case with edge density 1/3.
    const double lower_left = kLow * (5.0 * a + b) * b / 3.0;

    // Lower-right pentagon M C L X W, offer (+1, -1): mass moves left and up.
    const Polygon lower_right{{1.0 - f, 0.0}, {1.0, 0.0}, {1.0, d}, {1.0 - e, d}, {1.0 - f, b}};
    const double lr_edges = kLow * (1.0 - (1.0 - f) * (1.0 - f)) / 2.0  // bottom edge, integrand x
                            + kHigh * (d - d * d / 2.0);                  // right edge, integrand 1 - y
    const double lower_right_cost = directional_cost(1.0, -1.0, lr_edges, lower_right, kNeg);

    // Upper-left pentagon is the mirror image across the diagonal.
    const Polygon upper_left{{0.0, 1.0 - f}, {b, 1.0 - f}, {d, 1.0 - e}, {d, 1.0}, {0.0, 1.0}};
    const double ul_edges = kLow * (1.0 - (1.0 - f) * (1.0 - f)) / 2.0 + kHigh * (d - d * d / 2.0);
    const double upper_left_cost = directional_cost(-1.0, 1.0, ul_edges, upper_left, kNeg);

    // Upper-right pentagon K B L X E, offer (+1, +1): mass moves down and left.
    const Polygon upper_right{{d, 1.0}, {d, 1.0 - e}, {1.0 - e, d}, {1.0, d}, {1.0, 1.0}};
    const double ur_edge = kHigh * ((1.0 - d * d) / 2.0 + (1.0 - d));  // one edge, integrand x + 1
    const double upper_right_cost = directional_cost(1.0, 1.0, 2.0 * ur_edge, upper_right, kNeg);

    cert.regions = {
        {"rectangle-bottom", rect},
        {"rectangle-left", rect},
        {"pentagon-lower-left", lower_left},
        {"pentagon-lower-right", lower_right_cost},
        {"pentagon-upper-left", upper_left_cost},
        {"pentagon-upper-right", upper_right_cost},
        {"hexagon", 0.0},
    };
    for (const auto& r : cert.regions) cert.total += r.cost;
    return cert;
}

DualityReport duality_gap(const Menu& menu, double cost, const ValuationDistribution& dist, const UpdateModel& upd,
                          std::size_t n, std::uint64_t seed) {
    const FeasibilityReport feas = check_feasibility(menu, upd);
    if (!feas.all_ok()) throw ValidationError("duality_gap: menu is not feasible (bounds, no-trade item or u(c) = 0)");
    const McEstimate est = expected_profit_mc(menu, dist, upd, n, seed);
    DualityReport rep;
    rep.profit = est.mean;
    rep.profit_se = est.std_error;
    rep.cost = cost;
    rep.gap = cost - est.mean;
    rep.weak_duality_ok = rep.gap >= -kDualitySigmas * est.std_error;
    rep.certified = std::abs(rep.gap) < kDualitySigmas * est.std_error;
    return rep;
}

}  // namespace amm
