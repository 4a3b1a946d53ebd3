#include "amm/measure.hpp"

#include "amm/errors.hpp"
#include "amm/quadrature.hpp"
#include "amm/rng.hpp"

#include <cmath>

namespace amm {

SignedMeasure build_measure(const ValuationDistribution& dist, const UpdateModel& upd) {
    const std::size_t d = dist.dim();
    if (upd.dim() != d) throw ValidationError("build_measure: belief and distribution dimensions differ");
    const double lam = upd.lambda;
    const std::vector<double> c = upd.belief;

    SignedMeasure mu;
    mu.dim = d;
    // x - pi(c, x) = lambda (x - c) and div pi = d (1 - lambda), so the
    // interior density is -(lambda grad f . (x - c) + (1 + d lambda) f).
    mu.interior = [dist, c, lam, d](std::span<const double> x) {
        const double f = dist.pdf(x);
        double drift = 0.0;
        if (lam != 0.0) {
            const auto g = dist.grad_pdf(x);
            for (std::size_t k = 0; k < d; ++k) drift += g[k] * (x[k] - c[k]);
        }
        return -(lam * drift + (1.0 + static_cast<double>(d) * lam) * f);
    };
    for (std::size_t axis = 0; axis < d; ++axis) {
        for (int side : {0, 1}) {
            // outward normal is -e_axis on side 0 and +e_axis on side 1
            const double normal_drift = side == 1 ? lam * (1.0 - c[axis]) : lam * c[axis];
            mu.faces.push_back({axis, side, [dist, normal_drift](std::span<const double> x) {
                                    return dist.pdf(x) * normal_drift;
                                }});
        }
    }
    mu.points.push_back({c, 1.0});
    return mu;
}

namespace {

// Integral over [0,1]^m of g, tensor composite Gauss-Legendre, m in {0, 1, 2}.
// `embed` fills the integration point into a caller buffer.
double tensor_gauss(std::size_t m, const IntegrationOptions& opt,
                    const std::function<double(std::span<const double>)>& g) {
    if (m == 0) return g({});
    const GaussRule rule = composite_gauss(0.0, 1.0, opt.panels, opt.order);
    const std::size_t n = rule.nodes.size();
    double total = 0.0;
    if (m == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t[1] = {rule.nodes[i]};
            total += rule.weights[i] * g(t);
        }
        return total;
    }
    if (m == 2) {
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double t[2] = {rule.nodes[i], rule.nodes[j]};
                row += rule.weights[j] * g(t);
            }
            total += rule.weights[i] * row;
        }
        return total;
    }
    throw ValidationError("tensor quadrature supports at most two dimensions");
}

IntegralEstimate interior_integral(const SignedMeasure& mu, const ScalarFn& u, const IntegrationOptions& opt) {
    const std::size_t d = mu.dim;
    if (d <= 2) {
        const double v = tensor_gauss(d, opt, [&](std::span<const double> t) { return u(t) * mu.interior(t); });
        return {v, 0.0};
    }
    // Uniform Monte Carlo over the cube; the integrand's mean is the integral.
    const std::size_t n = opt.mc_samples;
    if (n < 2) throw ValidationError("integrate_u: need at least two Monte Carlo samples");
    std::vector<double> x(d);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        CounterStream rng(opt.seed, i);
        for (auto& v : x) v = rng.uniform();
        const double val = u(x) * mu.interior(x);
        const double delta = val - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (val - mean);
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
}

double face_integral(const SignedMeasure& mu, const BoundaryFace& face, const ScalarFn& u,
                     const IntegrationOptions& opt) {
    const std::size_t d = mu.dim;
    std::vector<double> x(d);
    return tensor_gauss(d - 1, opt, [&](std::span<const double> t) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < d; ++k) x[k] = k == face.axis ? static_cast<double>(face.side) : t[j++];
        return u(x) * face.density(x);
    });
}

}  // namespace

IntegralEstimate integrate_u(const SignedMeasure& mu, const ScalarFn& u, const IntegrationOptions& opt) {
    if (mu.dim == 0 || mu.dim > 3) throw ValidationError("integrate_u supports 1 <= d <= 3");
    IntegralEstimate est = interior_integral(mu, u, opt);
    for (const auto& face : mu.faces) est.value += face_integral(mu, face, u, opt);
    for (const auto& pt : mu.points) est.value += pt.mass * u(pt.location);
    return est;
}

IntegralEstimate integrate_u(const SignedMeasure& mu, const Menu& menu, const IntegrationOptions& opt) {
    if (menu.dim() != mu.dim) throw ValidationError("integrate_u: menu and measure dimensions differ");
    return integrate_u(mu, [&menu](std::span<const double> x) { return utility(menu, x); }, opt);
}

MeasureMasses component_masses(const SignedMeasure& mu, const IntegrationOptions& opt) {
    const auto one = [](std::span<const double>) { return 1.0; };
    MeasureMasses m;
    m.interior = interior_integral(mu, one, opt).value;
    for (const auto& face : mu.faces) m.faces.push_back(face_integral(mu, face, one, opt));
    for (const auto& pt : mu.points) m.points += pt.mass;
    m.total = m.interior + m.points;
    for (double f : m.faces) m.total += f;
    return m;
}

LinearizationCheck linearization_residual(const Menu& menu, const ValuationDistribution& dist,
                                          const UpdateModel& upd, std::size_t n, std::uint64_t seed,
                                          const IntegrationOptions& opt) {
    const FeasibilityReport feas = check_feasibility(menu, upd);
    if (!feas.zero_utility_at_belief) {
        throw ValidationError("linearization_residual: u(c) != 0, the point-mass identity does not apply");
    }
    const McEstimate mc = expected_profit_mc(menu, dist, upd, n, seed);
    const IntegralEstimate in = integrate_u(build_measure(dist, upd), menu, opt);
    LinearizationCheck chk;
    chk.profit = mc.mean;
    chk.profit_se = mc.std_error;
    chk.integral = in.value;
    chk.integral_se = in.std_error;
    chk.residual = std::abs(mc.mean - in.value);
    chk.combined_se = std::hypot(mc.std_error, in.std_error);
    return chk;
}

}  // namespace amm
