#include "amm/quadrature.hpp"

#include "amm/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace amm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMinLevels = 4;

GaussRule build_rule(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth, int level) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // A few forced levels keep a kink from cancelling out in the first estimate.
    if (depth <= 0 || (level >= kMinLevels && std::abs(delta) <= 15.0 * tol)) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, level + 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, level + 1);
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw ValidationError("gauss_legendre: order must be positive");
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

GaussRule composite_gauss(double lo, double hi, std::size_t panels, std::size_t order) {
    if (panels == 0) throw ValidationError("composite_gauss: need at least one panel");
    const GaussRule& base = gauss_legendre(order);
    GaussRule out;
    out.nodes.reserve(panels * order);
    out.weights.reserve(panels * order);
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lo + width * static_cast<double>(p);
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < order; ++i) {
            out.nodes.push_back(a + half * (base.nodes[i] + 1.0));
            out.weights.push_back(half * base.weights[i]);
        }
    }
    return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    const double b_left = std::nextafter(b, -std::numeric_limits<double>::infinity());
    const auto g = [&](double t) { return f(t >= b ? b_left : t); };
    const double m = 0.5 * (a + b);
    const double fa = g(a);
    const double fb = g(b);
    const double fm = g(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(g, a, fa, b, fb, m, fm, whole, tol, max_depth, 0);
}

}  // namespace amm
