#include "amm/closed_form.hpp"
#include "amm/errors.hpp"
#include "amm/polygon.hpp"
#include "amm/transport.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace amm;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const ValuationDistribution kUniform2(2, UniformLaw{});
}  // namespace

TEST_CASE("one-dimensional transport cost") {
    const Cdf1D ramp{[](double x) { return x; }, {0.0, 1.0}};
    CHECK(cdf_cost_1d(ramp, ramp) == 0.0);
    CHECK(cdf_cost_1d(point_mass_cdf(0.0), point_mass_cdf(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cdf_cost_1d(point_mass_cdf(0.25), ramp) == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK_THROWS_AS(cdf_cost_1d(point_mass_cdf(0.0, 1.0), point_mass_cdf(0.0, 2.0)), ValidationError);
    const auto cert = certificate_1d(0.5, 1.0);
    CHECK(cert.total == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("one-dimensional certificate matches profit") {
    for (double c : {0.0, 0.1, 0.3, 0.5, 0.7, 1.0}) {
        for (double lam : {0.1, 0.25, 0.5, 1.0}) {
            CAPTURE(c);
            CAPTURE(lam);
            CHECK(std::abs(certificate_1d(c, lam).total - profit_1d(c, lam)) < 1e-9);
        }
    }
}

TEST_CASE("symmetric partition geometry") {
    const AbSolution one = solve_ab(1.0);
    CHECK(one.a == doctest::Approx((1 + kSqrt2) / 6).epsilon(1e-15));
    CHECK(one.b == doctest::Approx(1.0 / 6).epsilon(1e-15));
    const AbSolution half = solve_ab(0.5);
    CHECK(half.a == doctest::Approx((1 + kSqrt2) / 8).epsilon(1e-15));
    CHECK(half.b == doctest::Approx(1.0 / 8).epsilon(1e-15));
    const AbSolution zero = solve_ab(0.0);
    CHECK(zero.degenerate);
    CHECK(zero.a == 0.0);
    for (int i = 1; i <= 20; ++i) {
        const AbSolution s = solve_ab(i / 20.0);
        for (double r : s.residuals) CHECK(std::abs(r) < 1e-12);
        CHECK(s.a >= s.b);
        CHECK(1 - 2 * s.a >= 0.0);
    }
}

TEST_CASE("symmetric certificate cost") {
    CHECK(transport_cost_2d(1.0).total == doctest::Approx((6 + kSqrt2) / 27).epsilon(1e-14));
    CHECK(transport_cost_2d(0.0).total == 0.0);
    CHECK(transport_cost_2d(0.5).total == doctest::Approx(0.0928564).epsilon(1e-6));
    const auto cert = transport_cost_2d(0.7);
    double sum = 0.0;
    for (const auto& r : cert.regions) {
        CHECK(r.cost >= 0.0);
        sum += r.cost;
    }
    CHECK(sum == doctest::Approx(cert.total).epsilon(1e-14));
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double c = symmetric_cost_closed_form(i / 100.0);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("off-centre system") {
    const OffCenterSolution s = solve_offcenter();
    CHECK(s.residual_inf < 1e-12);
    const auto ref = offcenter_reference();
    CHECK(std::abs(s.a - (1 + kSqrt2) / 9) < 1e-10);
    CHECK(std::abs(s.b - 1.0 / 9) < 1e-10);
    CHECK(std::abs(s.d - ref[2]) < 1e-10);
    CHECK(std::abs(s.e - ref[3]) < 1e-10);
    CHECK(std::abs(s.f - ref[4]) < 1e-10);
    CHECK(s.p == doctest::Approx(1 - s.e - s.d).epsilon(1e-14));
    CHECK(s.e < s.f);
    CHECK(1 - s.a - s.f > 0.0);

    // Balance of the lower-left triangle-pentagon pair at the surd values.
    const double a = (1 + kSqrt2) / 9, b = 1.0 / 9;
    CHECK(std::abs(a / 3 + a / 3 - 3 * (a * a - (a - b) * (a - b) / 2)) < 1e-14);

    const auto res = offcenter_residuals(ref);
    for (double r : res) CHECK(std::abs(r) < 1e-13);
}

TEST_CASE("off-centre Jacobian matches finite differences") {
    const OffCenterVector v{0.3, 0.12, 0.4, 0.17, 0.27, 0.35};
    const auto jac = offcenter_jacobian(v);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 6; ++j) {
        auto vp = v, vm = v;
        vp[j] += h;
        vm[j] -= h;
        const auto rp = offcenter_residuals(vp);
        const auto rm = offcenter_residuals(vm);
        for (std::size_t i = 0; i < 6; ++i) CHECK(jac[i][j] == doctest::Approx((rp[i] - rm[i]) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("Newton converges from nearby starts") {
    const auto ref = offcenter_reference();
    for (double scale : {0.9, 1.05, 1.1}) {
        OffCenterVector g = kOffCenterInitialGuess;
        for (auto& v : g) v *= scale;
        const OffCenterSolution s = solve_offcenter(g);
        CHECK(std::abs(s.d - ref[2]) < 1e-10);
    }
}

TEST_CASE("off-centre certificate equals the menu's exact profit") {
    const TransportCertificate cert = offcenter_certificate();
    const double exact = exact_profit_uniform_2d(offcenter_menu(), UpdateModel({1.0 / 3, 1.0 / 3}, 1.0));
    CHECK(cert.total == doctest::Approx(exact).epsilon(1e-10));
    double sum = 0.0;
    for (const auto& r : cert.regions) {
        CHECK(r.cost >= -1e-15);
        sum += r.cost;
    }
    CHECK(sum == doctest::Approx(cert.total).epsilon(1e-14));
    // Separate pricing at c = 1/3 makes 2 * 5/36.
    CHECK(exact > 2 * profit_1d(1.0 / 3, 1.0));
}

TEST_CASE("duality gaps") {
    const UpdateModel upd({0.5, 0.5}, 1.0);
    const double c1 = symmetric_cost_closed_form(1.0);
    const DualityReport opt = duality_gap(symmetric_2d_menu(1.0), c1, kUniform2, upd, 10'000'000, 1);
    CHECK(opt.certified);
    CHECK(opt.weak_duality_ok);

    const DualityReport none = duality_gap(Menu::no_trade(2), c1, kUniform2, upd, 10000, 2);
    CHECK(none.gap == doctest::Approx(c1));
    CHECK_FALSE(none.certified);

    const DualityReport sep = duality_gap(separate_pricing_menu({0.5, 0.5}, 1.0), c1, kUniform2, upd, 2'000'000, 3);
    CHECK(sep.gap == doctest::Approx(0.0246).epsilon(0.02));
    CHECK_FALSE(sep.certified);

    const Menu bad(2, {{{0, 0}, 0.0}, {{1, 0}, 0.3}});
    CHECK_THROWS_AS(duality_gap(bad, c1, kUniform2, upd, 1000, 4), ValidationError);
}

TEST_CASE("weak duality over random feasible menus") {
    for (double lam : {0.3, 0.7, 1.0}) {
        const UpdateModel upd({0.5, 0.5}, lam);
        const double cost = symmetric_cost_closed_form(lam);
        for (std::uint64_t t = 0; t < 17; ++t) {
            const Menu m = testing::random_feasible_menu(2, 8, upd.belief, 55, t);
            const double exact = exact_profit_uniform_2d(m, upd);
            CHECK(exact <= cost + 1e-12);
        }
    }
}
