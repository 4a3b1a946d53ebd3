#include "amm/distributions.hpp"
#include "amm/errors.hpp"
#include "amm/quadrature.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using amm::BetaLaw;
using amm::TruncNormalLaw;
using amm::UniformLaw;
using amm::ValuationDistribution;

namespace {

std::vector<ValuationDistribution> families(std::size_t d) {
    return {ValuationDistribution(d, UniformLaw{}), ValuationDistribution(d, BetaLaw{2, 2}),
            ValuationDistribution(d, BetaLaw{2, 1}), ValuationDistribution(d, BetaLaw{1, 2}),
            ValuationDistribution(d, TruncNormalLaw{0.5, 0.125})};
}

}  // namespace

TEST_CASE("uniform sample means") {
    const ValuationDistribution dist(2, UniformLaw{});
    const auto xs = dist.sample(1'000'000, 11);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < xs.size(); i += 2) {
        m0 += xs[i];
        m1 += xs[i + 1];
    }
    CHECK(std::abs(m0 / 1e6 - 0.5) < 0.002);
    CHECK(std::abs(m1 / 1e6 - 0.5) < 0.002);
}

TEST_CASE("beta(2,2) sample moments") {
    const ValuationDistribution dist(1, BetaLaw{2, 2});
    const auto xs = dist.sample(1'000'000, 12);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    CHECK(std::abs(m - 0.5) < 0.002);
    CHECK(std::abs(v - 0.05) < 0.001);
}

TEST_CASE("truncated normal never leaves the unit interval") {
    const ValuationDistribution dist(1, TruncNormalLaw{0.5, 0.125});
    const auto xs = dist.sample(1'000'000, 13);
    CHECK(std::none_of(xs.begin(), xs.end(), [](double x) { return x < 0.0 || x > 1.0; }));
}

TEST_CASE("density values") {
    const ValuationDistribution u(2, UniformLaw{});
    const double x[2] = {0.3, 0.8};
    CHECK(u.pdf(x) == 1.0);
    CHECK(u.grad_pdf(x) == std::vector<double>{0.0, 0.0});

    const ValuationDistribution b22(1, BetaLaw{2, 2});
    const double half[1] = {0.5};
    CHECK(b22.pdf(half) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::abs(b22.grad_pdf(half)[0]) < 1e-13);

    const ValuationDistribution b21(1, BetaLaw{2, 1});
    const double quarter[1] = {0.25};
    CHECK(b21.pdf(quarter) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b21.grad_pdf(quarter)[0] == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gradient matches central differences") {
    const double h = 1e-6;
    for (const auto& dist : families(2)) {
        CAPTURE(dist.to_string());
        auto pts = ValuationDistribution(2, UniformLaw{}).sample(100, 99);
        double worst = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            std::vector<double> x{0.02 + 0.96 * pts[2 * i], 0.02 + 0.96 * pts[2 * i + 1]};
            const auto g = dist.grad_pdf(x);
            for (std::size_t k = 0; k < 2; ++k) {
                auto xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                const double fd = (dist.pdf(xp) - dist.pdf(xm)) / (2 * h);
                worst = std::max(worst, std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])));
            }
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("gradient is rejected on the boundary") {
    const ValuationDistribution dist(2, BetaLaw{2, 2});
    const double edge[2] = {0.0, 0.5};
    CHECK_THROWS_AS(dist.grad_pdf(edge), amm::ValidationError);
}

TEST_CASE("densities integrate to one and CDFs agree") {
    for (const auto& dist : families(1)) {
        CAPTURE(dist.to_string());
        const auto rule = amm::composite_gauss(0.0, 1.0, 8, 32);
        double total = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) total += rule.weights[i] * dist.pdf1(rule.nodes[i]);
        CHECK(std::abs(total - 1.0) < 1e-6);
        CHECK(dist.cdf1(0.0) == doctest::Approx(0.0));
        CHECK(dist.cdf1(1.0) == doctest::Approx(1.0));
        const auto half = amm::composite_gauss(0.0, 0.3, 4, 32);
        double part = 0.0;
        for (std::size_t i = 0; i < half.nodes.size(); ++i) part += half.weights[i] * dist.pdf1(half.nodes[i]);
        CHECK(std::abs(part - dist.cdf1(0.3)) < 1e-9);
    }
}

TEST_CASE("Kolmogorov-Smirnov statistic against the analytic CDF") {
    for (const auto& dist : families(1)) {
        CAPTURE(dist.to_string());
        auto xs = dist.sample(100000, 21);
        std::sort(xs.begin(), xs.end());
        const double n = static_cast<double>(xs.size());
        double ks = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = dist.cdf1(xs[i]);
            ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
        }
        CHECK(ks < 0.01);
    }
}

TEST_CASE("sampling is deterministic per seed and index") {
    const ValuationDistribution dist(3, BetaLaw{2, 1});
    const auto a = dist.sample(1000, 5);
    const auto b = dist.sample(1000, 5);
    CHECK(a == b);
    std::vector<double> one(3);
    dist.sample_point(5, 17, one);
    CHECK(std::equal(one.begin(), one.end(), a.begin() + 51));
    CHECK(dist.sample(10, 6) != std::vector<double>(a.begin(), a.begin() + 30));
}

TEST_CASE("spec strings parse and print") {
    CHECK(ValuationDistribution::parse("uniform", 2).to_string() == "uniform");
    const auto b = ValuationDistribution::parse("beta:2,1", 2);
    REQUIRE(std::holds_alternative<BetaLaw>(b.law()));
    CHECK(std::get<BetaLaw>(b.law()).alpha == 2.0);
    CHECK(std::get<BetaLaw>(b.law()).beta == 1.0);
    const auto t = ValuationDistribution::parse("truncnorm:0.5,0.125", 1);
    REQUIRE(std::holds_alternative<TruncNormalLaw>(t.law()));
    CHECK(ValuationDistribution::parse(t.to_string(), 1).to_string() == t.to_string());
    CHECK_THROWS_AS(ValuationDistribution::parse("gamma:1,1", 2), amm::ValidationError);
    CHECK_THROWS_AS(ValuationDistribution::parse("beta:0,1", 2), amm::ValidationError);
    CHECK_THROWS_AS(ValuationDistribution::parse("truncnorm:0.5,-1", 2), amm::ValidationError);
    CHECK_THROWS_AS(ValuationDistribution::parse("beta:2", 2), amm::ValidationError);
    CHECK_THROWS_AS(ValuationDistribution(0, UniformLaw{}), amm::ValidationError);
}
