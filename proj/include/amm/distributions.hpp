#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace amm {

struct UniformLaw {};

struct BetaLaw {
    double alpha = 1.0;
    double beta = 1.0;
};

// Normal(mean, sd) conditioned on [0, 1].
struct TruncNormalLaw {
    double mean = 0.5;
    double sd = 0.125;
};

using CoordinateLaw = std::variant<UniformLaw, BetaLaw, TruncNormalLaw>;

// Trader values on [0,1]^d with i.i.d. coordinates drawn from one law.
class ValuationDistribution {
public:
    ValuationDistribution(std::size_t dim, CoordinateLaw law);

    // Grammar: "uniform" | "beta:A,B" | "truncnorm:MEAN,SD".
    static ValuationDistribution parse(std::string_view spec, std::size_t dim);

    std::size_t dim() const { return dim_; }
    const CoordinateLaw& law() const { return law_; }
    std::string to_string() const;

    // One-coordinate density, its derivative and CDF.
    double pdf1(double t) const;
    double dpdf1(double t) const;
    double cdf1(double t) const;

    // Product density; defined on the closed cube (may be infinite on faces
    // for Beta shapes below 1).
    double pdf(std::span<const double> x) const;
    // Gradient of the product density; x must lie in the open cube.
    std::vector<double> grad_pdf(std::span<const double> x) const;

    // Draws sample `index` of the sequence keyed by `seed` into `out`.
    void sample_point(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;
    // n samples, row-major n x d.
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    std::size_t dim_;
    CoordinateLaw law_;
    // Cached normalisation for the law.
    double log_beta_norm_ = 0.0;
    double tn_lo_ = 0.0;
    double tn_mass_ = 1.0;
};

}  // namespace amm
