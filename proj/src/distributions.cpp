#include "amm/distributions.hpp"

#include "amm/errors.hpp"
#include "amm/rng.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace amm {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double std_normal_quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

// Marsaglia-Tsang; shapes below 1 use the U^(1/a) boost.
double sample_gamma(CounterStream& rng, double shape) {
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z;
        double v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> parse_numbers(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view field = text.substr(pos, comma - pos);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
            throw ValidationError("bad number '" + std::string(field) + "' in distribution spec");
        }
        out.push_back(value);
        pos = comma + 1;
    }
    return out;
}

}  // namespace

ValuationDistribution::ValuationDistribution(std::size_t dim, CoordinateLaw law)
    : dim_(dim), law_(law) {
    if (dim_ == 0) throw ValidationError("distribution dimension must be positive");
    if (const auto* b = std::get_if<BetaLaw>(&law_)) {
        if (!(b->alpha > 0.0) || !(b->beta > 0.0) || !std::isfinite(b->alpha) || !std::isfinite(b->beta)) {
            throw ValidationError("beta shape parameters must be positive and finite");
        }
        log_beta_norm_ = std::lgamma(b->alpha) + std::lgamma(b->beta) - std::lgamma(b->alpha + b->beta);
    } else if (const auto* t = std::get_if<TruncNormalLaw>(&law_)) {
        if (!(t->sd > 0.0) || !std::isfinite(t->sd) || !std::isfinite(t->mean)) {
            throw ValidationError("truncated normal needs finite mean and positive sd");
        }
        tn_lo_ = std_normal_cdf((0.0 - t->mean) / t->sd);
        tn_mass_ = std_normal_cdf((1.0 - t->mean) / t->sd) - tn_lo_;
        if (!(tn_mass_ > 0.0)) throw ValidationError("truncated normal has no mass on [0,1]");
    }
}

ValuationDistribution ValuationDistribution::parse(std::string_view spec, std::size_t dim) {
    if (spec == "uniform") return {dim, UniformLaw{}};
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) throw ValidationError("unknown distribution '" + std::string(spec) + "'");
    const std::string_view name = spec.substr(0, colon);
    const auto args = parse_numbers(spec.substr(colon + 1));
    if (args.size() != 2) throw ValidationError("distribution '" + std::string(name) + "' takes two parameters");
    if (name == "beta") return {dim, BetaLaw{args[0], args[1]}};
    if (name == "truncnorm") return {dim, TruncNormalLaw{args[0], args[1]}};
    throw ValidationError("unknown distribution '" + std::string(name) + "'");
}

std::string ValuationDistribution::to_string() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, UniformLaw>) {
                os << "uniform";
            } else if constexpr (std::is_same_v<L, BetaLaw>) {
                os << "beta:" << law.alpha << ',' << law.beta;
            } else {
                os << "truncnorm:" << law.mean << ',' << law.sd;
            }
        },
        law_);
    return os.str();
}

double ValuationDistribution::pdf1(double t) const {
    if (t < 0.0 || t > 1.0) return 0.0;
    return std::visit(
        [&](const auto& law) -> double {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, UniformLaw>) {
                return 1.0;
            } else if constexpr (std::is_same_v<L, BetaLaw>) {
                return std::pow(t, law.alpha - 1.0) * std::pow(1.0 - t, law.beta - 1.0) * std::exp(-log_beta_norm_);
            } else {
                const double z = (t - law.mean) / law.sd;
                return kInvSqrt2Pi * std::exp(-0.5 * z * z) / (law.sd * tn_mass_);
            }
        },
        law_);
}

double ValuationDistribution::dpdf1(double t) const {
    return std::visit(
        [&](const auto& law) -> double {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, UniformLaw>) {
                return 0.0;
            } else if constexpr (std::is_same_v<L, BetaLaw>) {
                // d/dt of t^(a-1) (1-t)^(b-1) / B(a,b), written without dividing by t or 1-t.
                const double norm = std::exp(-log_beta_norm_);
                const double a1 = law.alpha - 1.0;
                const double b1 = law.beta - 1.0;
                double left = 0.0;
                double right = 0.0;
                if (a1 != 0.0) left = a1 * std::pow(t, a1 - 1.0) * std::pow(1.0 - t, b1);
                if (b1 != 0.0) right = b1 * std::pow(t, a1) * std::pow(1.0 - t, b1 - 1.0);
                return norm * (left - right);
            } else {
                return -(t - law.mean) / (law.sd * law.sd) * pdf1(t);
            }
        },
        law_);
}

double ValuationDistribution::cdf1(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return std::visit(
        [&](const auto& law) -> double {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, UniformLaw>) {
                return t;
            } else if constexpr (std::is_same_v<L, BetaLaw>) {
                return boost::math::ibeta(law.alpha, law.beta, t);
            } else {
                return (std_normal_cdf((t - law.mean) / law.sd) - tn_lo_) / tn_mass_;
            }
        },
        law_);
}

double ValuationDistribution::pdf(std::span<const double> x) const {
    if (x.size() != dim_) throw ValidationError("pdf: dimension mismatch");
    double p = 1.0;
    for (double t : x) p *= pdf1(t);
    return p;
}

std::vector<double> ValuationDistribution::grad_pdf(std::span<const double> x) const {
    if (x.size() != dim_) throw ValidationError("grad_pdf: dimension mismatch");
    for (double t : x) {
        if (!(t > 0.0 && t < 1.0)) throw ValidationError("grad_pdf is defined on the open cube only");
    }
    std::vector<double> f(dim_);
    std::vector<double> df(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        f[k] = pdf1(x[k]);
        df[k] = dpdf1(x[k]);
    }
    std::vector<double> grad(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        double g = df[k];
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j != k) g *= f[j];
        }
        grad[k] = g;
    }
    return grad;
}

void ValuationDistribution::sample_point(std::uint64_t seed, std::uint64_t index, std::span<double> out) const {
    CounterStream rng(seed, index);
    std::visit(
        [&](const auto& law) {
            using L = std::decay_t<decltype(law)>;
            for (std::size_t k = 0; k < dim_; ++k) {
                if constexpr (std::is_same_v<L, UniformLaw>) {
                    out[k] = rng.uniform();
                } else if constexpr (std::is_same_v<L, BetaLaw>) {
                    const double g1 = sample_gamma(rng, law.alpha);
                    const double g2 = sample_gamma(rng, law.beta);
                    out[k] = g1 / (g1 + g2);
                } else {
                    const double p = tn_lo_ + rng.uniform() * tn_mass_;
                    out[k] = std::clamp(law.mean + law.sd * std_normal_quantile(p), 0.0, 1.0);
                }
            }
        },
        law_);
}

std::vector<double> ValuationDistribution::sample(std::size_t n, std::uint64_t seed) const {
    std::vector<double> out(n * dim_);
    for (std::size_t i = 0; i < n; ++i) {
        sample_point(seed, i, std::span<double>(out).subspan(i * dim_, dim_));
    }
    return out;
}

}  // namespace amm
