#include "amm/learner.hpp"

#include "amm/errors.hpp"
#include "amm/menu_io.hpp"
#include "amm/parallel.hpp"
#include "amm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace amm {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;   // "init"
constexpr std::uint64_t kBatchTag = 0x62617463;  // "batc"
constexpr std::uint64_t kEvalTag = 0x6576616c;   // "eval"
constexpr std::size_t kGradChunk = 1024;
// Items whose logit trails the leader by more than this get zero weight.
constexpr double kLogitCutoff = 50.0;

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

struct Accumulator {
    double objective = 0.0;
    std::vector<double> d_alloc;
    std::vector<double> d_prices;
};

// Softmax-weighted profit for one type, optionally accumulating gradients
// with respect to allocations and prices.
class SampleKernel {
public:
    SampleKernel(const std::vector<double>& alloc, const std::vector<double>& prices, std::size_t dim,
                 const UpdateModel& upd, double tau)
        : alloc_(alloc), prices_(prices), dim_(dim), upd_(upd), tau_(tau),
          z_(prices.size()), w_(prices.size()), g_(prices.size()), pi_(dim) {}

    double operator()(std::span<const double> x, Accumulator* acc) {
        const std::size_t k_items = prices_.size();
        upd_.posterior(x, pi_);
        double z_max = 0.0;  // no-trade logit
        for (std::size_t i = 0; i < k_items; ++i) {
            const double* a = alloc_.data() + i * dim_;
            double ax = 0.0;
            double api = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) {
                ax += a[k] * x[k];
                api += a[k] * pi_[k];
            }
            z_[i] = tau_ * (ax - prices_[i]);
            g_[i] = prices_[i] - api;
            z_max = std::max(z_max, z_[i]);
        }
        double norm = std::exp(-z_max);
        for (std::size_t i = 0; i < k_items; ++i) {
            const double gap = z_max - z_[i];
            w_[i] = gap > kLogitCutoff ? 0.0 : std::exp(-gap);
            norm += w_[i];
        }
        double g_bar = 0.0;
        for (std::size_t i = 0; i < k_items; ++i) {
            w_[i] /= norm;
            g_bar += w_[i] * g_[i];
        }
        if (acc != nullptr) {
            acc->objective += g_bar;
            for (std::size_t i = 0; i < k_items; ++i) {
                const double w = w_[i];
                if (w == 0.0) continue;
                const double coef = tau_ * w * (g_[i] - g_bar);
                acc->d_prices[i] += w - coef;
                double* da = acc->d_alloc.data() + i * dim_;
                for (std::size_t k = 0; k < dim_; ++k) da[k] += coef * x[k] - w * pi_[k];
            }
        }
        return g_bar;
    }

private:
    const std::vector<double>& alloc_;
    const std::vector<double>& prices_;
    std::size_t dim_;
    const UpdateModel& upd_;
    double tau_;
    std::vector<double> z_, w_, g_, pi_;
};

void check_batch(const LearnerParams& params, std::span<const double> batch, const UpdateModel& upd) {
    if (params.dim == 0 || params.alpha.size() != params.size * params.dim ||
        params.prices.size() != params.size) {
        throw ValidationError("learner parameters have inconsistent shapes");
    }
    if (upd.dim() != params.dim) throw ValidationError("update model and parameter dimensions differ");
    if (batch.empty() || batch.size() % params.dim != 0) {
        throw ValidationError("batch must be a nonempty row-major array of types");
    }
}

}  // namespace

void LearnerConfig::validate() const {
    if (menu_size < 1) throw ValidationError("menu_size must be at least 1");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ValidationError("temperature must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ValidationError("learning_rate must be positive");
    }
    if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
    if (dim < 1) throw ValidationError("dimension must be at least 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ValidationError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw ValidationError("Adam epsilon must be positive");
    if (schedule != "constant" && schedule != "cosine") {
        throw ValidationError("schedule must be 'constant' or 'cosine'");
    }
    if (log_every < 1) throw ValidationError("log_every must be at least 1");
    if (log_samples < 2) throw ValidationError("log_samples must be at least 2");
    distribution();
    update_model();
}

ValuationDistribution LearnerConfig::distribution() const { return ValuationDistribution::parse(dist, dim); }

UpdateModel LearnerConfig::update_model() const {
    std::vector<double> c = belief.empty() ? std::vector<double>(dim, 0.5) : belief;
    if (c.size() != dim) throw ValidationError("belief length must equal the dimension");
    return UpdateModel(std::move(c), lambda);
}

std::vector<double> LearnerParams::allocations() const {
    std::vector<double> out(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = 2.0 * sigmoid(alpha[i]) - 1.0;
    return out;
}

LearnerParams init_params(std::size_t size, std::size_t dim, std::uint64_t seed) {
    if (size < 1 || dim < 1) throw ValidationError("init_params: size and dim must be positive");
    LearnerParams p;
    p.dim = dim;
    p.size = size;
    p.alpha.resize(size * dim);
    p.prices.resize(size);
    const std::uint64_t key = derive_seed(seed, kInitTag);
    for (std::size_t i = 0; i < size; ++i) {
        CounterStream rng(key, i);
        for (std::size_t k = 0; k < dim; ++k) p.alpha[i * dim + k] = rng.normal();
        p.prices[i] = rng.uniform(-0.5, 0.5);
    }
    return p;
}

double soft_objective(const LearnerParams& params, std::span<const double> batch, const UpdateModel& upd,
                      double tau) {
    check_batch(params, batch, upd);
    const std::size_t d = params.dim;
    const std::size_t n = batch.size() / d;
    const std::size_t n_chunks = (n + kGradChunk - 1) / kGradChunk;
    const std::vector<double> alloc = params.allocations();
    std::vector<double> partial(n_chunks, 0.0);
    for_each_chunk(n_chunks, [&](std::size_t chunk) {
        SampleKernel kernel(alloc, params.prices, d, upd, tau);
        const std::size_t end = std::min(n, (chunk + 1) * kGradChunk);
        double s = 0.0;
        for (std::size_t j = chunk * kGradChunk; j < end; ++j) s += kernel(batch.subspan(j * d, d), nullptr);
        partial[chunk] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total / static_cast<double>(n);
}

Gradients gradients(const LearnerParams& params, std::span<const double> batch, const UpdateModel& upd,
                    double tau) {
    check_batch(params, batch, upd);
    const std::size_t d = params.dim;
    const std::size_t k_items = params.size;
    const std::size_t n = batch.size() / d;
    const std::size_t n_chunks = (n + kGradChunk - 1) / kGradChunk;
    const std::vector<double> alloc = params.allocations();

    std::vector<Accumulator> parts(n_chunks);
    for_each_chunk(n_chunks, [&](std::size_t chunk) {
        Accumulator& acc = parts[chunk];
        acc.d_alloc.assign(k_items * d, 0.0);
        acc.d_prices.assign(k_items, 0.0);
        SampleKernel kernel(alloc, params.prices, d, upd, tau);
        const std::size_t end = std::min(n, (chunk + 1) * kGradChunk);
        for (std::size_t j = chunk * kGradChunk; j < end; ++j) kernel(batch.subspan(j * d, d), &acc);
    });

    Gradients out;
    out.d_alpha.assign(k_items * d, 0.0);
    out.d_prices.assign(k_items, 0.0);
    for (const auto& acc : parts) {
        out.objective += acc.objective;
        for (std::size_t i = 0; i < k_items * d; ++i) out.d_alpha[i] += acc.d_alloc[i];
        for (std::size_t i = 0; i < k_items; ++i) out.d_prices[i] += acc.d_prices[i];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.objective *= inv_n;
    for (double& g : out.d_prices) g *= inv_n;
    for (std::size_t i = 0; i < k_items * d; ++i) {
        // d alloc / d alpha = 2 sigma (1 - sigma)
        const double s = sigmoid(params.alpha[i]);
        out.d_alpha[i] *= inv_n * 2.0 * s * (1.0 - s);
    }
    return out;
}

void TrainingLog::write_csv(std::ostream& out) const {
    out << "step,soft_objective,hard_profit,hard_se\n";
    char line[160];
    for (const auto& e : entries) {
        std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g\n", e.step, e.soft_objective, e.hard_profit,
                      e.hard_se);
        out << line;
    }
}

TrainResult train(const LearnerConfig& config) {
    config.validate();
    return train(config, init_params(config.menu_size, config.dim, config.seed));
}

TrainResult train(const LearnerConfig& config, const LearnerParams& initial) {
    config.validate();
    if (initial.dim != config.dim || initial.size != config.menu_size ||
        initial.alpha.size() != initial.size * initial.dim || initial.prices.size() != initial.size) {
        throw ValidationError("initial parameters do not match the configured menu size and dimension");
    }
    const ValuationDistribution dist = config.distribution();
    const UpdateModel upd = config.update_model();
    const std::size_t d = config.dim;
    const std::size_t k_items = config.menu_size;
    const std::size_t n = config.batch_size;
    const std::uint64_t batch_seed = derive_seed(config.seed, kBatchTag);
    const std::uint64_t eval_seed = derive_seed(config.seed, kEvalTag);

    TrainResult result;
    LearnerParams& params = result.params;
    params = initial;

    const std::size_t n_params = k_items * (d + 1);
    std::vector<double> m(n_params, 0.0);
    std::vector<double> v(n_params, 0.0);
    std::vector<double> batch(n * d);
    const std::size_t n_chunks = (n + kGradChunk - 1) / kGradChunk;
    double b1_pow = 1.0;
    double b2_pow = 1.0;

    auto log_entry = [&](std::size_t step, double objective) {
        const McEstimate mc = expected_profit_mc(hard_menu(params), dist, upd, config.log_samples, eval_seed);
        result.log.entries.push_back({step, objective, mc.mean, mc.std_error});
    };

    for (std::size_t step = 1; step <= config.steps; ++step) {
        const std::uint64_t first = static_cast<std::uint64_t>(step - 1) * n;
        for_each_chunk(n_chunks, [&](std::size_t chunk) {
            const std::size_t end = std::min(n, (chunk + 1) * kGradChunk);
            for (std::size_t j = chunk * kGradChunk; j < end; ++j) {
                dist.sample_point(batch_seed, first + j, std::span<double>(batch).subspan(j * d, d));
            }
        });
        const Gradients grad = gradients(params, batch, upd, config.temperature);
        if (!std::isfinite(grad.objective)) {
            throw NumericalError("training objective became non-finite at step " + std::to_string(step));
        }

        b1_pow *= config.adam_beta1;
        b2_pow *= config.adam_beta2;
        double lr = config.learning_rate;
        if (config.schedule == "cosine") {
            const double progress = static_cast<double>(step - 1) / static_cast<double>(config.steps);
            lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
        }
        const double lr_t = lr * std::sqrt(1.0 - b2_pow) / (1.0 - b1_pow);
        auto adam = [&](std::size_t slot, double g, double& theta) {
            if (!std::isfinite(g)) {
                throw NumericalError("non-finite gradient at step " + std::to_string(step));
            }
            m[slot] = config.adam_beta1 * m[slot] + (1.0 - config.adam_beta1) * g;
            v[slot] = config.adam_beta2 * v[slot] + (1.0 - config.adam_beta2) * g * g;
            // ascent
            theta += lr_t * m[slot] / (std::sqrt(v[slot]) + config.adam_eps * std::sqrt(1.0 - b2_pow));
        };
        for (std::size_t i = 0; i < k_items * d; ++i) adam(i, grad.d_alpha[i], params.alpha[i]);
        for (std::size_t i = 0; i < k_items; ++i) adam(k_items * d + i, grad.d_prices[i], params.prices[i]);

        if (step % config.log_every == 0 || step == config.steps) log_entry(step, grad.objective);
    }
    if (config.steps == 0) log_entry(0, std::numeric_limits<double>::quiet_NaN());
    return result;
}

Menu hard_menu(const LearnerParams& params) {
    const std::vector<double> alloc = params.allocations();
    std::vector<MenuItem> items;
    items.reserve(params.size + 1);
    items.push_back({std::vector<double>(params.dim, 0.0), 0.0});
    for (std::size_t i = 0; i < params.size; ++i) {
        items.push_back({std::vector<double>(alloc.begin() + static_cast<std::ptrdiff_t>(i * params.dim),
                                             alloc.begin() + static_cast<std::ptrdiff_t>((i + 1) * params.dim)),
                         params.prices[i]});
    }
    return Menu(params.dim, items);
}

namespace {

std::vector<std::size_t> choice_counts(const Menu& menu, const ExtractOptions& opt) {
    const std::size_t d = menu.dim();
    std::vector<std::size_t> counts(menu.size(), 0);
    if (d <= 2) {
        const std::size_t r = opt.grid_resolution;
        if (r < 1) throw ValidationError("extract_menu: grid resolution must be positive");
        const std::size_t total = d == 1 ? r : r * r;
        const std::size_t n_chunks = (total + kGradChunk - 1) / kGradChunk;
        std::vector<std::vector<std::size_t>> part(n_chunks);
        for_each_chunk(n_chunks, [&](std::size_t chunk) {
            auto& local = part[chunk];
            local.assign(menu.size(), 0);
            std::vector<double> x(d);
            const std::size_t end = std::min(total, (chunk + 1) * kGradChunk);
            for (std::size_t j = chunk * kGradChunk; j < end; ++j) {
                // cell centres
                x[0] = (static_cast<double>(j / (d == 1 ? 1 : r)) + 0.5) / static_cast<double>(r);
                if (d == 2) x[1] = (static_cast<double>(j % r) + 0.5) / static_cast<double>(r);
                ++local[choose(menu, x).index];
            }
        });
        for (const auto& local : part) {
            for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
        }
        return counts;
    }
    const std::size_t total = opt.random_points;
    const std::size_t n_chunks = (total + kGradChunk - 1) / kGradChunk;
    std::vector<std::vector<std::size_t>> part(n_chunks);
    for_each_chunk(n_chunks, [&](std::size_t chunk) {
        auto& local = part[chunk];
        local.assign(menu.size(), 0);
        std::vector<double> x(d);
        const std::size_t end = std::min(total, (chunk + 1) * kGradChunk);
        for (std::size_t j = chunk * kGradChunk; j < end; ++j) {
            CounterStream rng(opt.seed, j);
            for (auto& v : x) v = rng.uniform();
            ++local[choose(menu, x).index];
        }
    });
    for (const auto& local : part) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    }
    return counts;
}

}  // namespace

Menu extract_menu(const LearnerParams& params, const ExtractOptions& opt) {
    if (!(opt.dedup_tol >= 0.0)) throw ValidationError("extract_menu: dedup tolerance must be nonnegative");
    if (params.dim > 3) throw ValidationError("extract_menu supports at most three goods");
    const Menu full = hard_menu(params);
    const std::size_t d = full.dim();
    const std::vector<std::size_t> counts = choice_counts(full, opt);

    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < full.size(); ++i) {
        if (counts[i] > 0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return counts[l] > counts[r]; });

    struct Rep {
        std::vector<double> alloc;
        double price;
        double weight;
    };
    // The no-trade representative absorbs near-zero items but never moves.
    std::vector<Rep> reps{{std::vector<double>(d, 0.0), 0.0, static_cast<double>(counts[0])}};
    for (std::size_t i : order) {
        const auto a = full.alloc(i);
        const double p = full.price(i);
        const double w = static_cast<double>(counts[i]);
        Rep* target = nullptr;
        for (auto& rep : reps) {
            double dist = std::abs(rep.price - p);
            for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(rep.alloc[k] - a[k]));
            if (dist < opt.dedup_tol) {
                target = &rep;
                break;
            }
        }
        if (target == nullptr) {
            reps.push_back({std::vector<double>(a.begin(), a.end()), p, w});
        } else if (target != &reps.front()) {
            const double total = target->weight + w;
            for (std::size_t k = 0; k < d; ++k) target->alloc[k] = (target->alloc[k] * target->weight + a[k] * w) / total;
            target->price = (target->price * target->weight + p * w) / total;
            target->weight = total;
        }
    }
    std::vector<MenuItem> items;
    items.reserve(reps.size());
    for (const auto& rep : reps) items.push_back({rep.alloc, rep.price});
    return Menu(d, items);
}

void write_checkpoint(const std::filesystem::path& path, const LearnerParams& params) {
    write_menu_file(path, hard_menu(params), "learned menu, no-trade first");
    std::filesystem::path raw = path;
    raw += ".raw";
    std::ofstream out(raw);
    if (!out) throw ValidationError("cannot write checkpoint " + raw.string());
    out << "# alpha_1 ... alpha_d price\n";
    char buf[64];
    for (std::size_t i = 0; i < params.size; ++i) {
        for (std::size_t k = 0; k < params.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g ", params.alpha[i * params.dim + k]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", params.prices[i]);
        out << buf;
    }
    if (!out) throw ValidationError("failed writing checkpoint " + raw.string());
}

LearnerParams read_checkpoint(const std::filesystem::path& path) {
    std::filesystem::path raw = path;
    raw += ".raw";
    std::ifstream in(raw);
    if (!in) throw ValidationError("cannot read checkpoint " + raw.string());
    const auto rows = read_numeric_rows(in);
    if (rows.empty() || rows.front().size() < 2) throw ValidationError("checkpoint has no parameter rows");
    LearnerParams p;
    p.dim = rows.front().size() - 1;
    p.size = rows.size();
    for (const auto& row : rows) {
        p.alpha.insert(p.alpha.end(), row.begin(), row.end() - 1);
        p.prices.push_back(row.back());
    }
    return p;
}

}  // namespace amm
