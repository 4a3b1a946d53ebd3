#pragma once

#include "amm/distributions.hpp"
#include "amm/mechanism.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace amm {

struct LearnerConfig {
    std::size_t menu_size = 1024;
    double temperature = 100.0;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32768;
    std::size_t steps = 20000;
    std::uint64_t seed = 0;
    std::string dist = "uniform";
    std::size_t dim = 2;
    std::vector<double> belief;  // empty means (1/2, ..., 1/2)
    double lambda = 1.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    // "constant", or "cosine": lr decays to zero over the run.
    std::string schedule = "constant";
    std::size_t log_every = 500;
    std::size_t log_samples = 1'000'000;

    void validate() const;
    ValuationDistribution distribution() const;
    UpdateModel update_model() const;
};

// K trainable items: allocation 2 sigmoid(alpha) - 1, free price. The fixed
// no-trade item is implicit and never stored.
struct LearnerParams {
    std::size_t dim = 0;
    std::size_t size = 0;
    std::vector<double> alpha;   // size x dim, row-major
    std::vector<double> prices;  // size

    std::vector<double> allocations() const;
};

LearnerParams init_params(std::size_t size, std::size_t dim, std::uint64_t seed);

// Softmax-weighted profit averaged over a row-major batch of types. The
// weights span the trainable items and the no-trade item.
double soft_objective(const LearnerParams& params, std::span<const double> batch, const UpdateModel& upd,
                      double tau);

struct Gradients {
    double objective = 0.0;
    std::vector<double> d_alpha;
    std::vector<double> d_prices;
};

Gradients gradients(const LearnerParams& params, std::span<const double> batch, const UpdateModel& upd,
                    double tau);

struct LogEntry {
    std::size_t step = 0;
    double soft_objective = 0.0;
    double hard_profit = 0.0;
    double hard_se = 0.0;
};

struct TrainingLog {
    std::vector<LogEntry> entries;

    void write_csv(std::ostream& out) const;
};

struct TrainResult {
    LearnerParams params;
    TrainingLog log;
};

// Adam ascent on the soft objective with fresh batches each step. Throws
// NumericalError if the objective or a gradient becomes non-finite.
TrainResult train(const LearnerConfig& config);
// Same, starting from `initial` instead of a fresh initialisation.
TrainResult train(const LearnerConfig& config, const LearnerParams& initial);

// Every trainable item plus no-trade (index 0), no pruning.
Menu hard_menu(const LearnerParams& params);

struct ExtractOptions {
    double dedup_tol = 0.02;
    std::size_t grid_resolution = 512;     // per axis, d <= 2
    std::size_t random_points = 1'000'000;  // d = 3
    std::uint64_t seed = 0xe7;
};

// Hardens the learned menu: drops items never chosen on the prune grid, merges
// items within dedup_tol (max norm over allocation and price) into the most
// frequently chosen representative, and puts the exact no-trade item first.
Menu extract_menu(const LearnerParams& params, const ExtractOptions& opt = {});

// Checkpoint: `path` holds the hard menu in menu text format, `path.raw`
// holds rows `alpha_1 ... alpha_d price`.
void write_checkpoint(const std::filesystem::path& path, const LearnerParams& params);
LearnerParams read_checkpoint(const std::filesystem::path& path);

}  // namespace amm
