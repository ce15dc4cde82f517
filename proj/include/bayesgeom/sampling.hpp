#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bayesgeom {

/// splitmix64 finaliser; derives independent stream seeds from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Rng {
 public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return uniform_(engine_); }
    double normal() { return normal_(engine_); }
    double gamma(double shape) {
        std::gamma_distribution<double> g(shape, 1.0);
        return g(engine_);
    }
    double beta(double a, double b);
    /// Laplace(0, scale).
    double laplace(double scale);

 private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Row-major block of parameter draws: size() rows of dim() columns.
class Draws {
 public:
    Draws() = default;
    explicit Draws(std::size_t dim) : dim_(dim) {}
    Draws(std::size_t dim, std::vector<double> data);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return size() == 0; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    void push_back(std::span<const double> x);
    void reserve(std::size_t rows) { data_.reserve(rows * dim_); }
    const std::vector<double>& data() const noexcept { return data_; }

    /// First `rows` rows.
    Draws head(std::size_t rows) const;

    bool operator==(const Draws&) const = default;

 private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// i.i.d. Beta(a, b) draws as a one-column block; deterministic in the seed.
Draws sample_direct_beta(double a, double b, std::size_t count, std::uint64_t seed);

struct MetropolisConfig {
    std::size_t steps = 10000;      // kept iterations, after burn-in
    std::size_t burn_in = 0;        // 0 means steps / 10
    std::size_t thin = 1;
    std::vector<double> step_scale;  // per coordinate
    /// Coordinate groups updated in turn (Metropolis-within-Gibbs). Empty
    /// means one block with every coordinate.
    std::vector<std::vector<std::size_t>> blocks;
    /// During burn-in, rescale each block's proposal towards an acceptance
    /// rate in [0.2, 0.4]; scales are frozen afterwards.
    bool adapt = false;
    std::uint64_t seed = 0;
};

struct MetropolisResult {
    Draws draws;
    /// Fraction of accepted block proposals after burn-in.
    double acceptance_rate = 0.0;
    std::vector<double> final_step_scale;
};

using LogDensity = std::function<double(std::span<const double>)>;

/// Random-walk Metropolis with Gaussian proposals. Throws
/// std::invalid_argument when log_target is not finite at init.
MetropolisResult rw_metropolis(const LogDensity& log_target, std::vector<double> init,
                               const MetropolisConfig& config);

/// CSV with a header row of column names; one row per draw. Values are
/// written with 17 significant digits.
void write_draws_csv(const std::string& path, const Draws& draws, const std::vector<std::string>& names);
Draws read_draws_csv(const std::string& path, std::vector<std::string>* names = nullptr);

}  // namespace bayesgeom
