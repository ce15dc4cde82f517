#include "bayesgeom/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bayesgeom {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

double Rng::laplace(double scale) {
    // Difference of two unit exponentials is standard Laplace.
    const double e1 = -std::log1p(-uniform());
    const double e2 = -std::log1p(-uniform());
    return scale * (e1 - e2);
}

Draws::Draws(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0 || data_.size() % dim_ != 0) {
        throw std::invalid_argument("Draws: data length must be a multiple of a positive dimension");
    }
}

void Draws::push_back(std::span<const double> x) {
    if (x.size() != dim_) throw std::invalid_argument("Draws::push_back: dimension mismatch");
    data_.insert(data_.end(), x.begin(), x.end());
}

Draws Draws::head(std::size_t rows) const {
    rows = std::min(rows, size());
    return Draws(dim_, std::vector<double>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(rows * dim_)));
}

Draws sample_direct_beta(double a, double b, std::size_t count, std::uint64_t seed) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("sample_direct_beta: a, b must be positive");
    if (count < 1) throw std::invalid_argument("sample_direct_beta: count must be >= 1");
    Rng rng(seed);
    Draws out(1);
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.beta(a, b);
        out.push_back(std::span<const double>(&x, 1));
    }
    return out;
}

MetropolisResult rw_metropolis(const LogDensity& log_target, std::vector<double> init,
                               const MetropolisConfig& config) {
    const std::size_t dim = init.size();
    if (dim == 0) throw std::invalid_argument("rw_metropolis: empty initial state");
    if (config.step_scale.size() != dim) {
        throw std::invalid_argument("rw_metropolis: step_scale must have one entry per coordinate");
    }
    if (config.thin < 1) throw std::invalid_argument("rw_metropolis: thin must be >= 1");
    double current = log_target(init);
    if (!std::isfinite(current)) {
        throw std::invalid_argument("rw_metropolis: log target is not finite at the initial state");
    }

    std::vector<std::vector<std::size_t>> blocks = config.blocks;
    if (blocks.empty()) {
        blocks.emplace_back(dim);
        std::iota(blocks.back().begin(), blocks.back().end(), std::size_t{0});
    }
    for (const auto& block : blocks) {
        for (std::size_t i : block) {
            if (i >= dim) throw std::invalid_argument("rw_metropolis: block index out of range");
        }
    }

    std::vector<double> scale = config.step_scale;
    const std::size_t burn_in = config.burn_in == 0 ? config.steps / 10 : config.burn_in;
    const std::size_t total = burn_in + config.steps;
    constexpr std::size_t kAdaptWindow = 100;

    Rng rng(config.seed);
    MetropolisResult out;
    out.draws = Draws(dim);
    out.draws.reserve(config.steps / config.thin);

    std::vector<double> proposal = init;
    std::vector<std::size_t> window_accepts(blocks.size(), 0);
    std::size_t accepted = 0, proposed = 0;

    for (std::size_t it = 0; it < total; ++it) {
        const bool burning = it < burn_in;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            proposal = init;
            for (std::size_t i : blocks[k]) proposal[i] += scale[i] * rng.normal();
            const double cand = log_target(proposal);
            const double log_u = std::log(rng.uniform());
            const bool accept = std::isfinite(cand) && log_u < cand - current;
            if (accept) {
                init.swap(proposal);
                current = cand;
            }
            if (burning) {
                window_accepts[k] += accept ? 1 : 0;
            } else {
                accepted += accept ? 1 : 0;
                ++proposed;
            }
        }
        if (burning && config.adapt && (it + 1) % kAdaptWindow == 0) {
            for (std::size_t k = 0; k < blocks.size(); ++k) {
                const double rate = static_cast<double>(window_accepts[k]) / kAdaptWindow;
                double factor = 1.0;
                if (rate < 0.2) factor = rate < 0.05 ? 0.5 : 0.8;
                if (rate > 0.4) factor = rate > 0.7 ? 2.0 : 1.25;
                for (std::size_t i : blocks[k]) scale[i] *= factor;
                window_accepts[k] = 0;
            }
        }
        if (!burning && (it - burn_in) % config.thin == 0) out.draws.push_back(init);
    }
    out.acceptance_rate = proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed;
    out.final_step_scale = scale;
    return out;
}

}  // namespace bayesgeom
