#include "gme/mixture.hpp"

#include <cmath>
#include <stdexcept>

#include "gme/rng.hpp"

namespace gme {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double MixtureConfig::h_sigma() const {
    return 0.5 * std::log(kTwoPi * std::exp(1.0) * sigma2);
}

void MixtureConfig::validate() const {
    if (n < 1) throw std::invalid_argument("MixtureConfig: n must be >= 1");
    if (q < 2) throw std::invalid_argument("MixtureConfig: q must be >= 2");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("MixtureConfig: sigma2 must be > 0");
    if (!(mu >= 0.0))
        throw std::invalid_argument("MixtureConfig: mu must be >= 0");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::SeriesBrute: return "series-brute";
        case Method::SeriesDet: return "series-det";
        case Method::MonteCarlo: return "monte-carlo";
        case Method::BoundGaussian: return "bound-gaussian";
        case Method::BoundComponent: return "bound-component";
    }
    return "unknown";
}

LogDensityEvaluator::LogDensityEvaluator(const MixtureConfig& config,
                                         const CenterSet& centers)
    : config_(config), centers_(centers.w) {
    config_.validate();
    if (centers.dim() != config.n || centers.count() != config.q)
        throw std::invalid_argument(
            "log_density: centers must hold q vectors of dimension n");
    log_norm_ = -0.5 * config_.n * std::log(kTwoPi * config_.sigma2) -
                std::log(static_cast<double>(config_.q));
    inv2s_ = 1.0 / (2.0 * config_.sigma2);
    expo_.resize(static_cast<std::size_t>(config_.q));
}

double LogDensityEvaluator::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != config_.n)
        throw std::invalid_argument("log_density: point has wrong dimension");
    const int q = config_.q;
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < q; ++j) {
        const double e = -(x - centers_.col(j)).squaredNorm() * inv2s_;
        expo_[static_cast<std::size_t>(j)] = e;
        if (e > m) m = e;
    }
    double s = 0.0;
    for (int j = 0; j < q; ++j)
        s += std::exp(expo_[static_cast<std::size_t>(j)] - m);
    return log_norm_ + m + std::log(s);
}

double log_density(const MixtureConfig& config, const CenterSet& centers,
                   const Eigen::VectorXd& x) {
    return LogDensityEvaluator(config, centers)(x);
}

CenterSet sample_centers(const MixtureConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    const double s = std::sqrt(config.s2());
    Eigen::MatrixXd w(config.n, config.q);
    for (int j = 0; j < config.q; ++j)
        for (int i = 0; i < config.n; ++i) w(i, j) = s * rng.normal();
    return CenterSet{std::move(w)};
}

std::vector<Eigen::VectorXd> sample_mixture(const MixtureConfig& config,
                                            const CenterSet& centers,
                                            std::int64_t count,
                                            std::uint64_t seed) {
    config.validate();
    if (centers.dim() != config.n || centers.count() != config.q)
        throw std::invalid_argument("sample_mixture: bad centers shape");
    if (count < 0)
        throw std::invalid_argument("sample_mixture: count must be >= 0");
    Rng rng(seed);
    const double sigma = std::sqrt(config.sigma2);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) {
        const auto j = static_cast<int>(
            rng.uniform_index(static_cast<std::uint64_t>(config.q)));
        Eigen::VectorXd x = centers.w.col(j);
        for (int i = 0; i < config.n; ++i) x[i] += sigma * rng.normal();
        out.push_back(std::move(x));
    }
    return out;
}

ReducedProblem reduce_dimension(const MixtureConfig& config) {
    config.validate();
    if (config.n <= config.q) return ReducedProblem{config, 0.0};
    MixtureConfig reduced = config;
    reduced.n = config.q;
    const double offset = (config.n - config.q) * config.h_sigma();
    return ReducedProblem{reduced, offset};
}

}  // namespace gme
