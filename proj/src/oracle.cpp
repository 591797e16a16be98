#include "gme/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gme/parallel.hpp"
#include "gme/rng.hpp"

namespace gme::oracle {

namespace {

constexpr std::int64_t kChunk = 1 << 15;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SampleStat {
    double sum = 0.0;
    double sumsq = 0.0;
};

/// Accumulates -ln f over one chunk of mixture samples. Sampling matches
/// sample_mixture: component index, then sigma-scaled normal noise. The
/// evaluator's scratch buffer is not shareable across threads, so each chunk
/// builds its own.
SampleStat run_chunk(const MixtureConfig& config, const CenterSet& centers,
                     std::int64_t count, std::uint64_t seed) {
    const LogDensityEvaluator density(config, centers);
    Rng rng(seed);
    const double sigma = std::sqrt(config.sigma2);
    Eigen::VectorXd x(config.n);
    SampleStat st;
    for (std::int64_t k = 0; k < count; ++k) {
        const auto j = static_cast<int>(
            rng.uniform_index(static_cast<std::uint64_t>(config.q)));
        x = centers.w.col(j);
        for (int i = 0; i < config.n; ++i) x[i] += sigma * rng.normal();
        const double v = -density(x);
        st.sum += v;
        st.sumsq += v * v;
    }
    return st;
}

struct CenterResult {
    double mean = 0.0;
    double var = 0.0;  // within-center sample variance of -ln f
    double bound = 0.0;
};

/// Mean and variance of -ln f for one center set, decomposed into fixed
/// chunks so the combination is reproducible for any worker count.
CenterResult center_estimate(const MixtureConfig& config,
                             const CenterSet& centers, std::int64_t samples,
                             std::uint64_t seed, bool parallel) {
    const std::int64_t nchunks = (samples + kChunk - 1) / kChunk;
    std::vector<SampleStat> stats(static_cast<std::size_t>(nchunks));
    auto body = [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        stats[static_cast<std::size_t>(c)] =
            run_chunk(config, centers, e - b,
                      derive_seed(seed, static_cast<std::uint64_t>(c)));
    };
    if (parallel) {
        for_each_chunk(samples, kChunk, body);
    } else {
        for (std::int64_t c = 0; c < nchunks; ++c)
            body(c, c * kChunk, std::min((c + 1) * kChunk, samples));
    }

    double sum = 0.0, sumsq = 0.0;
    for (const auto& st : stats) {
        sum += st.sum;
        sumsq += st.sumsq;
    }
    const double nn = static_cast<double>(samples);
    CenterResult r;
    r.mean = sum / nn;
    r.var = std::max(0.0, (sumsq - nn * r.mean * r.mean) / (nn - 1.0));
    return r;
}

}  // namespace

void McSettings::validate() const {
    if (samples_per_center < 1000)
        throw std::invalid_argument(
            "McSettings: samples_per_center must be >= 1000");
    if (center_draws < 1)
        throw std::invalid_argument("McSettings: center_draws must be >= 1");
    if (samples_per_center > max_total_samples / center_draws)
        throw std::invalid_argument(
            "McSettings: samples_per_center * center_draws exceeds the "
            "work budget");
}

EntropyEstimate entropy_given_centers(const MixtureConfig& config,
                                      const CenterSet& centers,
                                      const McSettings& settings) {
    config.validate();
    settings.validate();
    const std::int64_t n = settings.samples_per_center;
    const CenterResult r =
        center_estimate(config, centers, n, settings.seed, /*parallel=*/true);

    EntropyEstimate est;
    est.value = r.mean;
    est.std_err = std::sqrt(r.var / static_cast<double>(n));
    est.method = Method::MonteCarlo;
    est.samples_per_center = n;
    est.center_draws = 1;
    est.seed = settings.seed;
    return est;
}

AverageEntropyReport average_entropy_with_bound(const MixtureConfig& config,
                                                const McSettings& settings) {
    config.validate();
    settings.validate();
    const std::int64_t m = settings.center_draws;
    const std::int64_t n = settings.samples_per_center;

    // One chunk per center draw; centers and points get independent derived
    // streams, and the combination below runs in center order.
    std::vector<CenterResult> results(static_cast<std::size_t>(m));
    for_each_chunk(m, 1, [&](std::int64_t c, std::int64_t, std::int64_t) {
        const auto uc = static_cast<std::uint64_t>(c);
        const CenterSet centers =
            sample_centers(config, derive_seed(settings.seed, 2 * uc));
        CenterResult r =
            center_estimate(config, centers, n,
                            derive_seed(settings.seed, 2 * uc + 1),
                            /*parallel=*/false);
        r.bound = gaussian_bound(config, centers);
        results[static_cast<std::size_t>(c)] = r;
    });

    double mean_sum = 0.0, mean_sumsq = 0.0, var_sum = 0.0, bound_sum = 0.0;
    for (const auto& r : results) {
        mean_sum += r.mean;
        mean_sumsq += r.mean * r.mean;
        var_sum += r.var;
        bound_sum += r.bound;
    }
    const double md = static_cast<double>(m);
    const double grand = mean_sum / md;
    const double between =
        (m > 1)
            ? std::max(0.0, (mean_sumsq - md * grand * grand) / (md - 1.0))
            : 0.0;
    const double within_of_mean =
        (var_sum / md) / static_cast<double>(n);  // avg Var(center mean)
    // Conservative total: between-center spread of the per-center means plus
    // the average within-center contribution, both divided by m.
    const double se = std::sqrt((between + within_of_mean) / md);

    AverageEntropyReport rep;
    rep.entropy.value = grand;
    rep.entropy.std_err = se;
    rep.entropy.method = Method::MonteCarlo;
    rep.entropy.samples_per_center = n;
    rep.entropy.center_draws = m;
    rep.entropy.seed = settings.seed;
    rep.mean_gaussian_bound = bound_sum / md;
    return rep;
}

EntropyEstimate average_entropy(const MixtureConfig& config,
                                const McSettings& settings) {
    return average_entropy_with_bound(config, settings).entropy;
}

double gaussian_bound(const MixtureConfig& config, const CenterSet& centers) {
    config.validate();
    if (centers.dim() != config.n || centers.count() != config.q)
        throw std::invalid_argument("gaussian_bound: bad centers shape");
    const Eigen::VectorXd mean = centers.w.rowwise().mean();
    Eigen::MatrixXd sigma =
        (centers.w * centers.w.transpose()) / static_cast<double>(config.q) -
        mean * mean.transpose();
    sigma += config.sigma2 * Eigen::MatrixXd::Identity(config.n, config.n);

    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::logic_error(
            "gaussian_bound: covariance not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < config.n; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return 0.5 * config.n * std::log(kTwoPi * std::exp(1.0)) + 0.5 * logdet;
}

double component_bound(const MixtureConfig& config) {
    config.validate();
    return config.n * config.h_sigma() +
           std::log(static_cast<double>(config.q));
}

}  // namespace gme::oracle
