#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gme {

/// Problem parameters of the random mixture ensemble: q equal-weight Gaussian
/// components with covariance sigma2*I in R^n, centers i.i.d. N(0, s2*I) with
/// s2 = mu * sigma2.
struct MixtureConfig {
    int n = 1;            ///< dimension
    int q = 2;            ///< component count
    double sigma2 = 1.0;  ///< component variance (> 0)
    double mu = 0.0;      ///< s^2 / sigma^2 (>= 0)

    double s2() const { return mu * sigma2; }

    /// Entropy of one coordinate of a component, ln(sigma sqrt(2 pi e)).
    double h_sigma() const;

    /// Throws std::invalid_argument unless n>=1, q>=2, sigma2>0, mu>=0.
    void validate() const;

    /// The power series is effectively in n*mu; callers should warn past 1.
    bool series_converges() const { return n * mu <= 1.0; }
};

/// One realization of the q component centers. Stored column-wise (n x q) in
/// the original frame; column j is w_j.
struct CenterSet {
    Eigen::MatrixXd w;

    int dim() const { return static_cast<int>(w.rows()); }
    int count() const { return static_cast<int>(w.cols()); }
};

enum class Method {
    SeriesBrute,
    SeriesDet,
    MonteCarlo,
    BoundGaussian,
    BoundComponent,
};

std::string to_string(Method m);

/// An entropy value (nats) with provenance. std_err is 0 exactly for
/// deterministic methods.
struct EntropyEstimate {
    double value = 0.0;
    double std_err = 0.0;
    Method method = Method::SeriesBrute;
    std::optional<int> order;
    std::optional<std::int64_t> samples_per_center;
    std::optional<std::int64_t> center_draws;
    std::optional<std::uint64_t> seed;
};

/// ln f(x | centers) for the equal-weight mixture, evaluated with
/// log-sum-exp stabilization. Never -inf or overflowing for finite x.
double log_density(const MixtureConfig& config, const CenterSet& centers,
                   const Eigen::VectorXd& x);

/// Reusable evaluator for hot loops. Holds a scratch buffer, so a single
/// instance must not be shared across threads; give each worker its own.
class LogDensityEvaluator {
public:
    LogDensityEvaluator(const MixtureConfig& config, const CenterSet& centers);

    double operator()(const Eigen::VectorXd& x) const;

private:
    const MixtureConfig config_;
    Eigen::MatrixXd centers_;
    double log_norm_;  // -(n/2) ln(2 pi sigma2) - ln q
    double inv2s_;     // 1 / (2 sigma2)
    mutable std::vector<double> expo_;
};

/// q i.i.d. draws from N(0, s2*I), s2 = mu*sigma2. Deterministic given seed.
CenterSet sample_centers(const MixtureConfig& config, std::uint64_t seed);

/// Draws `count` mixture points: uniform component index, then N(0, sigma2*I)
/// noise. Deterministic given seed.
std::vector<Eigen::VectorXd> sample_mixture(const MixtureConfig& config,
                                            const CenterSet& centers,
                                            std::int64_t count,
                                            std::uint64_t seed);

struct ReducedProblem {
    MixtureConfig config;  ///< n' = min(n, q), other fields unchanged
    double offset = 0.0;   ///< (n - n') * h_sigma, in nats
};

/// The n>q reduction: after a rotation the extra n-q dimensions factor into
/// independent Gaussians, so total entropy = offset + entropy of the reduced
/// problem.
ReducedProblem reduce_dimension(const MixtureConfig& config);

}  // namespace gme
