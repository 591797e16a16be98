#pragma once

#include <cstdint>

#include "gme/mixture.hpp"

namespace gme::oracle {

/// Budgets for the plug-in Monte Carlo estimators. Total work is
/// samples_per_center * center_draws and must stay within max_total_samples.
struct McSettings {
    std::int64_t samples_per_center = 100000;  ///< >= 1000
    std::int64_t center_draws = 1;             ///< >= 1
    std::uint64_t seed = 0;
    std::int64_t max_total_samples = 4000000000LL;

    void validate() const;
};

/// Plug-in estimate of h(X | W = w): the mean of -ln f over
/// samples_per_center points drawn from the mixture, with the standard error
/// of that mean. Unbiased since E[-ln f(X)] = h exactly.
EntropyEstimate entropy_given_centers(const MixtureConfig& config,
                                      const CenterSet& centers,
                                      const McSettings& settings);

/// h(X | W): averages the per-center estimate over center_draws independent
/// CenterSet draws. The reported standard error combines the between-center
/// and within-center variances (law-of-total-variance upper estimate, so it
/// is conservative).
EntropyEstimate average_entropy(const MixtureConfig& config,
                                const McSettings& settings);

/// average_entropy together with the Gaussian bound averaged over the same
/// center draws (the bound is per-realization).
struct AverageEntropyReport {
    EntropyEstimate entropy;
    double mean_gaussian_bound = 0.0;
};

AverageEntropyReport average_entropy_with_bound(const MixtureConfig& config,
                                                const McSettings& settings);

/// Maximum-entropy (Gaussian) upper bound for one realization:
/// (n/2) ln 2 pi e + (1/2) ln det Sigma with
/// Sigma = (1/q) sum_i (w_i w_i^T + sigma2 I) - wbar wbar^T.
double gaussian_bound(const MixtureConfig& config, const CenterSet& centers);

/// Component-entropy upper bound n h_sigma + ln q (equal weights, isotropic
/// covariance).
double component_bound(const MixtureConfig& config);

}  // namespace gme::oracle
