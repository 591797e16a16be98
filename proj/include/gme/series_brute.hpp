#pragma once

#include <cstdint>
#include <string>

#include "gme/mixture.hpp"

namespace gme::brute {

/// The renamed scalar expressions of the brute-force expansion, built from
/// the standardized variables u_1..u_{q-2}, r, s in R^n and
/// w_l = sum_m alpha_{m,l} u_m:
///   aa = r.r, bb = s.s, ab = r.s,
///   A = sum_l w_l.w_l, B = sum_l (w_l.r)^2, D = sum_l (w_l.w_l)(w_l.r),
///   F = sum_l (w_l.w_l)^2, H = sum_l (w_l.w_l)(w_l.r)^2,
///   M = sum_l (w_l.r)^3, J = sum_l (w_l.r)^4   (all l-sums over 1..q-1),
/// plus the products needed by the c1/c2 assemblies.
enum class MomentName {
    aa, bb, aa2, bb2, aabb, ab2, ab2aa, ab2bb, ab4,
    A, B, A2, B2, AB, aaA, bbA, aaB, bbB, ab2A, ab2B,
    F, H, J, D, M,
};

inline constexpr int kMomentCount = 25;

const char* to_string(MomentName name);
MomentName moment_from_string(const std::string& s);

/// S_alpha = sum_{l=1}^{q-1} (sum_m alpha_{m,l}^2)^2, evaluated from the
/// explicit alpha vectors. Appears in the closed forms of F, H, J.
double alpha_quartic_sum(int q);

/// Exact expectation of the named expression under independent standard
/// normals. D and M vanish by odd symmetry.
double moment_closed_form(MomentName name, int n, int q);

struct MomentEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

/// Monte Carlo estimate of the named expression. Each sample draws, in this
/// order, whatever the name's family needs: u_1..u_{q-2}, then r, then s
/// (names without w skip the u block). Deterministic given seed; sample
/// chunks may run in parallel without changing the result. Names involving
/// w return exactly {0, 0} at q = 2 (empty l-sums).
MomentEstimate moment_mc(MomentName name, int n, int q, std::int64_t samples,
                         std::uint64_t seed);

struct SeriesCoefficients {
    double c1_expect = 0.0;
    double c2_expect = 0.0;
    int n = 0;
    int q = 0;
};

/// Assembles E[c1] and E[c2] term by term from the moment table and checks
/// them against the closed forms n(2q-1)/(2q(q-1)) and n(n+q)(q-1)/(4q^2);
/// a relative mismatch above 1e-9 throws (it would signal a transcription
/// bug in the polynomial).
SeriesCoefficients series_coefficients(int n, int q);

/// The entropy series through order mu^order (order in {0,1,2}):
///   n h_sigma + (n/2)(1 - 1/q) mu - E[c2] mu^2.
/// Also assembled the second way, n h_sigma + (n/2)(q/(q-1)) mu + S with
/// S = -E[c1] mu - E[c2] mu^2; the two routes must agree to 1e-12.
/// Requires n <= q (reduce_dimension first).
EntropyEstimate entropy_series(const MixtureConfig& config, int order);

}  // namespace gme::brute
