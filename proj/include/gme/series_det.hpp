#pragma once

#include <Eigen/Dense>
#include <span>

#include "gme/mixture.hpp"

namespace gme::det {

/// Symmetric q x q quadratic-form matrix of the determinant approach, in the
/// standardized variable order (u_1, ..., u_{q-2}, r, s):
///   a^T P a = 2 mu T   and   a^T Q_l a = mu G_l.
/// P is nonzero only in the trailing 2x2 block; Q_l is the rank-one block
/// mu w_l w_l^T plus the sqrt(mu) coupling in row/column q-1.
struct QuadraticFormMatrix {
    enum class Kind { P, Q };
    Kind kind = Kind::P;
    int ell = 0;  ///< 1..q-1 for Q, unused for P
    int q = 0;
    double mu = 0.0;
    Eigen::MatrixXd entries;
};

/// Requires q >= 2, mu > 0.
QuadraticFormMatrix build_p(int q, double mu);

/// Requires q >= 2, mu > 0, ell in 1..q-1. At q = 2 the matrix is
/// identically zero (no alpha components).
QuadraticFormMatrix build_q(int q, double mu, int ell);

/// The four closed-form determinants (t >= 1; the Q forms are independent of
/// which ell is chosen).
double det_ip(int q, double mu, int t);                    ///< det(I + tP)
double det_iq(int q, double mu, int t);                    ///< det(I + tQ_l)
double det_ipq(int q, double mu);                          ///< det(I + P + Q_l)
double det_iqq(int q, double mu);                          ///< det(I + Q_l + Q_l')

enum class DetForm { IP, IQ, IPQ, IQQ };

/// Dispatching wrapper with the shared argument checks: Q forms require
/// q >= 3, IQQ requires ell != ell2 (use IQ with t = 2 for the diagonal).
double det_closed_form(DetForm which, int q, double mu, int t = 1, int ell = 1,
                       int ell2 = 2);

/// Determinant by partial-pivoted LU; valid for any square matrix.
double determinant_lu(const Eigen::MatrixXd& m);

/// det(I + sum of the given quadratic forms) with a positive-definiteness
/// check (Cholesky must succeed, else the sum is outside the mu validity
/// region and std::domain_error is thrown). An empty span gives det(I) = 1.
double det_numeric(std::span<const QuadraticFormMatrix> mats);

/// First two Z-moments of the log expansion, evaluated exactly from the
/// closed-form determinants. Every determinant must exceed 0.5 or
/// std::domain_error is thrown (the series premise is violated and
/// det^{-n/2} amplifies error near zero). Requires n <= q.
double z1(int n, int q, double mu);
double z2(int n, int q, double mu);

/// Order-mu entropy from the determinant route:
///   n h_sigma + (n/2) q/(q-1) mu + z1 + z2.
EntropyEstimate entropy_det(const MixtureConfig& config);

}  // namespace gme::det
