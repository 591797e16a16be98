#pragma once

#include <Eigen/Dense>

namespace gme::spectral {

/// Closed-form eigenvalues of the coupling matrix C^(q) and derived scalars.
/// lambda1 takes the + branch of the quadratic, so lambda1 >= lambda2 always;
/// m_j = lambda_j + 1 and x_j = 1 - q*m_j.
struct EigenvaluePair {
    double lambda1, lambda2;
    double m1, m2;
    double x1, x2;
};

/// The q x q coupling matrix C^(q) = -J/q + mu * diag(e_q).
Eigen::MatrixXd coupling_matrix(int q, double mu);

/// M^(q) = I + C^(q).
Eigen::MatrixXd m_matrix(int q, double mu);

/// The mu-independent alpha eigenvectors (eigenvalue 0), as the q x (q-2)
/// matrix whose column i has entries 1/sqrt((i+1)(i+2)) * (1 below row i+1,
/// -(i+1) at row i+1, 0 above), 0-based.
Eigen::MatrixXd alpha_matrix(int q);

/// Requires q >= 2 and mu >= 0. The discriminant is grouped as
/// mu^2 + (2 - 4/q) mu + 1, and m2, lambda1 use rationalized forms, so small
/// mu loses no precision to cancellation.
EigenvaluePair eigenvalues(int q, double mu);

/// Full orthogonal eigenbasis Lambda^(q) with columns
/// (alpha_1, ..., alpha_{q-2}, beta_1, beta_2).
struct SpectralDecomposition {
    int q;
    double mu;
    double lambda1, lambda2;
    double m1, m2;
    double x1, x2;
    Eigen::MatrixXd basis;
};

/// Requires mu > 0 (m2 = 0 at mu = 0 degenerates the beta normalization
/// downstream; use eigenvalues() there instead). Throws std::domain_error.
SpectralDecomposition eigenbasis(int q, double mu);

/// Max absolute residual over the eight algebraic identities tying
/// m_j, x_j, mu, q together (the 1/mu identity is scaled by mu so residuals
/// stay comparable). Requires q >= 2, mu > 0.
double identity_suite(int q, double mu);

/// The 2x2 mixing matrix of the third change of variables; orthogonal with
/// det = -1.
struct MixingMatrix {
    Eigen::Matrix2d w;
};

/// Requires q >= 2, mu > 0. Throws std::domain_error at mu = 0.
MixingMatrix mixing_matrix(int q, double mu);

}  // namespace gme::spectral
