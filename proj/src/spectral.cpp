#include "gme/spectral.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace gme::spectral {

namespace {

void require_q(int q) {
    if (q < 2) throw std::invalid_argument("spectral: q must be >= 2");
}

void require_positive_mu(double mu) {
    if (!(mu > 0.0))
        throw std::domain_error(
            "spectral: mu must be > 0 (m2 = 0 degenerates the basis)");
}

}  // namespace

Eigen::MatrixXd coupling_matrix(int q, double mu) {
    require_q(q);
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(q, q, -1.0 / q);
    c(q - 1, q - 1) += mu;
    return c;
}

Eigen::MatrixXd m_matrix(int q, double mu) {
    Eigen::MatrixXd m = coupling_matrix(q, mu);
    m += Eigen::MatrixXd::Identity(q, q);
    return m;
}

Eigen::MatrixXd alpha_matrix(int q) {
    require_q(q);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q - 2);
    for (int i = 1; i <= q - 2; ++i) {
        const double norm = std::sqrt(static_cast<double>(i) * (i + 1));
        for (int k = 1; k < i + 1; ++k) a(k - 1, i - 1) = 1.0 / norm;
        a(i, i - 1) = -i / norm;
    }
    return a;
}

EigenvaluePair eigenvalues(int q, double mu) {
    require_q(q);
    if (!(mu >= 0.0))
        throw std::invalid_argument("spectral: mu must be >= 0");
    const double b = 2.0 - 4.0 / q;  // >= 0 for q >= 2
    const double disc = mu * mu + b * mu + 1.0;
    assert(disc >= 0.0);
    const double root = std::sqrt(disc);

    EigenvaluePair ev{};
    // m1 = (mu + 1 + root)/2 directly; m2 rationalized via
    // (mu+1)^2 - disc = 4 mu / q, lambda1 rationalized via
    // disc - 1 = mu (mu + b). Both avoid cancellation at small mu.
    ev.m1 = 0.5 * (mu + 1.0 + root);
    ev.m2 = 2.0 * mu / (q * (mu + 1.0 + root));
    ev.lambda1 = 0.5 * mu * (1.0 + (mu + b) / (1.0 + root));
    ev.lambda2 = ev.m2 - 1.0;
    ev.x1 = 1.0 - q * ev.m1;
    ev.x2 = 1.0 - q * ev.m2;
    return ev;
}

SpectralDecomposition eigenbasis(int q, double mu) {
    require_q(q);
    require_positive_mu(mu);
    const EigenvaluePair ev = eigenvalues(q, mu);

    Eigen::MatrixXd basis(q, q);
    basis.setZero();
    if (q > 2) basis.leftCols(q - 2) = alpha_matrix(q);

    const double x[2] = {ev.x1, ev.x2};
    for (int j = 0; j < 2; ++j) {
        const double norm = std::sqrt(q - 1.0 + x[j] * x[j]);
        for (int k = 0; k < q - 1; ++k) basis(k, q - 2 + j) = 1.0 / norm;
        basis(q - 1, q - 2 + j) = x[j] / norm;
    }

    return SpectralDecomposition{q,     mu,    ev.lambda1, ev.lambda2, ev.m1,
                                 ev.m2, ev.x1, ev.x2,      std::move(basis)};
}

double identity_suite(int q, double mu) {
    require_q(q);
    require_positive_mu(mu);
    const EigenvaluePair ev = eigenvalues(q, mu);
    const double n1 = q - 1.0 + ev.x1 * ev.x1;
    const double n2 = q - 1.0 + ev.x2 * ev.x2;

    double r = 0.0;
    auto track = [&r](double lhs, double rhs) {
        const double d = std::abs(lhs - rhs);
        if (d > r) r = d;
    };
    track(ev.m1 * ev.m2, mu / q);
    track(ev.m1 + ev.m2, mu + 1.0);
    track(ev.x1 + ev.x2, -q * (mu + 1.0) + 2.0);
    track(ev.x1 * ev.x2, 1.0 - q);
    track((mu / ev.m1) / n1 + (mu / ev.m2) / n2, 1.0 + mu * q / (q - 1.0));
    track(((ev.x1 * ev.x1 - 1.0) / ev.m1) / n1 +
              ((ev.x2 * ev.x2 - 1.0) / ev.m2) / n2,
          q / (1.0 - q));
    track(((ev.x1 * ev.x1 - 1.0) * (ev.x2 * ev.x2 - 1.0) -
           static_cast<double>(q) * q) /
              (n1 * n2),
          1.0 / (1.0 - q));
    // The 1/mu identity, scaled by mu so its residual is comparable.
    track(mu * ((ev.x1 / ev.m1) / n1 + (ev.x2 / ev.m2) / n2), 1.0);
    return r;
}

MixingMatrix mixing_matrix(int q, double mu) {
    require_q(q);
    require_positive_mu(mu);
    const EigenvaluePair ev = eigenvalues(q, mu);
    const double pref = 1.0 / std::sqrt(1.0 / mu + q / (q - 1.0));
    const double a =
        (1.0 / std::sqrt(ev.m2)) / std::sqrt(q - 1.0 + ev.x2 * ev.x2);
    const double b =
        (1.0 / std::sqrt(ev.m1)) / std::sqrt(q - 1.0 + ev.x1 * ev.x1);
    MixingMatrix w;
    w.w << pref * a, pref * b, pref * b, -pref * a;
    return w;
}

}  // namespace gme::spectral
