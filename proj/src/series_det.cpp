#include "gme/series_det.hpp"

#include <cmath>
#include <stdexcept>

#include "gme/spectral.hpp"

namespace gme::det {

namespace {

void require_params(int q, double mu) {
    if (q < 2) throw std::invalid_argument("series-det: q must be >= 2");
    if (!(mu > 0.0)) throw std::domain_error("series-det: mu must be > 0");
}

void require_ell(int q, int ell) {
    if (ell < 1 || ell > q - 1)
        throw std::invalid_argument("series-det: ell must be in 1..q-1");
}

/// Refuses determinants at or below 0.5: det^{-n/2} amplifies rounding near
/// zero and the small-mu premise no longer holds there.
double checked_pow(double d, double n, const char* what) {
    if (!(d > 0.5))
        throw std::domain_error(std::string("series-det: ") + what +
                                " <= 0.5; mu is outside the validity region");
    return std::pow(d, -0.5 * n);
}

}  // namespace

QuadraticFormMatrix build_p(int q, double mu) {
    require_params(q, mu);
    const double g = mu * q / (q - 1.0);  // mu q/(q-1)
    const double pref = 1.0 / (1.0 + g);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(q, q);
    p(q - 1, q - 1) = pref * g;
    p(q - 2, q - 2) = -pref * g * (2.0 + g);
    p(q - 1, q - 2) = pref * std::sqrt(mu) * std::sqrt(q / (q - 1.0));
    p(q - 2, q - 1) = p(q - 1, q - 2);
    return QuadraticFormMatrix{QuadraticFormMatrix::Kind::P, 0, q, mu,
                               std::move(p)};
}

QuadraticFormMatrix build_q(int q, double mu, int ell) {
    require_params(q, mu);
    require_ell(q, ell);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, q);
    if (q > 2) {
        // omega_{m,ell} = alpha_{m,ell} for m <= q-2, else 0.
        const Eigen::MatrixXd alpha = spectral::alpha_matrix(q);
        Eigen::VectorXd omega = Eigen::VectorXd::Zero(q);
        omega.head(q - 2) = alpha.row(ell - 1).transpose();
        const double coup =
            std::sqrt(mu) * std::sqrt(1.0 + mu * q / (q - 1.0));
        m = mu * omega * omega.transpose();
        m.col(q - 2) += coup * omega;
        m.row(q - 2) += coup * omega.transpose();
    }
    return QuadraticFormMatrix{QuadraticFormMatrix::Kind::Q, ell, q, mu,
                               std::move(m)};
}

double det_ip(int q, double mu, int t) {
    return 1.0 - mu * t * (t + 1.0) * q / (q - 1.0);
}

double det_iq(int q, double mu, int t) {
    return 1.0 - mu * t * (t - 1.0) * (q - 2.0) / (q - 1.0) -
           t * t * mu * mu * q * (q - 2.0) / ((q - 1.0) * (q - 1.0));
}

double det_ipq(int q, double mu) {
    return 1.0 - mu * 2.0 * q / (q - 1.0) -
           mu * mu * 4.0 * q * (q - 2.0) / ((q - 1.0) * (q - 1.0));
}

double det_iqq(int q, double mu) {
    const double d = (q - 1.0) * (q - 1.0);
    return 1.0 + mu * 2.0 / (q - 1.0) -
           mu * mu * (3.0 * q - 1.0) * (q - 3.0) / d -
           mu * mu * mu * 2.0 * q * (q - 3.0) / d;
}

double det_closed_form(DetForm which, int q, double mu, int t, int ell,
                       int ell2) {
    require_params(q, mu);
    if (t < 1) throw std::invalid_argument("det_closed_form: t must be >= 1");
    if (which != DetForm::IP) {
        if (q < 3)
            throw std::invalid_argument(
                "det_closed_form: Q forms require q >= 3");
        require_ell(q, ell);
    }
    switch (which) {
        case DetForm::IP:
            return det_ip(q, mu, t);
        case DetForm::IQ:
            return det_iq(q, mu, t);
        case DetForm::IPQ:
            return det_ipq(q, mu);
        case DetForm::IQQ:
            require_ell(q, ell2);
            if (ell == ell2)
                throw std::invalid_argument(
                    "det_closed_form: IQQ requires ell != ell'; use IQ with "
                    "t = 2 for the diagonal");
            return det_iqq(q, mu);
    }
    throw std::logic_error("det_closed_form: unknown form");
}

double determinant_lu(const Eigen::MatrixXd& m) {
    return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

double det_numeric(std::span<const QuadraticFormMatrix> mats) {
    if (mats.empty()) return 1.0;
    const int q = mats.front().q;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(q, q);
    for (const auto& m : mats) {
        if (m.q != q)
            throw std::invalid_argument("det_numeric: mismatched sizes");
        sum += m.entries;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sum);
    if (llt.info() != Eigen::Success)
        throw std::domain_error(
            "det_numeric: I + sum is not positive definite; mu is outside "
            "the validity region");
    return determinant_lu(sum);
}

double z1(int n, int q, double mu) {
    if (n < 1 || n > q) throw std::invalid_argument("z1: requires 1 <= n <= q");
    if (q < 2) throw std::invalid_argument("z1: q must be >= 2");
    if (mu == 0.0) return 0.0;
    const double nd = n;
    const double qd = q;
    // Q vanishes at q = 2, so its determinant is exactly 1 there.
    const double dq1 = (q > 2) ? det_iq(q, mu, 1) : 1.0;
    return 1.0 - (qd - 1.0) / qd * checked_pow(dq1, nd, "det(I+Q)") -
           (1.0 / qd) * checked_pow(det_ip(q, mu, 1), nd, "det(I+P)");
}

double z2(int n, int q, double mu) {
    if (n < 1 || n > q) throw std::invalid_argument("z2: requires 1 <= n <= q");
    if (q < 2) throw std::invalid_argument("z2: q must be >= 2");
    if (mu == 0.0) return 0.0;
    const double nd = n;
    const double qd = q;
    const double q2 = qd * qd;

    const double dq1 = (q > 2) ? det_iq(q, mu, 1) : 1.0;
    const double dq2 = (q > 2) ? det_iq(q, mu, 2) : 1.0;
    const double dpq = (q > 2) ? det_ipq(q, mu) : det_ip(q, mu, 1);
    const double dp1 = det_ip(q, mu, 1);
    const double dp2 = det_ip(q, mu, 2);

    double v = 0.5;
    v -= (qd - 1.0) / qd * checked_pow(dq1, nd, "det(I+Q)");
    v -= (1.0 / qd) * checked_pow(dp1, nd, "det(I+P)");
    v += (qd - 1.0) / q2 * checked_pow(dpq, nd, "det(I+P+Q)");
    // Double l-sum: (q-1)(q-2) off-diagonal pairs plus q-1 diagonal terms.
    if (q > 2) {
        v += (qd - 1.0) * (qd - 2.0) / (2.0 * q2) *
             checked_pow(det_iqq(q, mu), nd, "det(I+Q+Q')");
    }
    v += (qd - 1.0) / (2.0 * q2) * checked_pow(dq2, nd, "det(I+2Q)");
    v += 1.0 / (2.0 * q2) * checked_pow(dp2, nd, "det(I+2P)");
    return v;
}

EntropyEstimate entropy_det(const MixtureConfig& config) {
    config.validate();
    if (config.n > config.q)
        throw std::invalid_argument(
            "entropy_det: requires n <= q; apply reduce_dimension first");
    const double n = config.n;
    const double q = config.q;
    const double mu = config.mu;

    EntropyEstimate est;
    est.value = n * config.h_sigma() + 0.5 * n * q / (q - 1.0) * mu +
                z1(config.n, config.q, mu) + z2(config.n, config.q, mu);
    est.std_err = 0.0;
    est.method = Method::SeriesDet;
    est.order = 1;
    return est;
}

}  // namespace gme::det
