// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gme/cli.hpp"
#include "gme/mixture.hpp"
#include "gme/oracle.hpp"
#include "gme/rng.hpp"
#include "gme/series_brute.hpp"
#include "gme/series_det.hpp"
#include "gme/spectral.hpp"

namespace br = gme::brute;
namespace dt = gme::det;
namespace oc = gme::oracle;
namespace sp = gme::spectral;
using gme::CenterSet;
using gme::MixtureConfig;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool pass,
            const std::string& detail, double seconds) {
    if (!pass) ++g_failures;
    std::printf("[%s] %2d. %-28s %s (%.2f s)\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

class Timer {
public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_spectral() {
    Timer timer;
    double worst_orth = 0, worst_diag = 0, worst_ident = 0;
    for (int q = 2; q <= 16; ++q) {
        for (const double mu : {1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.5}) {
            const auto sd = sp::eigenbasis(q, mu);
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
            worst_orth = std::max(
                worst_orth,
                (sd.basis.transpose() * sd.basis - eye).cwiseAbs().maxCoeff());
            Eigen::VectorXd dv = Eigen::VectorXd::Ones(q);
            dv[q - 2] = sd.m1;
            dv[q - 1] = sd.m2;
            worst_diag = std::max(
                worst_diag, (sd.basis.transpose() * sp::m_matrix(q, mu) *
                                 sd.basis -
                             Eigen::MatrixXd(dv.asDiagonal()))
                                .cwiseAbs()
                                .maxCoeff());
            worst_ident =
                std::max(worst_ident, sp::identity_suite(q, mu));
        }
    }
    const bool pass =
        worst_orth < 1e-12 && worst_diag < 1e-11 && worst_ident < 1e-10;
    report(1, "spectral exactness", pass,
           "orth " + fmt(worst_orth) + ", diag " + fmt(worst_diag) +
               ", identities " + fmt(worst_ident),
           timer.seconds());
}

void criterion_2_determinants() {
    Timer timer;
    double worst = 0;
    auto track = [&worst](double closed, double numeric) {
        worst = std::max(worst, std::abs(closed - numeric) /
                                    std::max(1e-300, std::abs(closed)));
    };
    for (int q = 3; q <= 10; ++q) {
        for (const double mu : {1e-3, 1e-2, 0.1}) {
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
            const Eigen::MatrixXd p = dt::build_p(q, mu).entries;
            std::vector<Eigen::MatrixXd> qs;
            for (int ell = 1; ell <= q - 1; ++ell)
                qs.push_back(dt::build_q(q, mu, ell).entries);
            for (int t = 1; t <= 3; ++t) {
                track(dt::det_ip(q, mu, t), dt::determinant_lu(eye + t * p));
                for (const auto& qm : qs)
                    track(dt::det_iq(q, mu, t),
                          dt::determinant_lu(eye + t * qm));
            }
            for (std::size_t i = 0; i < qs.size(); ++i) {
                track(dt::det_ipq(q, mu),
                      dt::determinant_lu(eye + p + qs[i]));
                for (std::size_t j = 0; j < qs.size(); ++j) {
                    if (i == j) continue;
                    track(dt::det_iqq(q, mu),
                          dt::determinant_lu(eye + qs[i] + qs[j]));
                }
            }
        }
    }
    report(2, "determinant equivalence", worst < 1e-11,
           "max relative error " + fmt(worst), timer.seconds());
}

void criterion_3_moments() {
    Timer timer;
    const std::pair<int, int> configs[] = {{1, 2}, {2, 3}, {3, 5}, {4, 8}};
    const std::int64_t samples = 1000000;
    double worst_sigma = 0;
    bool pass = true;
    std::uint64_t stream = 0;
    for (const auto& [n, q] : configs) {
        for (int i = 0; i < br::kMomentCount; ++i) {
            const auto name = static_cast<br::MomentName>(i);
            const double closed = br::moment_closed_form(name, n, q);
            const auto est = br::moment_mc(name, n, q, samples,
                                           gme::derive_seed(90210, stream++));
            if (est.std_err == 0.0) {
                if (est.mean != closed) pass = false;
                continue;
            }
            const double dev = std::abs(est.mean - closed) / est.std_err;
            worst_sigma = std::max(worst_sigma, dev);
        }
    }
    pass = pass && worst_sigma < 5.0;
    report(3, "moment table vs MC", pass,
           "worst deviation " + fmt(worst_sigma) + " sigma",
           timer.seconds());
}

void criterion_4_coefficients() {
    Timer timer;
    double worst = 0;
    bool pass = true;
    for (int q = 2; q <= 12; ++q) {
        for (int n = 1; n <= q; ++n) {
            try {
                const auto c = br::series_coefficients(n, q);
                const double c1 =
                    n * (2.0 * q - 1.0) / (2.0 * q * (q - 1.0));
                const double c2 = n * (n + q) * (q - 1.0) / (4.0 * q * q);
                worst = std::max(worst,
                                 std::abs(c.c1_expect - c1) / std::abs(c1));
                worst = std::max(worst,
                                 std::abs(c.c2_expect - c2) / std::abs(c2));
            } catch (const std::exception&) {
                pass = false;
            }
        }
    }
    pass = pass && worst <= 1e-9;
    report(4, "coefficient assembly", pass,
           "max relative mismatch " + fmt(worst), timer.seconds());
}

void criterion_5_z_leading() {
    Timer timer;
    bool pass = true;
    double worst_lo = 10, worst_hi = 0;
    for (const auto& [n, q] :
         {std::pair{2, 3}, std::pair{4, 4}, std::pair{3, 6}}) {
        auto e1 = [&](double mu) {
            return std::abs(dt::z1(n, q, mu) / mu + double(n) / (q - 1));
        };
        auto e2 = [&](double mu) {
            return std::abs(dt::z2(n, q, mu) / mu -
                            0.5 * n / (double(q) * (q - 1)));
        };
        for (auto& e : {std::function<double(double)>(e1),
                        std::function<double(double)>(e2)}) {
            const double ratio = e(1e-2) / e(5e-3);
            worst_lo = std::min(worst_lo, ratio);
            worst_hi = std::max(worst_hi, ratio);
            if (ratio < 2.0 * 0.7 || ratio > 2.0 * 1.3) pass = false;
        }
    }
    report(5, "Z1/Z2 leading orders", pass,
           "halving ratios in [" + fmt(worst_lo) + ", " + fmt(worst_hi) +
               "], want [1.4, 2.6]",
           timer.seconds());
}

void criterion_6_brute_det_consistency() {
    Timer timer;
    double worst = 0;
    bool pass = true;
    for (const auto& [n, q] :
         {std::pair{2, 3}, std::pair{4, 4}, std::pair{3, 6}}) {
        for (const double mu : {1e-3, 2e-3, 5e-3, 1e-2}) {
            const MixtureConfig cfg{n, q, 1.0, mu};
            const double hdet = dt::entropy_det(cfg).value;
            const double h1 = br::entropy_series(cfg, 1).value;
            const double ratio = std::abs(hdet - h1) / (10.0 * n * mu * mu);
            worst = std::max(worst, ratio);
            if (ratio > 1.0) pass = false;
        }
    }
    report(6, "brute/determinant agreement", pass,
           "max |h_det - h1| / (10 n mu^2) = " + fmt(worst),
           timer.seconds());
}

double fit_exponent(const std::vector<double>& mu, const std::vector<double>& d,
                    const std::vector<double>& se) {
    double best_chi = 1e300, best_p = 0;
    for (double p = 0.25; p <= 8.0 + 1e-12; p += 0.0125) {
        double swf = 0, sff = 0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double w = 1.0 / (se[i] * se[i]);
            const double f = std::pow(mu[i], p);
            swf += w * d[i] * f;
            sff += w * f * f;
        }
        const double c = swf / sff;
        double chi = 0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const double f = std::pow(mu[i], p);
            const double r = (d[i] - c * f) / se[i];
            chi += r * r;
        }
        if (chi < best_chi) {
            best_chi = chi;
            best_p = p;
        }
    }
    return best_p;
}

void criterion_7_series_vs_mc() {
    Timer timer;
    const std::vector<double> grid{0.05, 0.10, 0.15};
    const std::uint64_t seed = 4;
    std::vector<double> resid, se;
    bool points_pass = true;
    std::string points;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const MixtureConfig cfg{3, 3, 1.0, grid[i]};
        oc::McSettings ms;
        ms.samples_per_center = 200000;
        ms.center_draws = 400;
        ms.seed = gme::derive_seed(seed, i);
        const auto mc = oc::average_entropy(cfg, ms);
        const double series = br::entropy_series(cfg, 2).value;
        const double d = mc.value - series;
        const double tol = std::max(4.0 * mc.std_err,
                                    10.0 * 3.0 * std::pow(grid[i], 3.0));
        if (std::abs(d) > tol) points_pass = false;
        resid.push_back(d);
        se.push_back(mc.std_err);
        points += (i ? ", " : "") + fmt(d) + "+-" + fmt(mc.std_err);
    }
    const double p = fit_exponent(grid, resid, se);
    const bool fit_pass = p >= 2.0 && p <= 4.0;
    report(7, "series vs MC (n=q=3)", points_pass && fit_pass,
           "residuals " + points + "; fitted exponent " + fmt(p),
           timer.seconds());
}

void criterion_8_bounds() {
    Timer timer;
    bool pass = true;
    double worst_gap = -1e300;
    for (int q = 2; q <= 10; ++q) {
        for (const double mu : {1.0 / q, 0.5 / q}) {
            const MixtureConfig cfg{q, q, 1.0, mu};
            const double series = br::entropy_series(cfg, 2).value;
            const double bound = q * cfg.h_sigma() + std::log(double(q));
            worst_gap = std::max(worst_gap, series - bound);
            if (series > bound + 1e-12) pass = false;
        }
    }

    // randomized desk cases against both bounds
    std::uint64_t seed = 606;
    for (const auto& [n, q, mu] :
         {std::tuple{1, 2, 0.3}, std::tuple{2, 3, 0.25}, std::tuple{3, 4, 0.15},
          std::tuple{2, 5, 0.2}}) {
        const MixtureConfig cfg{n, q, 1.0, mu};
        const CenterSet centers = gme::sample_centers(cfg, seed++);
        oc::McSettings ms;
        ms.samples_per_center = 100000;
        ms.seed = seed++;
        const auto est = oc::entropy_given_centers(cfg, centers, ms);
        if (est.value > oc::gaussian_bound(cfg, centers) + 4 * est.std_err)
            pass = false;
        if (est.value > oc::component_bound(cfg) + 4 * est.std_err)
            pass = false;
    }
    report(8, "bound ordering", pass,
           "max series2 - component bound = " + fmt(worst_gap),
           timer.seconds());
}

void criterion_9_reduction() {
    Timer timer;
    const double mu = 0.25;
    const MixtureConfig full_cfg{7, 4, 1.0, mu};
    const MixtureConfig red_cfg{4, 4, 1.0, mu};
    const double offset = gme::reduce_dimension(full_cfg).offset;

    // As stated: ensemble average of the full problem vs ensemble average of
    // the reduced problem plus the offset.
    oc::McSettings ms;
    ms.samples_per_center = 40000;
    ms.center_draws = 250;
    ms.seed = 707;
    const auto full = oc::average_entropy(full_cfg, ms);
    ms.seed = 708;
    const auto reduced = oc::average_entropy(red_cfg, ms);
    const double diff = full.value - (reduced.value + offset);
    const double comb = std::sqrt(full.std_err * full.std_err +
                                  reduced.std_err * reduced.std_err);
    const bool ensemble_pass = std::abs(diff) < 4 * comb;

    // The per-configuration identity behind the reduction: project each
    // center draw onto its span (thin QR preserves the Gram matrix) and
    // compare h(X|w) directly. This form is exact.
    double per_cfg_worst = 0;
    bool per_cfg_pass = true;
    for (int k = 0; k < 4; ++k) {
        const CenterSet centers =
            gme::sample_centers(full_cfg, 900 + static_cast<std::uint64_t>(k));
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(centers.w);
        const Eigen::MatrixXd r =
            qr.matrixQR().topRows(4).triangularView<Eigen::Upper>();
        oc::McSettings one;
        one.samples_per_center = 150000;
        one.seed = 910 + static_cast<std::uint64_t>(k);
        const auto h_full = oc::entropy_given_centers(full_cfg, centers, one);
        one.seed = 950 + static_cast<std::uint64_t>(k);
        const auto h_red =
            oc::entropy_given_centers(red_cfg, CenterSet{r}, one);
        const double d = h_full.value - (h_red.value + offset);
        const double c = 4 * std::sqrt(h_full.std_err * h_full.std_err +
                                       h_red.std_err * h_red.std_err);
        per_cfg_worst = std::max(per_cfg_worst, std::abs(d) / c);
        if (std::abs(d) > c) per_cfg_pass = false;
    }

    report(9, "dimensional reduction", ensemble_pass,
           "ensemble difference " + fmt(diff) + " vs 4*stderr " +
               fmt(4 * comb) + "; per-configuration identity " +
               (per_cfg_pass ? "holds" : "FAILS") + " (worst " +
               fmt(per_cfg_worst) + " of allowance)",
           timer.seconds());
    if (!ensemble_pass && per_cfg_pass) {
        std::printf(
            "          note: redrawing centers in the reduced dimension "
            "tightens their geometry, so the ensemble identity cannot hold; "
            "the exact per-configuration identity above does.\n");
    }
}

void criterion_10_determinism() {
    Timer timer;
    const std::vector<std::string> args{
        "sweep", "--n", "3",       "--q",           "3",  "--mu-grid",
        "0.05:0.15:0.05", "--samples", "20000", "--center-draws",
        "50",    "--seed", "7"};
    auto run_once = [&args] {
        std::ostringstream out, err;
        const int code = gme::cli::run(args, out, err);
        return std::pair<int, std::string>(code, out.str());
    };
    const auto first = run_once();
    const auto second = run_once();
    setenv("GME_THREADS", "1", 1);
    const auto single = run_once();
    setenv("GME_THREADS", "4", 1);
    const auto quad = run_once();
    unsetenv("GME_THREADS");
    const bool pass = first.first == 0 && first.second == second.second &&
                      first.second == single.second &&
                      first.second == quad.second;
    report(10, "sweep determinism", pass,
           pass ? "byte-identical across reruns and 1 vs 4 workers"
                : "outputs differ",
           timer.seconds());
}

}  // namespace

int main() {
    Timer total;
    criterion_1_spectral();
    criterion_2_determinants();
    criterion_3_moments();
    criterion_4_coefficients();
    criterion_5_z_leading();
    criterion_6_brute_det_consistency();
    criterion_7_series_vs_mc();
    criterion_8_bounds();
    criterion_9_reduction();
    criterion_10_determinism();
    std::printf("%s: %d criteria failed (total %.1f s)\n",
                g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}
