#include "gme/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gme/mixture.hpp"
#include "gme/oracle.hpp"
#include "gme/rng.hpp"
#include "gme/series_brute.hpp"
#include "gme/series_det.hpp"
#include "gme/spectral.hpp"

namespace gme::cli {

namespace {

using json = nlohmann::ordered_json;

/// Locale-free, round-trip-safe float formatting (17 significant digits).
std::string fmt17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Short form for human-readable lines.
std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<double> parse_mu_grid(const std::string& text) {
    double start = 0, stop = 0, step = 0;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(text);
    in >> start >> colon1 >> stop >> colon2 >> step;
    if (!in || colon1 != ':' || colon2 != ':' || !(in >> std::ws).eof())
        throw std::invalid_argument(
            "--mu-grid expects start:stop:step, e.g. 0.05:0.15:0.05");
    if (!(step > 0.0) || stop < start || start < 0.0)
        throw std::invalid_argument(
            "--mu-grid requires 0 <= start <= stop and step > 0");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double v = start + k * step;
        if (v > stop + 1e-9 * step) break;
        grid.push_back(v);
    }
    if (grid.empty()) throw std::invalid_argument("--mu-grid is empty");
    return grid;
}

json spec_json(const RunSpec& spec) {
    json j;
    j["command"] = spec.command;
    if (spec.command == "selftest") {
        j["q_max"] = spec.q_max;
        j["samples"] = spec.samples;
        j["seed"] = spec.seed;
    } else {
        j["n"] = spec.n;
        j["q"] = spec.q;
        j["sigma2"] = spec.sigma2;
        if (spec.command == "sweep") {
            j["mu_grid"] = spec.mu_grid;
        } else {
            j["mu"] = spec.mu_grid.front();
        }
        if (spec.command == "approx") {
            j["order"] = spec.order;
            j["method"] = spec.method;
        }
        if (spec.command != "approx") {
            j["samples"] = spec.samples;
            j["center_draws"] = spec.center_draws;
            j["seed"] = spec.seed;
        }
        // mc never reduces; the series-bearing commands do.
        if (spec.n > spec.q && spec.command != "mc") {
            j["reduced_n"] = spec.q;
            j["offset_nats"] = reduce_dimension(MixtureConfig{
                                                    spec.n, spec.q,
                                                    spec.sigma2, 0.0})
                                   .offset;
        }
    }
    j["format"] = spec.format;
    j["out"] = spec.out;
    return j;
}

json estimate_json(const EntropyEstimate& est) {
    json j;
    j["value"] = est.value;
    j["stderr"] = est.std_err;
    j["method"] = to_string(est.method);
    j["order"] = est.order ? json(*est.order) : json(nullptr);
    j["samples_per_center"] =
        est.samples_per_center ? json(*est.samples_per_center) : json(nullptr);
    j["center_draws"] =
        est.center_draws ? json(*est.center_draws) : json(nullptr);
    j["seed"] = est.seed ? json(*est.seed) : json(nullptr);
    return j;
}

struct CompareRow {
    double mu = 0;
    double h0 = 0, h1 = 0, h2 = 0;
    double hdet = 0;
    double hmc = 0, hmc_se = 0;
    double bound_gauss_mean = 0;
    double bound_comp = 0;
    double residual2 = 0;
};

constexpr const char* kCompareHeader =
    "mu,h_series0,h_series1,h_series2,h_det,h_mc,h_mc_stderr,"
    "bound_gauss_mean,bound_component,residual2";

CompareRow compute_row(const MixtureConfig& full, std::int64_t samples,
                       std::int64_t draws, std::uint64_t row_seed) {
    // Series columns require n <= q and go through the reduction; the MC
    // estimator and the bounds are valid for any n and run on the problem
    // as given, so residual2 reports the true series-vs-MC discrepancy.
    const ReducedProblem red = reduce_dimension(full);
    CompareRow row;
    row.mu = full.mu;
    row.h0 = red.offset + brute::entropy_series(red.config, 0).value;
    row.h1 = red.offset + brute::entropy_series(red.config, 1).value;
    row.h2 = red.offset + brute::entropy_series(red.config, 2).value;
    try {
        row.hdet = red.offset + det::entropy_det(red.config).value;
    } catch (const std::domain_error&) {
        row.hdet = std::numeric_limits<double>::quiet_NaN();
    }
    oracle::McSettings ms;
    ms.samples_per_center = samples;
    ms.center_draws = draws;
    ms.seed = row_seed;
    const auto rep = oracle::average_entropy_with_bound(full, ms);
    row.hmc = rep.entropy.value;
    row.hmc_se = rep.entropy.std_err;
    row.bound_gauss_mean = rep.mean_gaussian_bound;
    row.bound_comp = oracle::component_bound(full);
    row.residual2 = row.hmc - row.h2;
    return row;
}

void write_rows_csv(const std::vector<CompareRow>& rows, std::ostream& os) {
    os << kCompareHeader << "\n";
    for (const auto& r : rows) {
        os << fmt17(r.mu) << ',' << fmt17(r.h0) << ',' << fmt17(r.h1) << ','
           << fmt17(r.h2) << ',' << fmt17(r.hdet) << ',' << fmt17(r.hmc)
           << ',' << fmt17(r.hmc_se) << ',' << fmt17(r.bound_gauss_mean)
           << ',' << fmt17(r.bound_comp) << ',' << fmt17(r.residual2)
           << "\n";
    }
}

json row_json(const CompareRow& r) {
    json j;
    j["mu"] = r.mu;
    j["h_series0"] = r.h0;
    j["h_series1"] = r.h1;
    j["h_series2"] = r.h2;
    j["h_det"] = std::isnan(r.hdet) ? json(nullptr) : json(r.hdet);
    j["h_mc"] = r.hmc;
    j["h_mc_stderr"] = r.hmc_se;
    j["bound_gauss_mean"] = r.bound_gauss_mean;
    j["bound_component"] = r.bound_comp;
    j["residual2"] = r.residual2;
    return j;
}

struct SuiteResult {
    std::string name;
    double residual = 0;
    double tolerance = 0;
    bool pass = false;
};

std::vector<SuiteResult> run_selftest(int q_max, std::int64_t samples,
                                      std::uint64_t seed) {
    std::vector<SuiteResult> suites;
    const double mus[] = {1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.5};

    double worst_orth = 0, worst_diag = 0, worst_ident = 0;
    for (int q = 2; q <= std::max(2, q_max); ++q) {
        for (const double mu : mus) {
            const auto sd = spectral::eigenbasis(q, mu);
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
            worst_orth = std::max(
                worst_orth,
                (sd.basis.transpose() * sd.basis - eye).cwiseAbs().maxCoeff());
            Eigen::VectorXd dv = Eigen::VectorXd::Ones(q);
            dv[q - 2] = sd.m1;
            dv[q - 1] = sd.m2;
            const Eigen::MatrixXd diag =
                sd.basis.transpose() * spectral::m_matrix(q, mu) * sd.basis;
            worst_diag = std::max(worst_diag,
                                  (diag - Eigen::MatrixXd(dv.asDiagonal()))
                                      .cwiseAbs()
                                      .maxCoeff());
            worst_ident =
                std::max(worst_ident, spectral::identity_suite(q, mu));
        }
    }
    suites.push_back({"spectral-orthogonality", worst_orth, 1e-12,
                      worst_orth < 1e-12});
    suites.push_back({"spectral-diagonalization", worst_diag, 1e-11,
                      worst_diag < 1e-11});
    suites.push_back({"spectral-identities", worst_ident, 1e-10,
                      worst_ident < 1e-10});

    double worst_det = 0;
    auto track_rel = [&worst_det](double closed, double numeric) {
        const double rel =
            std::abs(closed - numeric) / std::max(1e-300, std::abs(closed));
        worst_det = std::max(worst_det, rel);
    };
    for (int q = 3; q <= std::max(3, std::min(q_max, 10)); ++q) {
        for (const double mu : {1e-3, 1e-2, 0.1}) {
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
            const Eigen::MatrixXd p = det::build_p(q, mu).entries;
            std::vector<Eigen::MatrixXd> qs;
            for (int ell = 1; ell <= q - 1; ++ell)
                qs.push_back(det::build_q(q, mu, ell).entries);
            for (int t = 1; t <= 3; ++t) {
                track_rel(det::det_ip(q, mu, t),
                          det::determinant_lu(eye + t * p));
                for (int ell = 1; ell <= q - 1; ++ell)
                    track_rel(det::det_iq(q, mu, t),
                              det::determinant_lu(
                                  eye + t * qs[static_cast<std::size_t>(
                                            ell - 1)]));
            }
            for (int ell = 1; ell <= q - 1; ++ell) {
                track_rel(det::det_ipq(q, mu),
                          det::determinant_lu(
                              eye + p + qs[static_cast<std::size_t>(ell - 1)]));
                for (int ell2 = 1; ell2 <= q - 1; ++ell2) {
                    if (ell2 == ell) continue;
                    track_rel(
                        det::det_iqq(q, mu),
                        det::determinant_lu(
                            eye + qs[static_cast<std::size_t>(ell - 1)] +
                            qs[static_cast<std::size_t>(ell2 - 1)]));
                }
            }
        }
    }
    suites.push_back(
        {"determinant-equivalence", worst_det, 1e-11, worst_det < 1e-11});

    double worst_mom = 0;
    bool moments_ok = true;
    const std::pair<int, int> configs[] = {{1, 2}, {2, 3}};
    std::uint64_t stream = 0;
    for (const auto& [n, q] : configs) {
        for (int i = 0; i < brute::kMomentCount; ++i) {
            const auto name = static_cast<brute::MomentName>(i);
            const double closed = brute::moment_closed_form(name, n, q);
            const auto est = brute::moment_mc(name, n, q, samples,
                                              derive_seed(seed, stream++));
            if (est.std_err == 0.0) {
                if (est.mean != closed) moments_ok = false;
                continue;
            }
            worst_mom =
                std::max(worst_mom, std::abs(est.mean - closed) / est.std_err);
        }
    }
    moments_ok = moments_ok && worst_mom < 5.0;
    suites.push_back({"moment-checks", worst_mom, 5.0, moments_ok});

    return suites;
}

int emit(const RunSpec& spec, const json& report,
         const std::string& plain_text, std::ostream& out, std::ostream& err) {
    std::ostringstream body;
    if (spec.format == "json")
        body << report.dump(2) << "\n";
    else
        body << plain_text;

    if (spec.out == "-" || spec.out.empty()) {
        out << body.str();
        return 0;
    }
    std::ofstream file(spec.out, std::ios::binary);
    if (!file) {
        err << "error: cannot open output file " << spec.out << "\n";
        return 2;
    }
    file << body.str();
    return 0;
}

int dispatch(RunSpec& spec, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    auto runtime_ms = [&t0] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };

    if (spec.command == "selftest") {
        const auto suites = run_selftest(spec.q_max, spec.samples, spec.seed);
        bool all_pass = true;
        std::ostringstream text;
        json results = json::array();
        json residuals = json::array();
        if (spec.format == "csv") text << "suite,residual,tolerance,pass\n";
        for (const auto& s : suites) {
            all_pass = all_pass && s.pass;
            if (spec.format == "csv") {
                text << s.name << ',' << fmt17(s.residual) << ','
                     << fmt17(s.tolerance) << ',' << (s.pass ? 1 : 0) << "\n";
            } else if (s.name == "moment-checks") {
                text << s.name << ": worst deviation " << fmt3(s.residual)
                     << " sigma (tolerance " << fmt3(s.tolerance) << ") ["
                     << (s.pass ? "pass" : "FAIL") << "]\n";
            } else {
                text << s.name << ": max residual " << fmt3(s.residual)
                     << " (tolerance " << fmt3(s.tolerance) << ") ["
                     << (s.pass ? "pass" : "FAIL") << "]\n";
            }
            json r;
            r["suite"] = s.name;
            r["residual"] = s.residual;
            r["tolerance"] = s.tolerance;
            r["pass"] = s.pass;
            results.push_back(r);
            residuals.push_back(s.residual);
        }
        if (spec.format != "csv")
            text << "selftest: " << (all_pass ? "PASS" : "FAIL") << "\n";
        json report;
        report["spec"] = spec_json(spec);
        report["results"] = results;
        report["residuals"] = residuals;
        report["runtime_ms"] = runtime_ms();
        const int rc = emit(spec, report, text.str(), out, err);
        if (rc != 0) return rc;
        return all_pass ? 0 : 1;
    }

    MixtureConfig full{spec.n, spec.q, spec.sigma2, spec.mu_grid.front()};
    full.validate();

    if (spec.command == "approx") {
        json report;
        report["spec"] = spec_json(spec);
        const ReducedProblem red = reduce_dimension(full);
        if (!red.config.series_converges())
            err << "warning: n*mu = " << red.config.n * red.config.mu
                << " > 1; the series converges in n*mu and is unreliable "
                   "here\n";
        EntropyEstimate est;
        if (spec.method == "det") {
            est = det::entropy_det(red.config);
        } else {
            est = brute::entropy_series(red.config, spec.order);
        }
        est.value += red.offset;
        json results = json::array();
        results.push_back(estimate_json(est));
        report["results"] = results;
        report["residuals"] = json::array();
        report["runtime_ms"] = runtime_ms();
        std::ostringstream text;
        text << "n,q,sigma2,mu,method,order,value,stderr\n"
             << spec.n << ',' << spec.q << ',' << fmt17(spec.sigma2) << ','
             << fmt17(full.mu) << ',' << to_string(est.method) << ','
             << (est.order ? std::to_string(*est.order) : std::string("")) << ','
             << fmt17(est.value) << ',' << fmt17(est.std_err) << "\n";
        return emit(spec, report, text.str(), out, err);
    }

    if (spec.command == "mc") {
        // The plug-in estimator needs no dimensional reduction.
        oracle::McSettings ms;
        ms.samples_per_center = spec.samples;
        ms.center_draws = spec.center_draws;
        ms.seed = spec.seed;
        EntropyEstimate est = oracle::average_entropy(full, ms);
        json report;
        report["spec"] = spec_json(spec);
        json results = json::array();
        results.push_back(estimate_json(est));
        report["results"] = results;
        report["residuals"] = json::array();
        report["runtime_ms"] = runtime_ms();
        std::ostringstream text;
        text << "n,q,sigma2,mu,samples,center_draws,seed,value,stderr\n"
             << spec.n << ',' << spec.q << ',' << fmt17(spec.sigma2) << ','
             << fmt17(full.mu) << ',' << spec.samples << ','
             << spec.center_draws << ',' << spec.seed << ','
             << fmt17(est.value) << ',' << fmt17(est.std_err) << "\n";
        return emit(spec, report, text.str(), out, err);
    }

    if (spec.command == "compare" || spec.command == "sweep") {
        if (!MixtureConfig{std::min(spec.n, spec.q), spec.q, spec.sigma2,
                           spec.mu_grid.back()}
                 .series_converges())
            err << "warning: n*mu exceeds 1 somewhere on the grid; the "
                   "series converges in n*mu and is unreliable there\n";
        std::vector<CompareRow> rows;
        rows.reserve(spec.mu_grid.size());
        for (std::size_t i = 0; i < spec.mu_grid.size(); ++i) {
            MixtureConfig cfg = full;
            cfg.mu = spec.mu_grid[i];
            rows.push_back(compute_row(cfg, spec.samples, spec.center_draws,
                                       derive_seed(spec.seed, i)));
        }
        json report;
        report["spec"] = spec_json(spec);
        json results = json::array();
        json residuals = json::array();
        for (const auto& r : rows) {
            results.push_back(row_json(r));
            residuals.push_back(r.residual2);
        }
        report["results"] = results;
        report["residuals"] = residuals;
        report["runtime_ms"] = runtime_ms();
        std::ostringstream text;
        write_rows_csv(rows, text);
        return emit(spec, report, text.str(), out, err);
    }

    err << "error: unknown command " << spec.command << "\n";
    return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("gme");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const auto& s : argv_storage) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
    RunSpec spec;
    double mu = 0.0;
    std::string mu_grid_text;
    std::string format;

    CLI::App app{
        "Average differential entropy of equal-weight isotropic Gaussian "
        "mixtures with Gaussian-distributed centers"};
    app.require_subcommand(1);

    auto add_problem = [&](CLI::App* c) {
        c->add_option("--n", spec.n, "dimension")->check(CLI::PositiveNumber);
        c->add_option("--q", spec.q, "component count")
            ->check(CLI::Range(2, 1 << 20));
        c->add_option("--sigma2", spec.sigma2, "component variance");
    };
    auto add_mc = [&](CLI::App* c) {
        c->add_option("--samples", spec.samples, "MC samples per center");
        c->add_option("--center-draws", spec.center_draws,
                      "independent center draws");
        c->add_option("--seed", spec.seed, "RNG seed");
    };
    auto add_io = [&](CLI::App* c) {
        c->add_option("--out", spec.out, "output path, or - for stdout");
        c->add_option("--format", format, "json | csv");
    };

    CLI::App* approx =
        app.add_subcommand("approx", "series approximation of the entropy");
    add_problem(approx);
    approx->add_option("--mu", mu, "s^2 / sigma^2");
    approx->add_option("--order", spec.order, "series order (0, 1 or 2)")
        ->check(CLI::Range(0, 2));
    approx->add_option("--method", spec.method, "brute | det")
        ->check(CLI::IsMember({"brute", "det"}));
    add_io(approx);

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo average entropy");
    add_problem(mc);
    mc->add_option("--mu", mu, "s^2 / sigma^2");
    add_mc(mc);
    add_io(mc);

    CLI::App* compare = app.add_subcommand(
        "compare", "series, determinant, MC and bounds side by side");
    add_problem(compare);
    compare->add_option("--mu", mu, "s^2 / sigma^2");
    add_mc(compare);
    add_io(compare);

    CLI::App* sweep =
        app.add_subcommand("sweep", "one compare row per mu grid point");
    add_problem(sweep);
    sweep->add_option("--mu-grid", mu_grid_text, "start:stop:step")
        ->required();
    add_mc(sweep);
    add_io(sweep);

    CLI::App* selftest = app.add_subcommand(
        "selftest", "spectral, determinant and moment consistency suites");
    selftest->add_option("--q-max", spec.q_max, "largest q exercised")
        ->check(CLI::Range(2, 64));
    selftest->add_option("--samples", spec.samples, "moment MC samples");
    selftest->add_option("--seed", spec.seed, "RNG seed");
    add_io(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    spec.command = app.get_subcommands().front()->get_name();
    if (spec.command == "sweep") {
        try {
            spec.mu_grid = parse_mu_grid(mu_grid_text);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    } else {
        spec.mu_grid = {mu};
    }
    if (format.empty()) {
        spec.format = spec.command == "sweep"
                          ? "csv"
                          : (spec.command == "selftest" ? "text" : "json");
    } else {
        spec.format = format;
    }
    const bool format_ok =
        spec.format == "json" || spec.format == "csv" ||
        (spec.format == "text" && spec.command == "selftest");
    if (!format_ok) {
        err << "error: --format must be json or csv\n";
        return 2;
    }

    try {
        return dispatch(spec, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gme::cli
