#include <doctest.h>

#include <cmath>

#include "gme/rng.hpp"
#include "gme/series_brute.hpp"
#include "gme/spectral.hpp"

namespace br = gme::brute;
using br::MomentName;
using gme::MixtureConfig;

TEST_CASE("alpha_quartic_sum: (q-2)^2/(q-1)") {
    // Each column of the orthogonal basis restricted to the alpha block
    // carries weight (q-2)/(q-1) per component row; derived by telescoping
    // the alpha norms, cross-checked here against the vector enumeration.
    CHECK(br::alpha_quartic_sum(2) == 0.0);
    CHECK(br::alpha_quartic_sum(3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(br::alpha_quartic_sum(4) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(br::alpha_quartic_sum(5) == doctest::Approx(2.25).epsilon(1e-14));
    for (int q = 3; q <= 12; ++q)
        CHECK(br::alpha_quartic_sum(q) ==
              doctest::Approx((q - 2.0) * (q - 2.0) / (q - 1.0))
                  .epsilon(1e-13));
}

TEST_CASE("moment_closed_form: spot values") {
    CHECK(br::moment_closed_form(MomentName::A, 3, 5) == 9.0);
    CHECK(br::moment_closed_form(MomentName::B2, 3, 5) == 225.0);
    CHECK(br::moment_closed_form(MomentName::D, 3, 5) == 0.0);
    CHECK(br::moment_closed_form(MomentName::M, 2, 4) == 0.0);
    CHECK(br::moment_closed_form(MomentName::ab4, 2, 4) == 24.0);
    CHECK(br::moment_closed_form(MomentName::aa2, 3, 5) == 15.0);
    CHECK(br::moment_closed_form(MomentName::AB, 3, 5) == 99.0);
    CHECK(br::moment_closed_form(MomentName::F, 3, 5) ==
          doctest::Approx(15.0 * 2.25).epsilon(1e-14));
}

TEST_CASE("moment names round-trip") {
    for (int i = 0; i < br::kMomentCount; ++i) {
        const auto name = static_cast<MomentName>(i);
        CHECK(br::moment_from_string(br::to_string(name)) == name);
    }
    CHECK_THROWS_AS(br::moment_from_string("nope"), std::invalid_argument);
}

TEST_CASE("moment_mc: deterministic and 5-sigma consistent") {
    const auto a = br::moment_mc(MomentName::A, 3, 5, 100000, 77);
    const auto b = br::moment_mc(MomentName::A, 3, 5, 100000, 77);
    CHECK(a.mean == b.mean);
    CHECK(a.std_err == b.std_err);
    CHECK(std::abs(a.mean - 9.0) < 5 * a.std_err);

    const auto j = br::moment_mc(MomentName::ab4, 2, 4, 100000, 78);
    CHECK(std::abs(j.mean - 24.0) < 5 * j.std_err);
}

TEST_CASE("moment_mc: odd moments vanish") {
    for (const auto name : {MomentName::M, MomentName::D}) {
        const auto est = br::moment_mc(name, 2, 4, 200000, 79);
        CHECK(std::abs(est.mean) < 5 * est.std_err);
    }
}

TEST_CASE("moment_mc: q = 2 empty alpha sums are exact zeros") {
    for (const auto name : {MomentName::A, MomentName::B, MomentName::F,
                            MomentName::J, MomentName::aaA}) {
        const auto est = br::moment_mc(name, 1, 2, 1000, 1);
        CHECK(est.mean == 0.0);
        CHECK(est.std_err == 0.0);
    }
}

TEST_CASE("moment_mc: argument validation") {
    CHECK_THROWS_AS(br::moment_mc(MomentName::aa, 3, 2, 10000, 0),
                    std::invalid_argument);  // n > q
    CHECK_THROWS_AS(br::moment_mc(MomentName::aa, 1, 2, 999, 0),
                    std::invalid_argument);  // too few samples
}

TEST_CASE("series_coefficients: assembled values match the closed forms") {
    const auto c12 = br::series_coefficients(1, 2);
    CHECK(c12.c1_expect == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(c12.c2_expect == doctest::Approx(0.1875).epsilon(1e-12));

    const auto c33 = br::series_coefficients(3, 3);
    CHECK(c33.c1_expect == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(c33.c2_expect == doctest::Approx(1.0).epsilon(1e-12));

    for (int q = 2; q <= 12; ++q) {
        for (int n = 1; n <= q; ++n) {
            const auto c = br::series_coefficients(n, q);
            CHECK(std::abs(c.c1_expect -
                           n * (2.0 * q - 1.0) / (2.0 * q * (q - 1.0))) <=
                  1e-9 * c.c1_expect);
            CHECK(std::abs(c.c2_expect -
                           n * (n + q) * (q - 1.0) / (4.0 * q * q)) <=
                  1e-9 * c.c2_expect);
        }
    }
}

TEST_CASE("entropy_series: mu = 0 is the single-Gaussian entropy") {
    for (const int order : {0, 1, 2}) {
        const auto est = br::entropy_series(MixtureConfig{3, 3, 1.0, 0.0},
                                            order);
        CHECK(est.value ==
              doctest::Approx(4.25681559961401823).epsilon(1e-14));
        CHECK(est.std_err == 0.0);
    }
}

TEST_CASE("entropy_series: printed arithmetic at n=q=3, mu=0.1") {
    const MixtureConfig cfg{3, 3, 1.0, 0.1};
    const auto order1 = br::entropy_series(cfg, 1);
    CHECK(order1.value ==
          doctest::Approx(4.25681559961401823 + 0.1).epsilon(1e-13));
    // E[c2] = 3*6*2/36 = 1, so order 2 subtracts exactly mu^2
    const auto order2 = br::entropy_series(cfg, 2);
    CHECK(order1.value - order2.value ==
          doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("entropy_series: strictly increasing in mu at order 1") {
    double prev = -1e300;
    for (const double mu : {0.0, 0.02, 0.05, 0.1, 0.2, 0.4}) {
        const auto est =
            br::entropy_series(MixtureConfig{2, 4, 1.5, mu}, 1);
        CHECK(est.value > prev);
        prev = est.value;
    }
}

TEST_CASE("entropy_series: component bound holds for n=q, mu <= 1/q") {
    for (int q = 2; q <= 10; ++q) {
        const MixtureConfig cfg{q, q, 1.0, 1.0 / q};
        const auto est = br::entropy_series(cfg, 2);
        const double bound = q * cfg.h_sigma() + std::log(double(q));
        CHECK(est.value <= bound + 1e-12);
    }
}

TEST_CASE("entropy_series: both assembly routes agree across the grid") {
    // The direct polynomial and the base + S assembly are cross-checked to
    // 1e-12 inside entropy_series; any disagreement throws.
    for (int q = 2; q <= 12; ++q)
        for (int n = 1; n <= q; ++n)
            for (const double mu : {1e-4, 0.05, 0.3})
                CHECK_NOTHROW(
                    br::entropy_series(MixtureConfig{n, q, 1.0, mu}, 2));
}

TEST_CASE("entropy_series: rejects n > q and bad orders") {
    CHECK_THROWS_AS(br::entropy_series(MixtureConfig{5, 3, 1.0, 0.1}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(br::entropy_series(MixtureConfig{2, 3, 1.0, 0.1}, 3),
                    std::invalid_argument);
}
