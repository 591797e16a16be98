#include <doctest.h>

#include <cmath>
#include <vector>

#include "gme/parallel.hpp"
#include "gme/rng.hpp"

using gme::Rng;

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(42);
    for (int i = 0; i < 1000; ++i) CHECK(c.normal() == d.normal());
}

TEST_CASE("rng: uniforms live in [0,1) and (0,1]") {
    Rng r(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = r.uniform_pos();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("rng: normal moments at 5 sigma") {
    Rng r(123);
    const int n = 1000000;
    double s = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(s / n) < 5 * se);
    CHECK(std::abs(s2 / n - 1.0) < 5 * std::sqrt(2.0) * se);
    CHECK(std::abs(s3 / n) < 5 * std::sqrt(15.0) * se);
    CHECK(std::abs(s4 / n - 3.0) < 5 * std::sqrt(96.0) * se);
}

TEST_CASE("rng: uniform_index covers the range uniformly") {
    Rng r(5);
    std::vector<int> counts(7, 0);
    const int n = 700000;
    for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
    for (const int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("rng: derive_seed decorrelates streams") {
    CHECK(gme::derive_seed(0, 0) != gme::derive_seed(0, 1));
    CHECK(gme::derive_seed(0, 0) != gme::derive_seed(1, 0));
    CHECK(gme::derive_seed(3, 4) == gme::derive_seed(3, 4));
}

TEST_CASE("parallel: chunk decomposition covers the range once") {
    std::vector<int> hits(1000, 0);
    gme::for_each_chunk(1000, 64, [&](std::int64_t, std::int64_t b,
                                      std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) ++hits[static_cast<std::size_t>(i)];
    });
    for (const int h : hits) CHECK(h == 1);
}
