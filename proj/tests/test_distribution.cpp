#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rcoase/distribution.hpp"
#include "rcoase/numerics.hpp"

using namespace rcoase;

namespace {

// quantile(cdf(v)) = v on the support interior
void check_quantile_inverse(const ValueDistribution& d, double tol = 1e-9) {
    const double lo = d.lo(), hi = d.hi();
    for (int i = 1; i < 40; ++i) {
        const double v = lo + (hi - lo) * i / 40.0;
        const double q = d.cdf(v);
        if (q <= 1e-12 || q >= 1.0 - 1e-12) continue;
        CHECK(std::abs(d.quantile(q) - v) < tol * (hi - lo));
    }
}

}  // namespace

TEST_CASE("uniform distribution closed forms") {
    const auto d = ValueDistribution::uniform(0.0, 2.0);
    CHECK(d.cdf(0.0) == 0.0);
    CHECK(d.cdf(2.0) == 1.0);
    CHECK(d.pdf(1.0) == 0.5);
    CHECK(d.mean() == Catch::Approx(1.0).margin(1e-13));
    CHECK(d.partial_mean(0.0, 1.0) == Catch::Approx(0.25).margin(1e-13));
    CHECK(d.interval_mean(0.5, 1.5) == Catch::Approx(1.0).margin(1e-12));
    CHECK_FALSE(d.gap());
    CHECK(ValueDistribution::uniform(1.0, 2.0).gap());
    check_quantile_inverse(d);
    CHECK_THROWS_AS(ValueDistribution::uniform(1.0, 1.0), validation_error);
}

TEST_CASE("beta distribution against polynomial forms") {
    const auto d = ValueDistribution::beta(2.0, 2.0);
    for (double v : {0.1, 0.25, 0.5, 0.8}) {
        CHECK(d.cdf(v) == Catch::Approx(3.0 * v * v - 2.0 * v * v * v).margin(1e-12));
        CHECK(d.pdf(v) == Catch::Approx(6.0 * v * (1.0 - v)).margin(1e-12));
        // f' = 6 - 12v
        CHECK(d.pdf_deriv(v) == Catch::Approx(6.0 - 12.0 * v).margin(1e-9));
        // int_0^v 6u^2(1-u) du = 2v^3 - 1.5v^4
        CHECK(d.partial_mean(0.0, v) ==
              Catch::Approx(2.0 * v * v * v - 1.5 * v * v * v * v).margin(1e-12));
    }
    check_quantile_inverse(d);

    const auto r = d.rescaled(0.5, 1.5);
    CHECK(r.lo() == Catch::Approx(0.5));
    CHECK(r.hi() == Catch::Approx(1.5));
    CHECK(r.mean() == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.cdf(1.0) == Catch::Approx(0.5).margin(1e-12));
    check_quantile_inverse(r);
    // partial mean under the affine map agrees with quadrature
    const double q = integrate([&](double v) { return v * r.pdf(v); }, 0.5, 1.2, 1e-12);
    CHECK(r.partial_mean(0.5, 1.2) == Catch::Approx(q).margin(1e-10));
}

TEST_CASE("power family density and cdf") {
    const int n = 8;
    const auto d = ValueDistribution::power(n);
    CHECK(d.cdf(0.0) == 0.0);
    CHECK(d.cdf(1.0) == 1.0);
    CHECK(d.cdf(0.5) == Catch::Approx(0.5).margin(1e-14));
    CHECK(d.mean() == Catch::Approx(0.5).margin(1e-12));
    CHECK(integrate([&](double v) { return d.pdf(v); }, 0.0, 1.0, 1e-12) ==
          Catch::Approx(1.0).margin(1e-10));
    check_quantile_inverse(d, 1e-7);
    CHECK_THROWS_AS(ValueDistribution::power(3), validation_error);

    const auto shifted = d.rescaled(0.6, 1.5);
    CHECK(shifted.gap());
    CHECK(shifted.mean() == Catch::Approx(0.6 + 0.9 * 0.5).margin(1e-12));
}

TEST_CASE("pressed binary law") {
    const auto d = ValueDistribution::pressed_binary(0.5);
    CHECK(d.lo() == 0.0);
    CHECK(d.hi() == 0.5);
    CHECK(d.cdf(0.0) == 0.0);
    CHECK(d.cdf(0.5) == 1.0);
    CHECK(integrate([&](double v) { return d.pdf(v); }, 0.0, 0.5, 1e-12) ==
          Catch::Approx(1.0).margin(1e-10));
    check_quantile_inverse(d, 1e-10);
}

TEST_CASE("truncation") {
    const auto t = ValueDistribution::uniform(0.0, 2.0).truncated(0.5, 1.5);
    CHECK(t.lo() == 0.5);
    CHECK(t.cdf(1.0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(t.mean() == Catch::Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(ValueDistribution::uniform(0.0, 1.0).truncated(0.9, 0.9), validation_error);
}

TEST_CASE("discrete atoms") {
    const auto d = ValueDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}});
    CHECK(d.is_discrete());
    CHECK(d.mean() == Catch::Approx(0.5));
    CHECK(d.cdf(0.5) == Catch::Approx(0.5));
    CHECK(d.quantile(0.7) == 1.0);
    // probabilities must sum to 1 within 1e-12
    CHECK_THROWS_AS(ValueDistribution::discrete({{0.0, 0.5}, {1.0, 0.5 + 1e-9}}),
                    validation_error);
    CHECK_THROWS_AS(d.pdf(0.5), validation_error);
}

TEST_CASE("tabulated cdf distribution") {
    // tabulate a uniform cdf; interpolation must reproduce it exactly
    const auto grid = linspace(1.0, 2.0, 21);
    std::vector<double> cdf(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) cdf[i] = grid[i] - 1.0;
    const auto d = ValueDistribution::table(grid, cdf);
    CHECK(d.cdf(1.25) == Catch::Approx(0.25).margin(1e-12));
    CHECK(d.pdf(1.7) == Catch::Approx(1.0).margin(1e-10));
    check_quantile_inverse(d);
    CHECK_THROWS_AS(ValueDistribution::table({0.0, 1.0}, {0.1, 1.0}), validation_error);
}

TEST_CASE("distribution JSON specs") {
    const auto u = parse_distribution(R"({"kind":"uniform","lo":0,"hi":2})");
    CHECK(u.hi() == 2.0);
    const auto p = parse_distribution(R"({"kind":"power","n":8})");
    CHECK(p.hi() == 1.0);
    const auto b = parse_distribution(R"({"kind":"beta","a":2,"b":2,"lo":0.5,"hi":1.5})");
    CHECK(b.lo() == Catch::Approx(0.5));
    const auto disc = parse_distribution(R"({"kind":"discrete","atoms":[[0,0.5],[1,0.5]]})");
    CHECK(disc.is_discrete());
    const auto t = parse_distribution(R"({"kind":"uniform","lo":0,"hi":2,"truncate":[0.5,1.5]})");
    CHECK(t.lo() == 0.5);

    CHECK_THROWS_AS(parse_distribution("{not json"), validation_error);
    CHECK_THROWS_AS(parse_distribution(R"({"kind":"cauchy"})"), validation_error);
    CHECK_THROWS_AS(parse_distribution(R"([1,2,3])"), validation_error);

    // emitted spec re-parses to the same law
    const auto j = b.to_json();
    const auto b2 = parse_distribution(j);
    for (double v : {0.6, 0.9, 1.2})
        CHECK(b2.cdf(v) == Catch::Approx(b.cdf(v)).margin(1e-13));
}
