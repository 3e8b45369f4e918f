#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rcoase/benchmarks.hpp"

using namespace rcoase;

TEST_CASE("naive fully-worst-case seller on the uniform prior") {
    SECTION("interior regime sells") {
        const auto r = naive_maxmin_uniform(0.5);
        CHECK(r.sells);
        CHECK_FALSE(r.binds);
        CHECK(r.v_star < 2.0);
        CHECK(r.v_star == Catch::Approx(1.27562511).margin(1e-5));
        CHECK(r.profit == Catch::Approx(0.17288739).margin(1e-6));
        // grid oracle for the maximizer
        double best = -1.0, bestv = 0.0;
        for (int i = 1; i <= 200000; ++i) {
            const double v = 2.0 * i / 200000.0;
            const double val = naive_maxmin_objective(v, 0.5);
            if (val > best) {
                best = val;
                bestv = v;
            }
        }
        CHECK(r.v_star == Catch::Approx(bestv).margin(1e-4));
    }

    SECTION("binding regime never sells") {
        for (double d : {0.9, 0.95}) {
            const auto r = naive_maxmin_uniform(d);
            CHECK(r.binds);
            CHECK_FALSE(r.sells);
            CHECK(r.v_star == 2.0);
            CHECK(r.profit == 0.0);
            CHECK(r.never_sell_interpretation);
        }
    }

    SECTION("boundary at 8/9") {
        CHECK(naive_maxmin_uniform(8.0 / 9.0 + 1e-6).binds);
        CHECK_FALSE(naive_maxmin_uniform(8.0 / 9.0 - 1e-6).binds);
    }

    SECTION("corner value equals the delayed static profit") {
        // objective(2) = delta * pi*(1) with pi*(1) the uniform coefficient
        for (double d : {0.2, 0.5, 0.8, 0.95})
            CHECK(naive_maxmin_objective(2.0, d) ==
                  Catch::Approx(d * uniform_profit_coefficient(d)).margin(1e-12));
    }
}

TEST_CASE("sophisticated two-period binary solver") {
    SECTION("printed two-period solution at q = 1/2, delta = 3/4") {
        const auto r = sophisticated_discrete_two_period(0.5, 0.75);
        CHECK(r.p1 == Catch::Approx(0.2620).margin(1e-3));
        CHECK(r.w == Catch::Approx(0.3904).margin(1e-3));
        CHECK(r.p2 == Catch::Approx(0.2192).margin(1e-3));
        CHECK(r.profit == Catch::Approx(0.1533).margin(1e-3));
        CHECK_FALSE(r.corner);
        // the stated solution fails the reinforcing check: full revelation
        // makes the buyer delay at these prices
        CHECK(0.5 - r.p1 < 0.75 * 0.5 * (1.0 - r.p2));
    }

    SECTION("myopic seller collapses to the static problem") {
        const auto r = sophisticated_discrete_two_period(0.5, 0.0);
        CHECK(r.p1 == Catch::Approx(0.5 * (2.0 - std::sqrt(2.0))).margin(1e-8));
        CHECK(r.profit == Catch::Approx(3.0 - 2.0 * std::sqrt(2.0)).margin(1e-8));
    }

    SECTION("never beats the static pressed benchmark") {
        const double stat = 3.0 - 2.0 * std::sqrt(2.0);
        for (double d = 0.05; d < 0.99; d += 0.05)
            CHECK(sophisticated_discrete_two_period(0.5, d).profit <= stat + 1e-9);
    }

    CHECK_THROWS_AS(sophisticated_discrete_two_period(0.0, 0.5), validation_error);
}

TEST_CASE("constant-price construction") {
    const auto F = ValueDistribution::uniform(0.0, 2.0);

    SECTION("rho formula and the value recursion") {
        const auto r = constant_price_equilibrium(F, 0.5, 0.5, 0.225);
        CHECK(r.valid);
        CHECK(r.rho == Catch::Approx(1.0 / 3.0).margin(1e-12));
        // v* = rho E[v] + (1-rho) d v* holds exactly at the returned rho
        std::uint64_t s = 7;
        auto next = [&s]() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            return static_cast<double>(s % 9973) / 9973.0;
        };
        for (int i = 0; i < 50; ++i) {
            const double d = 0.05 + 0.9 * next();
            const double vs = 0.3 + 0.6 * next();  // inside (minimax, E[v]) for this check
            const auto rr = constant_price_equilibrium(F, d, vs, 0.2);
            CHECK(vs == Catch::Approx(rr.rho * 1.0 + (1.0 - rr.rho) * d * vs).margin(1e-12));
        }
    }

    SECTION("immediate-sale limit") {
        const auto r = constant_price_equilibrium(F, 0.5, 1.0 - 1e-9, 0.225);
        CHECK(r.rho == Catch::Approx(1.0).margin(1e-6));
    }

    SECTION("boundaries are rejected") {
        CHECK_FALSE(constant_price_equilibrium(F, 0.5, 0.225, 0.225).valid);
        CHECK_FALSE(constant_price_equilibrium(F, 0.5, 1.0, 0.225).valid);
        CHECK(!constant_price_equilibrium(F, 0.5, 0.2, 0.225).violated.empty());
    }

    SECTION("the market never clears") {
        const double rho = constant_price_equilibrium(F, 0.5, 0.5, 0.225).rho;
        for (int K : {1, 10, 100, 1000}) {
            const double log_surv = K * std::log1p(-rho);
            CHECK(std::exp(log_surv) > 0.0);
            CHECK(std::abs(std::exp(log_surv) - std::pow(1.0 - rho, K)) <=
                  1e-12 * std::pow(1.0 - rho, K) * K + 1e-300);
        }
    }
}

TEST_CASE("no-gap feasibility certificate") {
    const auto F = ValueDistribution::uniform(0.0, 2.0);

    SECTION("patient players support the constant-price outcome") {
        const auto r = no_gap_folk_support(F, 0.95, {{0.0, 2.0}});
        CHECK(r.feasible);
        CHECK(r.pi_high == Catch::Approx(0.25).margin(1e-6));  // static pressed monopoly
        CHECK(r.pi_low < 0.95 * r.pi_high);
    }

    SECTION("impatient players cannot deter nature") {
        const auto r = no_gap_folk_support(F, 0.05, {{0.0, 2.0}});
        CHECK_FALSE(r.feasible);
        CHECK(r.reason.find("deter") != std::string::npos);
    }

    SECTION("envelope mismatch fails the precondition gate") {
        const auto r = no_gap_folk_support(F, 0.9, {{0.0, 2.0}}, 2.0);
        CHECK_FALSE(r.feasible);
        CHECK(r.reason.find("regularity") != std::string::npos);
    }

    SECTION("feasibility is monotone in delta") {
        bool seen_feasible = false;
        for (double d = 0.1; d < 0.96; d += 0.1) {
            const bool f = no_gap_folk_support(F, d, {{0.0, 2.0}}).feasible;
            if (seen_feasible) CHECK(f);
            seen_feasible = seen_feasible || f;
        }
        CHECK(seen_feasible);
    }

    SECTION("a nontrivial partition raises the committed ceiling") {
        const auto trivial = no_gap_folk_support(F, 0.9, {{0.0, 2.0}});
        const auto split = no_gap_folk_support(F, 0.9, {{0.0, 1.0}, {1.0, 2.0}});
        CHECK(split.pi_high >= trivial.pi_high - 1e-9);
    }

    CHECK_THROWS_AS(no_gap_folk_support(ValueDistribution::uniform(1.0, 2.0), 0.9, {{1.0, 2.0}}),
                    validation_error);
}
