#pragma once

// Closed-form alternative benchmarks: the naive fully-worst-case seller on
// U[0,2], the sophisticated two-period discrete solver, the constant-price
// never-clearing construction and the no-gap feasibility certificate.

#include <cmath>
#include <string>
#include <vector>

#include "rcoase/coase.hpp"
#include "rcoase/nature.hpp"
#include "rcoase/pressed.hpp"
#include "rcoase/robust.hpp"

namespace rcoase {

// ---------------------------------------------------------------------------
// Naive maxmin on U[0,2] (pressed U[0,1]), infinite horizon. The seller
// optimizes against the full worst case but does not anticipate that his
// future selves re-optimize. Writing a = 1-d and s = sqrt(1-d), the
// first-period price against partition threshold v is
//   p1(v) = (v/2) a + (v^2/8)(s - a)
// and the anticipated profit is
//   p1(v) (1 - v/2) + (s - a) v^2 / 8,
// where (s-a)/8 = d c(d)/4 with c(d) the uniform profit coefficient.
// The constraint v <= 2 binds when the derivative at 2, (s - 3a)/4, is >= 0.
// In the binding regime the seller keeps resetting and never induces a sale.
// ---------------------------------------------------------------------------

inline double naive_maxmin_objective(double v, double delta) {
    const double a = 1.0 - delta, s = std::sqrt(1.0 - delta);
    const double p1 = 0.5 * v * a + v * v * (s - a) / 8.0;
    return p1 * (1.0 - 0.5 * v) + (s - a) * v * v / 8.0;
}

struct NaiveMaxminOutcome {
    double v_star = 0.0;
    double p1 = 0.0;
    double profit = 0.0;  // realized: 0 in the never-sell regime
    bool sells = true;
    bool binds = false;                      // v* <= 2 binds
    bool never_sell_interpretation = false;  // profit-0 convention in that regime
    double anticipated = 0.0;                // objective value at the optimum
};

inline NaiveMaxminOutcome naive_maxmin_uniform(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw validation_error("naive_maxmin_uniform: delta in (0,1)");
    const double a = 1.0 - delta, s = std::sqrt(1.0 - delta);
    auto dobj = [&](double v) {
        return 0.5 * a + 0.5 * (s - 2.0 * a) * v - 3.0 * (s - a) * v * v / 16.0;
    };
    NaiveMaxminOutcome out;
    out.binds = dobj(2.0) >= 0.0;
    if (out.binds) {
        out.v_star = 2.0;
        out.sells = false;
        out.never_sell_interpretation = true;
        out.anticipated = naive_maxmin_objective(2.0, delta);
        out.profit = 0.0;
    } else {
        const auto r = maximize_scalar([&](double v) { return naive_maxmin_objective(v, delta); },
                                       1e-9, 2.0, 257, 1e-13, dobj);
        out.v_star = r.x;
        out.sells = true;
        out.anticipated = r.value;
        out.profit = r.value;
    }
    out.p1 = 0.5 * out.v_star * a + out.v_star * out.v_star * (s - a) / 8.0;
    return out;
}

// ---------------------------------------------------------------------------
// Sophisticated maxmin, binary values {0,1} with prior q, two periods. The
// second-period price against no-buy posterior w maximizes p (w-p)/(w(1-p)),
// giving p2(w) = 1 - sqrt(1-w); the first-period indifferent posterior solves
// w - p1 = d (w - p2(w)). Total discounted profit, with r the worst-case sale
// probabilities, is p1 r1 + d (1-r1) p2 r2.
// ---------------------------------------------------------------------------

struct SophisticatedOutcome {
    double p1 = 0.0;
    double w = 0.0;
    double p2 = 0.0;
    double profit = 0.0;
    bool corner = false;  // no interior indifferent posterior
};

inline SophisticatedOutcome sophisticated_discrete_two_period(double q, double delta) {
    if (!(q > 0.0 && q < 1.0))
        throw validation_error("sophisticated_discrete_two_period: q in (0,1)");
    if (!(delta >= 0.0 && delta < 1.0))
        throw validation_error("sophisticated_discrete_two_period: delta in [0,1)");
    auto p2_of = [](double w) { return 1.0 - std::sqrt(1.0 - w); };
    auto value = [&](double w) {
        const double p2 = p2_of(w);
        const double p1 = w - delta * (w - p2);
        const double r1 = press_discrete_binary(q, w);
        const double r2 = press_discrete_binary(w, p2);
        return p1 * r1 + delta * (1.0 - r1) * p2 * r2;
    };
    const double eps = 1e-10;
    const auto r = maximize_scalar(value, eps, q - eps, 513, 1e-13);
    SophisticatedOutcome out;
    out.w = r.x;
    out.p2 = p2_of(out.w);
    out.p1 = out.w - delta * (out.w - out.p2);
    out.profit = r.value;
    out.corner = (out.w >= q - 1e-7);
    return out;
}

// ---------------------------------------------------------------------------
// Constant-price construction: on path the seller charges E[v], no
// information arrives, and the buyer purchases with probability rho solving
// v* = rho E[v] + (1-rho) d v*. Deviations are punished by reversion to the
// worst-case equilibrium, whose profit (the supplied minimax value) must be
// strictly below v*.
// ---------------------------------------------------------------------------

struct ConstantPriceOutcome {
    double rho = 0.0;
    bool valid = false;
    std::string violated;  // name of the violated bound when invalid
};

inline ConstantPriceOutcome constant_price_equilibrium(const ValueDistribution& F, double delta,
                                                       double v_star, double minimax_profit) {
    if (!(delta > 0.0 && delta < 1.0))
        throw validation_error("constant_price_equilibrium: delta in (0,1)");
    const double mean = F.mean();
    ConstantPriceOutcome out;
    out.rho = v_star * (1.0 - delta) / (mean - delta * v_star);
    if (!(v_star > minimax_profit)) {
        out.violated = "v_star must strictly exceed the minimax (reversion) profit";
        return out;
    }
    if (!(v_star < mean)) {
        out.violated = "v_star must lie strictly below E[v]";
        return out;
    }
    out.valid = out.rho > 0.0 && out.rho < 1.0;
    if (!out.valid) out.violated = "rho outside (0,1)";
    return out;
}

// ---------------------------------------------------------------------------
// No-gap feasibility certificate. With v_lo = 0 and both F and its pressed
// version inside a common power envelope M q^alpha <= quantile <= L q^alpha,
// the folk-theorem machinery supports constant-price outcomes at value v*
// whenever v* exceeds the low (Coasian) profit while d times the high
// (committed, mixture-pressed monopoly) profit deters nature:
//   pi_low < v* < min(E[v], d * pi_high).
// ---------------------------------------------------------------------------

struct FolkSupportReport {
    double pi_low = 0.0;   // robust profit at delta (punishment proxy)
    double pi_high = 0.0;  // static monopoly profit under the mixture-pressed law
    bool feasible = false;
    std::string reason;
};

inline FolkSupportReport no_gap_folk_support(const ValueDistribution& F, double delta,
                                             std::vector<PartitionCell> partition,
                                             double alpha = 1.0, int proxy_horizon = 25) {
    if (F.lo() > 1e-12)
        throw validation_error("no_gap_folk_support: no-gap case required (v_lo = 0)");
    FolkSupportReport rep;
    const auto G = press(F).as_distribution();
    const auto regF = check_ad_regularity(F, alpha);
    const auto regG = check_ad_regularity(G, alpha);
    if (!regF.holds || !regG.holds) {
        rep.reason = std::string("power-envelope regularity fails at alpha for ") +
                     (!regF.holds ? "F" : "pressed F");
        return rep;
    }
    GameConfig cfg{F, delta, proxy_horizon, Tolerances{}};
    rep.pi_low = solve_robust(cfg).profit;
    rep.pi_high = static_monopoly(mixture_press(F, std::move(partition))).profit;
    const double mean = F.mean();
    const double upper = std::min(mean, delta * rep.pi_high);
    if (rep.pi_low < upper) {
        rep.feasible = true;
    } else if (rep.pi_low >= delta * rep.pi_high) {
        rep.reason = "delta * committed profit too small to deter nature";
    } else {
        rep.reason = "no room below E[v]";
    }
    return rep;
}

}  // namespace rcoase
