#pragma once

// Known-values durable-goods monopoly without commitment, solved by backward
// induction on the remaining-market state. The state is the highest value
// still in the market; each period the seller effectively picks the next
// cutoff w, charging the price phi(w) = w - delta (w - p_next(w)) that makes
// type w indifferent between buying now and waiting one period. The terminal
// period is the static monopoly problem on the residual distribution. The
// infinite-horizon gap case is solved by lengthening the horizon until the
// value function is stationary, which happens once the horizon exceeds the
// market-clearing time from the top state.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "rcoase/distribution.hpp"
#include "rcoase/numerics.hpp"
#include "rcoase/pressed.hpp"

namespace rcoase {

struct Tolerances {
    double root_tol = 1e-11;     // argument tolerance for root finding
    double integral_tol = 1e-10; // absolute quadrature tolerance
    int grid_n = 513;            // nodes for tabulated policies
    double stat_tol = 1e-9;      // sup-norm stationarity test (infinite horizon)
    int horizon_cap = 10000;     // bail-out for the stationarity search
    int exact_depth = 2;         // horizons solved by exact nested recursion
    int stat_grid = 512;         // nodes for the stationarity comparison
};

inline constexpr int kInfiniteHorizon = -1;

struct GameConfig {
    ValueDistribution dist;
    double delta = 0.5;
    int horizon = 2;  // kInfiniteHorizon for T = infinity
    Tolerances tol;

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0))
            throw validation_error("GameConfig: delta must lie strictly in (0,1)");
        if (horizon != kInfiniteHorizon && horizon < 1)
            throw validation_error("GameConfig: horizon must be >= 1 or infinite");
    }
    bool infinite() const { return horizon == kInfiniteHorizon; }
};

struct KnownValuesEquilibrium {
    std::vector<double> prices;   // p_1..p_t*
    std::vector<double> cutoffs;  // w_1..w_t* (indifferent type per period)
    double profit = 0.0;          // discounted expected revenue
    double surplus = 0.0;         // discounted expected buyer surplus
    std::optional<int> clearing_time;  // first t with w_t <= v_lo
    bool multiple_optima = false;
    bool lipschitz_warning = false;  // infinite horizon solved without the quantile bound
    int solved_horizon = 0;          // T, or the stationary horizon found
};

struct StaticMonopoly {
    double price = 0.0;
    double profit = 0.0;
    bool multiple = false;
};

// Terminal/one-shot problem: argmax p (F(c) - F(p)) over [v_lo, c].
inline StaticMonopoly static_monopoly(const ValueDistribution& d, double c, std::size_t n_grid = 129) {
    StaticMonopoly out;
    const double lo = d.lo();
    c = std::min(c, d.hi());
    if (c <= lo) return {lo, 0.0, false};
    const double Fc = d.cdf(c);
    auto obj = [&](double p) { return p * (Fc - d.cdf(p)); };
    auto foc = [&](double p) { return (Fc - d.cdf(p)) - p * d.pdf(p); };
    const auto r = maximize_scalar(obj, lo, c, n_grid, 1e-13, foc);
    out.price = r.x;
    out.profit = r.value;
    out.multiple = r.multiple;
    return out;
}

inline StaticMonopoly static_monopoly(const ValueDistribution& d) {
    if (d.is_discrete()) {
        // best atom price: charge some atom value, sell to mass above (ties buy)
        StaticMonopoly out;
        for (const auto& [v, p] : d.atoms()) {
            double mass = 0.0;
            for (const auto& [x, px] : d.atoms())
                if (x >= v) mass += px;
            const double profit = v * mass;
            if (profit > out.profit) {
                out.profit = profit;
                out.price = v;
            }
        }
        return out;
    }
    return static_monopoly(d, d.hi());
}

// pi*(v) = c(delta) v^2 for the uniform no-gap stationary solution; algebraic
// form of (1/2)(1 - 1/delta + sqrt(1-delta)/delta).
inline double uniform_profit_coefficient(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw validation_error("uniform_profit_coefficient: delta in (0,1)");
    const double s = std::sqrt(1.0 - delta);
    return 0.5 * s / (1.0 + s);
}

namespace detail {

struct StageSolve {
    double w = 0.0;      // chosen next cutoff
    double price = 0.0;  // price charged
    double value = 0.0;  // discounted revenue (prior-mass units)
    bool multiple = false;
};

class Stage {
public:
    virtual ~Stage() = default;
    virtual StageSolve solve_at(double c) const = 0;
    virtual double price(double c) const { return solve_at(c).price; }
    virtual double value(double c) const { return solve_at(c).value; }
    virtual double price_deriv(double c) const = 0;
};

class StaticStage final : public Stage {
public:
    StaticStage(ValueDistribution d, std::size_t n_grid) : d_(std::move(d)), n_grid_(n_grid) {}

    StageSolve solve_at(double c) const override {
        const double lo = d_.lo();
        if (c <= lo + 1e-14) return {lo, lo, 0.0, false};
        const auto m = static_monopoly(d_, c, n_grid_);
        return {std::max(m.price, lo), m.price, m.profit, m.multiple};
    }

    double price_deriv(double c) const override {
        const auto s = solve_at(c);
        const double lo = d_.lo();
        if (s.price <= lo + 1e-12) return 0.0;  // clearing region
        const double denom = 2.0 * d_.pdf(s.price) + s.price * d_.pdf_deriv(s.price);
        if (std::abs(denom) < 1e-12) return 0.0;
        return d_.pdf(c) / denom;
    }

private:
    ValueDistribution d_;
    std::size_t n_grid_;
};

class RecursiveStage final : public Stage {
public:
    RecursiveStage(ValueDistribution d, double delta, std::shared_ptr<const Stage> next,
                   std::size_t n_grid)
        : d_(std::move(d)), delta_(delta), next_(std::move(next)), n_grid_(n_grid) {}

    double phi(double w) const {
        const double lo = d_.lo();
        if (w <= lo + 1e-14) return lo;
        return w - delta_ * (w - next_->price(w));
    }

    double phi_deriv(double w) const {
        return (1.0 - delta_) + delta_ * next_->price_deriv(w);
    }

    StageSolve solve_at(double c) const override {
        const double lo = d_.lo();
        c = std::min(c, d_.hi());
        if (c <= lo + 1e-14) return {lo, lo, 0.0, false};
        const double Fc = d_.cdf(c);
        auto J = [&](double w) {
            if (w <= lo + 1e-14) return lo * Fc;
            return phi(w) * (Fc - d_.cdf(w)) + delta_ * next_->value(w);
        };
        auto dJ = [&](double w) {
            if (w <= lo + 1e-14) return 0.0;
            return phi_deriv(w) * (Fc - d_.cdf(w)) - phi(w) * d_.pdf(w) +
                   delta_ * next_->price(w) * d_.pdf(w);
        };
        const auto r = maximize_scalar(J, lo, c, n_grid_, 1e-13, dJ);
        StageSolve s;
        s.w = r.x;
        s.price = (r.x <= lo + 1e-12) ? lo : phi(r.x);
        s.value = r.value;
        s.multiple = r.multiple;
        return s;
    }

    double price_deriv(double c) const override {
        const double h = 1e-6 * (d_.hi() - d_.lo());
        const double a = std::max(d_.lo(), c - h), b = std::min(d_.hi(), c + h);
        return (solve_at(b).price - solve_at(a).price) / (b - a);
    }

private:
    ValueDistribution d_;
    double delta_;
    std::shared_ptr<const Stage> next_;
    std::size_t n_grid_;
};

// Spline views of an inner stage's policy/value for fast continuation lookups.
// Exact queries (path assembly) still delegate to the inner stage.
class TabulatedStage final : public Stage {
public:
    TabulatedStage(std::shared_ptr<const Stage> inner, const ValueDistribution& d, int grid_n)
        : inner_(std::move(inner)) {
        const auto xs = linspace(d.lo(), d.hi(), static_cast<std::size_t>(grid_n));
        std::vector<double> ps(xs.size()), vs(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto s = inner_->solve_at(xs[i]);
            ps[i] = s.price;
            vs[i] = s.value;
        }
        // weakly increasing in the state by construction; nudge ties apart for
        // the monotone interpolant
        price_ = MonotoneCubic(xs, ps);
        value_ = MonotoneCubic(xs, vs);
    }

    StageSolve solve_at(double c) const override { return inner_->solve_at(c); }
    double price(double c) const override { return price_(c); }
    double value(double c) const override { return value_(c); }
    double price_deriv(double c) const override { return std::max(0.0, price_.deriv(c)); }
    const MonotoneCubic& value_table() const { return value_; }

private:
    std::shared_ptr<const Stage> inner_;
    MonotoneCubic price_, value_;
};

// Chain of continuation stages; chain[k] plays a game with k+1 periods left.
struct StageChain {
    std::vector<std::shared_ptr<const Stage>> stages;
    bool stationary = false;  // infinite-horizon: last stage is the fixed point
    int stationary_at = 0;
};

inline StageChain build_chain(const ValueDistribution& d, double delta, int horizon,
                              const Tolerances& tol) {
    StageChain chain;
    const std::size_t n_grid = 129;
    if (horizon != kInfiniteHorizon && horizon <= tol.exact_depth) {
        chain.stages.push_back(std::make_shared<StaticStage>(d, n_grid));
        for (int k = 2; k <= horizon; ++k)
            chain.stages.push_back(
                std::make_shared<RecursiveStage>(d, delta, chain.stages.back(), n_grid));
        return chain;
    }
    // tabulated chain
    std::shared_ptr<const Stage> prev =
        std::make_shared<TabulatedStage>(std::make_shared<StaticStage>(d, n_grid), d, tol.grid_n);
    chain.stages.push_back(prev);
    const int cap = (horizon == kInfiniteHorizon) ? tol.horizon_cap : horizon;
    const auto probe = linspace(d.lo(), d.hi(), static_cast<std::size_t>(tol.stat_grid));
    std::vector<double> vprev(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i) vprev[i] = prev->value(probe[i]);
    for (int k = 2; k <= cap; ++k) {
        auto rec = std::make_shared<RecursiveStage>(d, delta, prev, n_grid);
        auto tab = std::make_shared<TabulatedStage>(rec, d, tol.grid_n);
        chain.stages.push_back(tab);
        if (horizon == kInfiniteHorizon) {
            double diff = 0.0;
            for (std::size_t i = 0; i < probe.size(); ++i) {
                const double v = tab->value(probe[i]);
                diff = std::max(diff, std::abs(v - vprev[i]));
                vprev[i] = v;
            }
            if (diff < tol.stat_tol) {
                chain.stationary = true;
                chain.stationary_at = k;
                return chain;
            }
        }
        prev = tab;
    }
    if (horizon == kInfiniteHorizon)
        throw convergence_error(
            "solve_known_values_infinite: no stationary horizon below cap " +
            std::to_string(tol.horizon_cap) + "; value function still moving");
    return chain;
}

}  // namespace detail

namespace detail {

inline KnownValuesEquilibrium assemble_path(const ValueDistribution& d, double delta,
                                            const StageChain& chain, int horizon,
                                            const Tolerances& tol) {
    KnownValuesEquilibrium eq;
    const double lo = d.lo();
    double c = d.hi();
    // Stationary play normally clears within the stationary horizon. Without
    // the quantile Lipschitz bound the cutoffs may only approach the bottom
    // asymptotically; the path is then truncated once the discounted value of
    // the remaining market is negligible.
    const int T = chain.stationary ? std::max(4 * chain.stationary_at + 64, 256) : horizon;
    double path_disc = 1.0;
    for (int t = 1; t <= T; ++t) {
        const Stage* stage;
        if (chain.stationary) {
            stage = chain.stages.back().get();
            if (path_disc * d.hi() * d.cdf(c) < 1e-13) break;
        } else {
            stage = chain.stages[static_cast<std::size_t>(horizon - t)].get();
        }
        const auto s = stage->solve_at(c);
        eq.prices.push_back(s.price);
        eq.cutoffs.push_back(s.w);
        eq.multiple_optima = eq.multiple_optima || s.multiple;
        if (s.w <= lo + 1e-12) {
            eq.clearing_time = t;
            break;
        }
        c = s.w;
        path_disc *= delta;
    }
    // backward price polish: tabulated continuations carry interpolation
    // error, so re-impose the marginal-type recursion p_t = w_t - d (w_t -
    // p_{t+1}) exactly along the realized path
    for (std::size_t t = eq.prices.size(); t-- > 1;) {
        const double w = eq.cutoffs[t - 1];
        if (w > lo + 1e-12) eq.prices[t - 1] = w - delta * (w - eq.prices[t]);
    }
    // profit and surplus from the realized path
    double profit = 0.0, surplus = 0.0, disc = 1.0, prev = d.hi();
    for (std::size_t t = 0; t < eq.prices.size(); ++t) {
        const double w = eq.cutoffs[t], p = eq.prices[t];
        profit += disc * p * (d.cdf(prev) - d.cdf(w));
        surplus += disc * (d.partial_mean(w, prev, tol.integral_tol) -
                           p * (d.cdf(prev) - d.cdf(w)));
        prev = w;
        disc *= delta;
    }
    eq.profit = profit;
    eq.surplus = surplus;
    eq.solved_horizon = chain.stationary ? chain.stationary_at : horizon;
    return eq;
}

}  // namespace detail

inline KnownValuesEquilibrium solve_known_values(const GameConfig& cfg) {
    cfg.validate();
    if (cfg.infinite())
        throw validation_error("solve_known_values: finite horizon required (use the infinite solver)");
    if (cfg.dist.is_discrete())
        throw validation_error("solve_known_values: continuous distribution required");
    const auto chain = detail::build_chain(cfg.dist, cfg.delta, cfg.horizon, cfg.tol);
    return detail::assemble_path(cfg.dist, cfg.delta, chain, cfg.horizon, cfg.tol);
}

inline KnownValuesEquilibrium solve_known_values_infinite(const GameConfig& cfg) {
    cfg.validate();
    if (cfg.dist.is_discrete())
        throw validation_error("solve_known_values_infinite: continuous distribution required");
    if (!cfg.dist.gap())
        throw validation_error(
            "solve_known_values_infinite: gap case required (v_lo > 0); finite clearing is not "
            "guaranteed otherwise");
    const auto chain = detail::build_chain(cfg.dist, cfg.delta, kInfiniteHorizon, cfg.tol);
    auto eq = detail::assemble_path(cfg.dist, cfg.delta, chain, kInfiniteHorizon, cfg.tol);
    eq.lipschitz_warning = !check_lipschitz(cfg.dist).holds;
    return eq;
}

inline KnownValuesEquilibrium solve_known_values_any(const GameConfig& cfg) {
    return cfg.infinite() ? solve_known_values_infinite(cfg) : solve_known_values(cfg);
}

// Period-indexed access to the backward-induction policy, for strategy
// profiles and deviation audits. Periods are 1-based; the stationary
// infinite-horizon policy ignores the period index.
class SolvedPolicy {
public:
    explicit SolvedPolicy(const GameConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        chain_ = detail::build_chain(cfg_.dist, cfg_.delta, cfg_.horizon, cfg_.tol);
    }

    bool stationary() const { return chain_.stationary; }
    int horizon() const { return cfg_.infinite() ? chain_.stationary_at : cfg_.horizon; }
    const GameConfig& config() const { return cfg_; }

    const detail::Stage& stage(int t) const {
        if (chain_.stationary) return *chain_.stages.back();
        const int k = cfg_.horizon - t;  // periods remaining after t
        if (k < 0 || static_cast<std::size_t>(k) >= chain_.stages.size())
            throw validation_error("SolvedPolicy: period out of range");
        return *chain_.stages[static_cast<std::size_t>(k)];
    }

    detail::StageSolve solve_at(int t, double c) const { return stage(t).solve_at(c); }
    double price(int t, double c) const { return stage(t).price(c); }
    double value(int t, double c) const { return stage(t).value(c); }

    // price that makes type w the marginal buyer at period t
    double phi(int t, double w) const {
        const double lo = cfg_.dist.lo();
        if (w <= lo + 1e-14) return lo;
        if (!chain_.stationary && t >= cfg_.horizon) return w;  // last period: cutoff = price
        const int tn = chain_.stationary ? t : t + 1;
        return w - cfg_.delta * (w - price(tn, w));
    }

    // marginal type induced by price p at period t in state c: solves
    // phi(t, w) = p, clamped into [v_lo, c] (p above phi(t,c) sells nothing,
    // p below v_lo clears)
    double cutoff_for_price(int t, double c, double p) const {
        const double lo = cfg_.dist.lo();
        if (p <= lo) return lo;
        if (p >= phi(t, c)) return c;
        return brent_root([&](double w) { return phi(t, w) - p; }, lo, c, 1e-12);
    }

private:
    GameConfig cfg_;
    detail::StageChain chain_;
};

}  // namespace rcoase
