#pragma once

// Episode simulation and deviation audits for tabulated strategy profiles of
// the three-player game (seller prices, nature picks partition thresholds,
// buyer stops). Profiles are built from named constructions; every rule is
// total on the reachable state space, and profiles that punish seller
// deviations carry the reverted regime explicitly. Audits compute exact
// continuation values by recursion over public states, not Monte Carlo.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcoase/coase.hpp"
#include "rcoase/nature.hpp"
#include "rcoase/parallel.hpp"
#include "rcoase/pressed.hpp"
#include "rcoase/robust.hpp"

namespace rcoase {

// Public state of the game: top of the remaining value interval, period, and
// whether play has reverted to the punishment regime.
struct ProfileState {
    double cutoff;
    int t;
    bool punished = false;
};

struct StrategyProfile {
    std::string kind;
    json params;     // construction parameters, for serialization
    GameConfig cfg;  // distribution / delta / horizon context

    // seller price at a public state
    std::function<double(const ProfileState&)> price_rule;
    // nature's partition threshold given the current price; a value at or
    // above the cutoff means "no information"
    std::function<double(const ProfileState&, double)> threshold_rule;
    // buyer purchase probability given her posterior mean
    std::function<double(double mean, double price, const ProfileState&)> buy_prob_rule;

    bool reverts_on_seller_deviation = false;

    json to_json() const {
        json j = params;
        j["kind"] = kind;
        return j;
    }
};

struct SimReport {
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    double profit_mean = 0.0, profit_ci = 0.0;    // 95% half-width
    double surplus_mean = 0.0, surplus_ci = 0.0;  // 95% half-width
    std::vector<std::int64_t> sale_time_hist;     // index t-1 = sales at period t
    std::int64_t no_sale = 0;
    // audit suprema (exact over the audited grids), when audits were run
    std::optional<double> max_seller_deviation_gain;
    std::optional<double> max_nature_deviation_drop;
    std::optional<double> max_buyer_violation;
};

namespace detail {

// splitmix64; per-path streams are seeded by (seed, path index) so results do
// not depend on the worker count
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct PathRng {
    std::uint64_t state;
    PathRng(std::uint64_t seed, std::uint64_t idx) : state(seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1))) {
        for (int i = 0; i < 3; ++i) splitmix64(state);
    }
    double uniform() {
        return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Profile constructions
// ---------------------------------------------------------------------------

namespace detail {

struct RobustRules {
    std::shared_ptr<const SolvedPolicy> policy;  // on the pressed distribution
    std::shared_ptr<const PressedDistribution> pressed;
    // indifference band for the cutoff rule: wide enough to absorb the
    // tabulation noise of the pressed transform, far below any real margin
    double tie_band = 1e-7;

    double pressed_state(double cutoff_f) const { return pressed->L(cutoff_f); }

    // marginal posterior-mean type at (t, state) for price p
    double marginal_type(const ProfileState& s, double p) const {
        const double wc = pressed_state(s.cutoff);
        return policy->cutoff_for_price(s.t, wc, p);
    }

    double price(const ProfileState& s) const {
        return policy->price(s.t, pressed_state(s.cutoff));
    }

    double threshold(const ProfileState& s, double p) const {
        const double lo = pressed->base().lo();
        const double w = marginal_type(s, p);
        if (w <= lo + 1e-13) return lo;
        if (w >= pressed_state(s.cutoff) - 1e-13) return s.cutoff;  // no sale, no information
        return pressed->L_inv(w);
    }

    double buy_prob(double mean, double p, const ProfileState& s) const {
        // cutoff rule; indifference breaks against the seller
        return mean > marginal_type(s, p) + tie_band ? 1.0 : 0.0;
    }
};

}  // namespace detail

// Sequentially worst-case equilibrium profile: seller plays the pressed
// known-values policy, nature the indifference thresholds, buyer the cutoff
// rule. Optional planted defects for audit tests: "price_shift" {t, dp}
// perturbs the period-t price; "buyer":"greedy" makes the buyer ignore option
// value and buy whenever mean >= price.
inline StrategyProfile make_robust_profile(const GameConfig& cfg, const json& spec = json::object()) {
    auto pressed = std::make_shared<PressedDistribution>(press(cfg.dist));
    GameConfig gcfg = cfg;
    gcfg.dist = pressed->as_distribution();
    gcfg.tol.exact_depth = 0;  // rules are hot paths: tabulate every stage
    auto policy = std::make_shared<SolvedPolicy>(gcfg);
    detail::RobustRules rules{policy, pressed, 1e-7 * (cfg.dist.hi() - cfg.dist.lo())};

    StrategyProfile prof;
    prof.kind = "robust";
    prof.cfg = cfg;
    prof.params = json::object();

    double shift_dp = 0.0;
    int shift_t = -1;
    if (spec.contains("price_shift")) {
        shift_t = spec.at("price_shift").at("t").get<int>();
        shift_dp = spec.at("price_shift").at("dp").get<double>();
        prof.params["price_shift"] = {{"t", shift_t}, {"dp", shift_dp}};
    }
    const bool greedy = spec.value("buyer", std::string()) == "greedy";
    if (greedy) prof.params["buyer"] = "greedy";

    prof.price_rule = [rules, shift_t, shift_dp](const ProfileState& s) {
        double p = rules.price(s);
        if (s.t == shift_t && !s.punished) p += shift_dp;
        return p;
    };
    prof.threshold_rule = [rules](const ProfileState& s, double p) { return rules.threshold(s, p); };
    if (greedy) {
        prof.buy_prob_rule = [](double mean, double p, const ProfileState&) {
            return mean >= p ? 1.0 : 0.0;
        };
    } else {
        prof.buy_prob_rule = [rules](double mean, double p, const ProfileState& s) {
            return rules.buy_prob(mean, p, s);
        };
    }
    return prof;
}

// Constant-price never-clearing profile: on path the seller charges E[v],
// nature reveals nothing, and the buyer mixes with probability rho (last
// period: v*/E[v]); any seller deviation reverts play to the worst-case
// equilibrium profile.
inline StrategyProfile make_constant_price_profile(const GameConfig& cfg, double v_star) {
    const double mean = cfg.dist.mean();
    const double rho = v_star * (1.0 - cfg.delta) / (mean - cfg.delta * v_star);
    if (!(rho > 0.0 && rho < 1.0))
        throw validation_error("constant-price profile: rho outside (0,1); check v_star");
    StrategyProfile rev = make_robust_profile(cfg);

    StrategyProfile prof;
    prof.kind = "constant-price";
    prof.cfg = cfg;
    prof.params = {{"v_star", v_star}, {"rho", rho}};
    prof.reverts_on_seller_deviation = true;
    const int T = cfg.horizon;
    prof.price_rule = [rev, mean](const ProfileState& s) {
        return s.punished ? rev.price_rule(s) : mean;
    };
    prof.threshold_rule = [rev](const ProfileState& s, double p) {
        return s.punished ? rev.threshold_rule(s, p) : s.cutoff;
    };
    prof.buy_prob_rule = [rev, rho, v_star, mean, T](double m, double p, const ProfileState& s) {
        if (s.punished) return rev.buy_prob_rule(m, p, s);
        return (T != kInfiniteHorizon && s.t == T) ? v_star / mean : rho;
    };
    return prof;
}

// Two-period committed-nature profile: nature commits to the first-period
// threshold map; after no sale the seller charges the continuation profit of
// the truncated market and nature stays silent, while a second-period seller
// deviation is met with the static worst-case threshold.
inline StrategyProfile make_commitment_profile(const GameConfig& cfg) {
    if (cfg.horizon != 2)
        throw validation_error("commitment profile: two-period construction");
    auto pressed = std::make_shared<PressedDistribution>(press(cfg.dist));
    const auto outcome = nature_commitment_profit(cfg.dist, cfg.delta, pressed.get());
    const double delta = cfg.delta;
    const double hi = cfg.dist.hi(), lo = cfg.dist.lo();

    auto Pi2 = [pressed](double y) { return detail::pressed_truncated_static(*pressed, y).first; };
    auto threshold_of_price = [pressed, Pi2, delta, hi, lo](double p) {
        auto p1_of = [&](double y) { return (1.0 - delta) * pressed->L(y) + delta * Pi2(y); };
        if (p >= p1_of(hi)) return hi;
        if (p <= p1_of(lo + 1e-9 * (hi - lo))) return lo;
        return brent_root([&](double y) { return p1_of(y) - p; }, lo + 1e-9 * (hi - lo), hi, 1e-12);
    };

    StrategyProfile prof;
    prof.kind = "commitment";
    prof.cfg = cfg;
    prof.params = {{"p1", outcome.p1}, {"threshold", outcome.threshold}};
    const double y_star = outcome.threshold;
    const double p2_star = Pi2(y_star);
    auto p2_of = [Pi2, y_star, p2_star](double cutoff) {
        return std::abs(cutoff - y_star) <= 1e-12 ? p2_star : Pi2(cutoff);
    };
    prof.price_rule = [outcome, p2_of](const ProfileState& s) {
        return s.t == 1 ? outcome.p1 : p2_of(s.cutoff);
    };
    prof.threshold_rule = [threshold_of_price, p2_of, pressed](const ProfileState& s, double p) {
        if (s.t == 1) return threshold_of_price(p);
        // on the committed path nature stays silent; against a deviating
        // second-period price it reveals the static worst-case threshold
        if (std::abs(p - p2_of(s.cutoff)) <= 1e-9) return s.cutoff;
        if (p >= pressed->L(s.cutoff)) return s.cutoff;
        return pressed->L_inv(p);
    };
    const double band = 1e-7 * (hi - lo);
    prof.buy_prob_rule = [pressed, threshold_of_price, band](double m, double p,
                                                            const ProfileState& s) {
        if (s.t == 1) return m > pressed->L(threshold_of_price(p)) + band ? 1.0 : 0.0;
        return m > p + band ? 1.0 : 0.0;
    };
    return prof;
}

// Exogenous price path with silent nature. Buyer rule: "greedy" buys whenever
// the posterior mean covers the price (ignoring option value), "never" always
// delays. Useful as a control and for planting buyer-rationality violations.
inline StrategyProfile make_fixed_path_profile(const GameConfig& cfg, std::vector<double> prices,
                                               const std::string& buyer = "greedy") {
    if (prices.empty()) throw validation_error("fixed-path profile: empty price list");
    StrategyProfile prof;
    prof.kind = "fixed-path";
    prof.cfg = cfg;
    prof.params = {{"prices", prices}, {"buyer", buyer}};
    prof.price_rule = [prices](const ProfileState& s) {
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(s.t), prices.size());
        return prices[i - 1];
    };
    prof.threshold_rule = [](const ProfileState& s, double) { return s.cutoff; };
    if (buyer == "never") {
        prof.buy_prob_rule = [](double, double, const ProfileState&) { return 0.0; };
    } else if (buyer == "greedy") {
        prof.buy_prob_rule = [](double m, double p, const ProfileState&) {
            return m >= p ? 1.0 : 0.0;
        };
    } else {
        throw validation_error("fixed-path profile: buyer must be \"greedy\" or \"never\"");
    }
    return prof;
}

// Degenerate control profile: price at the bottom of the support, no
// information, immediate purchase.
inline StrategyProfile make_clear_now_profile(const GameConfig& cfg) {
    StrategyProfile prof;
    prof.kind = "clear-now";
    prof.cfg = cfg;
    prof.params = json::object();
    const double lo = cfg.dist.lo();
    prof.price_rule = [lo](const ProfileState&) { return lo; };
    prof.threshold_rule = [](const ProfileState& s, double) { return s.cutoff; };
    prof.buy_prob_rule = [](double, double, const ProfileState&) { return 1.0; };
    return prof;
}

inline StrategyProfile make_profile(const GameConfig& cfg, const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw validation_error("profile spec: expected an object with a \"kind\" field");
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "robust") return make_robust_profile(cfg, spec);
    if (kind == "constant-price")
        return make_constant_price_profile(cfg, spec.at("v_star").get<double>());
    if (kind == "commitment") return make_commitment_profile(cfg);
    if (kind == "clear-now") return make_clear_now_profile(cfg);
    if (kind == "fixed-path")
        return make_fixed_path_profile(cfg, spec.at("prices").get<std::vector<double>>(),
                                       spec.value("buyer", std::string("greedy")));
    throw validation_error("profile spec: unknown kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

namespace detail {

inline int effective_horizon(const GameConfig& cfg) {
    if (!cfg.infinite()) return cfg.horizon;
    // discount-negligible tail for infinite games
    const int cap = static_cast<int>(std::ceil(std::log(1e-14) / std::log(cfg.delta)));
    return std::min(cap, 4000);
}

}  // namespace detail

inline SimReport simulate(const StrategyProfile& prof, const GameConfig& cfg,
                          std::int64_t n_paths, std::uint64_t seed, int jobs = 0) {
    if (n_paths < 1) throw validation_error("simulate: n_paths >= 1 required");
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo(), hi = F.hi();
    const int T = detail::effective_horizon(cfg);

    std::vector<double> profit(static_cast<std::size_t>(n_paths));
    std::vector<double> surplus(static_cast<std::size_t>(n_paths));
    std::vector<std::int32_t> sale_t(static_cast<std::size_t>(n_paths));

    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t i) {
        detail::PathRng rng(seed, static_cast<std::uint64_t>(i));
        const double v = F.quantile(rng.uniform());
        double cell_a = lo, cell_b = hi;  // buyer's private posterior interval
        ProfileState s{hi, 1, false};
        double pr = 0.0, su = 0.0;
        std::int32_t sold_at = -1;
        double disc = 1.0;
        for (int t = 1; t <= T; ++t) {
            s.t = t;
            const double p = prof.price_rule(s);
            const double y = prof.threshold_rule(s, p);
            bool informative = (y < s.cutoff - 1e-13 && y > lo + 1e-13);
            if (informative) {
                if (v > y)
                    cell_a = std::max(cell_a, y);
                else
                    cell_b = std::min(cell_b, y);
            } else if (y <= lo + 1e-13 && y < s.cutoff - 1e-13) {
                informative = true;  // threshold at the bottom: "buy" signal for everyone
                cell_a = std::max(cell_a, y);
            }
            const double m = F.interval_mean(cell_a, cell_b);
            const double beta = prof.buy_prob_rule(m, p, s);
            const bool buy = beta >= 1.0 ? true : (beta <= 0.0 ? false : rng.uniform() < beta);
            if (buy) {
                pr = disc * p;
                su = disc * (v - p);
                sold_at = t;
                break;
            }
            if (informative && v <= y) s.cutoff = std::min(s.cutoff, std::max(y, lo));
            disc *= cfg.delta;
        }
        profit[i] = pr;
        surplus[i] = su;
        sale_t[i] = sold_at;
    }, jobs);

    SimReport rep;
    rep.n_paths = n_paths;
    rep.seed = seed;
    rep.sale_time_hist.assign(static_cast<std::size_t>(T), 0);
    double sp = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < profit.size(); ++i) {
        sp += profit[i];
        ss += surplus[i];
        if (sale_t[i] > 0)
            rep.sale_time_hist[static_cast<std::size_t>(sale_t[i] - 1)]++;
        else
            rep.no_sale++;
    }
    const double n = static_cast<double>(n_paths);
    rep.profit_mean = sp / n;
    rep.surplus_mean = ss / n;
    double vp = 0.0, vs = 0.0;
    for (std::size_t i = 0; i < profit.size(); ++i) {
        vp += (profit[i] - rep.profit_mean) * (profit[i] - rep.profit_mean);
        vs += (surplus[i] - rep.surplus_mean) * (surplus[i] - rep.surplus_mean);
    }
    if (n_paths > 1) {
        rep.profit_ci = 1.959963984540054 * std::sqrt(vp / (n - 1.0) / n);
        rep.surplus_ci = 1.959963984540054 * std::sqrt(vs / (n - 1.0) / n);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exact continuation values and deviation audits
// ---------------------------------------------------------------------------

namespace detail {

// Seller's expected discounted profit per remaining buyer from state s under
// the profile, optionally overriding the current-period price (a deviation,
// which flips the punished flag for profiles with reversion).
inline double seller_state_value(const StrategyProfile& prof, const GameConfig& cfg,
                                 ProfileState s, std::optional<double> override_price,
                                 int depth_cap) {
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo();
    const int T = cfg.infinite() ? s.t + depth_cap : cfg.horizon;
    if (s.t > T || depth_cap <= 0) return 0.0;
    if (s.cutoff <= lo + 1e-13) return 0.0;

    double p;
    if (override_price) {
        p = *override_price;
        if (prof.reverts_on_seller_deviation) s.punished = true;
    } else {
        p = prof.price_rule(s);
    }
    const double y = std::clamp(prof.threshold_rule(s, p), lo, s.cutoff);
    const double Fc = F.cdf(s.cutoff);

    if (y >= s.cutoff - 1e-13) {
        // no information: a single group with the full remaining mean
        const double m = F.interval_mean(lo, s.cutoff);
        const double beta = prof.buy_prob_rule(m, p, s);
        ProfileState nx{s.cutoff, s.t + 1, s.punished};
        const double cont =
            (beta >= 1.0) ? 0.0 : seller_state_value(prof, cfg, nx, std::nullopt, depth_cap - 1);
        return beta * p + (1.0 - beta) * cfg.delta * cont;
    }

    const double mass_above = (Fc - F.cdf(y)) / Fc;
    const double mass_below = 1.0 - mass_above;
    const double m_above = F.interval_mean(y, s.cutoff);
    const double m_below = F.interval_mean(lo, y);
    const double beta_a = prof.buy_prob_rule(m_above, p, s);
    const double beta_b = (mass_below > 1e-13) ? prof.buy_prob_rule(m_below, p, s) : 0.0;

    if (beta_a >= 1.0 && beta_b >= 1.0) return p;
    if (beta_a >= 1.0 && beta_b <= 0.0) {
        ProfileState nx{y, s.t + 1, s.punished};
        const double cont = seller_state_value(prof, cfg, nx, std::nullopt, depth_cap - 1);
        return mass_above * p + mass_below * cfg.delta * cont;
    }
    if (beta_a <= 0.0 && beta_b <= 0.0) {
        ProfileState nx{s.cutoff, s.t + 1, s.punished};
        return cfg.delta * seller_state_value(prof, cfg, nx, std::nullopt, depth_cap - 1);
    }
    throw validation_error(
        "audit: profile incompleteness at state (cutoff=" + std::to_string(s.cutoff) +
        ", t=" + std::to_string(s.t) + "): unsupported purchase pattern across signal groups");
}

// Enumerate the on-path public states (deterministic partition path, or the
// stationary repeated state for mixing profiles).
inline std::vector<ProfileState> on_path_states(const StrategyProfile& prof,
                                                const GameConfig& cfg) {
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo();
    std::vector<ProfileState> states;
    ProfileState s{F.hi(), 1, false};
    const int T = cfg.infinite() ? effective_horizon(cfg) : cfg.horizon;
    for (int t = 1; t <= T; ++t) {
        s.t = t;
        if (s.cutoff <= lo + 1e-13) break;
        states.push_back(s);
        const double p = prof.price_rule(s);
        const double y = std::clamp(prof.threshold_rule(s, p), lo, s.cutoff);
        if (y >= s.cutoff - 1e-13) {
            // mixing/no-information profile: the state repeats; for the
            // stationary infinite game one representative state suffices
            if (cfg.infinite()) break;
            continue;
        }
        const double m_below = F.interval_mean(lo, y);
        if (prof.buy_prob_rule(m_below, p, s) > 0.0) break;  // market clears
        s.cutoff = y;
    }
    return states;
}

}  // namespace detail

// Max over on-path states and grid prices of the seller's deviation gain.
inline double audit_seller(const StrategyProfile& prof, const GameConfig& cfg,
                           const std::vector<double>& price_grid, int jobs = 0) {
    const auto states = detail::on_path_states(prof, cfg);
    const int cap = detail::effective_horizon(cfg) + 1;
    std::vector<double> gains(states.size() * price_grid.size());
    std::vector<double> on_vals(states.size());
    for (std::size_t si = 0; si < states.size(); ++si)
        on_vals[si] = detail::seller_state_value(prof, cfg, states[si], std::nullopt, cap);
    parallel_for(gains.size(), [&](std::size_t k) {
        const std::size_t si = k / price_grid.size();
        const double p = price_grid[k % price_grid.size()];
        const double dev = detail::seller_state_value(prof, cfg, states[si], p, cap);
        gains[k] = dev - on_vals[si];
    }, jobs);
    double mx = -std::numeric_limits<double>::infinity();
    for (double g : gains) mx = std::max(mx, g);
    return mx;
}

// Max over on-path states and grid thresholds of the profit reduction nature
// forgoes by not deviating; ~0 certifies the sequential worst case.
inline double audit_nature(const StrategyProfile& prof, const GameConfig& cfg,
                           const std::vector<double>& threshold_grid, int jobs = 0) {
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo();
    const auto states = detail::on_path_states(prof, cfg);
    const int cap = detail::effective_horizon(cfg) + 1;
    std::vector<double> drops(states.size() * threshold_grid.size(),
                              -std::numeric_limits<double>::infinity());
    std::vector<double> on_vals(states.size());
    for (std::size_t si = 0; si < states.size(); ++si)
        on_vals[si] = detail::seller_state_value(prof, cfg, states[si], std::nullopt, cap);
    parallel_for(drops.size(), [&](std::size_t k) {
        const std::size_t si = k / threshold_grid.size();
        const ProfileState& s = states[si];
        double y = threshold_grid[k % threshold_grid.size()];
        if (y > s.cutoff || y < lo) return;
        const double p = prof.price_rule(s);
        const double Fc = F.cdf(s.cutoff);
        double dev;
        if (y >= s.cutoff - 1e-13) {
            const double m = F.interval_mean(lo, s.cutoff);
            const double beta = prof.buy_prob_rule(m, p, s);
            ProfileState nx{s.cutoff, s.t + 1, false};
            const double cont = (beta >= 1.0)
                                    ? 0.0
                                    : detail::seller_state_value(prof, cfg, nx, std::nullopt, cap);
            dev = beta * p + (1.0 - beta) * cfg.delta * cont;
        } else {
            const double mass_above = (Fc - F.cdf(y)) / Fc;
            const double m_below = F.interval_mean(lo, y);
            const double beta_b = prof.buy_prob_rule(m_below, p, s);
            if (beta_b >= 1.0) {
                dev = p;  // both groups purchase
            } else {
                ProfileState nx{y, s.t + 1, false};
                const double cont = detail::seller_state_value(prof, cfg, nx, std::nullopt, cap);
                dev = mass_above * p + (1.0 - mass_above) * cfg.delta * cont;
            }
        }
        drops[k] = on_vals[si] - dev;
    }, jobs);
    double mx = -std::numeric_limits<double>::infinity();
    for (double d : drops) mx = std::max(mx, d);
    return mx;
}

namespace detail {

// Buyer's optimal-stopping value on a posterior cell against the profile's
// no-purchase price/threshold path.
inline double buyer_cell_value(const StrategyProfile& prof, const GameConfig& cfg, double a,
                               double b, ProfileState s, int depth_cap) {
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo();
    const int T = cfg.infinite() ? s.t + depth_cap : cfg.horizon;
    if (s.t > T || depth_cap <= 0) return 0.0;
    const double mass = F.cdf(b) - F.cdf(a);
    if (mass <= 1e-13) return 0.0;
    const double p = prof.price_rule(s);
    const double y = std::clamp(prof.threshold_rule(s, p), lo, s.cutoff);
    ProfileState nx{(y < s.cutoff - 1e-13) ? y : s.cutoff, s.t + 1, s.punished};
    auto piece = [&](double ca, double cb) {
        const double pm = F.cdf(cb) - F.cdf(ca);
        if (pm <= 1e-13) return 0.0;
        const double m = F.interval_mean(ca, cb);
        const double stay = cfg.delta * buyer_cell_value(prof, cfg, ca, cb, nx, depth_cap - 1);
        return (pm / mass) * std::max(m - p, stay);
    };
    if (y <= a || y >= b) return piece(a, b);
    return piece(a, y) + piece(y, b);
}

}  // namespace detail

// Max violation of the buyer's stopping optimality across reachable
// (posterior cell, period) nodes under the profile.
inline double audit_buyer(const StrategyProfile& prof, const GameConfig& cfg) {
    const ValueDistribution& F = cfg.dist;
    const double lo = F.lo(), hi = F.hi();
    const int cap = detail::effective_horizon(cfg) + 1;
    double worst = 0.0;
    // walk the on-path cell tree: at each node, compare the rule's action with
    // the optimal stopping value
    std::function<void(double, double, ProfileState, int)> walk = [&](double a, double b,
                                                                      ProfileState s, int depth) {
        const int T = cfg.infinite() ? detail::effective_horizon(cfg) : cfg.horizon;
        if (s.t > T || depth <= 0) return;
        if (F.cdf(b) - F.cdf(a) <= 1e-13) return;
        const double p = prof.price_rule(s);
        const double y = std::clamp(prof.threshold_rule(s, p), lo, s.cutoff);
        ProfileState nx{(y < s.cutoff - 1e-13) ? y : s.cutoff, s.t + 1, s.punished};
        const bool stationary_repeat = cfg.infinite() && nx.cutoff >= s.cutoff - 1e-13;
        auto examine = [&](double ca, double cb) {
            if (F.cdf(cb) - F.cdf(ca) <= 1e-13) return;
            const double m = F.interval_mean(ca, cb);
            const double beta = prof.buy_prob_rule(m, p, s);
            const double stay = cfg.delta * detail::buyer_cell_value(prof, cfg, ca, cb, nx,
                                                                     std::min(depth, 64) - 1);
            const double buy = m - p;
            double viol = 0.0;
            if (beta >= 1.0)
                viol = stay - buy;
            else if (beta <= 0.0)
                viol = buy - stay;
            else
                viol = std::abs(buy - stay);
            worst = std::max(worst, viol);
            if (beta < 1.0 && !stationary_repeat) walk(ca, cb, nx, depth - 1);
        };
        if (y > a && y < b) {
            examine(y, b);
            examine(a, y);
        } else {
            examine(a, b);
        }
    };
    walk(lo, hi, ProfileState{hi, 1, false}, cap);
    return worst;
}

}  // namespace rcoase
