#pragma once

// Nature's problems beyond the sequential worst case: the two-period
// committed information arrival construction, the constrained minimization of
// seller profit over partitional threshold processes against a fixed price
// path, the pressed-ratio monotonicity check with its truncation
// neighborhood, the local perturbation sign test and the worse-past-
// information threshold.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rcoase/coase.hpp"
#include "rcoase/pressed.hpp"
#include "rcoase/robust.hpp"

namespace rcoase {

// ---------------------------------------------------------------------------
// Committed nature, two periods. Nature picks a first-period threshold y as a
// function of the price; after no sale the seller charges the continuation
// profit Pi2(y) of the truncated market, nature reveals nothing more, and the
// remaining buyer (posterior mean L(y)) purchases. The first-period
// indifference therefore leaves the buyer the continuation surplus
// L(y) - Pi2(y), so p1(y) = (1-d) L(y) + d Pi2(y). The seller's optimum over
// p1 is solved in threshold space. When the maximizer hits the top of the
// support the scheme shuts down first-period trade entirely and profit is
// d times the static pressed profit.
// ---------------------------------------------------------------------------

struct CommitmentOutcome {
    double p1 = 0.0;
    double threshold = 0.0;
    double profit = 0.0;
    bool no_first_period_sale = false;
};

namespace detail {

// Static worst-case monopoly profit per remaining buyer on the truncation
// [v_lo, y]: max_p p (F(y) - G(p)) / F(y), with the maximizing price.
inline std::pair<double, double> pressed_truncated_static(const PressedDistribution& P, double y) {
    const ValueDistribution& F = P.base();
    const double lo = F.lo();
    const double Fy = F.cdf(y);
    if (Fy < 1e-12) return {lo, lo};
    const double top = P.L(y);
    auto obj = [&](double p) { return p * (Fy - F.cdf(P.L_inv(p))) / Fy; };
    auto foc = [&](double p) { return (Fy - F.cdf(P.L_inv(p))) - p * P.G_pdf(p); };
    const auto r = maximize_scalar(obj, lo, top, 129, 1e-13, foc);
    return {r.value, r.x};
}

}  // namespace detail

inline CommitmentOutcome nature_commitment_profit(const ValueDistribution& F, double delta,
                                                  const PressedDistribution* pressed = nullptr) {
    if (!(delta > 0.0 && delta < 1.0))
        throw validation_error("nature_commitment_profit: delta in (0,1)");
    PressedDistribution local;
    if (!pressed) {
        local = press(F);
        pressed = &local;
    }
    const PressedDistribution& P = *pressed;
    const double lo = F.lo(), hi = F.hi();

    auto Pi2 = [&](double y) { return detail::pressed_truncated_static(P, y).first; };
    auto p1_of = [&](double y) { return (1.0 - delta) * P.L(y) + delta * Pi2(y); };
    auto S = [&](double y) {
        return p1_of(y) * (1.0 - F.cdf(y)) + delta * F.cdf(y) * Pi2(y);
    };
    auto dS = [&](double y) {
        const auto [pi2, pstar] = detail::pressed_truncated_static(P, y);
        const double Fy = F.cdf(y), fy = F.pdf(y);
        const double dPi2 = (Fy < 1e-10) ? 0.0 : pstar * F.cdf(P.L_inv(pstar)) * fy / (Fy * Fy);
        const double dp1 = (1.0 - delta) * P.L_deriv(y) + delta * dPi2;
        return dp1 * (1.0 - Fy) - p1_of(y) * fy + delta * (fy * pi2 + Fy * dPi2);
    };

    const double eps = 1e-7 * (hi - lo);
    const auto r = maximize_scalar(S, lo + eps, hi, 257, 1e-12, dS);

    CommitmentOutcome out;
    out.threshold = r.x;
    out.profit = r.value;
    out.p1 = p1_of(r.x);
    out.no_first_period_sale = (r.x >= hi - 1e-7 * (hi - lo));
    if (out.no_first_period_sale) {
        out.threshold = hi;
        out.profit = delta * Pi2(hi);
        out.p1 = p1_of(hi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Worst case over partitional processes against a fixed declining price path.
// Minimizes profit_of_thresholds subject to nonpositive obedience residuals,
// by nested grid search plus coordinate descent, seeded with the sequentially
// binding (all-indifferent) process. The search space is partitional
// threshold processes only.
// ---------------------------------------------------------------------------

struct WorstCaseOptions {
    int coarse = 64;
    int refinements = 2;
    int refine_points = 17;
    double threshold_tol = 1e-6;
    double feas_tol = 1e-9;
};

struct WorstCaseResult {
    std::vector<double> thresholds;
    double min_profit = 0.0;
    std::vector<double> residuals;
    bool feasible = true;  // false: no obedient process found, all-clear returned
    std::string note = "search restricted to partitional threshold processes";
};

namespace detail {

// residual/profit evaluation from a splined partial-expectation table, so the
// combinatorial search does no quadrature in its inner loop
struct ThresholdEvaluator {
    const ValueDistribution& F;
    std::vector<double> prices;
    double delta;
    double lo, hi;
    MonotoneCubic pe_;  // y -> int_lo^y v f dv

    ThresholdEvaluator(const ValueDistribution& F_, std::vector<double> p, double d,
                       std::size_t grid_n = 4097)
        : F(F_), prices(std::move(p)), delta(d), lo(F_.lo()), hi(F_.hi()) {
        const auto ys = linspace(lo, hi, grid_n);
        std::vector<double> pe(grid_n, 0.0);
        for (std::size_t i = 1; i < grid_n; ++i)
            pe[i] = pe[i - 1] +
                    integrate_panel([&](double v) { return v * F.pdf(v); }, ys[i - 1], ys[i]);
        pe_ = MonotoneCubic(ys, pe);
    }

    double cdf(double y) const { return F.cdf(std::clamp(y, lo, hi)); }
    double pe(double y) const { return pe_(std::clamp(y, lo, hi)); }

    double profit(const std::vector<double>& y) const {
        double out = 0.0, disc = 1.0, Fprev = 1.0;
        for (std::size_t s = 0; s < prices.size(); ++s) {
            const double Fy = cdf(y[s]);
            out += disc * prices[s] * (Fprev - Fy);
            Fprev = Fy;
            disc *= delta;
        }
        return out;
    }

    // largest obedience residual over periods first..T (0-based first)
    double max_residual(const std::vector<double>& y, std::size_t first = 0) const {
        const std::size_t T = prices.size();
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t t = first; t < T; ++t) {
            const double Fy = cdf(y[t]);
            double r;
            if (Fy < 1e-12) {
                r = lo - prices[t];
            } else {
                double cont = 0.0, disc = 1.0;
                for (std::size_t s = t + 1; s < T; ++s) {
                    disc *= delta;
                    cont += disc * ((pe(y[s - 1]) - pe(y[s])) -
                                    prices[s] * (cdf(y[s - 1]) - cdf(y[s])));
                }
                r = (pe(y[t]) / Fy - prices[t]) - cont / Fy;
            }
            worst = std::max(worst, r);
        }
        return worst;
    }
};

}  // namespace detail

// Sequentially binding process: the last threshold solves L(y_T) = p_T and
// each earlier one makes the told-not-to-buy group exactly indifferent given
// the later thresholds. Clamped into [v_lo, v_hi]; may be infeasible when a
// residual cannot be zeroed, in which case the feasible cap is used.
inline std::vector<double> binding_thresholds(const ValueDistribution& F,
                                              const std::vector<double>& prices, double delta,
                                              const PressedDistribution& P) {
    const std::size_t T = prices.size();
    const double lo = F.lo(), hi = F.hi();
    std::vector<double> y(T, lo);
    for (std::size_t ti = T; ti-- > 0;) {
        const std::size_t t = ti;
        auto resid = [&](double yt) {
            std::vector<double> cand(y.begin() + static_cast<long>(t), y.end());
            cand[0] = yt;
            std::vector<double> pr(prices.begin() + static_cast<long>(t), prices.end());
            return indifference_residuals(F, pr, cand, delta).front();
        };
        const double floor = (t + 1 < T) ? y[t + 1] : lo;
        if (t + 1 == T) {
            // static: L(y) = p_T
            if (prices[t] <= lo)
                y[t] = lo;
            else if (prices[t] >= P.w_hi())
                y[t] = hi;
            else
                y[t] = P.L_inv(prices[t]);
            continue;
        }
        if (resid(hi) <= 0.0) {
            y[t] = hi;
            continue;
        }
        if (resid(std::max(floor, lo + 1e-12)) >= 0.0) {
            y[t] = floor;  // cannot relax to indifference; keep feasibility cap
            continue;
        }
        y[t] = brent_root(resid, std::max(floor, lo + 1e-12), hi, 1e-12);
    }
    return y;
}

inline WorstCaseResult worst_case_partitional(const ValueDistribution& F,
                                              const std::vector<double>& prices, double delta,
                                              const WorstCaseOptions& opts = {}) {
    if (prices.empty()) throw validation_error("worst_case_partitional: empty price path");
    for (std::size_t t = 1; t < prices.size(); ++t)
        if (prices[t] > prices[t - 1] + 1e-12)
            throw validation_error("worst_case_partitional: prices must be declining");
    const std::size_t T = prices.size();
    const double lo = F.lo(), hi = F.hi();
    const auto P = press(F);
    detail::ThresholdEvaluator ev(F, prices, delta);

    // Profit is strictly decreasing in every threshold on a declining path, so
    // the first threshold sits at its obedience cap given the later ones; the
    // search runs over the remaining T-1 thresholds with y_1 profiled out.
    // In g(x) = F(x) r_1(x) form,
    //   g(x) = (1-d) PE(x) - (p_1 - d p_2) F(x) + K(tail),
    // which is quasiconvex with minimum at vbar_1, so the outermost feasible
    // first threshold is either the top of the support or the upper root.
    auto cap_first = [&](const std::vector<double>& y) {
        if (T == 1) {
            if (prices[0] <= lo) return lo;
            return prices[0] >= P.w_hi() ? hi : P.L_inv(prices[0]);
        }
        double C2 = 0.0, disc = delta;
        for (std::size_t s = 2; s < T; ++s) {
            disc *= delta;
            C2 += disc * ((ev.pe(y[s - 1]) - ev.pe(y[s])) -
                          prices[s] * (ev.cdf(y[s - 1]) - ev.cdf(y[s])));
        }
        const double K = delta * (ev.pe(y[1]) - prices[1] * ev.cdf(y[1])) - C2;
        auto g = [&](double x) {
            return (1.0 - delta) * ev.pe(x) - (prices[0] - delta * prices[1]) * ev.cdf(x) + K;
        };
        if (g(hi) <= opts.feas_tol) return hi;
        const double vbar1 = (prices[0] - delta * prices[1]) / (1.0 - delta);
        const double left = std::clamp(vbar1, y[1], hi);
        if (g(left) > opts.feas_tol) return kNaN;  // no feasible first threshold
        return brent_root(g, left, hi, 1e-13);
    };

    double best_profit = std::numeric_limits<double>::infinity();
    std::vector<double> best_y;

    // evaluates a tail (y_2..y_T), completing it with the capped y_1;
    // returns the full process profit or NaN when infeasible
    auto eval_tail = [&](const std::vector<double>& tail, std::vector<double>* full) {
        std::vector<double> y(T);
        for (std::size_t i = 1; i < T; ++i) {
            y[i] = tail[i - 1];
            if (i > 1 && y[i] > y[i - 1] + 1e-12) return kNaN;
        }
        if (T > 1) {
            if (ev.max_residual(y, 1) > opts.feas_tol) return kNaN;
            y[0] = cap_first(y);
            if (std::isnan(y[0]) || y[0] < y[1]) return kNaN;
        } else {
            y[0] = cap_first(y);
        }
        if (full) *full = y;
        return ev.profit(y);
    };

    auto consider_tail = [&](const std::vector<double>& tail) {
        std::vector<double> full;
        const double pi = eval_tail(tail, &full);
        if (!std::isnan(pi) && pi < best_profit) {
            best_profit = pi;
            best_y = full;
        }
    };

    // seed: the sequentially binding process
    {
        const auto bind = binding_thresholds(F, prices, delta, P);
        consider_tail(std::vector<double>(bind.begin() + (T > 1 ? 1 : 0), bind.end()));
        if (T == 1) consider_tail({});
    }

    const std::size_t D = T - 1;  // free dimensions after profiling out y_1
    if (D > 0) {
        std::vector<std::vector<double>> grids(D,
                                               linspace(lo, hi, static_cast<std::size_t>(opts.coarse)));
        for (int pass = 0; pass <= opts.refinements; ++pass) {
            std::vector<double> tail(D);
            std::function<void(std::size_t, double)> rec = [&](std::size_t dim, double upper) {
                if (dim == D) {
                    consider_tail(tail);
                    return;
                }
                for (double x : grids[dim]) {
                    if (x > upper + 1e-12) break;
                    tail[dim] = x;
                    rec(dim + 1, x);
                }
            };
            rec(0, hi);
            if (best_y.empty()) break;
            for (std::size_t j = 0; j < D; ++j) {
                const double h = (grids[j].back() - grids[j].front()) /
                                 static_cast<double>(grids[j].size() - 1);
                const double a = std::max(lo, best_y[j + 1] - 1.5 * h);
                const double b = std::min(hi, best_y[j + 1] + 1.5 * h);
                grids[j] = linspace(a, b, static_cast<std::size_t>(opts.refine_points));
            }
        }

        // coordinate descent on the tail; infeasible points score +inf
        if (!best_y.empty()) {
            std::vector<double> tail(best_y.begin() + 1, best_y.end());
            for (int sweep = 0; sweep < 60; ++sweep) {
                double moved = 0.0;
                for (std::size_t j = 0; j < D; ++j) {
                    const double floor = (j + 1 < D) ? tail[j + 1] : lo;
                    const double ceil = (j > 0) ? tail[j - 1] : hi;
                    if (ceil - floor < 1e-13) continue;
                    auto obj = [&](double x) {
                        std::vector<double> cand = tail;
                        cand[j] = x;
                        const double pi = eval_tail(cand, nullptr);
                        return std::isnan(pi) ? -1e12 : -pi;
                    };
                    const auto r = maximize_scalar(obj, floor, ceil, 33, opts.threshold_tol * 1e-2);
                    if (r.value <= -1e11) continue;
                    moved = std::max(moved, std::abs(r.x - tail[j]));
                    tail[j] = r.x;
                }
                if (moved < opts.threshold_tol) break;
            }
            consider_tail(tail);
        }
    }

    WorstCaseResult out;
    if (best_y.empty()) {
        out.feasible = false;
        out.thresholds.assign(T, lo);
        out.residuals = indifference_residuals(F, prices, out.thresholds, delta);
        out.min_profit = profit_of_thresholds(F, prices, out.thresholds, delta);
        out.note += "; no obedient process found, returning the all-clear process";
        return out;
    }
    out.thresholds = best_y;
    out.min_profit = best_profit;
    out.residuals = indifference_residuals(F, prices, best_y, delta);
    return out;
}

// ---------------------------------------------------------------------------
// Pressed-ratio monotonicity: v / F^{-1}(G(v)) = v / L^{-1}(v) weakly
// decreasing on (v_lo, E[v]). Sufficient for the equilibrium price path to be
// a worst-case guarantee against arbitrary information arrival.
// ---------------------------------------------------------------------------

struct PrmReport {
    bool holds = true;
    std::vector<double> violations;  // grid points where the ratio increases
};

inline PrmReport check_prm(const PressedDistribution& P, std::size_t grid = 1024,
                           double slack = 1e-9) {
    PrmReport rep;
    const double a = P.w_lo(), b = P.w_hi();
    double prev_ratio = kNaN;
    for (std::size_t i = 1; i <= grid; ++i) {
        const double v = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid + 1);
        const double y = P.L_inv(v);
        if (y <= a + 1e-14) continue;
        const double ratio = v / y;
        if (!std::isnan(prev_ratio) && ratio > prev_ratio + slack) {
            rep.holds = false;
            rep.violations.push_back(v);
        }
        prev_ratio = ratio;
    }
    return rep;
}

inline PrmReport check_prm(const ValueDistribution& F, std::size_t grid = 1024,
                           double slack = 1e-9) {
    return check_prm(press(F), grid, slack);
}

// Largest truncation point y* such that F restricted to [v_lo, y*] passes the
// pressed-ratio check. The check always passes near the bottom of a gap-case
// support; failure to find any passing truncation flags a numerical problem.
inline double prm_neighborhood(const ValueDistribution& F, std::size_t grid = 512) {
    if (!F.gap()) throw validation_error("prm_neighborhood: gap case required (v_lo > 0)");
    const double lo = F.lo(), hi = F.hi();
    auto passes = [&](double y) {
        return check_prm(press(F.truncated(lo, y), 1025), grid).holds;
    };
    if (passes(hi)) return hi;
    double frac = 0.5, pass_y = kNaN;
    for (int k = 0; k < 40; ++k) {
        const double y = lo + (hi - lo) * frac;
        if (passes(y)) {
            pass_y = y;
            break;
        }
        frac *= 0.5;
    }
    if (std::isnan(pass_y))
        throw convergence_error(
            "prm_neighborhood: no passing truncation found above v_lo; numerical issue");
    double fail_y = hi;
    for (int it = 0; it < 40 && fail_y - pass_y > 1e-9 * (hi - lo); ++it) {
        const double m = 0.5 * (pass_y + fail_y);
        (passes(m) ? pass_y : fail_y) = m;
    }
    return pass_y;
}

// Sign of the profit change from lowering threshold y_{t+1} while y_t adjusts
// to preserve indifference: vbar_{t+1} y_t - vbar_t y_{t+1}, where
// (1-d) vbar_s = p_s - d p_{s+1} and the final-period vbar is the price
// itself. Nonnegative values mean the worst case keeps exact indifference.
inline double perturbation_sign(const std::vector<double>& prices,
                                const std::vector<double>& thresholds, double delta,
                                std::size_t t /* 1-based */) {
    if (prices.size() != thresholds.size())
        throw validation_error("perturbation_sign: length mismatch");
    if (t < 1 || t + 1 > prices.size())
        throw validation_error("perturbation_sign: need period t with t+1 in range");
    auto vbar = [&](std::size_t s) {  // 1-based
        if (s == prices.size()) return prices[s - 1];
        return (prices[s - 1] - delta * prices[s]) / (1.0 - delta);
    };
    return vbar(t + 1) * thresholds[t - 1] - vbar(t) * thresholds[t];
}

// Threshold for the worse-past-information benchmark: y* solving
// E[v | v > y*] = (p1 - d p2hat)/(1 - d), defined when the target exceeds the
// unconditional mean and is attainable below the top of the support.
inline double worse_past_threshold(const ValueDistribution& F, double p1, double p2_hat,
                                   double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw validation_error("worse_past_threshold: delta in (0,1)");
    const double vstar = (p1 - delta * p2_hat) / (1.0 - delta);
    const double mean = F.mean();
    if (!(vstar > mean))
        throw validation_error(
            "worse_past_threshold: (p1 - delta*p2)/(1-delta) must exceed E[v]");
    const double lo = F.lo(), hi = F.hi();
    if (vstar >= hi) throw validation_error("worse_past_threshold: unreachable cutoff");
    auto mean_above = [&](double y) {
        const double tail = 1.0 - F.cdf(y);
        if (tail < 1e-12) return hi;
        return (F.partial_mean(lo, hi) - F.partial_mean(lo, y)) / tail;
    };
    const double top = F.quantile(1.0 - 1e-10);
    if (mean_above(top) <= vstar)
        throw validation_error("worse_past_threshold: unreachable cutoff");
    return brent_root([&](double y) { return mean_above(y) - vstar; }, lo, top, 1e-12);
}

}  // namespace rcoase
