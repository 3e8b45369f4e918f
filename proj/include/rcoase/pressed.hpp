#pragma once

// The pressed transform. For a continuous value distribution F on [v_lo, v_hi]
// let L(y) = E[v | v <= y]. The pressed distribution G = F o L^{-1} is the law
// of the posterior mean induced by the worst-case binary threshold signal; a
// price p sells with probability 1 - G(p) against that signal. Supporting
// regularity checks (Lipschitz quantile bound, power-envelope bounds) live
// here as well.

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "rcoase/distribution.hpp"
#include "rcoase/numerics.hpp"

namespace rcoase {

// E[v | v <= y]. Domain error for y at or below the bottom of the support
// (conditioning event of zero mass); defined by continuity as v_lo in callers
// that need the closed limit.
inline double cond_mean_below(const ValueDistribution& d, double y, double tol = 1e-11) {
    if (d.is_discrete()) {
        if (y < d.lo()) throw validation_error("cond_mean_below: empty conditioning event");
        double m = 0.0, s = 0.0;
        for (const auto& [v, p] : d.atoms())
            if (v <= y) {
                m += v * p;
                s += p;
            }
        if (s <= 0.0) throw validation_error("cond_mean_below: empty conditioning event");
        return m / s;
    }
    const double lo = d.lo(), hi = d.hi();
    if (!(y > lo)) throw validation_error("cond_mean_below: y must exceed the lower support point");
    y = std::min(y, hi);
    const double mass = d.cdf(y);
    if (mass < 1e-12) {
        // vanishing conditioning mass; use the midpoint of the tiny interval
        return 0.5 * (lo + y);
    }
    return d.partial_mean(lo, y, tol) / mass;
}

namespace detail {
class PressedImpl;
}

class PressedDistribution {
public:
    PressedDistribution() = default;

    const ValueDistribution& base() const { return base_; }
    double w_lo() const { return w_lo_; }
    double w_hi() const { return w_hi_; }  // = E[v]

    // L(y) = E[v | v <= y], evaluated from the cached monotone table.
    double L(double y) const {
        if (y <= base_.lo()) return base_.lo();
        if (y >= base_.hi()) return w_hi_;
        return std::clamp(L_(y), w_lo_, w_hi_);
    }

    // d/dy L(y) = f(y) (y - L(y)) / F(y); limits to 1/2 at the bottom.
    double L_deriv(double y) const {
        const double F = base_.cdf(y);
        if (F < 1e-12) return 0.5;
        return base_.pdf(y) * (y - L(y)) / F;
    }

    // L^{-1}(w): the threshold whose conditional mean below equals w.
    double L_inv(double w) const {
        if (w <= w_lo_) return base_.lo();
        if (w >= w_hi_) return base_.hi();
        return std::clamp(Linv_(w), base_.lo(), base_.hi());
    }

    double G_cdf(double w) const { return base_.cdf(L_inv(w)); }
    double G_pdf(double w) const {
        const double y = L_inv(w);
        const double dL = L_deriv(y);
        if (dL < 1e-14) return 0.0;
        return base_.pdf(y) / dL;
    }
    double G_quantile(double q) const { return L(base_.quantile(q)); }

    // G as a first-class distribution (so solvers can run on it directly)
    ValueDistribution as_distribution() const;

    friend PressedDistribution press(const ValueDistribution& d, std::size_t grid_n);

private:
    ValueDistribution base_;
    MonotoneCubic L_, Linv_;
    double w_lo_ = 0.0, w_hi_ = 0.0;
};

namespace detail {

class PressedImpl final : public ContinuousImpl {
public:
    explicit PressedImpl(PressedDistribution p) : p_(std::move(p)) {}
    double lo() const override { return p_.w_lo(); }
    double hi() const override { return p_.w_hi(); }
    double cdf(double w) const override { return std::clamp(p_.G_cdf(w), 0.0, 1.0); }
    double pdf(double w) const override { return p_.G_pdf(w); }
    double quantile(double q) const override { return p_.G_quantile(q); }
    std::string describe() const override { return "pressed(" + p_.base().describe() + ")"; }
    json to_json() const override {
        json j = p_.base().to_json();
        return {{"kind", "pressed"}, {"base", j}};
    }

private:
    PressedDistribution p_;
};

}  // namespace detail

inline ValueDistribution PressedDistribution::as_distribution() const {
    return ValueDistribution::from_impl(std::make_shared<detail::PressedImpl>(*this));
}

// Build the pressed transform of a continuous distribution. L is tabulated by
// accumulating per-segment Gauss-Legendre panels of v f(v); the inverse is
// tabulated by root solving on the forward table. Fails if the numerical L is
// not strictly increasing.
inline PressedDistribution press(const ValueDistribution& d, std::size_t grid_n = 2049) {
    if (d.is_discrete())
        throw validation_error(
            "press: general discrete distributions are not pressed; use press_discrete_binary");
    PressedDistribution out;
    out.base_ = d;
    const double lo = d.lo(), hi = d.hi();
    const auto ys = linspace(lo, hi, grid_n);
    std::vector<double> Ls(grid_n);
    Ls[0] = lo;
    double cum = 0.0;  // int_lo^y v f dv
    for (std::size_t i = 1; i < grid_n; ++i) {
        cum += integrate_panel([&](double v) { return v * d.pdf(v); }, ys[i - 1], ys[i]);
        const double F = d.cdf(ys[i]);
        Ls[i] = (F < 1e-12) ? 0.5 * (lo + ys[i]) : cum / F;
    }
    // ties to machine precision are tolerated (densities may vanish at interior
    // points); genuine decreases indicate a pathology
    const double drop_tol = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(Ls.back()) + 1.0);
    for (std::size_t i = 1; i < grid_n; ++i) {
        if (Ls[i] < Ls[i - 1] - drop_tol) {
            std::ostringstream os;
            os << "press: conditional mean not increasing on [" << ys[i - 1] << ", " << ys[i]
               << "]";
            throw convergence_error(os.str());
        }
        Ls[i] = std::max(Ls[i], Ls[i - 1]);
    }
    out.w_lo_ = lo;
    out.w_hi_ = Ls.back();
    out.L_ = MonotoneCubic(ys, Ls);
    // inverse table on an even w-grid, solved against the forward table
    const std::size_t m = grid_n;
    const auto ws = linspace(out.w_lo_, out.w_hi_, m);
    std::vector<double> inv(m);
    inv[0] = lo;
    inv[m - 1] = hi;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double w = ws[i];
        inv[i] = brent_root([&](double y) { return out.L_(y) - w; }, lo, hi, 1e-14);
    }
    out.Linv_ = MonotoneCubic(ws, inv);
    return out;
}

// y = F^{-1}(G(w)) = L^{-1}(w): the worst-case signal threshold whose
// conditional mean below equals w. Clamps to the top of the support at
// w = E[v]; errors above (no information can support a higher cutoff).
inline double press_threshold(const PressedDistribution& p, double w) {
    if (w > p.w_hi() + 1e-12)
        throw validation_error("press_threshold: w exceeds E[v]; no threshold needed");
    if (!(w > p.w_lo()))
        throw validation_error("press_threshold: w must exceed the lower support point");
    return p.L_inv(std::min(w, p.w_hi()));
}

inline double press_threshold(const ValueDistribution& d, double w) {
    return press_threshold(press(d), w);
}

// Worst-case purchase probability for the binary distribution on {0,1} with
// P(v=1)=q at price p: r = (q-p)/(q(1-p)). The no-buy posterior equals p.
inline double press_discrete_binary(double q, double p) {
    if (!(q > 0.0 && q < 1.0)) throw validation_error("press_discrete_binary: q in (0,1)");
    if (p <= 0.0) return 1.0;
    if (p > q) return 0.0;
    return (q - p) / (q * (1.0 - p));
}

// ---------------------------------------------------------------------------
// Mixture pressing: press each conditional distribution F_s over a partition
// of the support, then mix the pressed laws by cell probabilities.
// ---------------------------------------------------------------------------

struct PartitionCell {
    double lo, hi;
};

namespace detail {

class MixturePressedImpl final : public ContinuousImpl {
public:
    MixturePressedImpl(std::vector<double> w, std::vector<PressedDistribution> parts, double lo,
                       double hi)
        : w_(std::move(w)), parts_(std::move(parts)), lo_(lo), hi_(hi) {}
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    double cdf(double x) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) s += w_[i] * parts_[i].G_cdf(x);
        return std::clamp(s, 0.0, 1.0);
    }
    double pdf(double x) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (x >= parts_[i].w_lo() && x <= parts_[i].w_hi()) s += w_[i] * parts_[i].G_pdf(x);
        return s;
    }
    std::string describe() const override {
        return "mixture_pressed(" + std::to_string(parts_.size()) + " cells)";
    }
    json to_json() const override { return {{"kind", "mixture_pressed"}}; }

private:
    std::vector<double> w_;
    std::vector<PressedDistribution> parts_;
    double lo_, hi_;
};

}  // namespace detail

// The partition must cover the support with disjoint positive-mass cells.
inline ValueDistribution mixture_press(const ValueDistribution& d,
                                       std::vector<PartitionCell> cells,
                                       std::size_t grid_n = 1025) {
    if (cells.empty()) throw validation_error("mixture_press: empty partition");
    std::sort(cells.begin(), cells.end(),
              [](const PartitionCell& a, const PartitionCell& b) { return a.lo < b.lo; });
    const double tol = 1e-9 * (d.hi() - d.lo());
    if (std::abs(cells.front().lo - d.lo()) > tol || std::abs(cells.back().hi - d.hi()) > tol)
        throw validation_error("mixture_press: partition must cover the support");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!(cells[i].hi > cells[i].lo))
            throw validation_error("mixture_press: empty partition cell");
        if (i > 0 && std::abs(cells[i].lo - cells[i - 1].hi) > tol)
            throw validation_error("mixture_press: partition cells must tile the support");
    }
    std::vector<double> w;
    std::vector<PressedDistribution> parts;
    double lo = d.hi(), hi = d.lo();
    for (const auto& c : cells) {
        const double mass = d.cdf(c.hi) - d.cdf(c.lo);
        if (mass <= 1e-12) throw validation_error("mixture_press: zero-mass partition cell");
        auto pressed = press(d.truncated(std::max(c.lo, d.lo()), std::min(c.hi, d.hi())), grid_n);
        lo = std::min(lo, pressed.w_lo());
        hi = std::max(hi, pressed.w_hi());
        w.push_back(mass);
        parts.push_back(std::move(pressed));
    }
    return ValueDistribution::from_impl(
        std::make_shared<detail::MixturePressedImpl>(std::move(w), std::move(parts), lo, hi));
}

// ---------------------------------------------------------------------------
// Regularity checks
// ---------------------------------------------------------------------------

struct LipschitzReport {
    bool holds = false;
    double L_const = 0.0;
};

// sup over q of (F^{-1}(q) - v_lo)/q. A finite bound keeps the market-clearing
// horizon uniformly bounded in the gap case. The sup is scanned on a grid
// reaching q = 1e-8; divergence is flagged when the small-q tail blows up
// relative to the mid-range level.
inline LipschitzReport check_lipschitz(const ValueDistribution& d, bool override_gap = false) {
    if (!d.gap() && !override_gap)
        throw validation_error("check_lipschitz: gap case required (v_lo > 0); pass override to force");
    const double lo = d.lo();
    double sup_mid = 0.0, sup_all = 0.0;
    for (double lq = -8.0; lq <= 0.0; lq += 0.01) {
        const double q = std::pow(10.0, lq);
        const double r = (d.quantile(q) - lo) / q;
        sup_all = std::max(sup_all, r);
        if (q >= 1e-3) sup_mid = std::max(sup_mid, r);
    }
    LipschitzReport rep;
    rep.L_const = sup_all;
    rep.holds = std::isfinite(sup_all) && sup_all <= 5.0 * sup_mid;
    return rep;
}

struct AdRegularityReport {
    double M = 0.0;  // inf of quantile(q)/q^alpha
    double L = 0.0;  // sup of quantile(q)/q^alpha
    bool holds = false;
};

// Power-envelope bounds M q^alpha <= F^{-1}(q) <= L q^alpha on a q-grid; holds
// when the envelope ratio stays bounded (no divergence at either end).
inline AdRegularityReport check_ad_regularity(const ValueDistribution& d, double alpha) {
    if (d.lo() > 1e-12)
        throw validation_error("check_ad_regularity: no-gap case required (v_lo = 0)");
    AdRegularityReport rep;
    double inf = std::numeric_limits<double>::infinity(), sup = 0.0;
    for (double lq = -6.0; lq <= 0.0; lq += 0.01) {
        const double q = std::pow(10.0, lq);
        const double r = d.quantile(q) / std::pow(q, alpha);
        inf = std::min(inf, r);
        sup = std::max(sup, r);
    }
    rep.M = inf;
    rep.L = sup;
    rep.holds = inf > 0.0 && std::isfinite(sup) && sup / inf <= 100.0;
    return rep;
}

}  // namespace rcoase
