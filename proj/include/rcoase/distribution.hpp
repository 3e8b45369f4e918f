#pragma once

// Buyer value distributions. Continuous distributions expose cdf/pdf/quantile
// (plus the pdf derivative where the solver's first-order conditions want it);
// discrete distributions are atom lists and only participate in the discrete
// benchmarks. All objects are immutable after construction.

#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcoase/numerics.hpp"

#include <json.hpp>

namespace rcoase {

using json = nlohmann::json;

namespace detail {

struct ContinuousImpl {
    virtual ~ContinuousImpl() = default;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual double cdf(double v) const = 0;
    virtual double pdf(double v) const = 0;
    virtual double pdf_deriv(double v) const {
        const double h = 1e-6 * (hi() - lo());
        const double a = std::max(lo(), v - h), b = std::min(hi(), v + h);
        return (pdf(b) - pdf(a)) / (b - a);
    }
    virtual double quantile(double q) const {
        if (q <= 0.0) return lo();
        if (q >= 1.0) return hi();
        return bisect_root([&](double v) { return cdf(v) - q; }, lo(), hi(), 1e-13);
    }
    // int_a^b v f(v) dv; default via quadrature
    virtual double partial_mean(double a, double b, double tol) const {
        return integrate([&](double v) { return v * pdf(v); }, a, b, tol);
    }
    virtual std::string describe() const = 0;
    virtual json to_json() const = 0;
};

struct UniformImpl final : ContinuousImpl {
    double a, b;
    UniformImpl(double a_, double b_) : a(a_), b(b_) {
        if (!(b > a)) throw validation_error("uniform: need hi > lo");
    }
    double lo() const override { return a; }
    double hi() const override { return b; }
    double cdf(double v) const override {
        return std::clamp((v - a) / (b - a), 0.0, 1.0);
    }
    double pdf(double v) const override { return (v < a || v > b) ? 0.0 : 1.0 / (b - a); }
    double pdf_deriv(double) const override { return 0.0; }
    double quantile(double q) const override { return a + std::clamp(q, 0.0, 1.0) * (b - a); }
    double partial_mean(double x, double y, double) const override {
        x = std::clamp(x, a, b);
        y = std::clamp(y, a, b);
        return 0.5 * (y * y - x * x) / (b - a);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "uniform[" << a << "," << b << "]";
        return os.str();
    }
    json to_json() const override { return {{"kind", "uniform"}, {"lo", a}, {"hi", b}}; }
};

// f(v) = (v - 1/2)^n (n+1) 2^n on [0,1], n even. Mass piles at both ends as n
// grows, approximating the fair binary distribution on {0,1}.
struct PowerImpl final : ContinuousImpl {
    int n;
    double scale;  // (n+1) 2^n
    explicit PowerImpl(int n_) : n(n_), scale((n_ + 1) * std::pow(2.0, n_)) {
        if (n < 2 || n % 2 != 0) throw validation_error("power: exponent must be even and >= 2");
    }
    double lo() const override { return 0.0; }
    double hi() const override { return 1.0; }
    double pdf(double v) const override {
        return (v < 0.0 || v > 1.0) ? 0.0 : std::pow(v - 0.5, n) * scale;
    }
    double pdf_deriv(double v) const override {
        return (v < 0.0 || v > 1.0) ? 0.0 : n * std::pow(v - 0.5, n - 1) * scale;
    }
    double cdf(double v) const override {
        if (v <= 0.0) return 0.0;
        if (v >= 1.0) return 1.0;
        const double t = v - 0.5;
        return std::pow(2.0, n) * (std::pow(t, n + 1) + std::pow(0.5, n + 1));
    }
    double quantile(double q) const override {
        q = std::clamp(q, 0.0, 1.0);
        const double t = (q - 0.5) / std::pow(2.0, n);
        const double r = std::copysign(std::pow(std::abs(t), 1.0 / (n + 1)), t);
        return std::clamp(0.5 + r, 0.0, 1.0);
    }
    double partial_mean(double a, double b, double) const override {
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
        // int v (v-1/2)^n dv = (v-1/2)^{n+2}/(n+2) + (1/2)(v-1/2)^{n+1}/(n+1)
        auto prim = [&](double v) {
            const double t = v - 0.5;
            return scale * (std::pow(t, n + 2) / (n + 2) + 0.5 * std::pow(t, n + 1) / (n + 1));
        };
        return prim(b) - prim(a);
    }
    std::string describe() const override { return "power(n=" + std::to_string(n) + ")"; }
    json to_json() const override { return {{"kind", "power"}, {"n", n}}; }
};

struct BetaImpl final : ContinuousImpl {
    boost::math::beta_distribution<double> dist;
    double a, b;
    BetaImpl(double a_, double b_) : dist(a_, b_), a(a_), b(b_) {
        if (!(a > 0.0) || !(b > 0.0)) throw validation_error("beta: parameters must be positive");
    }
    double lo() const override { return 0.0; }
    double hi() const override { return 1.0; }
    double cdf(double v) const override {
        return boost::math::cdf(dist, std::clamp(v, 0.0, 1.0));
    }
    double pdf(double v) const override {
        if (v <= 0.0 || v >= 1.0) {
            // endpoint densities (finite only when the exponent is >= 1)
            if (v == 0.0 && a == 1.0) return b;
            if (v == 1.0 && b == 1.0) return a;
            return 0.0;
        }
        return boost::math::pdf(dist, v);
    }
    double pdf_deriv(double v) const override {
        if (v <= 0.0 || v >= 1.0) return 0.0;
        return pdf(v) * ((a - 1.0) / v - (b - 1.0) / (1.0 - v));
    }
    double quantile(double q) const override {
        return boost::math::quantile(dist, std::clamp(q, 0.0, 1.0));
    }
    double partial_mean(double x, double y, double) const override {
        // int_0^v u f(u) du = (a/(a+b)) I_v(a+1, b)
        const double c = a / (a + b);
        auto pm = [&](double v) {
            if (v <= 0.0) return 0.0;
            if (v >= 1.0) return c;
            return c * boost::math::ibeta(a + 1.0, b, v);
        };
        return pm(y) - pm(x);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "beta(" << a << "," << b << ")";
        return os.str();
    }
    json to_json() const override { return {{"kind", "beta"}, {"a", a}, {"b", b}}; }
};

// Pressed version of the two-point distribution on {0,1} with P(v=1)=q:
// the cdf of the posterior mean under the worst-case binary signal,
// G(p) = 1 - (q-p)/(q(1-p)) on [0,q].
struct PressedBinaryImpl final : ContinuousImpl {
    double q;
    explicit PressedBinaryImpl(double q_) : q(q_) {
        if (!(q > 0.0 && q < 1.0)) throw validation_error("pressed_binary: q in (0,1)");
    }
    double lo() const override { return 0.0; }
    double hi() const override { return q; }
    double cdf(double v) const override {
        if (v <= 0.0) return 0.0;
        if (v >= q) return 1.0;
        return 1.0 - (q - v) / (q * (1.0 - v));
    }
    double pdf(double v) const override {
        if (v < 0.0 || v > q) return 0.0;
        const double u = 1.0 - v;
        return (1.0 - q) / (q * u * u);
    }
    double pdf_deriv(double v) const override {
        if (v < 0.0 || v > q) return 0.0;
        const double u = 1.0 - v;
        return 2.0 * (1.0 - q) / (q * u * u * u);
    }
    double quantile(double p) const override {
        p = std::clamp(p, 0.0, 1.0);
        // invert 1 - (q-v)/(q(1-v)) = p
        const double k = (1.0 - p) * q;
        return (q - k) / (1.0 - k);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "pressed_binary(q=" << q << ")";
        return os.str();
    }
    json to_json() const override { return {{"kind", "pressed_binary"}, {"q", q}}; }
};

// Affine change of support: v = lo + (hi-lo) * u with u ~ base on [0,1]-like.
struct AffineImpl final : ContinuousImpl {
    std::shared_ptr<const ContinuousImpl> base;
    double shift, scale;
    AffineImpl(std::shared_ptr<const ContinuousImpl> b, double new_lo, double new_hi) : base(std::move(b)) {
        if (!(new_hi > new_lo)) throw validation_error("affine: need hi > lo");
        scale = (new_hi - new_lo) / (base->hi() - base->lo());
        shift = new_lo - base->lo() * scale;
    }
    double back(double v) const { return (v - shift) / scale; }
    double lo() const override { return shift + scale * base->lo(); }
    double hi() const override { return shift + scale * base->hi(); }
    double cdf(double v) const override { return base->cdf(back(v)); }
    double pdf(double v) const override { return base->pdf(back(v)) / scale; }
    double pdf_deriv(double v) const override { return base->pdf_deriv(back(v)) / (scale * scale); }
    double quantile(double q) const override { return shift + scale * base->quantile(q); }
    double partial_mean(double a, double b, double tol) const override {
        const double pm = base->partial_mean(back(a), back(b), tol);
        return scale * pm + shift * (base->cdf(back(b)) - base->cdf(back(a)));
    }
    std::string describe() const override {
        std::ostringstream os;
        os << base->describe() << "->[" << lo() << "," << hi() << "]";
        return os.str();
    }
    json to_json() const override {
        json j = base->to_json();
        j["lo"] = lo();
        j["hi"] = hi();
        return j;
    }
};

struct TruncatedImpl final : ContinuousImpl {
    std::shared_ptr<const ContinuousImpl> base;
    double a, b, Fa, Fb, mass;
    TruncatedImpl(std::shared_ptr<const ContinuousImpl> base_, double a_, double b_)
        : base(std::move(base_)), a(a_), b(b_) {
        if (!(b > a)) throw validation_error("truncate: need b > a");
        Fa = base->cdf(a);
        Fb = base->cdf(b);
        mass = Fb - Fa;
        if (mass <= 1e-14) throw validation_error("truncate: zero mass interval");
    }
    double lo() const override { return a; }
    double hi() const override { return b; }
    double cdf(double v) const override {
        if (v <= a) return 0.0;
        if (v >= b) return 1.0;
        return (base->cdf(v) - Fa) / mass;
    }
    double pdf(double v) const override { return (v < a || v > b) ? 0.0 : base->pdf(v) / mass; }
    double pdf_deriv(double v) const override {
        return (v < a || v > b) ? 0.0 : base->pdf_deriv(v) / mass;
    }
    double quantile(double q) const override {
        q = std::clamp(q, 0.0, 1.0);
        return std::clamp(base->quantile(Fa + q * mass), a, b);
    }
    double partial_mean(double x, double y, double tol) const override {
        x = std::clamp(x, a, b);
        y = std::clamp(y, a, b);
        return base->partial_mean(x, y, tol) / mass;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << base->describe() << "|[" << a << "," << b << "]";
        return os.str();
    }
    json to_json() const override {
        json j = base->to_json();
        j["truncate"] = {a, b};
        return j;
    }
};

// Tabulated cdf with monotone-cubic interpolation between the knots.
struct TableImpl final : ContinuousImpl {
    MonotoneCubic F;
    TableImpl(std::vector<double> grid, std::vector<double> cdfv) : F(std::move(grid), std::move(cdfv)) {
        const auto& y = F.ys();
        if (std::abs(y.front()) > 1e-9 || std::abs(y.back() - 1.0) > 1e-9)
            throw validation_error("table: cdf must run from 0 to 1");
        for (std::size_t i = 1; i < y.size(); ++i)
            if (y[i] < y[i - 1]) throw validation_error("table: cdf not nondecreasing");
    }
    double lo() const override { return F.x_front(); }
    double hi() const override { return F.x_back(); }
    double cdf(double v) const override { return std::clamp(F(v), 0.0, 1.0); }
    double pdf(double v) const override { return std::max(0.0, F.deriv(v)); }
    std::string describe() const override { return "table"; }
    json to_json() const override {
        return {{"kind", "table"}, {"grid", F.xs()}, {"cdf", F.ys()}};
    }
};

}  // namespace detail

class ValueDistribution {
public:
    ValueDistribution() = default;

    static ValueDistribution uniform(double lo, double hi) {
        return ValueDistribution(std::make_shared<detail::UniformImpl>(lo, hi));
    }
    static ValueDistribution power(int n) {
        return ValueDistribution(std::make_shared<detail::PowerImpl>(n));
    }
    static ValueDistribution beta(double a, double b) {
        return ValueDistribution(std::make_shared<detail::BetaImpl>(a, b));
    }
    static ValueDistribution pressed_binary(double q) {
        return ValueDistribution(std::make_shared<detail::PressedBinaryImpl>(q));
    }
    static ValueDistribution table(std::vector<double> grid, std::vector<double> cdf) {
        return ValueDistribution(std::make_shared<detail::TableImpl>(std::move(grid), std::move(cdf)));
    }
    static ValueDistribution discrete(std::vector<std::pair<double, double>> atoms) {
        ValueDistribution d;
        if (atoms.empty()) throw validation_error("discrete: no atoms");
        std::sort(atoms.begin(), atoms.end());
        double total = 0.0;
        for (const auto& [v, p] : atoms) {
            if (p < 0.0) throw validation_error("discrete: negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw validation_error("discrete: atom probabilities must sum to 1 (got " +
                                   std::to_string(total) + ")");
        d.atoms_ = std::move(atoms);
        return d;
    }
    static ValueDistribution from_impl(std::shared_ptr<const detail::ContinuousImpl> impl) {
        return ValueDistribution(std::move(impl));
    }

    // rescale a continuous distribution onto [lo, hi]
    ValueDistribution rescaled(double lo, double hi) const {
        require_continuous("rescaled");
        return ValueDistribution(std::make_shared<detail::AffineImpl>(impl_, lo, hi));
    }
    ValueDistribution truncated(double a, double b) const {
        require_continuous("truncated");
        return ValueDistribution(std::make_shared<detail::TruncatedImpl>(impl_, a, b));
    }

    bool is_discrete() const { return !atoms_.empty(); }
    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

    double lo() const { return is_discrete() ? atoms_.front().first : impl_->lo(); }
    double hi() const { return is_discrete() ? atoms_.back().first : impl_->hi(); }
    bool gap() const { return lo() > 0.0; }

    double cdf(double v) const {
        if (is_discrete()) {
            double s = 0.0;
            for (const auto& [x, p] : atoms_)
                if (x <= v) s += p;
            return s;
        }
        return impl_->cdf(v);
    }
    double pdf(double v) const {
        require_continuous("pdf");
        return impl_->pdf(v);
    }
    double pdf_deriv(double v) const {
        require_continuous("pdf_deriv");
        return impl_->pdf_deriv(v);
    }
    double quantile(double q) const {
        if (is_discrete()) {
            double s = 0.0;
            for (const auto& [x, p] : atoms_) {
                s += p;
                if (s >= q - 1e-15) return x;
            }
            return atoms_.back().first;
        }
        return impl_->quantile(q);
    }

    // int_a^b v f(v) dv (continuous) or sum of v*p over atoms in (a, b]
    double partial_mean(double a, double b, double tol = 1e-11) const {
        if (is_discrete()) {
            double s = 0.0;
            for (const auto& [x, p] : atoms_)
                if (x > a && x <= b) s += x * p;
            return s;
        }
        a = std::clamp(a, lo(), hi());
        b = std::clamp(b, lo(), hi());
        if (b <= a) return 0.0;
        return impl_->partial_mean(a, b, tol);
    }

    double mean() const { return partial_mean(lo() - 1.0, hi()); }

    // E[v | a < v <= b]
    double interval_mean(double a, double b) const {
        const double m = cdf(b) - cdf(a);
        if (m <= 1e-13) return 0.5 * (std::max(a, lo()) + std::min(b, hi()));
        return partial_mean(a, b) / m;
    }

    std::string describe() const {
        if (is_discrete()) return "discrete(" + std::to_string(atoms_.size()) + " atoms)";
        return impl_->describe();
    }

    json to_json() const {
        if (is_discrete()) {
            json a = json::array();
            for (const auto& [v, p] : atoms_) a.push_back({v, p});
            return {{"kind", "discrete"}, {"atoms", a}};
        }
        return impl_->to_json();
    }

    const std::shared_ptr<const detail::ContinuousImpl>& impl() const { return impl_; }

private:
    explicit ValueDistribution(std::shared_ptr<const detail::ContinuousImpl> impl)
        : impl_(std::move(impl)) {}

    void require_continuous(const char* what) const {
        if (is_discrete() || !impl_)
            throw validation_error(std::string(what) + ": requires a continuous distribution");
    }

    std::shared_ptr<const detail::ContinuousImpl> impl_;
    std::vector<std::pair<double, double>> atoms_;
};

// Parse a distribution spec:
//   {"kind":"uniform","lo":0,"hi":2} | {"kind":"power","n":8} |
//   {"kind":"beta","a":2,"b":2} | {"kind":"pressed_binary","q":0.5} |
//   {"kind":"discrete","atoms":[[0,0.5],[1,0.5]]} |
//   {"kind":"table","grid":[...],"cdf":[...]}
// Continuous kinds accept optional "lo"/"hi" to rescale the support and an
// optional "truncate":[a,b].
inline ValueDistribution parse_distribution(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw validation_error("distribution spec: expected an object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    ValueDistribution d;
    if (kind == "uniform") {
        d = ValueDistribution::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    } else if (kind == "power") {
        d = ValueDistribution::power(j.at("n").get<int>());
        if (j.contains("lo") || j.contains("hi"))
            d = d.rescaled(j.value("lo", 0.0), j.value("hi", 1.0));
    } else if (kind == "beta") {
        d = ValueDistribution::beta(j.at("a").get<double>(), j.at("b").get<double>());
        if (j.contains("lo") || j.contains("hi"))
            d = d.rescaled(j.value("lo", 0.0), j.value("hi", 1.0));
    } else if (kind == "pressed_binary") {
        d = ValueDistribution::pressed_binary(j.at("q").get<double>());
    } else if (kind == "table") {
        d = ValueDistribution::table(j.at("grid").get<std::vector<double>>(),
                                     j.at("cdf").get<std::vector<double>>());
    } else if (kind == "discrete") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return ValueDistribution::discrete(std::move(atoms));
    } else {
        throw validation_error("distribution spec: unknown kind \"" + kind + "\"");
    }
    if (j.contains("truncate")) {
        const auto& t = j.at("truncate");
        d = d.truncated(t.at(0).get<double>(), t.at(1).get<double>());
    }
    return d;
}

inline ValueDistribution parse_distribution(const std::string& spec) {
    json j;
    try {
        j = json::parse(spec);
    } catch (const json::exception& e) {
        throw validation_error(std::string("distribution spec: malformed JSON: ") + e.what());
    }
    return parse_distribution(j);
}

inline ValueDistribution parse_distribution(const char* spec) {
    return parse_distribution(std::string(spec));
}

}  // namespace rcoase
