#pragma once

// Scalar numerics used across the library: bracketed root finding, global
// 1-D maximization with optional derivative polish, adaptive Gauss-Legendre
// quadrature and monotone cubic (Fritsch-Carlson) interpolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcoase {

// Thrown on bad inputs / violated preconditions (CLI exit code 2).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an iterative scheme fails to converge (CLI exit code 3).
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + h * static_cast<double>(i);
    v.back() = b;
    return v;
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

// Brent's method on [a,b]; requires a sign change. Returns the root location.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double xtol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw convergence_error("brent_root: no sign change on bracket");
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a, s = b;
    bool mflag = true;
    for (int it = 0; it < max_iter; ++it) {
        if (fb == 0.0 || std::abs(b - a) < xtol) return b;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        const double lo = (3.0 * a + b) / 4.0;
        const bool cond = !((s > std::min(lo, b) && s < std::max(lo, b))) ||
                          (mflag && std::abs(s - b) >= std::abs(b - c) / 2.0) ||
                          (!mflag && std::abs(s - b) >= std::abs(c - d) / 2.0) ||
                          (mflag && std::abs(b - c) < xtol) || (!mflag && std::abs(c - d) < xtol);
        if (cond) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

// Bisection for a monotone-crossing function; tolerant default root finder.
inline double bisect_root(const std::function<double(double)>& f, double a, double b,
                          double xtol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw convergence_error("bisect_root: no sign change on bracket");
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// 1-D maximization: global grid scan + golden-section, with optional exact
// derivative for a final bracketed-FOC polish. Reports near-ties.
// ---------------------------------------------------------------------------

struct MaxResult {
    double x = 0.0;
    double value = -std::numeric_limits<double>::infinity();
    bool multiple = false;  // two near-optimal local maxima further than 1e-6 apart
    double second_x = kNaN;
};

namespace detail {

inline void golden_refine(const std::function<double(double)>& f, double& a, double& b,
                          double xtol) {
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
}

}  // namespace detail

// Maximize f on [a,b]. df, when supplied, must be the exact derivative of f
// and is used to polish the interior optimum by bracketed root finding.
inline MaxResult maximize_scalar(const std::function<double(double)>& f, double a, double b,
                                 std::size_t n_grid = 129, double xtol = 1e-12,
                                 const std::function<double(double)>& df = nullptr) {
    MaxResult res;
    if (b < a) std::swap(a, b);
    if (b - a < xtol) {
        res.x = 0.5 * (a + b);
        res.value = f(res.x);
        return res;
    }
    n_grid = std::max<std::size_t>(n_grid, 5);
    const auto xs = linspace(a, b, n_grid);
    std::vector<double> fs(n_grid);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n_grid; ++i) {
        fs[i] = f(xs[i]);
        if (fs[i] > fs[best]) best = i;
    }

    auto refine_around = [&](std::size_t i) {
        double lo = xs[i == 0 ? 0 : i - 1];
        double hi = xs[i + 1 >= n_grid ? n_grid - 1 : i + 1];
        if (df && i > 0 && i + 1 < n_grid) {
            const double dlo = df(lo), dhi = df(hi);
            if (dlo > 0.0 && dhi < 0.0) {
                const double x = brent_root(df, lo, hi, xtol * 1e-2);
                return std::pair<double, double>{x, f(x)};
            }
        }
        detail::golden_refine(f, lo, hi, xtol);
        const double x = 0.5 * (lo + hi);
        return std::pair<double, double>{x, f(x)};
    };

    auto [bx, bf] = refine_around(best);
    // endpoints are legitimate optima
    if (fs.front() >= bf) {
        bx = xs.front();
        bf = fs.front();
    }
    if (fs.back() >= bf) {
        bx = xs.back();
        bf = fs.back();
    }
    res.x = bx;
    res.value = bf;

    // near-tie detection among interior local maxima
    const double tie_tol = 1e-9 * (1.0 + std::abs(bf));
    for (std::size_t i = 1; i + 1 < n_grid; ++i) {
        if (fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1] && std::abs(xs[i] - bx) > 1e-4 * (b - a)) {
            auto [ox, of] = refine_around(i);
            if (std::abs(of - bf) <= tie_tol && std::abs(ox - bx) > 1e-6) {
                res.multiple = true;
                res.second_x = ox;
            }
            if (of > res.value) {
                res.x = ox;
                res.value = of;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Legendre quadrature (15-point panels, bisected until the
// panel estimate is stable to the requested absolute tolerance).
// ---------------------------------------------------------------------------

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1,1].
inline constexpr double kGL15x[8] = {0.0,
                                     0.2011940939974345,
                                     0.3941513470775634,
                                     0.5709721726085388,
                                     0.7244177313601701,
                                     0.8482065834104272,
                                     0.9372733924007060,
                                     0.9879925180204854};
inline constexpr double kGL15w[8] = {0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
                                     0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
                                     0.0703660474881081, 0.0307532419961173};

inline double gl15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = kGL15w[0] * f(c);
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGL15x[i];
        s += kGL15w[i] * (f(c + dx) + f(c - dx));
    }
    return s * h;
}

inline double adaptive_gl(const std::function<double(double)>& f, double a, double b, double whole,
                          double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl15(f, a, m), right = gl15(f, m, b);
    const double delta = left + right - whole;
    if (std::abs(delta) <= tol || depth >= 48) return left + right;
    return adaptive_gl(f, a, m, left, 0.5 * tol, depth + 1) +
           adaptive_gl(f, m, b, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    return sign * detail::adaptive_gl(f, a, b, detail::gl15(f, a, b), abs_tol, 0);
}

// Single fixed 15-point panel; exact for polynomials up to degree 29.
inline double integrate_panel(const std::function<double(double)>& f, double a, double b) {
    return detail::gl15(f, a, b);
}

// ---------------------------------------------------------------------------
// Monotone cubic interpolation (Fritsch-Carlson). Preserves monotonicity of
// the data, C1, with analytic first derivative.
// ---------------------------------------------------------------------------

class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw validation_error("MonotoneCubic: need >= 2 points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw validation_error("MonotoneCubic: x not increasing");
        d_.assign(n, 0.0);
        std::vector<double> slope(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        d_[0] = slope[0];
        d_[n - 1] = slope[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (slope[i - 1] * slope[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
            }
        }
        // clamp endpoint derivatives (Fritsch-Carlson condition)
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (slope[i] == 0.0) {
                d_[i] = d_[i + 1] = 0.0;
            } else {
                const double a = d_[i] / slope[i], b = d_[i + 1] / slope[i];
                const double s = a * a + b * b;
                if (s > 9.0) {
                    const double t = 3.0 / std::sqrt(s);
                    d_[i] = t * a * slope[i];
                    d_[i + 1] = t * b * slope[i];
                }
            }
        }
    }

    bool empty() const { return x_.empty(); }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }

    double operator()(double x) const {
        const auto [i, t, h] = locate(x);
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

    double deriv(double x) const {
        const auto [i, t, h] = locate(x);
        const double g00 = 6 * t * (t - 1) / h, g10 = (1 - t) * (1 - 3 * t);
        const double g01 = -g00, g11 = t * (3 * t - 2);
        return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
    }

private:
    std::tuple<std::size_t, double, double> locate(double x) const {
        const std::size_t n = x_.size();
        std::size_t i;
        if (x <= x_.front()) {
            i = 0;
        } else if (x >= x_.back()) {
            i = n - 2;
        } else {
            i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
            i = std::min(i, n - 2);
        }
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        return {i, t, h};
    }

    std::vector<double> x_, y_, d_;
};

}  // namespace rcoase
