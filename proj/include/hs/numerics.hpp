#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace hs {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int panels = 0;
};

struct Panel {
    double a, b;
    double value, error;
};

namespace gk {
// Kronrod 15-point abscissae (positive half) with Gauss 7-point weights on the odd entries.
inline constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                  0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk

template <class F>
Panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * gk::wgk[7];
    double rg = fc * gk::wg[3];
    double resabs = std::abs(rk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk::xgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += gk::wgk[j] * (f1 + f2);
        resabs += gk::wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) rg += gk::wg[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * rk;
    double resasc = gk::wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += gk::wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    const double ah = std::abs(h);
    double err = std::abs((rk - rg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50 * std::numeric_limits<double>::epsilon()))
        err = std::max(50 * std::numeric_limits<double>::epsilon() * resabs, err);
    return {a, b, rk * h, err};
}

// Globally adaptive Gauss-Kronrod integration over the sorted break list
// `points` (first and last entries are the integration limits). Panels never
// straddle a break point. If `panels_out` is given the final partition is
// stored there in left-to-right order.
template <class F>
QuadResult integrate(F&& f, const std::vector<double>& points, double abs_tol, double rel_tol,
                     int max_panels = 4000, std::vector<Panel>* panels_out = nullptr) {
    auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    std::vector<Panel> done;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        Panel p = gk15(f, points[i], points[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    QuadResult res;
    while (!heap.empty()) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= tol) break;
        if (count >= max_panels) {
            res.converged = false;
            break;
        }
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b) || (p.b - p.a) < 1e-15 * std::max(1.0, std::abs(m))) {
            // Cannot subdivide further; keep the panel but stop refining it.
            done.push_back(p);
            continue;
        }
        Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    while (!heap.empty()) {
        done.push_back(heap.top());
        heap.pop();
    }
    std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    // Re-sum in order so the result does not depend on heap history.
    res.value = 0.0;
    res.error = 0.0;
    for (const auto& p : done) {
        res.value += p.value;
        res.error += p.error;
    }
    const double tol = std::max(abs_tol, rel_tol * std::abs(res.value));
    if (res.error > tol) res.converged = false;
    if (!std::isfinite(res.value)) res.converged = false;
    res.panels = static_cast<int>(done.size());
    if (panels_out) *panels_out = std::move(done);
    return res;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 4000) {
    return integrate(f, std::vector<double>{a, b}, abs_tol, rel_tol, max_panels);
}

// Hybrid bisection/secant (Illinois) root of f on [a, b] with f(a), f(b) of
// opposite sign. Stops when the bracket is narrower than xtol.
template <class F>
double find_root(F&& f, double a, double b, double fa, double fb, double xtol, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    int side = 0;
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        double x = (a * fb - b * fa) / (fb - fa);
        // Every third step, or when the secant point is unusable, bisect.
        if (!(x > a && x < b) || it % 3 == 2) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0) == (fa < 0)) {
            a = x;
            fa = fx;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = x;
            fb = fx;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (!(b > a)) break;
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

// Golden-section search for a maximum of f on [a, b]. The endpoints are
// candidates too, so a monotone f returns the exact endpoint.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double xtol = 1e-14) {
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    const double fa = f(a), fb = f(b);
    double lo = a, hi = b;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (hi - lo) > xtol; ++it) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    std::pair<double, double> best = f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
    if (fa >= best.second) best = {a, fa};
    if (fb > best.second) best = {b, fb};
    return best;
}

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;
    const std::vector<double>& knots() const { return x_; }

private:
    std::vector<double> x_, y_, d_;
};

// Ordinary least squares line fit; returns {slope, intercept, rms residual}.
struct LineFit {
    double slope, intercept, rms;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hs
