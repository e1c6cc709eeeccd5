#include "hs/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hs/errors.hpp"
#include "hs/numerics.hpp"

namespace hs {

namespace {

constexpr std::size_t kMaxZeros = 64;

struct Piece {
    double a, b;    // nominal ends
    double ea, eb;  // evaluation ends, nudged inside at interior breaks
};

// Split `domain` at the data breakpoints so every piece is continuous.
std::vector<Piece> pieces_of(const ProblemSpec& spec, const std::vector<Interval>& domain) {
    const auto breaks = data_breaks(spec.data);
    std::vector<Piece> out;
    for (const auto& iv : domain) {
        std::vector<double> cuts{iv.lo};
        for (double b : breaks)
            if (b > iv.lo && b < iv.hi) cuts.push_back(b);
        cuts.push_back(iv.hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (!(b > a)) continue;
            const bool ia = a > 0.0 && std::binary_search(breaks.begin(), breaks.end(), a);
            const bool ib = b < 1.0 && std::binary_search(breaks.begin(), breaks.end(), b);
            out.push_back({a, b, ia ? std::nextafter(a, 2.0) : a, ib ? std::nextafter(b, -1.0) : b});
        }
    }
    return out;
}

std::vector<double> sample_grid(const Piece& p, int grid_n) {
    const int m = std::max(8, static_cast<int>(std::ceil(grid_n * (p.b - p.a))));
    std::vector<double> x(m + 1);
    for (int j = 0; j <= m; ++j) x[j] = p.a + (p.b - p.a) * j / m;
    x.front() = p.ea;
    x.back() = p.eb;
    return x;
}

double snap(double x, const std::vector<double>& breaks) {
    for (double b : breaks)
        if (std::abs(x - b) <= 4 * std::numeric_limits<double>::epsilon()) return b;
    return x;
}

void dedupe(std::vector<double>& pts, double tol) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double x : pts)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    pts.swap(out);
}

bool inside_any(double x, const std::vector<Interval>& ivs, double pad) {
    for (const auto& iv : ivs)
        if (x >= iv.lo - pad && x <= iv.hi + pad) return true;
    return false;
}

// Largest x in [in, out) (or (out, in]) where pred holds, by bisection.
template <class P>
double edge(P pred, double in, double out) {
    for (int it = 0; it < 100 && std::abs(out - in) > 1e-15; ++it) {
        const double m = 0.5 * (in + out);
        if (pred(m))
            in = m;
        else
            out = m;
    }
    return in;
}

// Golden search only locates a smooth maximum to about sqrt(eps). Sharpen
// it by bracketing the sign change of a central difference quotient.
template <class F>
double polish_max(F&& f, double x, double lo, double hi) {
    const double h = 1e-6 * std::max(hi - lo, 1e-3);
    auto d = [&](double t) { return f(t + h) - f(t - h); };
    const double w = 1e-5 * std::max(hi - lo, 1e-3);
    const double a = x - w, b = x + w;
    if (a - h < lo || b + h > hi) return x;
    const double da = d(a), db = d(b);
    if (!(da > 0.0 && db < 0.0)) return x;
    const double r = find_root(d, a, b, da, db, 1e-15);
    return f(r) >= f(x) - 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f(x))) ? r : x;
}

}  // namespace

const char* to_string(Multiplicity m) {
    switch (m) {
        case Multiplicity::Single: return "Single";
        case Multiplicity::Double: return "Double";
        default: return "None";
    }
}

double c_value(const ProblemSpec& spec, double alpha) {
    const double u = spec.data.u0_prime(alpha), r = spec.data.rho0(alpha);
    return spec.lambda * (spec.lambda * u * u - spec.kappa * r * r);
}

double q_value(const ProblemSpec& spec, double alpha, double eta) {
    return q_stable(spec.lambda, spec.kappa, spec.data.u0_prime(alpha), spec.data.rho0(alpha), eta);
}

double q_stable(double lambda, double kappa, double u, double r, double eta) {
    const double lk = lambda * kappa;
    if (lk >= 0.0) {
        const double s = std::sqrt(lk) * std::abs(r);
        return (1.0 - eta * (lambda * u + s)) * (1.0 - eta * (lambda * u - s));
    }
    const double a = 1.0 - eta * lambda * u, b = eta * r;
    return a * a - lk * b * b;
}

PointAnalysis analyze_point(const ProblemSpec& spec, double alpha) {
    PointAnalysis pa;
    const double lam = spec.lambda, kap = spec.kappa;
    const double u = spec.data.u0_prime(alpha), r = spec.data.rho0(alpha);
    pa.alpha = alpha;
    pa.c_val = lam * (lam * u * u - kap * r * r);
    pa.disc = 4.0 * lam * kap * r * r;
    if (pa.disc < 0) {
        pa.g1 = pa.g2 = std::numeric_limits<double>::quiet_NaN();
        return pa;
    }
    const double s = std::sqrt(lam * kap) * std::abs(r);
    pa.g1 = lam * u + s;
    pa.g2 = lam * u - s;
    if (pa.c_val == 0.0) {
        // Q is linear: 1 - 2 lambda u0' eta.
        if (lam * u != 0.0) pa.roots.push_back({1.0 / (2.0 * lam * u), 1});
        return pa;
    }
    if (pa.disc == 0.0) {
        if (pa.g1 != 0.0) pa.roots.push_back({1.0 / pa.g1, 2});
        return pa;
    }
    for (double g : {pa.g1, pa.g2})
        if (g != 0.0) pa.roots.push_back({1.0 / g, 1});
    std::sort(pa.roots.begin(), pa.roots.end(), [](const EtaRoot& x, const EtaRoot& y) { return x.eta < y.eta; });
    return pa;
}

ZeroSet zero_set(const ProblemSpec& spec, const Profile& f, double ztol) {
    ZeroSet zs;
    const double xtol = spec.tol.root_tol;
    const auto pieces = pieces_of(spec, {{0.0, 1.0}});
    for (const auto& p : pieces) {
        const auto x = sample_grid(p, spec.tol.grid_n);
        const std::size_t m = x.size();
        std::vector<double> y(m);
        for (std::size_t j = 0; j < m; ++j) y[j] = f(x[j]);
        auto is_zero = [&](double v) { return std::abs(v) <= ztol; };

        std::size_t j = 0;
        while (j < m) {
            if (is_zero(y[j])) {
                std::size_t k = j;
                while (k + 1 < m && is_zero(y[k + 1])) ++k;
                if (k - j >= 2) {
                    auto pred = [&](double t) { return is_zero(f(t)); };
                    const double lo = j == 0 ? p.a : edge(pred, x[j], x[j - 1]);
                    const double hi = k == m - 1 ? p.b : edge(pred, x[k], x[k + 1]);
                    zs.intervals.push_back({lo, hi});
                } else {
                    for (std::size_t i = j; i <= k; ++i) zs.points.push_back(i == 0 ? p.a : (i == m - 1 ? p.b : x[i]));
                }
                j = k + 1;
                continue;
            }
            if (j + 1 < m && !is_zero(y[j + 1]) && (y[j] < 0) != (y[j + 1] < 0))
                zs.points.push_back(find_root(f, x[j], x[j + 1], y[j], y[j + 1], xtol));
            // Tangential zero: local minimum of |f| without a sign change.
            if (j > 0 && j + 1 < m && !is_zero(y[j - 1]) && !is_zero(y[j + 1]) &&
                std::abs(y[j]) <= std::abs(y[j - 1]) && std::abs(y[j]) <= std::abs(y[j + 1]) &&
                (y[j - 1] < 0) == (y[j] < 0) && (y[j + 1] < 0) == (y[j] < 0)) {
                auto v = [&](double t) { return -std::sqrt(std::abs(f(t))); };
                const auto [xm, vm] = golden_max(v, x[j - 1], x[j + 1], 1e-15);
                if (vm * vm <= ztol) zs.points.push_back(xm);
            }
            ++j;
        }
    }
    std::erase_if(zs.points, [&](double t) { return inside_any(t, zs.intervals, 1e-12); });
    dedupe(zs.points, 1e-9);
    // Merge intervals touching across a breakpoint.
    std::sort(zs.intervals.begin(), zs.intervals.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : zs.intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi + 1e-12)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    zs.intervals = merged;
    return zs;
}

Extremum maximize(const ProblemSpec& spec, const Profile& f, const std::vector<Interval>& domain) {
    const auto breaks = data_breaks(spec.data);
    const auto pieces = pieces_of(spec, domain);
    struct Cand {
        double x, v;
    };
    std::vector<Cand> cands;
    struct Scan {
        Piece p;
        std::vector<double> x, y;
    };
    std::vector<Scan> scans;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) {
        Scan s{p, sample_grid(p, spec.tol.grid_n), {}};
        const std::size_t m = s.x.size();
        s.y.resize(m);
        for (std::size_t j = 0; j < m; ++j) s.y[j] = f(s.x[j]);
        for (std::size_t j = 0; j < m; ++j) {
            const bool left_ok = j == 0 || s.y[j] >= s.y[j - 1];
            const bool right_ok = j + 1 == m || s.y[j] >= s.y[j + 1];
            if (!(left_ok && right_ok)) continue;
            const double lo = s.x[j == 0 ? 0 : j - 1];
            const double hi = s.x[std::min(m - 1, j + 1)];
            auto [xm, vm] = golden_max(f, lo, hi);
            if (s.y[j] > vm) {
                xm = s.x[j];
                vm = s.y[j];
            }
            xm = polish_max(f, xm, lo, hi);
            vm = std::max(vm, f(xm));
            // Near a flat top the search cannot tell a piece end from a point
            // ~1e-8 inside it; prefer the end when it attains the value.
            for (double e : {p.ea, p.eb})
                if (std::abs(xm - e) <= 1e-6 && f(e) >= vm - 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(vm))) {
                    xm = e;
                    vm = f(e);
                }
            cands.push_back({xm, vm});
            best = std::max(best, vm);
        }
        scans.push_back(std::move(s));
    }
    Extremum ex;
    if (cands.empty()) {
        ex.value = std::numeric_limits<double>::quiet_NaN();
        return ex;
    }
    ex.value = best;
    const double vtol = 1e-10 * std::max(1.0, std::abs(best));
    auto attains = [&](double v) { return v >= best - vtol; };

    // Plateaus: three or more consecutive samples at the maximum.
    for (const auto& s : scans) {
        const std::size_t m = s.x.size();
        std::size_t j = 0;
        while (j < m) {
            if (!attains(s.y[j])) {
                ++j;
                continue;
            }
            std::size_t k = j;
            while (k + 1 < m && attains(s.y[k + 1])) ++k;
            if (k - j >= 2) {
                auto pred = [&](double t) { return attains(f(t)); };
                const double lo = j == 0 ? s.p.a : edge(pred, s.x[j], s.x[j - 1]);
                const double hi = k == m - 1 ? s.p.b : edge(pred, s.x[k], s.x[k + 1]);
                ex.intervals.push_back({snap(lo, breaks), snap(hi, breaks)});
            }
            j = k + 1;
        }
    }
    for (const auto& c : cands)
        if (attains(c.v) && !inside_any(c.x, ex.intervals, 1e-12)) ex.points.push_back(snap(c.x, breaks));
    dedupe(ex.points, 1e-7);
    std::sort(ex.intervals.begin(), ex.intervals.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : ex.intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi + 1e-12)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    ex.intervals = merged;
    return ex;
}

std::vector<double> find_omega(const ProblemSpec& spec) {
    auto c = [&](double a) { return c_value(spec, a); };
    const auto zs = zero_set(spec, c, spec.tol.root_tol);
    if (!zs.intervals.empty())
        throw OmegaOverflow("C vanishes on an interval; the zero set of C is not finite");
    if (zs.points.size() > kMaxZeros)
        throw OmegaOverflow("C has more than " + std::to_string(kMaxZeros) + " zeros");
    return zs.points;
}

double max_abs_c(const ProblemSpec& spec) {
    double m = 0.0;
    for (const auto& p : pieces_of(spec, {{0.0, 1.0}}))
        for (double x : sample_grid(p, spec.tol.grid_n)) m = std::max(m, std::abs(c_value(spec, x)));
    return m;
}

RootReport root_report(const ProblemSpec& spec) {
    RootReport rep;
    const double lam = spec.lambda, kap = spec.kappa, rtol = spec.tol.root_tol;
    if (lam == 0.0) return rep;  // Q == 1
    const auto& d = spec.data;

    rep.omega_set = find_omega(spec);
    const auto rz = zero_set(spec, d.rho0, rtol);
    rep.rho0_zeros = rz.points;
    rep.rho0_zero_intervals = rz.intervals;

    const double band = 2.0 * rtol;
    auto near_omega = [&](double x) {
        for (double w : rep.omega_set)
            if (std::abs(x - w) <= std::max(band, 1e-9)) return true;
        return false;
    };
    auto attained_in_sigma = [&](const Extremum& ex) {
        if (!ex.intervals.empty()) return true;
        for (double x : ex.points)
            if (!near_omega(x)) return true;
        return false;
    };

    if (!rep.omega_set.empty()) {
        double m = -std::numeric_limits<double>::infinity();
        for (double w : rep.omega_set) m = std::max(m, 2.0 * lam * d.u0_prime(w));
        rep.M = m;
    }
    auto lu = [&](double a) { return lam * d.u0_prime(a); };
    const auto ex1 = maximize(spec, lu, {{0.0, 1.0}});
    if (attained_in_sigma(ex1)) rep.N1 = ex1.value;

    Extremum top;
    if (lam * kap >= 0.0) {
        const double s = std::sqrt(lam * kap);
        auto g1 = [&](double a) { return lam * d.u0_prime(a) + s * std::abs(d.rho0(a)); };
        top = maximize(spec, g1, {{0.0, 1.0}});
        if (attained_in_sigma(top)) rep.N = top.value;
    } else {
        // Q > 0 wherever rho0 != 0; roots only at zeros of rho0, all double.
        top.value = -std::numeric_limits<double>::infinity();
        for (double z : rz.points) top.value = std::max(top.value, lu(z));
        for (const auto& iv : rz.intervals) {
            const auto e = maximize(spec, lu, {iv});
            top.value = std::max(top.value, e.value);
        }
        if (std::isfinite(top.value)) {
            const double vtol = 1e-10 * std::max(1.0, std::abs(top.value));
            for (double z : rz.points)
                if (lu(z) >= top.value - vtol) top.points.push_back(z);
            for (const auto& iv : rz.intervals) {
                const auto e = maximize(spec, lu, {iv});
                if (e.value >= top.value - vtol) {
                    top.points.insert(top.points.end(), e.points.begin(), e.points.end());
                    top.intervals.insert(top.intervals.end(), e.intervals.begin(), e.intervals.end());
                }
            }
        }
    }

    if (!(std::isfinite(top.value) && top.value > 0.0)) return rep;
    rep.eta_star = 1.0 / top.value;
    rep.alpha_bar = top.points;
    rep.alpha_bar_intervals = top.intervals;
    rep.alpha_bar_interval = !top.intervals.empty();
    for (const auto& iv : top.intervals) {
        rep.alpha_bar.push_back(iv.lo);
        rep.alpha_bar.push_back(iv.hi);
    }
    bool all_zero = true;
    for (double x : top.points)
        if (std::abs(d.rho0(x)) > rtol) all_zero = false;
    for (const auto& iv : top.intervals)
        for (double x : {iv.lo, 0.5 * (iv.lo + iv.hi), iv.hi})
            if (std::abs(d.rho0(x)) > rtol) all_zero = false;
    // Linear Q at an Omega point gives a simple root even if rho0 vanishes nearby.
    rep.multiplicity = all_zero ? Multiplicity::Double : Multiplicity::Single;
    return rep;
}

}  // namespace hs
