#pragma once

// Precision-critical scalar kernels: trig of pi-rational arguments with exact
// zeros, compensated product fraction for phase reduction, compensated and
// pairwise accumulation, Gauss-Legendre rules, and Fresnel integrals.

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qcarpet::num {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// sin(pi*x). Exactly 0 at integer x, exactly +-1 at half-integer x, and
// bitwise odd: sinpi(-x) == -sinpi(x). Argument reduction is exact
// (Sterbenz) for |x| <= 2^53.
inline double sinpi(double x) {
    double k = std::nearbyint(x * 0.5);
    double r = x - 2.0 * k;            // exact, r in [-1, 1]
    if (r > 0.5)       r = 1.0 - r;    // exact
    else if (r < -0.5) r = -1.0 - r;   // exact
    return std::sin(pi * r);
}

// cos(pi*x). Exactly 0 at half-integer x, +-1 at integer x, bitwise even.
inline double cospi(double x) {
    double k = std::nearbyint(x * 0.5);
    double r = std::fabs(x - 2.0 * k); // [0, 1]
    if (r == 0.5) return 0.0;
    double rr = (r > 0.5) ? 1.0 - r : r;
    double c = std::cos(pi * rr);
    return (r > 0.5) ? -c : c;
}

// sin(pi*(p + e)) and cos(pi*(p + e)) for a two-term argument with |e| << 1,
// as produced by an exact product split. First-order correction is enough:
// the dropped term is O(e^2) ~ 1e-24.
inline double sinpi2(double p, double e) {
    return sinpi(p) + (pi * e) * cospi(p);
}
inline double cospi2(double p, double e) {
    return cospi(p) - (pi * e) * sinpi(p);
}

// frac(a*b) in [0, 1), accurate to ~1 ulp of the result even when a*b ~ 1e10,
// via an exact two-term product split. Exact when a*b is exactly an integer,
// half-integer, or quarter-integer (drives exact revival phases).
inline double frac_prod(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);     // a*b == p + e exactly
    double f = p - std::floor(p);      // exact
    f += e;
    f -= std::floor(f);
    if (f >= 1.0) f -= 1.0;
    if (f < 0.0)  f += 1.0;
    return f;
}

// Branch-free Kahan compensated accumulator.
struct kahan {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum() const { return s; }
};

// Pairwise sum over [first, first+n): O(log n) rounding growth.
inline double pairwise_sum(const double* first, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += first[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(first, h) + pairwise_sum(first + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Uniform-grid trapezoid rule with pairwise interior accumulation.
inline double trapezoid_uniform(const std::vector<double>& f, double dx) {
    if (f.size() < 2) throw std::invalid_argument("trapezoid_uniform: need >= 2 samples");
    double interior = pairwise_sum(f.data() + 1, f.size() - 2);
    return dx * (0.5 * (f.front() + f.back()) + interior);
}

// Gauss-Legendre rule on [-1, 1], cached by order. Nodes by Newton iteration
// on P_n; converges to ~1 ulp in < 10 iterations.
struct gl_rule {
    std::vector<double> x;
    std::vector<double> w;
};

inline const gl_rule& gauss_legendre(int order) {
    if (order < 1 || order > 128) throw std::domain_error("gauss_legendre: order out of range");
    static std::map<int, gl_rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    gl_rule r;
    r.x.resize(order);
    r.w.resize(order);
    auto legendre_pair = [order](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = order * (x * p1 - p0) / (x * x - 1.0);
        return std::pair<double, double>{p1, dp};
    };
    // positive-half nodes only; the rule is mirrored so paired nodes are
    // exact negations
    for (int i = 0; i < order / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 60; ++iter) {
            auto [p, d] = legendre_pair(x);
            dp = d;
            double dx = p / d;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        dp = legendre_pair(x).second;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[order - 1 - i] = x;
        r.x[i] = -x;
        r.w[order - 1 - i] = w;
        r.w[i] = w;
    }
    if (order % 2 == 1) {
        double dp = legendre_pair(0.0).second;
        r.x[order / 2] = 0.0;
        r.w[order / 2] = 2.0 / (dp * dp);
    }
    return cache.emplace(order, std::move(r)).first->second;
}

// Fresnel integrals C(x) = int_0^x cos(pi u^2 / 2) du and S(x) likewise with
// sin. Power series in long double below |x| = 3.7, asymptotic auxiliary
// series above; absolute error below 1e-8 everywhere (~3e-9 worst at the
// crossover).
inline std::pair<double, double> fresnel_cs(double x) {
    using ld = long double;
    constexpr ld pil = std::numbers::pi_v<ld>;
    const ld ax = std::fabs((ld)x);
    ld C, S;
    if (ax <= 3.7L) {
        const ld z2 = (pil / 2) * ax * ax;      // pi/2 x^2
        const ld q = z2 * z2;
        // C: sum_k (-1)^k z2^(2k) x / ((2k)! (4k+1))
        ld termc = ax, sumc = ax;
        // S: sum_k (-1)^k z2^(2k+1) x / ((2k+1)! (4k+3))
        ld terms = ax * z2 / 3;
        ld sums = terms;
        for (int k = 0; k < 200; ++k) {
            termc *= -q * (ld)(4 * k + 1) /
                     ((ld)((2 * k + 1)) * (2 * k + 2) * (4 * k + 5));
            sumc += termc;
            terms *= -q * (ld)(4 * k + 3) /
                     ((ld)((2 * k + 2)) * (2 * k + 3) * (4 * k + 7));
            sums += terms;
            if (std::fabs(termc) < 1e-24L * std::fabs(sumc) &&
                std::fabs(terms) < 1e-24L * std::fabs(sums)) break;
        }
        C = (double)sumc;
        S = (double)sums;
    } else {
        const ld z = (pil / 2) * ax * ax;
        const ld iz = 1 / (pil * ax * ax);      // 1/(pi x^2)
        // f = (1/(pi x)) sum (-1)^k (4k-1)!!/(pi x^2)^(2k)
        // g = (1/(pi x)) sum (-1)^k (4k+1)!!/(pi x^2)^(2k+1)
        ld tf = 1, f = 1;
        ld tg = iz, g = iz;
        ld prevf = std::fabs(tf), prevg = std::fabs(tg);
        for (int k = 1; k < 60; ++k) {
            tf *= -(ld)(4 * k - 1) * (4 * k - 3) * iz * iz;
            if (std::fabs(tf) >= prevf) break;  // truncate at smallest term
            prevf = std::fabs(tf);
            f += tf;
            tg *= -(ld)(4 * k + 1) * (4 * k - 1) * iz * iz;
            if (std::fabs(tg) >= prevg) break;
            prevg = std::fabs(tg);
            g += tg;
        }
        f /= pil * ax;
        g /= pil * ax;
        const ld sz = std::sin(z), cz = std::cos(z);
        C = (double)(0.5L + f * sz - g * cz);
        S = (double)(0.5L - f * cz - g * sz);
    }
    if (x < 0) { C = -C; S = -S; }
    return {C, S};
}

} // namespace qcarpet::num
