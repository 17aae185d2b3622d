#pragma once

// Pattern diagnostics: density distances, revival scanning with golden-section
// refinement, plateau flatness, far-field envelope correlation, rectangle
// template matching for fractional revivals, and box-counting dimension of
// slice graphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qcarpet/coefficients.hpp"
#include "qcarpet/numerics.hpp"
#include "qcarpet/oracle.hpp"
#include "qcarpet/propagator.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

// Regime thresholds. The near/far-field labels are declared from measured
// statistics, not by eye.
inline constexpr double kFresnelMinCorrelation = 0.95;
inline constexpr double kFraunhoferMinCorrelation = 0.9;
inline constexpr double kPlateauDestroyed = 0.5;
// Rectangle-template match: a slice is flagged as a k-copy reappearance when
// the best sliding window of width 1.5a holds at least this mass fraction.
inline constexpr double kTemplateMassThreshold = 0.1;

// || p - q ||_2 / || q ||_2.
inline double l2_density_distance(const std::vector<double>& p,
                                  const std::vector<double>& q) {
    if (p.size() != q.size())
        throw validation_error("l2_density_distance: length mismatch");
    std::vector<double> dd(p.size()), qq(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = p[i] - q[i];
        dd[i] = d * d;
        qq[i] = q[i] * q[i];
    }
    double den = num::pairwise_sum(qq);
    if (den == 0.0) throw validation_error("l2_density_distance: zero reference");
    return std::sqrt(num::pairwise_sum(dd) / den);
}

inline void require_mirror_grid(const std::vector<double>& y) {
    std::size_t M = y.size();
    for (std::size_t j = 0; j < M / 2 + 1; ++j)
        if (y[j] != -y[M - 1 - j])
            throw validation_error("mirror_distance: grid not symmetric about 0");
}

// Distance between a slice and its y -> -y reflection.
inline double mirror_distance(const std::vector<double>& slice,
                              const std::vector<double>& y_samples) {
    if (slice.size() != y_samples.size())
        throw validation_error("mirror_distance: length mismatch");
    require_mirror_grid(y_samples);
    std::vector<double> r(slice.rbegin(), slice.rend());
    return l2_density_distance(slice, r);
}

// Relative standard deviation over the central 60% of the slit window.
inline double plateau_flatness(const std::vector<double>& slice,
                               const SlitAperture& slit,
                               const std::vector<double>& y_samples) {
    if (slice.size() != y_samples.size())
        throw validation_error("plateau_flatness: length mismatch");
    double lo = slit.center - 0.3 * slit.width;
    double hi = slit.center + 0.3 * slit.width;
    num::kahan sum, sumsq;
    std::size_t count = 0;
    for (std::size_t j = 0; j < slice.size(); ++j) {
        if (y_samples[j] >= lo && y_samples[j] <= hi) {
            sum.add(slice[j]);
            ++count;
        }
    }
    if (count < 2)
        throw validation_error("plateau_flatness: grid does not resolve the slit window");
    double mean = sum.sum() / (double)count;
    for (std::size_t j = 0; j < slice.size(); ++j)
        if (y_samples[j] >= lo && y_samples[j] <= hi) {
            double d = slice[j] - mean;
            sumsq.add(d * d);
        }
    return std::sqrt(sumsq.sum() / (double)count) / mean;
}

inline double pearson_correlation(const std::vector<double>& p,
                                  const std::vector<double>& q) {
    if (p.size() != q.size() || p.size() < 2)
        throw validation_error("pearson_correlation: bad lengths");
    double n = (double)p.size();
    num::kahan sp, sq;
    for (std::size_t i = 0; i < p.size(); ++i) { sp.add(p[i]); sq.add(q[i]); }
    double mp = sp.sum() / n, mq = sq.sum() / n;
    num::kahan spq, spp, sqq;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double a = p[i] - mp, b = q[i] - mq;
        spq.add(a * b);
        spp.add(a * a);
        sqq.add(b * b);
    }
    if (spp.sum() == 0.0 || sqq.sum() == 0.0)
        throw validation_error("pearson_correlation: degenerate constant input");
    return spq.sum() / std::sqrt(spp.sum() * sqq.sum());
}

// Index window spanning the envelope's central three lobes: from the second
// local minimum left of the peak to the second on the right.
inline std::pair<std::size_t, std::size_t>
central_three_lobes(const std::vector<double>& envelope) {
    if (envelope.size() < 8)
        throw validation_error("central_three_lobes: envelope too short");
    std::size_t peak = (std::size_t)(std::max_element(envelope.begin(), envelope.end()) -
                                     envelope.begin());
    auto second_min = [&](int dir) {
        std::size_t i = peak;
        int mins = 0;
        while (true) {
            std::size_t next = (std::size_t)((std::ptrdiff_t)i + dir);
            if (next == 0 || next + 1 >= envelope.size()) return next;
            i = next;
            if (envelope[i] <= envelope[i - 1] && envelope[i] <= envelope[i + 1] &&
                ++mins == 2)
                return i;
        }
    };
    return {second_min(-1), second_min(+1)};
}

// Pearson correlation between a slice and a far-field envelope over the
// envelope's central three lobes.
inline double sinc_correlation(const std::vector<double>& slice,
                               const std::vector<double>& envelope) {
    if (slice.size() != envelope.size())
        throw validation_error("sinc_correlation: length mismatch");
    auto [lo, hi] = central_three_lobes(envelope);
    std::vector<double> a(slice.begin() + (std::ptrdiff_t)lo,
                          slice.begin() + (std::ptrdiff_t)hi + 1);
    std::vector<double> b(envelope.begin() + (std::ptrdiff_t)lo,
                          envelope.begin() + (std::ptrdiff_t)hi + 1);
    return pearson_correlation(a, b);
}

// First prominent minimum of an oscillation-decorated pattern right of its
// peak: box-smooth over one aperture width, take the first sample that is
// the minimum of its half-width neighborhood, then refine to the raw minimum
// inside that trough (the box average alone drags the minimum outward).
inline double first_minimum_offset(const std::vector<double>& slice,
                                   const std::vector<double>& y_samples,
                                   const SlitAperture& slit) {
    if (slice.size() != y_samples.size() || slice.size() < 16)
        throw validation_error("first_minimum_offset: bad input");
    double dy = y_samples[1] - y_samples[0];
    int w = std::max(3, (int)std::lround(slit.width / dy));
    if (w % 2 == 0) ++w;
    int r = w / 2;
    std::size_t M = slice.size();
    std::vector<double> sm(M, 0.0);
    // prefix-based moving average, edges truncated
    std::vector<double> prefix(M + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) prefix[j + 1] = prefix[j] + slice[j];
    for (std::size_t j = 0; j < M; ++j) {
        std::size_t a = j > (std::size_t)r ? j - (std::size_t)r : 0;
        std::size_t b = std::min(M, j + (std::size_t)r + 1);
        sm[j] = (prefix[b] - prefix[a]) / (double)(b - a);
    }
    std::size_t peak = (std::size_t)(std::max_element(sm.begin(), sm.end()) - sm.begin());
    for (std::size_t j = peak + (std::size_t)r; j + (std::size_t)r + 1 < M; ++j) {
        double v = sm[j];
        bool is_min = true;
        for (std::size_t k = j - (std::size_t)r; k <= j + (std::size_t)r; ++k)
            if (sm[k] < v) { is_min = false; break; }
        if (is_min) {
            std::size_t lo = j - (std::size_t)r;
            std::size_t hi = std::min(M - 1, j + (std::size_t)r);
            std::size_t best = lo;
            for (std::size_t k = lo; k <= hi; ++k)
                if (slice[k] < slice[best]) best = k;
            return y_samples[best] - slit.center;
        }
    }
    throw validation_error("first_minimum_offset: no interior minimum found");
}

// Rectangle-template match: mass fraction captured by the best sliding window
// of width 1.5a, plus the count of well-separated windows holding at least
// half that much.
struct TemplateMatch {
    double mass_fraction = 0.0;   // best window's share of the total mass
    int copies = 0;
};

inline TemplateMatch rectangle_template_match(const std::vector<double>& slice,
                                              const std::vector<double>& y_samples,
                                              const SlitAperture& slit) {
    if (slice.size() != y_samples.size() || slice.size() < 16)
        throw validation_error("rectangle_template_match: bad input");
    double dy = y_samples[1] - y_samples[0];
    std::size_t M = slice.size();
    int w = std::max(3, (int)std::lround(1.5 * slit.width / dy));
    if ((std::size_t)w >= M) w = (int)M - 1;
    std::vector<double> prefix(M + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) prefix[j + 1] = prefix[j] + slice[j];
    double total = prefix[M];
    if (total <= 0.0) throw validation_error("rectangle_template_match: empty density");
    std::vector<double> frac(M, 0.0);
    int r = w / 2;
    for (std::size_t j = 0; j < M; ++j) {
        std::size_t a = j > (std::size_t)r ? j - (std::size_t)r : 0;
        std::size_t b = std::min(M, j + (std::size_t)(w - r));
        frac[j] = (prefix[b] - prefix[a]) / total;
    }
    TemplateMatch out;
    out.mass_fraction = *std::max_element(frac.begin(), frac.end());
    // count peaks: neighborhood maxima of radius one aperture width, above
    // half the best window, greedily separated
    int ra = std::max(1, (int)std::lround(slit.width / dy));
    std::size_t j = (std::size_t)ra;
    while (j + (std::size_t)ra < M) {
        double v = frac[j];
        bool is_max = v > 0.5 * out.mass_fraction;
        if (is_max)
            for (std::size_t k = j - (std::size_t)ra; k <= j + (std::size_t)ra; ++k)
                if (frac[k] > v) { is_max = false; break; }
        if (is_max) {
            ++out.copies;
            j += 2 * (std::size_t)ra;
        } else {
            ++j;
        }
    }
    return out;
}

// Box counting of the graph of a slice, normalized to unit peak and unit
// y-span; dyadic scales; least-squares slope of log count vs log(1/s).
struct BoxCountReport {
    double dimension = 0.0;
    std::vector<std::pair<double, std::uint64_t>> counts;   // (scale, count)
};

inline BoxCountReport box_counting_report(
    const std::vector<double>& slice, const std::vector<double>& y_samples,
    std::pair<double, double> scale_range = {1.0 / 16384.0, 1.0 / 64.0},
    const std::vector<std::pair<double, double>>& exclude_x = {}) {
    if (slice.size() != y_samples.size())
        throw validation_error("box_counting: length mismatch");
    if (slice.size() < (1u << 16))
        throw validation_error("box_counting: need at least 2^16 samples");
    auto [slo, shi] = scale_range;
    if (!(slo > 0.0) || !(shi > slo))
        throw validation_error("box_counting: bad scale range");
    int kmin = (int)std::ceil(-std::log2(shi) - 1e-9);
    int kmax = (int)std::floor(-std::log2(slo) + 1e-9);
    if (kmax - kmin < 3)
        throw validation_error("box_counting: scale range must span >= 3 octaves");

    double peak = *std::max_element(slice.begin(), slice.end());
    if (!(peak > 0.0)) throw validation_error("box_counting: zero slice");
    const std::size_t M = slice.size();
    const double xden = (double)(M - 1);

    BoxCountReport rep;
    std::vector<double> lg1s, lgn;
    for (int k = kmin; k <= kmax; ++k) {
        const double s = std::ldexp(1.0, -k);
        const std::size_t nc = (std::size_t)1 << k;
        std::vector<double> vmin(nc, 1e300), vmax(nc, -1e300);
        for (std::size_t j = 0; j < M; ++j) {
            std::size_t ci = std::min(nc - 1, (std::size_t)((double)j / xden * (double)nc));
            double v = slice[j] / peak;
            vmin[ci] = std::min(vmin[ci], v);
            vmax[ci] = std::max(vmax[ci], v);
        }
        std::uint64_t count = 0;
        for (std::size_t ci = 0; ci < nc; ++ci) {
            if (vmax[ci] < vmin[ci]) continue;
            double xc = ((double)ci + 0.5) * s;
            bool skip = false;
            for (auto& ex : exclude_x)
                if (xc >= ex.first && xc <= ex.second) { skip = true; break; }
            if (skip) continue;
            count += (std::uint64_t)(std::floor(vmax[ci] / s) - std::floor(vmin[ci] / s)) + 1;
        }
        rep.counts.emplace_back(s, count);
        lg1s.push_back(k * std::log(2.0));
        lgn.push_back(std::log((double)count));
    }
    // least-squares slope
    double n = (double)lg1s.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lg1s.size(); ++i) {
        sx += lg1s[i];
        sy += lgn[i];
        sxx += lg1s[i] * lg1s[i];
        sxy += lg1s[i] * lgn[i];
    }
    rep.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

inline double box_counting_dimension(
    const std::vector<double>& slice, const std::vector<double>& y_samples,
    std::pair<double, double> scale_range = {1.0 / 16384.0, 1.0 / 64.0}) {
    return box_counting_report(slice, y_samples, scale_range).dimension;
}

// Revival scanning.
struct RevivalReport {
    enum class Kind { full, mirror, fractional };
    struct Hit {
        double time;
        double metric;   // l2 distance for full/mirror, mass fraction for fractional
        Kind kind;
        int copies;      // recorded for fractional hits
    };
    std::vector<Hit> hits;
    double threshold = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};

inline const char* to_string(RevivalReport::Kind k) {
    switch (k) {
        case RevivalReport::Kind::full: return "full";
        case RevivalReport::Kind::mirror: return "mirror";
        default: return "fractional";
    }
}

namespace detail {

// Golden-section minimum of f on [a, b] to absolute x-tolerance.
inline double golden_minimize(const std::function<double(double)>& f,
                              double a, double b, double tol) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Scan [t_lo, t_hi]: at each sample compare the slice against the collapse
// slice (full) and its reflection (mirror), and run the rectangle template.
// Candidate minima (below-threshold runs collapse to one candidate; isolated
// local minima are also candidates) are refined by golden section to
// 1e-6 * revival_time before the threshold decision.
inline RevivalReport revival_scan(const ModalCoefficients& coeffs,
                                  const WellConfig& well,
                                  const std::vector<double>& y_samples,
                                  double t_lo, double t_hi, double step,
                                  double threshold = 1e-3) {
    if (!(step > 0.0)) throw validation_error("revival_scan: step must be > 0");
    if (!(threshold > 0.0))
        throw validation_error("revival_scan: threshold must be > 0");
    if (!(t_hi > t_lo)) throw validation_error("revival_scan: empty range");
    if (!(t_lo >= well.t_measure))
        throw validation_error("revival_scan: range starts before t_measure");
    require_mirror_grid(y_samples);

    const double T = well.revival_time();
    const double tol = 1e-6 * T;
    const auto ref = density_slice(coeffs, well, y_samples, well.t_measure).density;
    const std::vector<double> ref_mirror(ref.rbegin(), ref.rend());

    std::vector<double> ts;
    for (double t = t_lo; t <= t_hi + 0.5 * step; t += step)
        ts.push_back(std::min(t, t_hi));
    const std::size_t S = ts.size();

    std::vector<double> d_full(S), d_mirr(S), mass(S);
    // slit geometry recovered for the template window: use the mass-weighted
    // width of the reference rectangle
    // (the reference is the collapse slice itself, so measure its support)
    double peak = *std::max_element(ref.begin(), ref.end());
    double dy = y_samples[1] - y_samples[0];
    double support = 0.0, centroid = 0.0, msum = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
        if (ref[j] > 0.5 * peak) support += dy;
        centroid += ref[j] * y_samples[j];
        msum += ref[j];
    }
    SlitAperture eff_slit(centroid / msum, std::max(support, 4 * dy));

    for (std::size_t i = 0; i < S; ++i) {
        auto d = density_slice(coeffs, well, y_samples, ts[i]).density;
        d_full[i] = l2_density_distance(d, ref);
        d_mirr[i] = l2_density_distance(d, ref_mirror);
        mass[i] = rectangle_template_match(d, y_samples, eff_slit).mass_fraction;
    }

    auto metric_at = [&](const std::vector<double>& refv, double t) {
        auto d = density_slice(coeffs, well, y_samples, t).density;
        return l2_density_distance(d, refv);
    };

    RevivalReport rep;
    rep.threshold = threshold;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;

    auto scan_metric = [&](const std::vector<double>& dm,
                           const std::vector<double>& refv,
                           RevivalReport::Kind kind) {
        std::vector<std::size_t> cands;
        // collapse below-threshold runs
        std::size_t i = 0;
        std::vector<char> in_run(S, 0);
        while (i < S) {
            if (dm[i] < threshold) {
                std::size_t best = i, j = i;
                while (j < S && dm[j] < threshold) {
                    if (dm[j] < dm[best]) best = j;
                    in_run[j] = 1;
                    ++j;
                }
                cands.push_back(best);
                i = j;
            } else {
                ++i;
            }
        }
        // isolated strict local minima
        for (std::size_t k = 1; k + 1 < S; ++k)
            if (!in_run[k] && dm[k] < dm[k - 1] && dm[k] < dm[k + 1])
                cands.push_back(k);
        for (std::size_t c : cands) {
            double a = ts[c > 0 ? c - 1 : 0];
            double b = ts[std::min(c + 1, S - 1)];
            double tmin = ts[c], m = dm[c];
            if (b > a) {
                double tr = detail::golden_minimize(
                    [&](double t) { return metric_at(refv, t); }, a, b, tol);
                double mr = metric_at(refv, tr);
                // keep the sampled point when refinement does not improve on it
                if (mr < m) { tmin = tr; m = mr; }
            }
            if (m < threshold) rep.hits.push_back({tmin, m, kind, 1});
        }
    };
    scan_metric(d_full, ref, RevivalReport::Kind::full);
    scan_metric(d_mirr, ref_mirror, RevivalReport::Kind::mirror);

    // fractional: local maxima of the window-mass curve, refined by maximizing.
    // The flag must clear both the absolute floor and the scan's own
    // background, or wide windows light up everywhere.
    std::vector<double> mass_sorted(mass);
    std::nth_element(mass_sorted.begin(), mass_sorted.begin() + (std::ptrdiff_t)(S / 2),
                     mass_sorted.end());
    const double frac_flag =
        std::max(kTemplateMassThreshold, 1.5 * mass_sorted[S / 2]);
    for (std::size_t k = 1; k + 1 < S; ++k) {
        // one strict side required: an exactly flat mass curve has no peaks
        bool peak = (mass[k] > mass[k - 1] && mass[k] >= mass[k + 1]) ||
                    (mass[k] >= mass[k - 1] && mass[k] > mass[k + 1]);
        if (peak && mass[k] >= frac_flag) {
            double a = ts[k - 1], b = ts[k + 1];
            double tmax = detail::golden_minimize(
                [&](double t) {
                    auto d = density_slice(coeffs, well, y_samples, t).density;
                    return -rectangle_template_match(d, y_samples, eff_slit).mass_fraction;
                },
                a, b, tol);
            auto d = density_slice(coeffs, well, y_samples, tmax).density;
            auto tm = rectangle_template_match(d, y_samples, eff_slit);
            if (tm.mass_fraction < mass[k]) {
                tmax = ts[k];
                d = density_slice(coeffs, well, y_samples, tmax).density;
                tm = rectangle_template_match(d, y_samples, eff_slit);
            }
            if (tm.mass_fraction >= frac_flag)
                rep.hits.push_back(
                    {tmax, tm.mass_fraction, RevivalReport::Kind::fractional, tm.copies});
        }
    }

    // sort by time; drop duplicates closer than half a step with precedence
    // full > mirror > fractional, then lower metric
    std::sort(rep.hits.begin(), rep.hits.end(),
              [](const RevivalReport::Hit& a, const RevivalReport::Hit& b) {
                  if (a.time != b.time) return a.time < b.time;
                  return (int)a.kind < (int)b.kind;
              });
    std::vector<RevivalReport::Hit> dedup;
    for (const auto& h : rep.hits) {
        if (!dedup.empty() && std::fabs(h.time - dedup.back().time) < 0.5 * step) {
            const auto& prev = dedup.back();
            bool replace = ((int)h.kind < (int)prev.kind) ||
                           (h.kind == prev.kind && h.metric < prev.metric);
            if (replace) dedup.back() = h;
            continue;
        }
        dedup.push_back(h);
    }
    rep.hits = std::move(dedup);
    return rep;
}

// Regime classification for a slice at elapsed time t (since collapse).
enum class Regime { collapse, fresnel, fraunhofer, intermediate };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::collapse: return "collapse";
        case Regime::fresnel: return "fresnel";
        case Regime::fraunhofer: return "fraunhofer";
        default: return "intermediate";
    }
}

// Far field first: a destroyed plateau with a sinc-shaped envelope is
// Fraunhofer; otherwise a high Fresnel-reference correlation near the slit is
// Fresnel; t = 0 is the collapse rectangle by definition.
inline Regime classify_regime(const std::vector<double>& slice,
                              const std::vector<double>& y_samples,
                              const SlitAperture& slit, double elapsed,
                              double hbar_over_m) {
    if (elapsed == 0.0) return Regime::collapse;
    if (!(elapsed > 0.0)) throw std::domain_error("classify_regime: elapsed < 0");
    double flat = plateau_flatness(slice, slit, y_samples);
    auto env = fraunhofer_envelope(slit, elapsed, y_samples, hbar_over_m);
    double sc = sinc_correlation(slice, env);
    if (sc >= kFraunhoferMinCorrelation && flat >= kPlateauDestroyed)
        return Regime::fraunhofer;
    auto fres = fresnel_reference(slit, elapsed, y_samples, hbar_over_m);
    std::vector<double> a, b;
    for (std::size_t j = 0; j < y_samples.size(); ++j) {
        double d = y_samples[j] - slit.center;
        if (std::fabs(d) <= 5.0 * slit.width) {
            a.push_back(slice[j]);
            b.push_back(fres[j]);
        }
    }
    if (a.size() >= 8 && pearson_correlation(a, b) >= kFresnelMinCorrelation)
        return Regime::fresnel;
    return Regime::intermediate;
}

} // namespace qcarpet
