#include "srb/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srb {

std::vector<CycleWeight> cycle_weights(const OrbitTable& table, const Observable& psi) {
    std::vector<CycleWeight> weights;
    for (int q = 1; q <= table.max_period; ++q) {
        for (const PeriodicOrbit& orbit : table.primitive(q)) {
            CycleWeight w;
            w.period = q;
            w.log_abs_multiplier = orbit.log_abs_multiplier;
            if (psi.kind == Observable::Kind::log_abs_derivative) {
                // Birkhoff sum of log|f'| over one cycle is the log multiplier.
                w.birkhoff = orbit.log_abs_multiplier;
            } else {
                KahanSum sum;
                for (double x : orbit.points) sum.add(poly_eval(psi.coeff, x));
                w.birkhoff = sum.value();
            }
            weights.push_back(w);
        }
    }
    return weights;
}

std::vector<CycleWeight> cycle_weights_motion(const OrbitTable& base_table,
                                              const MapDescriptor& m, double t,
                                              const Observable& psi) {
    if (m.kind() != MapKind::conjugated)
        throw config_error("motion-route weights need a conjugated family");
    m.window().require(t);
    const AnalyticMotion& h = m.motion();
    std::vector<CycleWeight> weights;
    for (int q = 1; q <= base_table.max_period; ++q) {
        for (const PeriodicOrbit& orbit : base_table.primitive(q)) {
            CycleWeight w;
            w.period = q;
            // multipliers are invariant under the conjugacy
            w.log_abs_multiplier = orbit.log_abs_multiplier;
            if (psi.kind == Observable::Kind::log_abs_derivative) {
                w.birkhoff = orbit.log_abs_multiplier;
            } else {
                KahanSum sum;
                for (double x : orbit.points) sum.add(poly_eval(psi.coeff, h.apply(t, x)));
                w.birkhoff = sum.value();
            }
            weights.push_back(w);
        }
    }
    return weights;
}

TraceSums trace_sums(std::span<const CycleWeight> weights, double s, int P,
                     bool with_derivative) {
    if (P < 1) throw config_error("trace order must be >= 1");
    TraceSums out;
    out.order = P;
    out.s = s;
    out.a.assign(static_cast<size_t>(P), 0.0);
    out.has_derivative = with_derivative;
    if (with_derivative) out.ds_a.assign(static_cast<size_t>(P), 0.0);

    for (int p = 1; p <= P; ++p) {
        KahanSum sum, dsum;
        for (const CycleWeight& w : weights) {
            if (w.period > p || p % w.period != 0) continue;
            const double reps = static_cast<double>(p / w.period);
            const double birkhoff_p = reps * w.birkhoff;
            const double term =
                static_cast<double>(w.period) *
                std::exp(s * birkhoff_p - reps * w.log_abs_multiplier);
            sum.add(term);
            if (with_derivative) dsum.add(birkhoff_p * term);
        }
        out.a[p - 1] = sum.value() / p;
        if (with_derivative) out.ds_a[p - 1] = dsum.value() / p;
        if (!std::isfinite(out.a[p - 1]))
            throw numerical_error("trace sum not finite at period " + std::to_string(p));
    }
    return out;
}

TraceSums trace_sums(const MapDescriptor& m, double t, const Observable& psi, double s,
                     int P, bool with_derivative) {
    if (m.kind() == MapKind::conjugated) {
        const OrbitTable base = enumerate_orbits(m.base().at(0.0), P);
        return trace_sums(cycle_weights_motion(base, m, t, psi), s, P, with_derivative);
    }
    const UnimodalMap f = m.at(t);
    const OrbitTable table = enumerate_orbits(f, P);
    return trace_sums(cycle_weights(table, psi), s, P, with_derivative);
}

double trace_sum(const MapDescriptor& m, double t, const Observable& psi, double s, int p,
                 double* ds) {
    const TraceSums sums = trace_sums(m, t, psi, s, p, ds != nullptr);
    if (ds) *ds = sums.ds_a[p - 1] * p;
    return sums.a[p - 1] * p;
}

double PowerSeries::eval(double z) const { return poly_eval(d, z); }

double PowerSeries::deriv(double z) const {
    double acc = 0.0;
    for (size_t k = d.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * d[k];
    return acc;
}

PowerSeries inverse_zeta_series(const TraceSums& traces, int P) {
    if (P > traces.order) throw config_error("series order exceeds available traces");
    PowerSeries series;
    series.d.assign(static_cast<size_t>(P) + 1, 0.0);
    series.d[0] = 1.0;
    // k d_k = - sum_{p<=k} p a_p d_{k-p}
    for (int k = 1; k <= P; ++k) {
        KahanSum sum;
        for (int p = 1; p <= k; ++p)
            sum.add(static_cast<double>(p) * traces.a[p - 1] * series.d[static_cast<size_t>(k - p)]);
        series.d[static_cast<size_t>(k)] = -sum.value() / k;
    }
    return series;
}

PowerSeries series_s_derivative(const TraceSums& traces, const PowerSeries& d, int P) {
    if (!traces.has_derivative)
        throw config_error("series_s_derivative needs traces with attached derivatives");
    if (P > traces.order || P > d.degree())
        throw config_error("series order exceeds available data");
    PowerSeries ds;
    ds.d.assign(static_cast<size_t>(P) + 1, 0.0);
    for (int k = 1; k <= P; ++k) {
        KahanSum sum;
        for (int p = 1; p <= k; ++p) {
            const size_t i = static_cast<size_t>(k - p);
            sum.add(static_cast<double>(p) *
                    (traces.ds_a[p - 1] * d.d[i] + traces.a[p - 1] * ds.d[i]));
        }
        ds.d[static_cast<size_t>(k)] = -sum.value() / k;
    }
    return ds;
}

LeadingZero leading_zero(const PowerSeries& d, double radius) {
    if (d.d.empty() || d.d[0] != 1.0)
        throw config_error("leading_zero needs a series normalised to d0 = 1");
    if (!(radius > 0.0) || radius > 16.0)
        throw config_error("leading_zero: invalid search radius");

    const int kScan = 4096;
    double za = 0.0, va = 1.0, zb = 0.0, vb = 0.0;
    bool bracketed = false;
    for (int j = 1; j <= kScan; ++j) {
        const double z = radius * j / kScan;
        const double v = d.eval(z);
        if (v <= 0.0) {
            zb = z;
            vb = v;
            bracketed = true;
            break;
        }
        za = z;
        va = v;
    }
    if (!bracketed)
        throw numerical_error("no zero of 1/zeta in the disc of radius " +
                              std::to_string(radius) + " (truncation too coarse)");

    double x = 0.5 * (za + zb);
    for (int it = 0; it < 128; ++it) {
        const double v = d.eval(x);
        if (std::abs(v) < 1e-15) break;
        if ((v > 0.0) == (va > 0.0)) {
            za = x;
            va = v;
        } else {
            zb = x;
            vb = v;
        }
        const double dv = d.deriv(x);
        double xn = (dv != 0.0) ? x - v / dv : 0.5 * (za + zb);
        if (!(xn > za && xn < zb)) xn = 0.5 * (za + zb);
        if (std::abs(xn - x) < 1e-16 * (1.0 + std::abs(x))) {
            x = xn;
            break;
        }
        x = xn;
    }
    (void)vb;

    LeadingZero zero;
    zero.z0 = x;
    zero.lambda = 1.0 / x;
    zero.residual = std::abs(d.eval(x));
    zero.slope = std::abs(d.deriv(x));
    if (zero.residual > 1e-10)
        throw numerical_error("leading zero residual " + std::to_string(zero.residual) +
                              " exceeds certificate tolerance");
    if (zero.slope < 1e-4)
        throw numerical_error("leading zero is not simple at tolerance (|d'| = " +
                              std::to_string(zero.slope) + "); response extraction halted");
    zero.simple = true;
    return zero;
}

namespace {

double pressure_from_traces(const TraceSums& traces, int P, double radius,
                            LeadingZero* out_zero) {
    const PowerSeries d = inverse_zeta_series(traces, P);
    const LeadingZero zero = leading_zero(d, radius);
    const PowerSeries ds = series_s_derivative(traces, d, P);
    const double ds_z0 = -ds.eval(zero.z0) / d.deriv(zero.z0);
    if (out_zero) *out_zero = zero;
    return -ds_z0 / zero.z0;
}

int adaptive_order(const TraceSums& traces, double radius) {
    // successive leading zeros must settle within 1e-8, else use the cap
    double prev = 0.0;
    for (int P = 8; P <= traces.order; P += 2) {
        const PowerSeries d = inverse_zeta_series(traces, P);
        const double z0 = leading_zero(d, radius).z0;
        if (P > 8 && std::abs(z0 - prev) < 1e-8) return P;
        prev = z0;
    }
    return traces.order;
}

} // namespace

double pressure_s_derivative(std::span<const CycleWeight> weights, int P, double radius,
                             LeadingZero* out_zero) {
    const bool adaptive = P <= 0;
    int max_period = 0;
    for (const CycleWeight& w : weights) max_period = std::max(max_period, w.period);
    const int order = adaptive ? max_period : P;
    const TraceSums traces = trace_sums(weights, 0.0, order, true);
    const int used = adaptive ? adaptive_order(traces, radius) : order;
    return pressure_from_traces(traces, used, radius, out_zero);
}

double pressure_s_derivative(const MapDescriptor& m, double t, const Observable& psi,
                             int P, double radius, LeadingZero* out_zero) {
    const int order = (P <= 0) ? kPeriodCap : P;
    if (m.kind() == MapKind::conjugated) {
        const OrbitTable base = enumerate_orbits(m.base().at(0.0), order);
        const auto weights = cycle_weights_motion(base, m, t, psi);
        return pressure_s_derivative(weights, P, radius, out_zero);
    }
    const UnimodalMap f = m.at(t);
    const OrbitTable table = enumerate_orbits(f, order);
    const auto weights = cycle_weights(table, psi);
    return pressure_s_derivative(weights, P, radius, out_zero);
}

} // namespace srb
