#include "srb/response.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace srb {

const char* method_name(Method m) {
    switch (m) {
        case Method::zeta: return "zeta";
        case Method::ulam: return "ulam";
        case Method::oracle: return "oracle";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "zeta") return Method::zeta;
    if (name == "ulam") return Method::ulam;
    if (name == "oracle") return Method::oracle;
    throw config_error("unknown method '" + name + "' (expected zeta, ulam or oracle)");
}

void SweepConfig::validate() const {
    if (t_count < 3) throw config_error("sweep grid needs at least 3 points");
    if (!(t_min < t_max)) throw config_error("sweep grid must satisfy t_min < t_max");
    if (!family.window().contains(t_min) || !family.window().contains(t_max))
        throw config_error("sweep grid leaves the family parameter window");
    if (truncation < 1 || truncation > kPeriodCap)
        throw config_error("truncation P must lie in [1, " + std::to_string(kPeriodCap) + "]");
    if (methods.empty()) throw config_error("no methods requested");
    for (Method m : methods)
        if (m == Method::oracle && family.kind() != MapKind::conjugated)
            throw config_error("the conjugacy oracle needs a conjugated family");
    if (!(safety > 0.0 && safety < 1.0)) throw config_error("safety must lie in (0,1)");
    family.validate();
}

std::vector<double> SweepConfig::grid() const {
    std::vector<double> ts(static_cast<size_t>(t_count));
    for (int i = 0; i < t_count; ++i)
        ts[static_cast<size_t>(i)] = t_min + (t_max - t_min) * i / (t_count - 1);
    return ts;
}

namespace {

bool wants(const SweepConfig& cfg, Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

bool is_arcsine_base(const MapDescriptor& base) {
    if (base.kind() != MapKind::direct) return false;
    const auto& c = base.coefficients();
    // t-independent 1 - 2x^2
    if (c.size() != 1 || c[0].size() != 3) return false;
    return c[0][0] == 1.0 && c[0][1] == 0.0 && c[0][2] == -2.0;
}

} // namespace

double exact_conjugacy_oracle(const MapDescriptor& m, const Observable& psi, double t) {
    if (m.kind() != MapKind::conjugated)
        throw config_error("exact_conjugacy_oracle needs a conjugated family");
    if (!is_arcsine_base(m.base()))
        throw config_error("no closed-form base density for this family; "
                           "supply a density estimate");
    m.window().require(t);
    const AnalyticMotion& h = m.motion();
    const UnimodalMap f = m.at(t);
    const int K = 256;
    KahanSum sum;
    for (int k = 1; k <= K; ++k) {
        const double x = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * K));
        sum.add(eval_observable(psi, f, h.apply(t, x)));
    }
    return sum.value() / K;
}

double exact_conjugacy_oracle(const DensityEstimate& base_density, const MapDescriptor& m,
                              const Observable& psi, double t) {
    if (m.kind() != MapKind::conjugated)
        throw config_error("exact_conjugacy_oracle needs a conjugated family");
    m.window().require(t);
    const AnalyticMotion& h = m.motion();
    const UnimodalMap f = m.at(t);
    const double dx = base_density.bin_width();
    KahanSum sum;
    for (int i = 0; i < base_density.bins; ++i)
        sum.add(eval_observable(psi, f, h.apply(t, base_density.center(i))) *
                base_density.value[static_cast<size_t>(i)] * dx);
    return sum.value();
}

ResponseCurve response_curve(const SweepConfig& cfg) {
    cfg.validate();
    const std::vector<double> ts = cfg.grid();
    const bool conj = cfg.family.kind() == MapKind::conjugated;

    // Shared across grid points: the base orbit table (conjugated families
    // evaluate their trace sums through the motion) and, when the oracle has
    // no closed form, a base density estimate.
    std::shared_ptr<const OrbitTable> base_table;
    if (conj)
        base_table = std::make_shared<const OrbitTable>(
            enumerate_orbits(cfg.family.base().at(0.0), cfg.truncation));
    std::shared_ptr<const DensityEstimate> base_density;
    if (conj && wants(cfg, Method::oracle) && !is_arcsine_base(cfg.family.base())) {
        const UnimodalMap f0 = cfg.family.base().at(0.0);
        base_density = std::make_shared<const DensityEstimate>(
            leading_eigenpair(build_ulam(f0, cfg.observable, 0.0, cfg.ulam_bins)).density);
    }

    ResponseCurve curve;
    curve.rows.resize(ts.size());
    curve.methods = cfg.methods;
    curve.truncation = cfg.truncation;
    curve.ulam_bins = cfg.ulam_bins;
    curve.safety = cfg.safety;

    std::vector<size_t> order(ts.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = cfg.descending ? ts.size() - 1 - i : i;

    parallel_for(order.size(), [&](size_t oi) {
        const size_t i = order[oi];
        const double t = ts[i];
        const UnimodalMap f = cfg.family.at(t);
        ResponseRow row;
        row.t = t;

        // Per-point hypothesis gate; its Theta bound sizes the zero search disc.
        double radius = kFallbackZeroRadius;
        std::shared_ptr<const OrbitTable> own_table;
        if (!conj)
            own_table = std::make_shared<const OrbitTable>(enumerate_orbits(f, cfg.truncation));
        if (!cfg.force) {
            CEReport point;
            point.lambda_c_min = lambda_c_estimate(cfg.family, t, cfg.lambda_c_steps).first;
            point.lambda_per_min =
                conj ? lambda_per_estimate(*base_table) : lambda_per_estimate(*own_table);
            point.lambda_eta_min = lambda_eta_estimate(cfg.family, t, cfg.eta_depth);
            radius = theta_choice(point, cfg.safety);
        }

        if (wants(cfg, Method::zeta)) {
            const std::vector<CycleWeight> weights =
                conj ? cycle_weights_motion(*base_table, cfg.family, t, cfg.observable)
                     : cycle_weights(*own_table, cfg.observable);
            LeadingZero zero;
            row.value_zeta = pressure_s_derivative(weights, cfg.truncation, radius, &zero);
            row.lambda_zeta = zero.lambda;
        }
        if (wants(cfg, Method::ulam)) {
            const UlamMatrix M = build_ulam(f, cfg.observable, 0.0, cfg.ulam_bins);
            const EigenPair pair = leading_eigenpair(M);
            row.lambda_ulam = pair.lambda;
            row.value_ulam = integrate_density(pair.density, cfg.observable, f);
        }
        if (wants(cfg, Method::oracle)) {
            row.value_oracle =
                base_density
                    ? exact_conjugacy_oracle(*base_density, cfg.family, cfg.observable, t)
                    : exact_conjugacy_oracle(cfg.family, cfg.observable, t);
        }

        const double flag_tol = 10.0 * curve.method_tolerance;
        auto have = [](double x) { return std::isfinite(x); };
        if (have(row.lambda_zeta) && std::abs(row.lambda_zeta - 1.0) > 1e-3) row.flagged = true;
        if (have(row.lambda_ulam) && std::abs(row.lambda_ulam - 1.0) > 1e-3) row.flagged = true;
        const double vals[3] = {row.value_zeta, row.value_ulam, row.value_oracle};
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (have(vals[a]) && have(vals[b]) && std::abs(vals[a] - vals[b]) > flag_tol)
                    row.flagged = true;
        curve.rows[i] = row;
    });
    return curve;
}

namespace {

// Cholesky solve of the (deg+1)-dimensional normal equations.
std::vector<double> least_squares_poly(const std::vector<double>& u,
                                       const std::vector<double>& y, int deg) {
    const int n = deg + 1;
    std::vector<double> G(static_cast<size_t>(n) * n, 0.0), rhs(static_cast<size_t>(n), 0.0);
    for (size_t i = 0; i < u.size(); ++i) {
        double pw_a = 1.0;
        for (int a = 0; a < n; ++a) {
            double pw_b = pw_a;
            for (int b = a; b < n; ++b) {
                G[static_cast<size_t>(a) * n + b] += pw_a * pw_b;
                pw_b *= u[i];
            }
            rhs[static_cast<size_t>(a)] += pw_a * y[i];
            pw_a *= u[i];
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < a; ++b)
            G[static_cast<size_t>(a) * n + b] = G[static_cast<size_t>(b) * n + a];

    std::vector<double> L(static_cast<size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b <= a; ++b) {
            double sum = G[static_cast<size_t>(a) * n + b];
            for (int k = 0; k < b; ++k)
                sum -= L[static_cast<size_t>(a) * n + k] * L[static_cast<size_t>(b) * n + k];
            if (a == b) {
                if (sum <= 1e-12)
                    throw numerical_error("analyticity fit is ill-conditioned "
                                          "(grid too narrow for the requested degree)");
                L[static_cast<size_t>(a) * n + b] = std::sqrt(sum);
            } else {
                L[static_cast<size_t>(a) * n + b] = sum / L[static_cast<size_t>(b) * n + b];
            }
        }
    }
    std::vector<double> z(static_cast<size_t>(n), 0.0), c(static_cast<size_t>(n), 0.0);
    for (int a = 0; a < n; ++a) {
        double sum = rhs[static_cast<size_t>(a)];
        for (int k = 0; k < a; ++k) sum -= L[static_cast<size_t>(a) * n + k] * z[static_cast<size_t>(k)];
        z[static_cast<size_t>(a)] = sum / L[static_cast<size_t>(a) * n + a];
    }
    for (int a = n - 1; a >= 0; --a) {
        double sum = z[static_cast<size_t>(a)];
        for (int k = a + 1; k < n; ++k) sum -= L[static_cast<size_t>(k) * n + a] * c[static_cast<size_t>(k)];
        c[static_cast<size_t>(a)] = sum / L[static_cast<size_t>(a) * n + a];
    }
    return c;
}

// Expand sum b_k u^k with u = (t - mid)/half into the t basis.
std::vector<double> unscale_coefficients(const std::vector<double>& b, double mid,
                                         double half) {
    std::vector<double> out(1, 0.0), pw(1, 1.0);
    const double c0 = -mid / half, c1 = 1.0 / half;
    for (size_t k = 0; k < b.size(); ++k) {
        if (out.size() < pw.size()) out.resize(pw.size(), 0.0);
        for (size_t j = 0; j < pw.size(); ++j) out[j] += b[k] * pw[j];
        // pw <- pw * (c0 + c1 t)
        std::vector<double> next(pw.size() + 1, 0.0);
        for (size_t j = 0; j < pw.size(); ++j) {
            next[j] += pw[j] * c0;
            next[j + 1] += pw[j] * c1;
        }
        pw.swap(next);
    }
    return out;
}

} // namespace

AnalyticityReport analyticity_report(const ResponseCurve& curve, int max_degree) {
    if (max_degree < 0) throw config_error("analyticity fit degree must be >= 0");
    const int n = static_cast<int>(curve.rows.size());
    if (n < max_degree + 3)
        throw config_error("analyticity fit needs at least max_degree + 3 grid points");

    std::vector<double> t(static_cast<size_t>(n)), y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        t[static_cast<size_t>(i)] = curve.rows[static_cast<size_t>(i)].t;
        y[static_cast<size_t>(i)] = curve.rows[static_cast<size_t>(i)].value_zeta;
        if (!std::isfinite(y[static_cast<size_t>(i)]))
            throw config_error("analyticity report needs the zeta method column");
    }
    const double mid = 0.5 * (t.front() + t.back());
    double half = 0.5 * (t.back() - t.front());
    if (!(half > 0.0)) throw config_error("degenerate sweep grid");
    std::vector<double> u(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) u[static_cast<size_t>(i)] = (t[static_cast<size_t>(i)] - mid) / half;

    AnalyticityReport report;
    report.max_degree = max_degree;
    std::vector<double> top_scaled;
    for (int deg = 0; deg <= max_degree; ++deg) {
        const std::vector<double> b = least_squares_poly(u, y, deg);
        double rss = 0.0, worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = poly_eval(b, u[static_cast<size_t>(i)]) - y[static_cast<size_t>(i)];
            rss += r * r;
            worst = std::max(worst, std::abs(r));
        }
        report.coefficients.push_back(unscale_coefficients(b, mid, half));
        report.rss.push_back(rss);
        report.max_residual.push_back(worst);
        if (deg == max_degree) top_scaled = b;
    }

    double scale = 0.0;
    for (double b : top_scaled) scale = std::max(scale, std::abs(b));
    double ratio = 0.0;
    if (scale > 0.0) {
        for (int k = max_degree / 2 + 1; k <= max_degree; ++k)
            ratio = std::max(ratio,
                             std::pow(std::abs(top_scaled[static_cast<size_t>(k)]) / scale,
                                      1.0 / k));
    }
    report.decay_ratio = ratio;
    return report;
}

std::string curve_csv(const ResponseCurve& curve) {
    std::string out = "# srb-zeta v1, t,value_zeta,value_ulam,value_oracle,lambda_zeta,lambda_ulam\n";
    char buf[64];
    auto put = [&out, &buf](double x, bool comma) {
        if (comma) out.push_back(',');
        if (std::isfinite(x)) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out += buf;
        }
    };
    for (const ResponseRow& r : curve.rows) {
        put(r.t, false);
        put(r.value_zeta, true);
        put(r.value_ulam, true);
        put(r.value_oracle, true);
        put(r.lambda_zeta, true);
        put(r.lambda_ulam, true);
        out.push_back('\n');
    }
    return out;
}

} // namespace srb
