#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srb/config.hpp"

namespace {

using namespace srb;

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string report_path;
    std::string grid_spec;
    std::string method_spec;
    double t = 0.0;
    double s = 0.0;
    bool t_set = false, s_set = false;
    int p = 0;
    bool p_set = false;
    int n = 0;
    bool n_set = false;
    int eta_n = 0;
    bool eta_set = false;
    double safety = 0.0;
    bool safety_set = false;
    bool force = false;
    bool json = false;
    bool descending = false;
};

void parse_grid_spec(const std::string& spec, ToolConfig& cfg) {
    double lo, hi;
    int count;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3)
        throw config_error("--grid expects MIN:MAX:COUNT");
    cfg.grid_min = lo;
    cfg.grid_max = hi;
    cfg.grid_count = count;
    cfg.has_grid = true;
}

ToolConfig effective_config(const CliOptions& opt) {
    ToolConfig cfg = load_config(opt.config_path);
    if (!opt.grid_spec.empty()) parse_grid_spec(opt.grid_spec, cfg);
    if (!opt.method_spec.empty()) {
        cfg.methods.clear();
        std::string item;
        for (char c : opt.method_spec + ",") {
            if (c == ',') {
                if (!item.empty()) cfg.methods.push_back(method_from_name(item));
                item.clear();
            } else {
                item.push_back(c);
            }
        }
    }
    if (opt.t_set) cfg.t = opt.t;
    if (opt.s_set) cfg.s = opt.s;
    if (opt.p_set) cfg.truncation = opt.p;
    if (opt.n_set) cfg.ulam_bins = opt.n;
    if (opt.eta_set) cfg.eta_depth = opt.eta_n;
    if (opt.safety_set) cfg.safety = opt.safety;
    return cfg;
}

int run_density(const CliOptions& opt) {
    const ToolConfig cfg = effective_config(opt);
    cfg.family.validate();
    const EigenPair pair =
        leading_eigenpair(build_ulam(cfg.family, cfg.t, cfg.observable, cfg.s, cfg.ulam_bins));
    if (!opt.out_path.empty()) write_file(opt.out_path, density_csv(pair.density));
    if (opt.json) {
        std::cout << eigen_json(pair) << "\n";
    } else {
        std::printf("ulam N=%d t=%.12g s=%.12g lambda=%.12g iterations=%d\n",
                    pair.density.bins, cfg.t, cfg.s, pair.lambda, pair.iterations);
    }
    return 0;
}

int run_orbits(const CliOptions& opt) {
    const ToolConfig cfg = effective_config(opt);
    cfg.family.validate();
    const int p = opt.p_set ? opt.p : 10;
    const auto orbits = find_periodic_points(cfg.family, cfg.t, p, 1e-12);
    if (!opt.out_path.empty()) write_file(opt.out_path, orbits_csv(orbits));
    size_t points = 0;
    double min_rate = std::numeric_limits<double>::infinity();
    for (const PeriodicOrbit& orbit : orbits) {
        points += orbit.points.size();
        min_rate = std::min(min_rate, std::exp(orbit.log_abs_multiplier / orbit.period));
    }
    std::printf("orbits t=%.12g period<=%d cycles=%zu points=%zu min|multiplier|^(1/p)=%.12g\n",
                cfg.t, p, orbits.size(), points, min_rate);
    return 0;
}

int run_zeta(const CliOptions& opt) {
    const ToolConfig cfg = effective_config(opt);
    cfg.family.validate();
    const TraceSums traces =
        trace_sums(cfg.family, cfg.t, cfg.observable, cfg.s, cfg.truncation, true);
    const PowerSeries series = inverse_zeta_series(traces, cfg.truncation);
    const LeadingZero zero = leading_zero(series, kFallbackZeroRadius);
    if (!opt.out_path.empty()) write_file(opt.out_path, zeta_csv(traces, series));
    if (opt.json)
        std::cout << leading_zero_json(zero, cfg.truncation, cfg.t, cfg.s) << "\n";
    else
        std::printf("zeta t=%.12g s=%.12g P=%d z0=%.15g lambda=%.15g residual=%.3g\n",
                    cfg.t, cfg.s, cfg.truncation, zero.z0, zero.lambda, zero.residual);
    return 0;
}

int run_diagnose(const CliOptions& opt) {
    const ToolConfig cfg = effective_config(opt);
    cfg.family.validate();
    std::vector<double> grid;
    if (cfg.has_grid) {
        for (int i = 0; i < cfg.grid_count; ++i)
            grid.push_back(cfg.grid_min +
                           (cfg.grid_max - cfg.grid_min) * i / std::max(1, cfg.grid_count - 1));
    } else {
        const ParameterWindow& w = cfg.family.window();
        for (int i = 0; i < 5; ++i) grid.push_back(w.lo + (w.hi - w.lo) * i / 4.0);
    }
    const int p_max = opt.p_set ? opt.p : 10;
    const CEReport report =
        diagnose(cfg.family, grid, cfg.lambda_c_steps, p_max, cfg.eta_depth, cfg.safety);
    if (!opt.out_path.empty()) write_file(opt.out_path, diagnostics_csv(report));
    if (opt.json) {
        std::cout << ce_report_json(report) << "\n";
    } else {
        std::printf("diagnose: lambda_c_min=%.9g lambda_per_min=%.9g lambda_eta_min=%.9g "
                    "theta_inv=%.9g over %zu parameters\n",
                    report.lambda_c_min, report.lambda_per_min, report.lambda_eta_min,
                    report.theta_inv, report.table.size());
    }
    return 0;
}

int run_sweep(const CliOptions& opt) {
    const ToolConfig cfg = effective_config(opt);
    SweepConfig sweep = make_sweep_config(cfg);
    sweep.force = opt.force;
    sweep.descending = opt.descending;
    const ResponseCurve curve = response_curve(sweep);
    const AnalyticityReport fit =
        analyticity_report(curve, std::min(cfg.fit_degree, sweep.t_count - 3));
    const std::string out = opt.out_path.empty() ? "curve.csv" : opt.out_path;
    write_file(out, curve_csv(curve));
    if (!opt.report_path.empty()) write_file(opt.report_path, sweep_report_json(curve, fit));
    if (opt.json) std::cout << sweep_report_json(curve, fit) << "\n";
    size_t flagged = 0;
    for (const ResponseRow& r : curve.rows) flagged += r.flagged ? 1 : 0;
    std::fprintf(stderr, "sweep: %zu rows -> %s (%zu flagged)\n", curve.rows.size(),
                 out.c_str(), flagged);
    return flagged == 0 ? 0 : 2;
}

// Compact oracle checks over the quadratic family 1 - 2x^2 and its
// motion-conjugated relative; every expected value has a closed form.
int run_selftest() {
    int fails = 0;
    auto check = [&fails](const char* name, double got, double want, double tol) {
        const bool ok = std::isfinite(got) && std::abs(got - want) <= tol;
        std::printf("%-44s %s  got=%.12g want=%.12g tol=%g\n", name,
                    ok ? "PASS" : "FAIL", got, want, tol);
        if (!ok) ++fails;
    };

    const MapDescriptor cheb =
        MapDescriptor::direct({{1.0, 0.0, -2.0}}, ParameterWindow{-1.0, 1.0});
    const AnalyticMotion motion({1.0}, ParameterWindow{-0.2, 0.2});
    const MapDescriptor conj = MapDescriptor::conjugated(cheb, motion);
    const Observable x2 = Observable::polynomial({0.0, 0.0, 1.0});
    const Observable x1 = Observable::polynomial({0.0, 1.0});
    const Observable logd = Observable::log_abs_derivative();

    check("eval_map(0.5)", eval_map(cheb, 0.0, 0.5), 0.5, 1e-15);
    check("eval_map(0) = critical value", eval_map(cheb, 0.0, 0.0), 1.0, 1e-15);
    check("eval_map(-1)", eval_map(cheb, 0.0, -1.0), -1.0, 1e-15);
    check("eval_deriv(0.5)", eval_deriv(cheb, 0.0, 0.5, 1), -2.0, 1e-14);
    check("eval_deriv(-1)", eval_deriv(cheb, 0.0, -1.0, 1), 4.0, 1e-14);
    check("schwarzian(0.5)", schwarzian(cheb, 0.0, 0.5), -6.0, 1e-10);
    check("schwarzian(1)", schwarzian(cheb, 0.0, 1.0), -1.5, 1e-12);
    check("motion apply", apply_motion(motion, 0.1, 0.5), 0.575, 1e-15);
    check("motion fixes +1", apply_motion(motion, 0.1, 1.0), 1.0, 0.0);
    check("conjugation identity",
          apply_motion(motion, 0.1, eval_map(cheb, 0.0, 0.3)) -
              eval_map(conj, 0.1, apply_motion(motion, 0.1, 0.3)),
          0.0, 1e-10);

    const KNConstants kn = kn_constants(cheb, 0.0, 512);
    check("kn sup1", kn.sup1, 0.25, 1e-12);
    check("kn var1", kn.var1, 0.0, 1e-10);
    check("kn bound", kn.bound, 4.0, 1e-10);

    check("inverse_branch R 0.5", inverse_branch(cheb, 0.0, Side::R, 0.5), 0.5, 1e-12);
    check("inverse_branch R 1", inverse_branch(cheb, 0.0, Side::R, 1.0), 0.0, 1e-6);
    check("inverse_branch L -1", inverse_branch(cheb, 0.0, Side::L, -1.0), -1.0, 1e-12);

    const auto fixed = find_periodic_points(cheb, 0.0, 1, 1e-12);
    check("fixed point count", static_cast<double>(fixed.size()), 2.0, 0.0);
    check("fixed point -1 multiplier", multiplier(cheb, 0.0, fixed.front()), 4.0, 1e-10);
    check("fixed point 0.5 multiplier", multiplier(cheb, 0.0, fixed.back()), -2.0, 1e-10);
    {
        const OrbitTable table = enumerate_orbits(cheb.at(0.0), 10);
        bool complete = true;
        for (int p = 1; p <= 10; ++p)
            complete = complete && table.fixed_point_count(p) == (1u << p);
        check("2^p completeness (p<=10)", complete ? 1.0 : 0.0, 1.0, 0.0);
    }

    double ds1 = 0.0;
    check("trace sum p=1", trace_sum(cheb, 0.0, x2, 0.0, 1, &ds1), 0.75, 1e-12);
    check("trace sum p=1 s-derivative", ds1, 0.375, 1e-12);
    check("trace sum p=2", trace_sum(cheb, 0.0, x2, 0.0, 2), 0.8125, 1e-12);
    {
        const TraceSums traces = trace_sums(cheb, 0.0, x2, 0.0, 16, true);
        const PowerSeries d = inverse_zeta_series(traces, 16);
        check("series d1", d.d[1], -0.75, 1e-12);
        check("series d2", d.d[2], -0.125, 1e-12);
        check("series d5", d.d[5], -std::pow(2.0, -6.0), 1e-12);
        const LeadingZero zero = leading_zero(d, kFallbackZeroRadius);
        check("leading zero (P=16)", zero.z0, 1.0, 1e-4);
    }
    check("pressure derivative x^2", pressure_s_derivative(cheb, 0.0, x2, 16), 0.5, 1e-4);
    check("pressure derivative log|f'|", pressure_s_derivative(cheb, 0.0, logd, 16),
          std::log(2.0), 1e-3);

    {
        const UlamMatrix M = build_ulam(cheb, 0.0, x2, 0.0, 1024);
        const auto sums = M.column_sums();
        double worst = 0.0;
        for (double v : sums) worst = std::max(worst, std::abs(v - 1.0));
        check("ulam column sums", worst, 0.0, 1e-10);
        const EigenPair pair = leading_eigenpair(M);
        check("ulam lambda", pair.lambda, 1.0, 1e-9);
        check("ulam integral x^2", integrate_density(pair.density, x2, cheb), 0.5, 5e-3);
        check("ulam integral 1",
              integrate_density(pair.density, Observable::polynomial({1.0}), cheb), 1.0,
              1e-12);
    }

    check("lambda_c", lambda_c_estimate(cheb, 0.0, 40).first, 4.0, 1e-9);
    check("lambda_per (p<=8)", lambda_per_estimate(cheb, 0.0, 8), 2.0, 1e-8);
    check("lambda_eta n=12", lambda_eta_estimate(cheb, 0.0, 12),
          std::exp(-std::log(std::sin(std::numbers::pi / 4096.0)) / 12.0), 1e-6);
    {
        CEReport point;
        point.lambda_c_min = 4.0;
        point.lambda_per_min = 2.0;
        point.lambda_eta_min = 1.8;
        check("theta choice", theta_choice(point, 0.9), 0.9 * std::sqrt(2.0), 1e-12);
    }

    check("oracle x t=0.1", exact_conjugacy_oracle(conj, x1, 0.1), 0.05, 1e-12);
    check("oracle x^2 t=0.2", exact_conjugacy_oracle(conj, x2, 0.2), 0.515, 1e-12);
    check("oracle x^2 t=0", exact_conjugacy_oracle(conj, x2, 0.0), 0.5, 1e-12);

    std::printf("selftest: %s\n", fails == 0 ? "all checks passed" : "FAILURES present");
    return fails == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"srb-zeta: periodic-orbit zeta and Ulam response toolkit for analytic "
                 "unimodal families on [-1,1]"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&opt](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config_path, "JSON configuration file");
        if (needs_config) c->required();
        sub->add_option("--out", opt.out_path, "output CSV path");
        sub->add_flag("--json", opt.json, "print the JSON report to stdout");
    };

    auto* density = app.add_subcommand("density", "Ulam invariant density at one (t, s)");
    add_common(density, true);
    density->add_option("--t", opt.t)->each([&opt](const std::string&) { opt.t_set = true; });
    density->add_option("--s", opt.s)->each([&opt](const std::string&) { opt.s_set = true; });
    density->add_option("--n", opt.n, "Ulam bins")->each([&opt](const std::string&) { opt.n_set = true; });

    auto* orbits = app.add_subcommand("orbits", "periodic orbit table up to a period bound");
    add_common(orbits, true);
    orbits->add_option("--t", opt.t)->each([&opt](const std::string&) { opt.t_set = true; });
    orbits->add_option("--p", opt.p, "period bound")->each([&opt](const std::string&) { opt.p_set = true; });

    auto* zeta = app.add_subcommand("zeta", "trace sums, inverse zeta series, leading zero");
    add_common(zeta, true);
    zeta->add_option("--t", opt.t)->each([&opt](const std::string&) { opt.t_set = true; });
    zeta->add_option("--s", opt.s)->each([&opt](const std::string&) { opt.s_set = true; });
    zeta->add_option("--p", opt.p, "truncation order P")->each([&opt](const std::string&) { opt.p_set = true; });

    auto* diag = app.add_subcommand("diagnose", "hyperbolicity constants over the window");
    add_common(diag, true);
    diag->add_option("--grid", opt.grid_spec, "MIN:MAX:COUNT parameter grid");
    diag->add_option("--p", opt.p, "orbit period bound")->each([&opt](const std::string&) { opt.p_set = true; });
    diag->add_option("--eta-n", opt.eta_n, "monotonicity depth")->each([&opt](const std::string&) { opt.eta_set = true; });
    diag->add_option("--safety", opt.safety)->each([&opt](const std::string&) { opt.safety_set = true; });

    auto* sweep = app.add_subcommand("sweep", "response curve by independent methods");
    add_common(sweep, true);
    sweep->add_option("--report", opt.report_path, "JSON report path");
    sweep->add_option("--p", opt.p, "truncation order P")->each([&opt](const std::string&) { opt.p_set = true; });
    sweep->add_option("--n", opt.n, "Ulam bins")->each([&opt](const std::string&) { opt.n_set = true; });
    sweep->add_option("--grid", opt.grid_spec, "MIN:MAX:COUNT parameter grid");
    sweep->add_option("--method", opt.method_spec, "comma list: zeta,ulam,oracle");
    sweep->add_flag("--force", opt.force, "skip the per-point diagnostics gate");
    sweep->add_flag("--descending", opt.descending, "process the grid in descending order");

    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (app.got_subcommand("density")) return run_density(opt);
        if (app.got_subcommand("orbits")) return run_orbits(opt);
        if (app.got_subcommand("zeta")) return run_zeta(opt);
        if (app.got_subcommand("diagnose")) return run_diagnose(opt);
        if (app.got_subcommand("sweep")) return run_sweep(opt);
        if (app.got_subcommand("selftest")) return run_selftest();
    } catch (const hypothesis_error& e) {
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 1;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 3;
}
