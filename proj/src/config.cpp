#include "srb/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace srb {

namespace {

using ordered_json = nlohmann::ordered_json;

ParameterWindow parse_window(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw config_error(std::string(what) + ": window must be [lo, hi]");
    return ParameterWindow{j[0].get<double>(), j[1].get<double>()};
}

MapDescriptor parse_family(const ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "direct") {
        std::vector<std::vector<double>> coeff;
        for (const auto& row : j.at("coefficients"))
            coeff.push_back(row.get<std::vector<double>>());
        return MapDescriptor::direct(std::move(coeff), parse_window(j.at("window"), "family"));
    }
    if (kind == "conjugated") {
        MapDescriptor base = parse_family(j.at("base"));
        const auto& jm = j.at("motion");
        AnalyticMotion motion(jm.at("g").get<std::vector<double>>(),
                              parse_window(jm.at("window"), "motion"));
        return MapDescriptor::conjugated(std::move(base), std::move(motion));
    }
    throw config_error("family kind must be 'direct' or 'conjugated'");
}

Observable parse_observable(const ordered_json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial")
        return Observable::polynomial(j.at("coefficients").get<std::vector<double>>());
    if (kind == "log_abs_derivative") return Observable::log_abs_derivative();
    throw config_error("observable kind must be 'polynomial' or 'log_abs_derivative'");
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

ToolConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        ToolConfig cfg;
        cfg.family = parse_family(j.at("family"));
        if (j.contains("observable")) cfg.observable = parse_observable(j.at("observable"));
        else cfg.observable = Observable::polynomial({0.0, 0.0, 1.0});
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            cfg.grid_min = g.at("min").get<double>();
            cfg.grid_max = g.at("max").get<double>();
            cfg.grid_count = g.at("count").get<int>();
            cfg.has_grid = true;
        }
        if (j.contains("methods")) {
            for (const auto& name : j.at("methods"))
                cfg.methods.push_back(method_from_name(name.get<std::string>()));
        } else {
            cfg.methods = {Method::zeta, Method::ulam};
            if (cfg.family.kind() == MapKind::conjugated) cfg.methods.push_back(Method::oracle);
        }
        cfg.truncation = j.value("truncation", 16);
        cfg.ulam_bins = j.value("ulam_bins", 4096);
        cfg.eta_depth = j.value("eta_depth", 14);
        cfg.lambda_c_steps = j.value("lambda_c_steps", 40);
        cfg.fit_degree = j.value("fit_degree", 4);
        cfg.safety = j.value("safety", 0.9);
        cfg.t = j.value("t", 0.0);
        cfg.s = j.value("s", 0.0);
        return cfg;
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("bad config document: ") + e.what());
    }
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SweepConfig make_sweep_config(const ToolConfig& cfg) {
    if (!cfg.has_grid) throw config_error("sweep needs a grid (config key 'grid' or --grid)");
    SweepConfig sweep;
    sweep.family = cfg.family;
    sweep.observable = cfg.observable;
    sweep.t_min = cfg.grid_min;
    sweep.t_max = cfg.grid_max;
    sweep.t_count = cfg.grid_count;
    sweep.methods = cfg.methods;
    sweep.truncation = cfg.truncation;
    sweep.ulam_bins = cfg.ulam_bins;
    sweep.safety = cfg.safety;
    sweep.lambda_c_steps = cfg.lambda_c_steps;
    sweep.eta_depth = cfg.eta_depth;
    return sweep;
}

std::string orbits_csv(const std::vector<PeriodicOrbit>& orbits) {
    std::string out = "# srb-zeta v1, p,itinerary,x0..x_{p-1},multiplier,residual\n";
    for (const PeriodicOrbit& orbit : orbits) {
        out += std::to_string(orbit.period);
        out += ',';
        out += orbit.itinerary.str();
        for (double x : orbit.points) {
            out += ',';
            out += fmt17(x);
        }
        out += ',';
        out += fmt17(orbit.multiplier);
        out += ',';
        out += fmt17(orbit.residual);
        out += '\n';
    }
    return out;
}

std::string density_csv(const DensityEstimate& density) {
    std::string out = "# srb-zeta v1, bin_center,density\n";
    for (int i = 0; i < density.bins; ++i) {
        out += fmt17(density.center(i));
        out += ',';
        out += fmt17(density.value[static_cast<size_t>(i)]);
        out += '\n';
    }
    return out;
}

std::string zeta_csv(const TraceSums& traces, const PowerSeries& series) {
    std::string out = "# srb-zeta v1 traces, p,a_p,ds_a_p\n";
    for (int p = 1; p <= traces.order; ++p) {
        out += std::to_string(p);
        out += ',';
        out += fmt17(traces.a[p - 1]);
        out += ',';
        out += traces.has_derivative ? fmt17(traces.ds_a[p - 1]) : std::string();
        out += '\n';
    }
    out += "# series, k,d_k\n";
    for (size_t k = 0; k < series.d.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += fmt17(series.d[k]);
        out += '\n';
    }
    return out;
}

std::string diagnostics_csv(const CEReport& report) {
    std::string out = "# srb-zeta v1, t,lambda_c,prefactor,lambda_per,lambda_eta,"
                      "lambda_eta_extrapolated,theta_inv\n";
    for (const CEPointDiagnostics& d : report.table) {
        out += fmt17(d.t);
        out += ',';
        out += fmt17(d.lambda_c);
        out += ',';
        out += fmt17(d.prefactor);
        out += ',';
        out += fmt17(d.lambda_per);
        out += ',';
        out += fmt17(d.lambda_eta);
        out += ',';
        out += fmt17(d.lambda_eta_extrapolated);
        out += ',';
        out += fmt17(d.theta_inv);
        out += '\n';
    }
    return out;
}

std::string leading_zero_json(const LeadingZero& zero, int truncation, double t, double s) {
    ordered_json j;
    j["version"] = "srb-zeta v1";
    j["truncation"] = truncation;
    j["t"] = t;
    j["s"] = s;
    j["z0"] = zero.z0;
    j["lambda"] = zero.lambda;
    j["residual"] = zero.residual;
    j["slope"] = zero.slope;
    j["simple"] = zero.simple;
    return j.dump(2);
}

std::string eigen_json(const EigenPair& pair) {
    ordered_json j;
    j["version"] = "srb-zeta v1";
    j["bins"] = pair.density.bins;
    j["s"] = pair.density.s;
    j["t"] = pair.density.t;
    j["lambda"] = pair.lambda;
    j["iterations"] = pair.iterations;
    return j.dump(2);
}

std::string ce_report_json(const CEReport& report) {
    ordered_json j;
    j["version"] = "srb-zeta v1";
    j["n_max"] = report.n_max;
    j["p_max"] = report.p_max;
    j["eta_depth"] = report.eta_depth;
    j["safety"] = report.safety;
    j["lambda_c_min"] = report.lambda_c_min;
    j["lambda_per_min"] = report.lambda_per_min;
    j["lambda_eta_min"] = report.lambda_eta_min;
    j["theta_inv"] = report.theta_inv;
    ordered_json rows = ordered_json::array();
    for (const CEPointDiagnostics& d : report.table) {
        ordered_json row;
        row["t"] = d.t;
        row["lambda_c"] = d.lambda_c;
        row["prefactor"] = d.prefactor;
        row["lambda_per"] = d.lambda_per;
        row["lambda_eta"] = d.lambda_eta;
        row["lambda_eta_extrapolated"] = d.lambda_eta_extrapolated;
        row["theta_inv"] = d.theta_inv;
        rows.push_back(row);
    }
    j["table"] = rows;
    return j.dump(2);
}

std::string sweep_report_json(const ResponseCurve& curve, const AnalyticityReport& fit) {
    ordered_json j;
    j["version"] = "srb-zeta v1";
    j["truncation"] = curve.truncation;
    j["ulam_bins"] = curve.ulam_bins;
    j["safety"] = curve.safety;
    j["method_tolerance"] = curve.method_tolerance;
    ordered_json methods = ordered_json::array();
    for (Method m : curve.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    ordered_json flagged = ordered_json::array();
    for (const ResponseRow& r : curve.rows)
        if (r.flagged) flagged.push_back(r.t);
    j["flagged_t"] = flagged;
    ordered_json fits = ordered_json::array();
    for (size_t deg = 0; deg < fit.coefficients.size(); ++deg) {
        ordered_json f;
        f["degree"] = deg;
        f["coefficients"] = fit.coefficients[deg];
        f["rss"] = fit.rss[deg];
        f["max_residual"] = fit.max_residual[deg];
        fits.push_back(f);
    }
    j["fits"] = fits;
    j["trailing_coefficient_decay"] = fit.decay_ratio;
    // qualitative reading only: coefficient decay is evidence, never proof
    j["assessment"] = fit.decay_ratio < 0.9
                          ? "consistent with real-analytic response"
                          : "no analyticity evidence at this resolution";
    return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << content;
    if (!out) throw config_error("failed writing output file: " + path);
}

} // namespace srb
