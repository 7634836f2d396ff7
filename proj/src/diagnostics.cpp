#include "srb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srb {

std::pair<double, double> lambda_c_estimate(const MapDescriptor& m, double t, int n_max) {
    if (n_max < 8 || n_max > 60)
        throw config_error("lambda_c: n_max must lie in [8, 60]");
    const UnimodalMap f = m.at(t);
    std::vector<double> logs(static_cast<size_t>(n_max) + 1, 0.0);
    double y = f.critical_value(); // f_t(c)
    KahanSum acc;
    for (int n = 1; n <= n_max; ++n) {
        const double d = f.deriv(y);
        if (d == 0.0)
            throw hypothesis_error("critical orbit hits the critical point (superstable) "
                                   "at step " + std::to_string(n));
        acc.add(std::log(std::abs(d)));
        logs[static_cast<size_t>(n)] = acc.value();
        y = f.value(y);
    }
    // least-squares slope of log|(f^n)'(f(c))| against n on the tail window
    const int lo = n_max / 2;
    double sn = 0.0, sl = 0.0, snn = 0.0, snl = 0.0;
    int count = 0;
    for (int n = lo; n <= n_max; ++n) {
        sn += n;
        sl += logs[static_cast<size_t>(n)];
        snn += static_cast<double>(n) * n;
        snl += n * logs[static_cast<size_t>(n)];
        ++count;
    }
    const double slope = (count * snl - sn * sl) / (count * snn - sn * sn);
    double intercept_min = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= n_max; ++n)
        intercept_min = std::min(intercept_min, logs[static_cast<size_t>(n)] - slope * n);
    return {std::exp(slope), std::exp(intercept_min)};
}

double lambda_per_estimate(const OrbitTable& table) {
    double min_rate = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= table.max_period; ++q) {
        for (const PeriodicOrbit& orbit : table.primitive(q)) {
            if (orbit.log_abs_multiplier <= 0.0) {
                std::ostringstream os;
                os.precision(12);
                os << "non-repelling periodic orbit: period " << q << ", point x = "
                   << orbit.points[0] << ", multiplier " << orbit.multiplier
                   << ", itinerary " << orbit.itinerary.str();
                throw hypothesis_error(os.str());
            }
            min_rate = std::min(min_rate, std::exp(orbit.log_abs_multiplier / q));
        }
    }
    if (!std::isfinite(min_rate)) throw numerical_error("no periodic orbits found");
    return min_rate;
}

double lambda_per_estimate(const MapDescriptor& m, double t, int p_max) {
    return lambda_per_estimate(enumerate_orbits(m.at(t), p_max));
}

double lambda_eta_estimate(const MapDescriptor& m, double t, int n) {
    const BranchScan scan = scan_branch_domains(m.at(t), n);
    if (!(scan.largest > 0.0)) throw numerical_error("branch pullback produced no domains");
    return std::exp(-std::log(scan.largest) / n);
}

double lambda_eta_extrapolated(const MapDescriptor& m, double t, int n) {
    if (n < 8) throw config_error("lambda_eta extrapolation needs depth >= 8");
    const double x0 = lambda_eta_estimate(m, t, std::max(2, n / 4));
    const double x1 = lambda_eta_estimate(m, t, n / 2);
    const double x2 = lambda_eta_estimate(m, t, n);
    return aitken(x0, x1, x2);
}

double theta_choice(const CEReport& report, double safety) {
    if (!(safety > 0.0 && safety < 1.0))
        throw config_error("theta safety factor must lie in (0,1)");
    if (!(report.lambda_c_min > 1.0) || !(report.lambda_per_min > 1.0) ||
        !(report.lambda_eta_min > 1.0))
        throw hypothesis_error("theta_choice: a hyperbolicity estimate is <= 1");
    return safety * std::min(report.lambda_eta_min,
                             std::sqrt(std::min(report.lambda_c_min, report.lambda_per_min)));
}

CEReport diagnose(const MapDescriptor& m, const std::vector<double>& t_grid, int n_max,
                  int p_max, int eta_depth, double safety) {
    if (t_grid.empty()) throw config_error("diagnose: empty parameter grid");
    CEReport report;
    report.n_max = n_max;
    report.p_max = p_max;
    report.eta_depth = eta_depth;
    report.safety = safety;
    report.table.resize(t_grid.size());

    parallel_for(t_grid.size(), [&](size_t i) {
        const double t = t_grid[i];
        CEPointDiagnostics d;
        d.t = t;
        const auto [lc, ct] = lambda_c_estimate(m, t, n_max);
        d.lambda_c = lc;
        d.prefactor = ct;
        d.lambda_per = lambda_per_estimate(m, t, p_max);
        d.lambda_eta = lambda_eta_estimate(m, t, eta_depth);
        d.lambda_eta_extrapolated = lambda_eta_extrapolated(m, t, eta_depth);
        report.table[i] = d;
    });

    report.lambda_c_min = std::numeric_limits<double>::infinity();
    report.lambda_per_min = std::numeric_limits<double>::infinity();
    report.lambda_eta_min = std::numeric_limits<double>::infinity();
    for (CEPointDiagnostics& d : report.table) {
        report.lambda_c_min = std::min(report.lambda_c_min, d.lambda_c);
        report.lambda_per_min = std::min(report.lambda_per_min, d.lambda_per);
        report.lambda_eta_min = std::min(report.lambda_eta_min, d.lambda_eta);
    }
    for (CEPointDiagnostics& d : report.table) {
        CEReport point;
        point.lambda_c_min = d.lambda_c;
        point.lambda_per_min = d.lambda_per;
        point.lambda_eta_min = d.lambda_eta;
        d.theta_inv = theta_choice(point, safety);
    }
    report.theta_inv = theta_choice(report, safety);
    return report;
}

} // namespace srb
