#ifndef SRB_DIAGNOSTICS_HPP
#define SRB_DIAGNOSTICS_HPP

#include <utility>
#include <vector>

#include "srb/orbits.hpp"
#include "srb/unimodal.hpp"

namespace srb {

/// Hyperbolicity measurements at a single parameter value.
struct CEPointDiagnostics {
    double t = 0.0;
    double lambda_c = 0.0;   // critical-orbit derivative growth rate
    double prefactor = 0.0;  // C_t such that |(f^n)'(f(c))| >= C_t lambda_c^n on the window
    double lambda_per = 0.0; // min over cycles of |multiplier|^{1/p}
    double lambda_eta = 0.0; // |eta|^{-1/n} at eta_depth
    double lambda_eta_extrapolated = 0.0;
    double theta_inv = 0.0;  // safety * min(lambda_eta, sqrt(min(lambda_c, lambda_per)))
};

/// Uniformity report over a parameter grid: per-t table plus window minima.
struct CEReport {
    int n_max = 0;     // critical-orbit steps
    int p_max = 0;     // period bound for the multiplier scan
    int eta_depth = 0; // monotonicity-interval depth
    double safety = 0.0;
    std::vector<CEPointDiagnostics> table;
    double lambda_c_min = 0.0;
    double lambda_per_min = 0.0;
    double lambda_eta_min = 0.0;
    double theta_inv = 0.0; // derived from the window minima
};

/// Least-squares growth rate of log|(f^n)'(f_t(c))| over the tail window
/// [n_max/2, n_max]; returns (lambda_c, C_t), the prefactor taken as the
/// minimal intercept over the same window. A critical orbit that lands on
/// the critical point is a superstable hypothesis violation.
std::pair<double, double> lambda_c_estimate(const MapDescriptor& m, double t, int n_max);

/// min over all cycles of period <= p_max of |multiplier|^{1/p}; any
/// non-repelling cycle is a hypothesis violation.
double lambda_per_estimate(const MapDescriptor& m, double t, int p_max);
double lambda_per_estimate(const OrbitTable& table);

/// |eta|^{-1/n} where eta is the biggest monotonicity interval of f_t^n,
/// measured through the 2^n itinerary pullbacks.
double lambda_eta_estimate(const MapDescriptor& m, double t, int n);
/// Aitken extrapolation through depths n/4, n/2, n (slow log n / n bias).
double lambda_eta_extrapolated(const MapDescriptor& m, double t, int n);

/// Theta^{-1} = safety * min{lambda_eta, sqrt(min(lambda_c, lambda_per))},
/// from the window minima of the report. All estimates must exceed 1.
double theta_choice(const CEReport& report, double safety);

/// Full diagnostics over a parameter grid. Throws hypothesis_error on any
/// violation (non-repelling orbit, superstable critical orbit, estimate <= 1).
CEReport diagnose(const MapDescriptor& m, const std::vector<double>& t_grid, int n_max,
                  int p_max, int eta_depth, double safety);

} // namespace srb

#endif
