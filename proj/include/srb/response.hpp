#ifndef SRB_RESPONSE_HPP
#define SRB_RESPONSE_HPP

#include <string>
#include <vector>

#include "srb/diagnostics.hpp"
#include "srb/ulam.hpp"
#include "srb/unimodal.hpp"
#include "srb/zeta.hpp"

namespace srb {

enum class Method { zeta, ulam, oracle };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// Everything a response-curve sweep needs. Grid points are processed
/// independently (data-parallel) and assembled in ascending t order, so a
/// sweep is reproducible bit for bit and direction-independent.
struct SweepConfig {
    MapDescriptor family;
    Observable observable;
    double t_min = 0.0;
    double t_max = 0.0;
    int t_count = 0;
    std::vector<Method> methods;
    int truncation = 16;   // zeta trace order P
    int ulam_bins = 4096;  // Ulam partition size N
    double safety = 0.9;   // Theta safety factor
    int lambda_c_steps = 40;
    int eta_depth = 14;
    bool force = false;      // skip the per-point diagnostics gate
    bool descending = false; // processing order; output stays ascending

    void validate() const;
    std::vector<double> grid() const;
};

struct ResponseRow {
    double t = 0.0;
    double value_zeta = std::numeric_limits<double>::quiet_NaN();
    double value_ulam = std::numeric_limits<double>::quiet_NaN();
    double value_oracle = std::numeric_limits<double>::quiet_NaN();
    double lambda_zeta = std::numeric_limits<double>::quiet_NaN();
    double lambda_ulam = std::numeric_limits<double>::quiet_NaN();
    bool flagged = false; // eigenvalue off 1, or methods disagree beyond 10x tolerance
};

struct ResponseCurve {
    std::vector<ResponseRow> rows;
    std::vector<Method> methods;
    int truncation = 0;
    int ulam_bins = 0;
    double safety = 0.0;
    double method_tolerance = 1e-3;
};

/// The response curve t -> integral of psi d mu_t by every requested method.
ResponseCurve response_curve(const SweepConfig& cfg);

/// Pushforward identity: integral of psi d mu_t = integral of psi(h_t(x))
/// against the base invariant measure. For the quadratic base 1 - 2x^2 the
/// base measure is the closed-form arcsine density, integrated by 256-node
/// Gauss-Chebyshev quadrature; otherwise supply a base density estimate.
double exact_conjugacy_oracle(const MapDescriptor& m, const Observable& psi, double t);
double exact_conjugacy_oracle(const DensityEstimate& base_density, const MapDescriptor& m,
                              const Observable& psi, double t);

/// Least-squares polynomial fits of value_zeta against t, degree by degree.
struct AnalyticityReport {
    int max_degree = 0;
    std::vector<std::vector<double>> coefficients; // per degree, in the t basis
    std::vector<double> rss;                       // residual sum of squares per degree
    std::vector<double> max_residual;
    double decay_ratio = 0.0; // trailing scaled-coefficient decay (heuristic)
};

AnalyticityReport analyticity_report(const ResponseCurve& curve, int max_degree);

/// Fixed, versioned CSV encoding of a curve (deterministic formatting).
std::string curve_csv(const ResponseCurve& curve);

} // namespace srb

#endif
