#ifndef SRB_ZETA_HPP
#define SRB_ZETA_HPP

#include <span>
#include <vector>

#include "srb/orbits.hpp"
#include "srb/unimodal.hpp"

namespace srb {

/// Per-cycle data sufficient for every trace sum: primitive period, log
/// multiplier magnitude, and the Birkhoff sum of the observable over one
/// cycle. Fixed points of f^p with primitive period q | p reuse these with
/// everything scaled by p/q.
struct CycleWeight {
    int period = 0;
    double log_abs_multiplier = 0.0;
    double birkhoff = 0.0;
};

/// Weights from the map's own cycles.
std::vector<CycleWeight> cycle_weights(const OrbitTable& table, const Observable& psi);

/// Weights for a conjugated family evaluated through the motion: base cycles
/// are pushed forward by h_t, multipliers are conjugacy invariants of the
/// base. This realises the identity between the two zeta representations as
/// finite sums, with no root-finding at the target parameter.
std::vector<CycleWeight> cycle_weights_motion(const OrbitTable& base_table,
                                              const MapDescriptor& m, double t,
                                              const Observable& psi);

/// The per-period sums a_p = (1/p) sum over Fix(f^p) of e^{s S_p psi}/|(f^p)'|,
/// optionally with their exact s-derivatives attached.
struct TraceSums {
    int order = 0;
    double s = 0.0;
    std::vector<double> a;    // a[p-1]
    std::vector<double> ds_a; // present when has_derivative
    bool has_derivative = false;
};

TraceSums trace_sums(std::span<const CycleWeight> weights, double s, int P,
                     bool with_derivative);
/// Route selection: conjugated families go through the motion, direct
/// families through their own orbit enumeration.
TraceSums trace_sums(const MapDescriptor& m, double t, const Observable& psi, double s,
                     int P, bool with_derivative);
/// Single-period convenience; fills ds when non-null.
double trace_sum(const MapDescriptor& m, double t, const Observable& psi, double s, int p,
                 double* ds = nullptr);

/// Truncated coefficients of 1/zeta(s,t,z) = exp(-sum a_p z^p); d[0] = 1.
struct PowerSeries {
    std::vector<double> d;

    double eval(double z) const;
    double deriv(double z) const;
    int degree() const { return static_cast<int>(d.size()) - 1; }
};

PowerSeries inverse_zeta_series(const TraceSums& traces, int P);
/// Coefficientwise s-derivative of the truncated 1/zeta.
PowerSeries series_s_derivative(const TraceSums& traces, const PowerSeries& d, int P);

/// Smallest positive real zero of the truncated series, certified simple.
struct LeadingZero {
    double z0 = 0.0;
    double lambda = 0.0;  // 1/z0, the leading transfer-operator eigenvalue
    double residual = 0.0;
    double slope = 0.0;   // |d'(z0)|, the simplicity certificate
    bool simple = false;
};

/// Default search radius when no hyperbolicity diagnostics are available.
inline constexpr double kFallbackZeroRadius = 1.2;

/// Locates the zero by sign-change bracketing on (0, radius] followed by
/// Newton polish. Throws numerical_error when no zero lies in the disc
/// (truncation too coarse) or when the simplicity certificate |d'| >= 1e-4
/// fails.
LeadingZero leading_zero(const PowerSeries& d, double radius);

/// d/ds log lambda_{s,t} at s = 0, the linear-response value of psi.
/// P <= 0 selects the truncation adaptively (successive leading zeros within
/// 1e-8, capped at kPeriodCap). When out_zero is non-null the s = 0 leading
/// zero is stored there.
double pressure_s_derivative(const MapDescriptor& m, double t, const Observable& psi,
                             int P, double radius = kFallbackZeroRadius,
                             LeadingZero* out_zero = nullptr);
/// Same, with precomputed cycle weights at s = 0 (sweep hot path).
double pressure_s_derivative(std::span<const CycleWeight> weights, int P,
                             double radius = kFallbackZeroRadius,
                             LeadingZero* out_zero = nullptr);

} // namespace srb

#endif
