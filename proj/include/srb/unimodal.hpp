#ifndef SRB_UNIMODAL_HPP
#define SRB_UNIMODAL_HPP

#include <memory>
#include <string>
#include <vector>

#include "srb/numerics.hpp"

namespace srb {

/// Admissible range of the family parameter t. Windows are explicit data
/// supplied with each descriptor, never inferred.
struct ParameterWindow {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t, double slack = 1e-12) const {
        return t >= lo - slack && t <= hi + slack;
    }
    void require(double t) const;
};

/// Branch label relative to the critical point: L is the increasing branch
/// left of c, R the decreasing branch right of c.
enum class Side : uint8_t { L, R };

inline char side_char(Side s) { return s == Side::L ? 'L' : 'R'; }

/// Analytic motion h_t(x) = x + t g(x) (1 - x^2) with g a finite polynomial.
/// The factor (1 - x^2) pins h_t(+-1) = +-1 exactly, and h_0 = id.
class AnalyticMotion {
public:
    AnalyticMotion(std::vector<double> g, ParameterWindow window);

    double apply(double t, double x) const;
    /// dh_t/dx; strictly positive on the window for a valid motion.
    double derivative(double t, double x) const;
    Jet3 jet(double t, double x) const;
    /// h_t^{-1}(y) by monotone bisection + Newton, residual below 1e-14.
    double inverse(double t, double y) const;

    const ParameterWindow& window() const { return window_; }
    const std::vector<double>& g() const { return g_; }

    /// Checks the diffeomorphism and endpoint invariants on a sample grid.
    void validate(int grid = 512) const;

private:
    std::vector<double> g_;
    std::vector<double> q_;   // q(x) = g(x)(1 - x^2)
    std::vector<double> q1_, q2_, q3_;
    ParameterWindow window_;
};

enum class MapKind { direct, conjugated };

class MapDescriptor;

/// A member of the family frozen at one parameter value: the object the
/// numerical kernels (orbit enumeration, Ulam assembly, diagnostics) work on.
/// For conjugated descriptors this evaluates h_t o f_0 o h_t^{-1}, where f_0
/// is the base family frozen at parameter 0.
class UnimodalMap {
public:
    double value(double x) const;
    /// Value and first derivative in one pass (hot path).
    void value_deriv(double x, double& v, double& d) const;
    /// Spare-precision evaluation used to polish periodic-point residuals;
    /// conjugated maps fall back to double arithmetic.
    void value_deriv_ld(long double x, long double& v, long double& d) const;
    double deriv(double x) const { double v, d; value_deriv(x, v, d); return d; }
    Jet3 jet(double x) const;

    double parameter() const { return t_; }
    double critical_point() const { return c_; }
    double critical_value() const { return fc_; }
    bool is_conjugated() const { return base_ != nullptr; }

    Side side_of(double x) const { return x < c_ ? Side::L : Side::R; }

    /// Unique preimage of y on the requested branch, to tolerance 1e-13.
    /// Throws numerical_error when y lies outside the branch image.
    double inverse_branch(Side side, double y, double tol = 1e-13) const;

private:
    friend class MapDescriptor;
    UnimodalMap() = default;

    // direct representation: x-polynomial at the frozen parameter
    std::vector<double> poly_;
    // conjugated representation
    std::shared_ptr<const UnimodalMap> base_;
    std::shared_ptr<const AnalyticMotion> motion_;

    double t_ = 0.0;
    double c_ = 0.0;
    double fc_ = 0.0;
};

/// An analytic unimodal family on [-1,1]: either a finite polynomial in
/// (t, x), or a base family conjugated by an analytic motion.
class MapDescriptor {
public:
    /// coeff[j][k] multiplies t^j x^k.
    static MapDescriptor direct(std::vector<std::vector<double>> coeff, ParameterWindow window);
    static MapDescriptor conjugated(MapDescriptor base, AnalyticMotion motion);

    MapKind kind() const { return kind_; }
    const ParameterWindow& window() const { return window_; }
    const std::vector<std::vector<double>>& coefficients() const { return coeff_; }
    const MapDescriptor& base() const;
    const AnalyticMotion& motion() const;

    /// Freeze the family at parameter t (window-checked).
    UnimodalMap at(double t) const;

    double critical_point(double t) const;

    /// Verifies the standing invariants: f_t(+-1) = -1 to 1e-12, quadratic
    /// nondegeneracy at the critical point, f_t(I) inside I on a sample grid.
    /// Throws config_error on violation.
    void validate() const;

private:
    MapKind kind_ = MapKind::direct;
    std::vector<std::vector<double>> coeff_;
    std::shared_ptr<const MapDescriptor> base_;
    std::shared_ptr<const AnalyticMotion> motion_;
    ParameterWindow window_;
};

/// Real-analytic observable: a polynomial, or the built-in log|f_t'|.
struct Observable {
    enum class Kind { polynomial, log_abs_derivative };
    Kind kind = Kind::polynomial;
    std::vector<double> coeff;

    static Observable polynomial(std::vector<double> c);
    static Observable log_abs_derivative();
};

/// Measured constants of the bounded-variation admissibility conditions.
struct KNConstants {
    double sup1 = 0.0;  // sup over I of |x-c| / |f'(x)|
    double var1 = 0.0;  // total variation of the same function
    double sup2 = 0.0;  // sup over u of var on J_u of |f(x)-f(u)| / (|x-u||f'(x)|)
    double bound = 0.0; // max{sup1, var1, sup2, 1/sup1}; always >= 1
    int grid = 0;       // resolution the variation was accepted at
};

// Family operations --------------------------------------------------------

double eval_map(const MapDescriptor& m, double t, double x);
double eval_deriv(const MapDescriptor& m, double t, double x, int order);
/// f'''/f' - (3/2)(f''/f')^2; undefined at the critical point.
double schwarzian(const MapDescriptor& m, double t, double x);
double apply_motion(const AnalyticMotion& motion, double t, double x);
double eval_observable(const Observable& psi, const MapDescriptor& m, double t, double x);
double eval_observable(const Observable& psi, const UnimodalMap& f, double x);

/// Grid-measured admissibility constants; grid_size >= 256. The value of
/// |x-c|/|f'| at x = c is filled by its continuity limit 1/|f''(c)|, and the
/// variation carries a doubled-resolution consistency check (1%).
KNConstants kn_constants(const MapDescriptor& m, double t, int grid_size);

} // namespace srb

#endif
