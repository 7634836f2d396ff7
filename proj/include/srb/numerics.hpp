#ifndef SRB_NUMERICS_HPP
#define SRB_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "srb/errors.hpp"

namespace srb {

/// Value and first three derivatives of a scalar function at a point.
struct Jet3 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

/// Jet of g∘f given the jet of g at f.v and the jet of f (Faa di Bruno to order 3).
inline Jet3 compose(const Jet3& g, const Jet3& f) {
    Jet3 r;
    r.v = g.v;
    r.d1 = g.d1 * f.d1;
    r.d2 = g.d2 * f.d1 * f.d1 + g.d1 * f.d2;
    r.d3 = g.d3 * f.d1 * f.d1 * f.d1 + 3.0 * g.d2 * f.d1 * f.d2 + g.d1 * f.d3;
    return r;
}

/// Jet of the local inverse of h at h.v, given the jet of h at the preimage.
/// Requires h.d1 != 0.
inline Jet3 invert(const Jet3& h, double preimage) {
    Jet3 r;
    const double q = 1.0 / h.d1;
    r.v = preimage;
    r.d1 = q;
    r.d2 = -h.d2 * q * q * q;
    r.d3 = (3.0 * h.d2 * h.d2 - h.d1 * h.d3) * q * q * q * q * q;
    return r;
}

/// Horner evaluation of a polynomial with coefficients c[0] + c[1] x + ...
inline double poly_eval(std::span<const double> c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

/// Coefficients of the derivative polynomial.
inline std::vector<double> poly_derivative(std::span<const double> c) {
    std::vector<double> d;
    if (c.size() <= 1) return d;
    d.resize(c.size() - 1);
    for (size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

/// Value plus derivatives to order 3 by nested Horner passes.
inline Jet3 poly_jet(std::span<const double> c, double x) {
    // Horner with simultaneous derivative accumulation.
    Jet3 j;
    double p = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (size_t i = c.size(); i-- > 0;) {
        p3 = p3 * x + 3.0 * p2;
        p2 = p2 * x + 2.0 * p1;
        p1 = p1 * x + p;
        p = p * x + c[i];
    }
    j.v = p;
    j.d1 = p1;
    j.d2 = p2;
    j.d3 = p3;
    return j;
}

/// Compensated (Kahan) accumulator for long deterministic sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Solve g(x) = target on [lo, hi] for strictly monotone g, by bracketed
/// Newton with bisection fallback. `eval` returns (value, derivative).
/// Converges on |g - target| <= tol or on stagnating steps.
inline double monotone_solve(const std::function<void(double, double&, double&)>& eval,
                             double target, double lo, double hi, double tol,
                             const char* what) {
    double glo, ghi, dummy;
    eval(lo, glo, dummy);
    eval(hi, ghi, dummy);
    glo -= target;
    ghi -= target;
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) {
        // Tolerate tiny overshoot at the bracket ends.
        if (std::abs(glo) <= tol) return lo;
        if (std::abs(ghi) <= tol) return hi;
        throw numerical_error(std::string(what) + ": target not bracketed");
    }
    double a = lo, b = hi, fa = glo;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 128; ++it) {
        double g, dg;
        eval(x, g, dg);
        g -= target;
        if (std::abs(g) <= tol) return x;
        if ((g > 0.0) == (fa > 0.0)) {
            a = x;
            fa = g;
        } else {
            b = x;
        }
        double step = (dg != 0.0) ? -g / dg : 0.0;
        double xn = x + step;
        if (!(xn > std::min(a, b) && xn < std::max(a, b)) || step == 0.0)
            xn = 0.5 * (a + b);
        if (std::abs(xn - x) < 1e-17 * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    throw numerical_error(std::string(what) + ": no convergence");
}

/// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGL8Node[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr double kGL8Weight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

/// Aitken delta-squared extrapolation of a three-term sequence.
inline double aitken(double x0, double x1, double x2) {
    const double d1 = x1 - x0, d2 = x2 - x1;
    const double den = d2 - d1;
    if (den == 0.0) return x2;
    return x2 - d2 * d2 / den;
}

/// Worker count for data-parallel loops: RESPONSE_THREADS if set, else
/// hardware concurrency, floored at 1.
unsigned worker_threads();

/// Deterministic data-parallel loop: body(i) for i in [0, n). Results must be
/// written to index-addressed slots; chunk assignment never affects values.
void parallel_for(size_t n, const std::function<void(size_t)>& body);

} // namespace srb

#endif
