#include "srb/unimodal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srb {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

void ParameterWindow::require(double t) const {
    if (!contains(t))
        throw config_error("parameter t = " + fmt(t) + " outside window [" + fmt(lo) +
                           ", " + fmt(hi) + "]");
}

// AnalyticMotion ------------------------------------------------------------

AnalyticMotion::AnalyticMotion(std::vector<double> g, ParameterWindow window)
    : g_(std::move(g)), window_(window) {
    if (g_.empty()) g_.push_back(0.0);
    for (double c : g_)
        if (!std::isfinite(c)) throw config_error("motion coefficients must be finite");
    if (!(window_.lo <= window_.hi)) throw config_error("empty motion window");
    q1_ = poly_derivative(g_);
    q2_ = poly_derivative(q1_);
    q3_ = poly_derivative(q2_);
}

double AnalyticMotion::apply(double t, double x) const {
    // g(x)(1-x^2) evaluated in factored form so the endpoints are exact.
    return x + t * poly_eval(g_, x) * (1.0 - x * x);
}

double AnalyticMotion::derivative(double t, double x) const {
    const double g = poly_eval(g_, x);
    const double g1 = poly_eval(q1_, x);
    return 1.0 + t * (g1 * (1.0 - x * x) - 2.0 * x * g);
}

Jet3 AnalyticMotion::jet(double t, double x) const {
    const double w = 1.0 - x * x;
    const double g = poly_eval(g_, x);
    const double g1 = poly_eval(q1_, x);
    const double g2 = poly_eval(q2_, x);
    const double g3 = poly_eval(q3_, x);
    Jet3 j;
    j.v = x + t * g * w;
    j.d1 = 1.0 + t * (g1 * w - 2.0 * x * g);
    j.d2 = t * (g2 * w - 4.0 * x * g1 - 2.0 * g);
    j.d3 = t * (g3 * w - 6.0 * x * g2 - 6.0 * g1);
    return j;
}

double AnalyticMotion::inverse(double t, double y) const {
    if (t == 0.0) return y;
    double a = -1.0 - 1e-6, b = 1.0 + 1e-6;
    if (y < apply(t, a) || y > apply(t, b))
        throw numerical_error("motion inverse: value outside range");
    double u = std::clamp(y, -1.0, 1.0);
    for (int it = 0; it < 96; ++it) {
        const double r = apply(t, u) - y;
        if (std::abs(r) <= 1e-14) return u;
        if (r > 0.0) b = u; else a = u;
        const double d = derivative(t, u);
        double un = (d > 0.0) ? u - r / d : 0.5 * (a + b);
        if (!(un > a && un < b)) un = 0.5 * (a + b);
        if (std::abs(un - u) < 1e-17) return un;
        u = un;
    }
    throw numerical_error("motion inverse did not converge (t = " + fmt(t) + ")");
}

void AnalyticMotion::validate(int grid) const {
    const double ts[5] = {window_.lo, 0.5 * window_.lo, 0.0, 0.5 * window_.hi, window_.hi};
    for (double t : ts) {
        if (apply(t, 1.0) != 1.0 || apply(t, -1.0) != -1.0)
            throw config_error("motion does not fix the endpoints");
        for (int i = 0; i <= grid; ++i) {
            const double x = -1.0 + 2.0 * i / grid;
            if (!(derivative(t, x) > 0.0))
                throw config_error("motion is not a diffeomorphism at t = " + fmt(t) +
                                   ", x = " + fmt(x));
        }
    }
    if (apply(0.0, 0.3) != 0.3)
        throw config_error("motion at t = 0 is not the identity");
}

// UnimodalMap ---------------------------------------------------------------

double UnimodalMap::value(double x) const {
    if (!base_) return poly_eval(poly_, x);
    const double u = motion_->inverse(t_, x);
    return motion_->apply(t_, base_->value(u));
}

void UnimodalMap::value_deriv(double x, double& v, double& d) const {
    if (!base_) {
        double p = 0.0, p1 = 0.0;
        for (size_t i = poly_.size(); i-- > 0;) {
            p1 = p1 * x + p;
            p = p * x + poly_[i];
        }
        v = p;
        d = p1;
        return;
    }
    const double u = motion_->inverse(t_, x);
    double w, wd;
    base_->value_deriv(u, w, wd);
    v = motion_->apply(t_, w);
    d = motion_->derivative(t_, w) * wd / motion_->derivative(t_, u);
}

void UnimodalMap::value_deriv_ld(long double x, long double& v, long double& d) const {
    if (!base_) {
        long double p = 0.0L, p1 = 0.0L;
        for (size_t i = poly_.size(); i-- > 0;) {
            p1 = p1 * x + p;
            p = p * x + static_cast<long double>(poly_[i]);
        }
        v = p;
        d = p1;
        return;
    }
    double dv, dd;
    value_deriv(static_cast<double>(x), dv, dd);
    v = dv;
    d = dd;
}

Jet3 UnimodalMap::jet(double x) const {
    if (!base_) return poly_jet(poly_, x);
    const double u = motion_->inverse(t_, x);
    const Jet3 h_at_u = motion_->jet(t_, u);
    const Jet3 hinv = invert(h_at_u, u);
    const Jet3 f0 = base_->jet(u);
    const Jet3 h_at_w = motion_->jet(t_, f0.v);
    return compose(h_at_w, compose(f0, hinv));
}

double UnimodalMap::inverse_branch(Side side, double y, double tol) const {
    const double c = c_;
    double yy = y;
    if (yy < -1.0 - 1e-9 || yy > fc_ + 1e-9)
        throw numerical_error("inverse_branch: y = " + fmt(y) + " outside branch image");
    yy = std::clamp(yy, -1.0, fc_);
    double a = (side == Side::L) ? -1.0 : c;
    double b = (side == Side::L) ? c : 1.0;
    const bool increasing = (side == Side::L);
    // endpoints first: the images there are -1 and fc by the standing
    // invariants, and the flat top would otherwise smear the preimage of fc
    // across an order sqrt(tol) neighbourhood of c
    if (yy <= -1.0 + 1e-15) return increasing ? a : b;
    if (yy >= fc_) return c;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 128; ++it) {
        double v, d;
        value_deriv(x, v, d);
        const double r = v - yy;
        if (std::abs(r) <= tol) return x;
        if ((r > 0.0) == increasing) b = x; else a = x;
        double xn = (d != 0.0) ? x - r / d : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::abs(xn - x) < 1e-17 * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    throw numerical_error("inverse_branch did not converge");
}

// MapDescriptor -------------------------------------------------------------

MapDescriptor MapDescriptor::direct(std::vector<std::vector<double>> coeff,
                                    ParameterWindow window) {
    if (!(window.lo <= window.hi)) throw config_error("empty parameter window");
    if (coeff.empty()) throw config_error("direct family needs coefficients");
    size_t width = 0;
    for (const auto& row : coeff) width = std::max(width, row.size());
    for (auto& row : coeff) row.resize(width, 0.0);
    for (const auto& row : coeff)
        for (double c : row)
            if (!std::isfinite(c)) throw config_error("map coefficients must be finite");

    // Boundary pinning f_t(+-1) = -1 is linear in the coefficients: row 0 must
    // sum to -1 at both parities, higher rows to 0.
    for (size_t j = 0; j < coeff.size(); ++j) {
        double plus = 0.0, minus = 0.0;
        for (size_t k = 0; k < width; ++k) {
            plus += coeff[j][k];
            minus += (k % 2 == 0) ? coeff[j][k] : -coeff[j][k];
        }
        const double want = (j == 0) ? -1.0 : 0.0;
        if (std::abs(plus - want) > 1e-12 || std::abs(minus - want) > 1e-12)
            throw config_error("family does not satisfy f_t(-1) = f_t(1) = -1");
    }
    // Critical point pinned at x = 0: no linear-in-x terms.
    if (width >= 2)
        for (size_t j = 0; j < coeff.size(); ++j)
            if (coeff[j][1] != 0.0)
                throw config_error("direct family must have its critical point at x = 0");

    MapDescriptor m;
    m.kind_ = MapKind::direct;
    m.coeff_ = std::move(coeff);
    m.window_ = window;
    return m;
}

MapDescriptor MapDescriptor::conjugated(MapDescriptor base, AnalyticMotion motion) {
    if (!base.window().contains(0.0))
        throw config_error("conjugated family: base window must contain t = 0");
    MapDescriptor m;
    m.kind_ = MapKind::conjugated;
    ParameterWindow w = motion.window();
    m.base_ = std::make_shared<const MapDescriptor>(std::move(base));
    m.motion_ = std::make_shared<const AnalyticMotion>(std::move(motion));
    m.window_ = w;
    return m;
}

const MapDescriptor& MapDescriptor::base() const {
    if (!base_) throw config_error("base(): not a conjugated family");
    return *base_;
}

const AnalyticMotion& MapDescriptor::motion() const {
    if (!motion_) throw config_error("motion(): not a conjugated family");
    return *motion_;
}

UnimodalMap MapDescriptor::at(double t) const {
    window_.require(t);
    UnimodalMap f;
    f.t_ = t;
    if (kind_ == MapKind::direct) {
        const size_t width = coeff_.front().size();
        f.poly_.assign(width, 0.0);
        for (size_t k = 0; k < width; ++k) {
            double acc = 0.0;
            for (size_t j = coeff_.size(); j-- > 0;) acc = acc * t + coeff_[j][k];
            f.poly_[k] = acc;
        }
        f.c_ = 0.0;
        f.fc_ = poly_eval(f.poly_, 0.0);
    } else {
        f.base_ = std::make_shared<const UnimodalMap>(base_->at(0.0));
        f.motion_ = motion_;
        f.c_ = motion_->apply(t, f.base_->critical_point());
        f.fc_ = motion_->apply(t, f.base_->critical_value());
    }
    return f;
}

double MapDescriptor::critical_point(double t) const {
    if (kind_ == MapKind::direct) return 0.0;
    return motion_->apply(t, base_->critical_point(0.0));
}

void MapDescriptor::validate() const {
    if (kind_ == MapKind::conjugated) {
        motion_->validate();
        base_->validate();
    }
    const int nt = 32, nx = 128;
    for (int i = 0; i <= nt; ++i) {
        const double t = window_.lo + (window_.hi - window_.lo) * i / nt;
        UnimodalMap f = at(t);
        if (std::abs(f.value(-1.0) + 1.0) > 1e-12 || std::abs(f.value(1.0) + 1.0) > 1e-12)
            throw config_error("boundary invariant f_t(+-1) = -1 fails at t = " + fmt(t));
        const Jet3 jc = f.jet(f.critical_point());
        if (!(jc.d2 < 0.0))
            throw config_error("critical point is not quadratic-nondegenerate at t = " + fmt(t));
        if (std::abs(jc.d1) > 1e-9)
            throw config_error("critical derivative does not vanish at t = " + fmt(t));
        for (int k = 0; k <= nx; ++k) {
            const double x = -1.0 + 2.0 * k / nx;
            const double v = f.value(x);
            if (!(v >= -1.0 - 1e-9 && v <= 1.0 + 1e-9))
                throw config_error("family leaves [-1,1] at t = " + fmt(t) + ", x = " + fmt(x));
        }
    }
}

// Observables ---------------------------------------------------------------

Observable Observable::polynomial(std::vector<double> c) {
    for (double v : c)
        if (!std::isfinite(v)) throw config_error("observable coefficients must be finite");
    Observable psi;
    psi.kind = Kind::polynomial;
    psi.coeff = std::move(c);
    if (psi.coeff.empty()) psi.coeff.push_back(0.0);
    return psi;
}

Observable Observable::log_abs_derivative() {
    Observable psi;
    psi.kind = Kind::log_abs_derivative;
    return psi;
}

double eval_observable(const Observable& psi, const UnimodalMap& f, double x) {
    if (psi.kind == Observable::Kind::polynomial) return poly_eval(psi.coeff, x);
    const double d = f.deriv(x);
    if (d == 0.0) throw config_error("log|f'| undefined at the critical point");
    return std::log(std::abs(d));
}

double eval_observable(const Observable& psi, const MapDescriptor& m, double t, double x) {
    if (psi.kind == Observable::Kind::polynomial) return poly_eval(psi.coeff, x);
    return eval_observable(psi, m.at(t), x);
}

// Family operations ---------------------------------------------------------

namespace {
void require_domain(double x) {
    if (!(x >= -1.0 - 1e-9 && x <= 1.0 + 1e-9))
        throw config_error("x = " + fmt(x) + " outside [-1,1]");
}
} // namespace

double eval_map(const MapDescriptor& m, double t, double x) {
    require_domain(x);
    return m.at(t).value(x);
}

double eval_deriv(const MapDescriptor& m, double t, double x, int order) {
    require_domain(x);
    if (order < 1 || order > 3) throw config_error("derivative order must be 1, 2 or 3");
    const Jet3 j = m.at(t).jet(x);
    return order == 1 ? j.d1 : order == 2 ? j.d2 : j.d3;
}

double schwarzian(const MapDescriptor& m, double t, double x) {
    require_domain(x);
    const UnimodalMap f = m.at(t);
    const Jet3 j = f.jet(x);
    if (j.d1 == 0.0) throw config_error("Schwarzian undefined at the critical point");
    const double ratio = j.d2 / j.d1;
    return j.d3 / j.d1 - 1.5 * ratio * ratio;
}

double apply_motion(const AnalyticMotion& motion, double t, double x) {
    motion.window().require(t);
    return motion.apply(t, x);
}

// Admissibility constants ---------------------------------------------------

namespace {

// |x - c| / |f'(x)| with the continuity value 1/|f''(c)| at the critical point.
double phi_value(const UnimodalMap& f, double c, double x) {
    if (x == c) {
        const Jet3 j = f.jet(c);
        return 1.0 / std::abs(j.d2);
    }
    return std::abs(x - c) / std::abs(f.deriv(x));
}

void sup_var_pass(const UnimodalMap& f, double c, int n, double& sup, double& var) {
    std::vector<double> xs;
    xs.reserve(n + 2);
    for (int i = 0; i <= n; ++i) xs.push_back(-1.0 + 2.0 * i / n);
    if (std::find(xs.begin(), xs.end(), c) == xs.end()) xs.push_back(c);
    std::sort(xs.begin(), xs.end());
    sup = 0.0;
    var = 0.0;
    double prev = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double v = phi_value(f, c, xs[i]);
        if (!std::isfinite(v)) throw hypothesis_error("non-finite admissibility data");
        sup = std::max(sup, v);
        if (i > 0) var += std::abs(v - prev);
        prev = v;
    }
}

} // namespace

KNConstants kn_constants(const MapDescriptor& m, double t, int grid_size) {
    if (grid_size < 256) throw config_error("kn_constants: grid_size must be >= 256");
    const UnimodalMap f = m.at(t);
    const double c = f.critical_point();

    double sup1 = 0.0, var1 = 0.0;
    int n = grid_size;
    bool accepted = false;
    for (int round = 0; round < 4; ++round) {
        double sup_a, var_a, sup_b, var_b;
        sup_var_pass(f, c, n, sup_a, var_a);
        sup_var_pass(f, c, 2 * n, sup_b, var_b);
        if (std::abs(var_a - var_b) <= 0.01 * std::max(var_b, 1e-9)) {
            sup1 = sup_b;
            var1 = var_b;
            n *= 2;
            accepted = true;
            break;
        }
        n *= 2;
    }
    if (!accepted) throw numerical_error("kn_constants: variation estimate did not stabilize");

    // condition (2): total variation of |f(x)-f(u)| / (|x-u||f'(x)|) on J_u,
    // maximised over a sub-grid of u.
    double sup2 = 0.0;
    const int nu = std::max(grid_size / 8, 64);
    for (int iu = 1; iu < nu; ++iu) {
        const double u = -1.0 + 2.0 * iu / nu;
        if (std::abs(u - c) < 2.0 / grid_size) continue;
        const double lo = (u < c) ? -1.0 : u;
        const double hi = (u < c) ? u : 1.0;
        const double fu = f.value(u);
        double var = 0.0;
        double prev = 1.0; // limit value at x = u
        const int nx = grid_size;
        const bool from_u = (u > c);
        for (int ix = 1; ix <= nx; ++ix) {
            const double x = from_u ? lo + (hi - lo) * ix / nx
                                    : hi - (hi - lo) * ix / nx;
            const double v =
                std::abs(f.value(x) - fu) / (std::abs(x - u) * std::abs(f.deriv(x)));
            if (!std::isfinite(v)) throw hypothesis_error("non-finite admissibility data");
            var += std::abs(v - prev);
            prev = v;
        }
        sup2 = std::max(sup2, var);
    }

    KNConstants kn;
    kn.sup1 = sup1;
    kn.var1 = var1;
    kn.sup2 = sup2;
    kn.bound = std::max({sup1, var1, sup2, 1.0 / sup1});
    kn.grid = n;
    return kn;
}

} // namespace srb
