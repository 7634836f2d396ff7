#include <doctest.h>

#include <cmath>

#include "srb/unimodal.hpp"

using namespace srb;

namespace {

MapDescriptor chebyshev() {
    return MapDescriptor::direct({{1.0, 0.0, -2.0}}, ParameterWindow{-1.0, 1.0});
}

AnalyticMotion unit_motion() { return AnalyticMotion({1.0}, ParameterWindow{-0.2, 0.2}); }

MapDescriptor conjugated_family() {
    return MapDescriptor::conjugated(chebyshev(), unit_motion());
}

// small deterministic generator for sample parameters
struct Lcg {
    uint64_t state = 0x9e3779b97f4a7c15ull;
    double next() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    }
};

} // namespace

TEST_CASE("map evaluation on the quadratic base") {
    const MapDescriptor m = chebyshev();
    CHECK(eval_map(m, 0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval_map(m, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_map(m, 0.3, 1.0) == -1.0);
    CHECK(eval_map(m, -0.7, -1.0) == -1.0);
    CHECK_THROWS_AS(eval_map(m, 2.0, 0.5), config_error);
    CHECK_THROWS_AS(eval_map(m, 0.0, 1.5), config_error);
}

TEST_CASE("boundary invariance across the window") {
    const MapDescriptor m = conjugated_family();
    Lcg rng;
    for (int i = 0; i < 100; ++i) {
        const double t = -0.2 + 0.4 * rng.next();
        CHECK(std::abs(eval_map(m, t, 1.0) + 1.0) <= 1e-12);
        CHECK(std::abs(eval_map(m, t, -1.0) + 1.0) <= 1e-12);
    }
}

TEST_CASE("derivatives of the quadratic base") {
    const MapDescriptor m = chebyshev();
    CHECK(eval_deriv(m, 0.0, 0.5, 1) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(eval_deriv(m, 0.0, 0.0, 1) == 0.0);
    CHECK(eval_deriv(m, 0.0, -1.0, 1) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(eval_deriv(m, 0.0, 0.3, 2) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(eval_deriv(m, 0.0, 0.3, 3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(eval_deriv(m, 0.0, 0.3, 4), config_error);
}

TEST_CASE("derivative consistency with central differences") {
    const MapDescriptor base = chebyshev();
    const MapDescriptor conj = conjugated_family();
    const double h = 1e-5;
    for (const MapDescriptor* m : {&base, &conj}) {
        const double t = (m->kind() == MapKind::direct) ? 0.0 : 0.12;
        for (int i = 1; i < 20; ++i) {
            const double x = -0.95 + 1.9 * i / 20.0;
            const double fd = (eval_map(*m, t, x + h) - eval_map(*m, t, x - h)) / (2.0 * h);
            CHECK(std::abs(eval_deriv(*m, t, x, 1) - fd) <= 1e-6);
        }
    }
}

TEST_CASE("higher derivatives of the conjugated family match differences") {
    const MapDescriptor m = conjugated_family();
    const double t = 0.15, h = 1e-4;
    for (double x : {-0.8, -0.35, 0.4, 0.75}) {
        const double d2 = eval_deriv(m, t, x, 2);
        const double fd2 =
            (eval_deriv(m, t, x + h, 1) - eval_deriv(m, t, x - h, 1)) / (2.0 * h);
        CHECK(std::abs(d2 - fd2) <= 1e-5 * (1.0 + std::abs(d2)));
        const double d3 = eval_deriv(m, t, x, 3);
        const double fd3 =
            (eval_deriv(m, t, x + h, 2) - eval_deriv(m, t, x - h, 2)) / (2.0 * h);
        CHECK(std::abs(d3 - fd3) <= 1e-4 * (1.0 + std::abs(d3)));
    }
}

TEST_CASE("schwarzian derivative") {
    const MapDescriptor m = chebyshev();
    CHECK(schwarzian(m, 0.0, 0.5) == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(schwarzian(m, 0.0, 1.0) == doctest::Approx(-1.5).epsilon(1e-12));
    // quadratic family: the f''' term vanishes identically
    for (double x : {-0.8, -0.2, 0.3, 0.9}) {
        const double fp = eval_deriv(m, 0.0, x, 1);
        const double fpp = eval_deriv(m, 0.0, x, 2);
        CHECK(schwarzian(m, 0.0, x) ==
              doctest::Approx(-1.5 * (fpp / fp) * (fpp / fp)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(schwarzian(m, 0.0, 0.0), config_error);
}

TEST_CASE("schwarzian stays nonpositive for the shipped families") {
    const MapDescriptor base = chebyshev();
    const MapDescriptor conj = conjugated_family();
    for (const MapDescriptor* m : {&base, &conj}) {
        for (double t : {0.0, -0.1, 0.1}) {
            if (!m->window().contains(t)) continue;
            const double c = m->critical_point(t);
            for (int i = 0; i <= 10000; ++i) {
                const double x = -1.0 + 2.0 * i / 10000.0;
                if (std::abs(x - c) < 1e-3) continue;
                CHECK(schwarzian(*m, t, x) <= 1e-12);
            }
        }
    }
}

TEST_CASE("analytic motion") {
    const AnalyticMotion h = unit_motion();
    CHECK(apply_motion(h, 0.1, 0.5) == doctest::Approx(0.575).epsilon(1e-15));
    CHECK(apply_motion(h, 0.17, 1.0) == 1.0);
    CHECK(apply_motion(h, 0.17, -1.0) == -1.0);
    CHECK(apply_motion(h, 0.0, 0.3) == 0.3);
    CHECK_THROWS_AS(apply_motion(h, 0.5, 0.3), config_error);
    h.validate();

    for (double t : {-0.2, -0.07, 0.11, 0.2}) {
        for (int i = 0; i <= 64; ++i) {
            const double x = -1.0 + 2.0 * i / 64.0;
            CHECK(std::abs(h.inverse(t, h.apply(t, x)) - x) <= 1e-13);
            CHECK(h.derivative(t, x) > 0.0);
        }
    }
}

TEST_CASE("conjugation identity h o f0 = f_t o h") {
    const MapDescriptor conj = conjugated_family();
    const MapDescriptor base = chebyshev();
    const AnalyticMotion h = unit_motion();
    for (double t : {-0.18, -0.05, 0.02, 0.13}) {
        for (int i = 0; i <= 40; ++i) {
            const double x = -1.0 + 2.0 * i / 40.0;
            const double lhs = apply_motion(h, t, eval_map(base, 0.0, x));
            const double rhs = eval_map(conj, t, apply_motion(h, t, x));
            CHECK(std::abs(lhs - rhs) <= 1e-10);
        }
    }
}

TEST_CASE("the conjugated critical point rides the motion") {
    const MapDescriptor conj = conjugated_family();
    CHECK(conj.critical_point(0.1) == doctest::Approx(0.1).epsilon(1e-14));
    const UnimodalMap f = conj.at(0.1);
    CHECK(std::abs(f.deriv(f.critical_point())) <= 1e-12);
    CHECK(f.jet(f.critical_point()).d2 < 0.0);
}

TEST_CASE("observables") {
    const MapDescriptor m = chebyshev();
    const Observable x2 = Observable::polynomial({0.0, 0.0, 1.0});
    const Observable x1 = Observable::polynomial({0.0, 1.0});
    const Observable logd = Observable::log_abs_derivative();
    CHECK(eval_observable(x2, m, 0.0, 0.5) == doctest::Approx(0.25));
    CHECK(eval_observable(x1, m, 0.0, -1.0) == doctest::Approx(-1.0));
    CHECK(eval_observable(logd, m, 0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(eval_observable(logd, m, 0.0, 0.0), config_error);
}

TEST_CASE("admissibility constants for the quadratic base") {
    const MapDescriptor m = chebyshev();
    const KNConstants kn = kn_constants(m, 0.0, 512);
    // |x| / |4x| is identically 1/4
    CHECK(kn.sup1 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(kn.var1 <= 1e-10);
    // variation of |f(x)-f(u)| / (|x-u||f'(x)|) on J_u is (1-|u|)/2, largest
    // at the smallest |u| on the sub-grid
    CHECK(kn.sup2 <= 0.5 + 1e-9);
    CHECK(kn.sup2 == doctest::Approx(0.484375).epsilon(1e-6));
    CHECK(kn.bound == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(kn.bound >= 1.0);
    CHECK_THROWS_AS(kn_constants(m, 0.0, 100), config_error);
}

TEST_CASE("motion-conjugated admissibility constants at t = 0 match the base") {
    const MapDescriptor base = chebyshev();
    const MapDescriptor conj = conjugated_family();
    const KNConstants a = kn_constants(base, 0.0, 256);
    const KNConstants b = kn_constants(conj, 0.0, 256);
    CHECK(a.sup1 == doctest::Approx(b.sup1).epsilon(1e-10));
    CHECK(std::abs(a.var1 - b.var1) <= 1e-9);
    CHECK(a.sup2 == doctest::Approx(b.sup2).epsilon(1e-9));
}

TEST_CASE("descriptor validation rejects broken families") {
    // boundary not pinned at -1
    CHECK_THROWS_AS(MapDescriptor::direct({{0.6, 0.0, -1.4}}, ParameterWindow{-0.1, 0.1}),
                    config_error);
    // critical point away from x = 0
    CHECK_THROWS_AS(
        MapDescriptor::direct({{0.0, 0.5, -1.0, -0.5}}, ParameterWindow{-0.1, 0.1}),
        config_error);
    // shipped families pass
    chebyshev().validate();
    conjugated_family().validate();
    // upward-opening critical point fails nondegeneracy
    const MapDescriptor bump =
        MapDescriptor::direct({{-1.0, 0.0, 1.0, 0.0, -1.0}}, ParameterWindow{-0.1, 0.1});
    CHECK_THROWS_AS(bump.validate(), config_error);
}
