#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srb/diagnostics.hpp"

using namespace srb;

namespace {

MapDescriptor chebyshev() {
    return MapDescriptor::direct({{1.0, 0.0, -2.0}}, ParameterWindow{-1.0, 1.0});
}

MapDescriptor conjugated_family() {
    return MapDescriptor::conjugated(chebyshev(),
                                     AnalyticMotion({1.0}, ParameterWindow{-0.2, 0.2}));
}

// boundary-pinned quadratic with an attracting interior fixed point
MapDescriptor attracting_family() {
    return MapDescriptor::direct({{0.4, 0.0, -1.4}}, ParameterWindow{-0.1, 0.1});
}

// closed-form largest lap of the n-fold angle doubling in x coordinates
double eta_oracle(int n) {
    const double lap = std::sin(std::numbers::pi / std::pow(2.0, n));
    return std::exp(-std::log(lap) / n);
}

} // namespace

TEST_CASE("critical-orbit growth of the quadratic base") {
    const auto [lambda_c, prefactor] = lambda_c_estimate(chebyshev(), 0.0, 40);
    // orbit 0 -> 1 -> -1 lands on the boundary fixed point with |f'| = 4
    CHECK(std::abs(lambda_c - 4.0) <= 1e-9);
    CHECK(prefactor == doctest::Approx(1.0).epsilon(1e-9));

    // |(f^n)'(f(0))|^{1/n} is 4 for every n
    const UnimodalMap f = chebyshev().at(0.0);
    double y = f.critical_value(), acc = 0.0;
    for (int n = 1; n <= 30; ++n) {
        acc += std::log(std::abs(f.deriv(y)));
        y = f.value(y);
        CHECK(std::exp(acc / n) == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("conjugated critical orbit keeps the growth rate") {
    for (double t : {-0.15, 0.1}) {
        const auto [lambda_c, prefactor] = lambda_c_estimate(conjugated_family(), t, 40);
        CHECK(std::abs(lambda_c - 4.0) <= 0.4); // within 10 percent
        CHECK(prefactor > 0.0);
    }
}

TEST_CASE("superstable critical orbit is a hard error") {
    const MapDescriptor cusp = MapDescriptor::direct({{0.0, 0.0, -1.0}}, ParameterWindow{-0.1, 0.1});
    CHECK_THROWS_AS(lambda_c_estimate(cusp, 0.0, 20), hypothesis_error);
}

TEST_CASE("periodic multiplier floor") {
    CHECK(lambda_per_estimate(chebyshev(), 0.0, 10) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(lambda_per_estimate(chebyshev(), 0.0, 1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(lambda_per_estimate(conjugated_family(), 0.0, 6) ==
          doctest::Approx(lambda_per_estimate(chebyshev(), 0.0, 6)).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(lambda_per_estimate(attracting_family(), 0.0, 4),
                         doctest::Contains("non-repelling"), hypothesis_error);
}

TEST_CASE("monotonicity-interval growth rate") {
    const MapDescriptor m = chebyshev();
    CHECK(lambda_eta_estimate(m, 0.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lambda_eta_estimate(m, 0.0, 12) == doctest::Approx(eta_oracle(12)).epsilon(1e-6));
    // at depth 20 the central lap is ~3e-6 wide and its endpoints are
    // near-critical pullbacks known to ~1e-9, which caps the match here
    CHECK(lambda_eta_estimate(m, 0.0, 20) == doctest::Approx(eta_oracle(20)).epsilon(1e-4));
    CHECK(lambda_eta_estimate(m, 0.0, 20) == doctest::Approx(1.888743).epsilon(1e-4));
    // slow n -> infinity limit is 2; geometric-depth Aitken gets within 0.05
    CHECK(std::abs(lambda_eta_extrapolated(m, 0.0, 20) - 2.0) <= 0.05);
}

TEST_CASE("branch domains count the monotone laps") {
    const UnimodalMap f = chebyshev().at(0.0);
    for (int n = 1; n <= 12; ++n)
        CHECK(scan_branch_domains(f, n).nonempty == (1ull << n));

    // independent lap count: sign changes of (f^n)' on a fine grid
    for (int n = 1; n <= 8; ++n) {
        const int grid = (1 << n) * 64;
        int laps = 1;
        double prev = 0.0;
        for (int i = 0; i <= grid; ++i) {
            const double x = -1.0 + 2.0 * i / grid;
            double prod = 1.0, v = x;
            for (int k = 0; k < n; ++k) {
                prod *= f.deriv(v);
                v = f.value(v);
            }
            if (i > 0 && (prod > 0.0) != (prev > 0.0)) ++laps;
            prev = prod;
        }
        CHECK(static_cast<uint64_t>(laps) == scan_branch_domains(f, n).nonempty);
    }
}

TEST_CASE("theta bound") {
    CEReport report;
    report.lambda_c_min = 4.0;
    report.lambda_per_min = 2.0;
    report.lambda_eta_min = 1.88;
    CHECK(theta_choice(report, 0.9) == doctest::Approx(0.9 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(theta_choice(report, 1.0), config_error);
    report.lambda_per_min = 1.0;
    CHECK_THROWS_AS(theta_choice(report, 0.9), hypothesis_error);
}

TEST_CASE("uniformity of the constants over the shipped window") {
    const MapDescriptor conj = conjugated_family();
    const std::vector<double> grid = {-0.2, -0.1, 0.0, 0.1, 0.2};
    const CEReport report = diagnose(conj, grid, 40, 8, 14, 0.9);
    CHECK(report.lambda_c_min > 1.1);
    CHECK(report.lambda_per_min > 1.1);
    CHECK(report.lambda_eta_min > 1.1);
    CHECK(report.theta_inv > 1.0);
    CHECK(report.theta_inv <
          std::min(report.lambda_eta_min,
                   std::sqrt(std::min(report.lambda_c_min, report.lambda_per_min))));
    // measured shadow of the chain lambda_eta >= sqrt(lambda_c)
    for (const CEPointDiagnostics& d : report.table)
        CHECK(d.lambda_eta_extrapolated >= std::sqrt(d.lambda_c) * 0.9);
}

TEST_CASE("diagnose rejects the attracting fixture") {
    const std::vector<double> grid = {0.0};
    CHECK_THROWS_WITH_AS(diagnose(attracting_family(), grid, 30, 6, 10, 0.9),
                         doctest::Contains("non-repelling"), hypothesis_error);
}
