#ifndef SRB_ORBITS_HPP
#define SRB_ORBITS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srb/unimodal.hpp"

namespace srb {

/// Hard cap on the enumerated period: 2^p monotone branches are visited.
inline constexpr int kPeriodCap = 20;
/// Cap on branch-domain scans (monotonicity-interval diagnostics).
inline constexpr int kBranchDepthCap = 24;

/// L/R word of length p indexing one monotone branch of f^p. Words that are
/// rotations of each other describe the same cycle.
struct Itinerary {
    uint32_t bits = 0; // bit k holds symbol w_k (0 = L, 1 = R)
    int length = 0;

    Side at(int k) const { return (bits >> k) & 1u ? Side::R : Side::L; }
    std::string str() const;
    /// MSB-first packing; lexicographic word order == numeric order.
    uint32_t rank() const;
    bool is_rotation_of(const Itinerary& other) const;
};

struct PeriodicOrbit {
    int period = 0;                // primitive period
    std::vector<double> points;    // cycle in dynamical order
    double multiplier = 0.0;       // (f^p)' along the cycle, signed
    double log_abs_multiplier = 0.0;
    Itinerary itinerary;           // word of points[0]
    double residual = 0.0;         // max |f^p(x) - x| over the cycle
};

/// All primitive cycles of period <= max_period, found by certified
/// itinerary pullbacks (each monotone branch of f^p carries at most one
/// fixed point; empty pullbacks are unrealised itineraries).
struct OrbitTable {
    int max_period = 0;
    std::vector<std::vector<PeriodicOrbit>> cycles; // cycles[p-1]

    const std::vector<PeriodicOrbit>& primitive(int p) const { return cycles.at(p - 1); }
    /// Number of fixed points of f^p counted through primitive cycles.
    size_t fixed_point_count(int p) const;
};

/// Size statistics of the 2^depth monotone branch domains of f^depth.
struct BranchScan {
    double largest = 0.0;  // |eta|, length of the biggest monotonicity interval
    uint64_t nonempty = 0; // realised itineraries == monotone laps of f^depth
};

OrbitTable enumerate_orbits(const UnimodalMap& f, int max_period, double tol = 1e-12);
BranchScan scan_branch_domains(const UnimodalMap& f, int depth);

/// Unique preimage of y on the given monotone branch, to 1e-13.
double inverse_branch(const MapDescriptor& m, double t, Side side, double y);

/// Periodic points of period dividing p, grouped into primitive cycles.
std::vector<PeriodicOrbit> find_periodic_points(const MapDescriptor& m, double t, int p,
                                                double tol);

/// Signed product of f_t' along the cycle, accumulated in log magnitude.
double multiplier(const MapDescriptor& m, double t, const PeriodicOrbit& orbit);

/// Predictor-corrector continuation of a cycle in t. Returns the accepted
/// path (starting state included). Steps are halved when Newton struggles,
/// never below 1e-6 in t; a cycle multiplier entering [0, 1.01) aborts with
/// hypothesis_error (near-bifurcation contradicts the repelling hypothesis).
std::vector<std::pair<double, PeriodicOrbit>> continue_orbit(const MapDescriptor& m,
                                                             const PeriodicOrbit& orbit,
                                                             double t_from, double t_to,
                                                             int steps);

} // namespace srb

#endif
