#ifndef SRB_ULAM_HPP
#define SRB_ULAM_HPP

#include <vector>

#include "srb/unimodal.hpp"

namespace srb {

/// Finite-rank discretisation of the weighted transfer operator on a uniform
/// partition of [-1,1]. Column j is the source bin: entry (i,j) carries the
/// share of bin j's normalised basis mass transported into bin i under the
/// weight e^{s psi(y)} / |f_t'(y)|. The basis element of a bin is its
/// indicator weighted by the boundary profile 1/sqrt(1-y^2): invariant
/// densities of boundary-anchored full families carry inverse-square-root
/// singularities at the endpoints, and a flat in-bin profile misplaces a
/// sqrt(1/N) share of their mass there. At s = 0 the matrix is
/// column-stochastic to rounding.
struct UlamMatrix {
    int bins = 0;
    double t = 0.0;
    double s = 0.0;
    // CSR by destination row
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    size_t nonzeros() const { return val.size(); }
    std::vector<double> column_sums() const;
};

/// Bin-averaged invariant density; integrates to 1 under the bin measure.
struct DensityEstimate {
    int bins = 0;
    double t = 0.0;
    double s = 0.0;
    std::vector<double> value;

    double bin_width() const { return 2.0 / bins; }
    double center(int i) const { return -1.0 + (2.0 * i + 1.0) / bins; }
};

struct EigenPair {
    double lambda = 0.0;
    DensityEstimate density;
    int iterations = 0;
};

/// Assembles the matrix by exact inverse-branch interval intersections;
/// each intersection segment is weighted by an 8-point Gauss-Legendre
/// integral of e^{s psi} in source coordinates. N must be a power of two in
/// [64, 65536]. The s = 0 column sums are verified to 1e-10.
UlamMatrix build_ulam(const UnimodalMap& f, const Observable& psi, double s, int N);
UlamMatrix build_ulam(const MapDescriptor& m, double t, const Observable& psi, double s,
                      int N);

/// Power iteration with mass normalisation; converges when successive
/// eigenvalue estimates differ by less than 1e-12 (at most 1e5 iterations).
EigenPair leading_eigenpair(const UlamMatrix& M);

/// Midpoint quadrature of the observable against the bin density.
double integrate_density(const DensityEstimate& v, const Observable& psi,
                         const UnimodalMap& f);
double integrate_density(const DensityEstimate& v, const Observable& psi,
                         const MapDescriptor& m);

} // namespace srb

#endif
