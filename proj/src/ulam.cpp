#include "srb/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srb {

std::vector<double> UlamMatrix::column_sums() const {
    std::vector<double> sums(static_cast<size_t>(bins), 0.0);
    for (int i = 0; i < bins; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) sums[static_cast<size_t>(col[k])] += val[k];
    return sums;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Basis mass of e^{s psi} against the boundary-weighted profile on [lo, hi],
// through the substitution y = sin(phi) that flattens the weight: the
// integrand becomes smooth and the s = 0 case is an exact arc length.
double basis_mass(const UnimodalMap& f, const Observable& psi, double s, double lo,
                  double hi) {
    const double pa = std::asin(lo);
    const double pb = std::asin(hi);
    if (s == 0.0) return pb - pa;
    const double mid = 0.5 * (pa + pb);
    const double half = 0.5 * (pb - pa);
    double acc = 0.0;
    for (int g = 0; g < 8; ++g) {
        const double y = std::sin(mid + half * kGL8Node[g]);
        acc += kGL8Weight[g] * std::exp(s * eval_observable(psi, f, y));
    }
    return acc * half;
}

} // namespace

UlamMatrix build_ulam(const UnimodalMap& f, const Observable& psi, double s, int N) {
    if (!power_of_two(N) || N < 64 || N > 65536)
        throw config_error("Ulam bin count must be a power of two in [64, 65536]");

    UlamMatrix M;
    M.bins = N;
    M.t = f.parameter();
    M.s = s;
    M.row_ptr.assign(static_cast<size_t>(N) + 1, 0);

    const double fc = f.critical_value();
    auto edge = [N](int i) { return 2.0 * i / N - 1.0; };
    const double halfN = 0.5 * N;

    // normalisation of each source bin's weighted profile
    std::vector<double> bin_weight(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j)
        bin_weight[static_cast<size_t>(j)] = std::asin(edge(j + 1)) - std::asin(edge(j));

    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < N; ++i) {
        row.clear();
        const double lo = std::max(edge(i), -1.0);
        const double hi = std::min(edge(i + 1), fc);
        if (hi > lo) {
            for (Side side : {Side::L, Side::R}) {
                const double xa = f.inverse_branch(side, lo);
                const double xb = f.inverse_branch(side, hi);
                const double slo = std::clamp(std::min(xa, xb), -1.0, 1.0);
                const double shi = std::clamp(std::max(xa, xb), -1.0, 1.0);
                int ja = static_cast<int>(std::floor((slo + 1.0) * halfN));
                int jb = static_cast<int>(std::floor((shi + 1.0) * halfN));
                ja = std::clamp(ja, 0, N - 1);
                jb = std::clamp(jb, 0, N - 1);
                for (int j = ja; j <= jb; ++j) {
                    const double seg_lo = std::max(slo, edge(j));
                    const double seg_hi = std::min(shi, edge(j + 1));
                    if (seg_hi <= seg_lo) continue;
                    const double mass = basis_mass(f, psi, s, seg_lo, seg_hi) /
                                        bin_weight[static_cast<size_t>(j)];
                    if (mass != 0.0) row.emplace_back(j, mass);
                }
            }
        }
        std::sort(row.begin(), row.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        for (size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k].first == row[k - 1].first) {
                M.val.back() += row[k].second;
            } else {
                M.col.push_back(row[k].first);
                M.val.push_back(row[k].second);
            }
        }
        M.row_ptr[static_cast<size_t>(i) + 1] = static_cast<int>(M.col.size());
    }

    if (s == 0.0) {
        const std::vector<double> sums = M.column_sums();
        for (int j = 0; j < N; ++j)
            if (std::abs(sums[static_cast<size_t>(j)] - 1.0) > 1e-10)
                throw numerical_error("Ulam column " + std::to_string(j) +
                                      " violates mass conservation: sum = " +
                                      std::to_string(sums[static_cast<size_t>(j)]));
    }
    for (double v : M.val)
        if (v < 0.0) throw numerical_error("negative Ulam entry");
    return M;
}

UlamMatrix build_ulam(const MapDescriptor& m, double t, const Observable& psi, double s,
                      int N) {
    return build_ulam(m.at(t), psi, s, N);
}

EigenPair leading_eigenpair(const UlamMatrix& M) {
    const int N = M.bins;
    std::vector<double> v(static_cast<size_t>(N), 1.0 / N);
    std::vector<double> u(static_cast<size_t>(N), 0.0);
    double lambda = 0.0, lambda_prev = -1.0;
    int it = 0;
    const int max_iter = 100000;
    for (it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < N; ++i) {
            KahanSum sum;
            for (int k = M.row_ptr[i]; k < M.row_ptr[i + 1]; ++k)
                sum.add(M.val[k] * v[static_cast<size_t>(M.col[k])]);
            u[static_cast<size_t>(i)] = sum.value();
        }
        KahanSum total;
        for (double x : u) total.add(x);
        lambda = total.value();
        if (!(lambda > 0.0)) throw numerical_error("power iteration lost positivity");
        // the eigenvalue estimate alone is blind at s = 0 (mass is conserved
        // exactly), so the normalised iterate must settle as well
        double vector_gap = 0.0;
        for (int i = 0; i < N; ++i) {
            const double next = u[static_cast<size_t>(i)] / lambda;
            vector_gap += std::abs(next - v[static_cast<size_t>(i)]);
            v[static_cast<size_t>(i)] = next;
        }
        if (it > 1 && std::abs(lambda - lambda_prev) < 1e-12 && vector_gap < 1e-12) break;
        lambda_prev = lambda;
    }
    if (it > max_iter)
        throw numerical_error("power iteration did not converge; last gap = " +
                              std::to_string(std::abs(lambda - lambda_prev)));

    EigenPair pair;
    pair.lambda = lambda;
    pair.iterations = it;
    pair.density.bins = N;
    pair.density.t = M.t;
    pair.density.s = M.s;
    pair.density.value.resize(static_cast<size_t>(N));
    KahanSum mass;
    for (double x : v) mass.add(x);
    const double scale = 0.5 * N / mass.value();
    for (int i = 0; i < N; ++i) pair.density.value[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] * scale;
    return pair;
}

double integrate_density(const DensityEstimate& v, const Observable& psi,
                         const UnimodalMap& f) {
    const double dx = v.bin_width();
    KahanSum sum;
    for (int i = 0; i < v.bins; ++i)
        sum.add(eval_observable(psi, f, v.center(i)) * v.value[static_cast<size_t>(i)] * dx);
    return sum.value();
}

double integrate_density(const DensityEstimate& v, const Observable& psi,
                         const MapDescriptor& m) {
    return integrate_density(v, psi, m.at(v.t));
}

} // namespace srb
