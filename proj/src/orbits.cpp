#include "srb/orbits.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>

namespace srb {

std::string Itinerary::str() const {
    std::string s(static_cast<size_t>(length), 'L');
    for (int k = 0; k < length; ++k)
        if ((bits >> k) & 1u) s[static_cast<size_t>(k)] = 'R';
    return s;
}

uint32_t Itinerary::rank() const {
    uint32_t r = 0;
    for (int k = 0; k < length; ++k) r = (r << 1) | ((bits >> k) & 1u);
    return r;
}

bool Itinerary::is_rotation_of(const Itinerary& other) const {
    if (length != other.length) return false;
    const uint32_t mask = (length >= 32) ? ~0u : ((1u << length) - 1u);
    for (int r = 0; r < length; ++r) {
        const uint32_t rot = ((bits >> r) | (bits << (length - r))) & mask;
        if (rot == other.bits) return true;
    }
    return false;
}

size_t OrbitTable::fixed_point_count(int p) const {
    size_t n = 0;
    for (int q = 1; q <= p; ++q)
        if (p % q == 0) n += static_cast<size_t>(q) * primitive(q).size();
    return n;
}

namespace {

// f^k(x) together with (f^k)'(x). Rounding in the iterate is amplified by the
// largest intermediate derivative product (orbits hugging the boundary see
// much more than the final multiplier), so that scale is reported too.
void eval_power(const UnimodalMap& f, int k, double x, double& g, double& dg,
                double* noise_scale = nullptr) {
    double v = x, prod = 1.0, min_prefix = 1.0;
    for (int i = 0; i < k; ++i) {
        double fv, fd;
        f.value_deriv(v, fv, fd);
        v = fv;
        prod *= fd;
        if (noise_scale) min_prefix = std::min(min_prefix, std::abs(prod));
    }
    g = v;
    dg = prod;
    // worst suffix amplification: rounding committed where the running
    // product dips is blown back up by the remaining factors
    if (noise_scale) *noise_scale = std::abs(prod) / std::max(min_prefix, 1e-300) + 1.0;
}

double eval_power_value(const UnimodalMap& f, int k, double x) {
    double v = x;
    for (int i = 0; i < k; ++i) v = f.value(v);
    return v;
}

// Word w of length k is a repetition of a shorter word; its fixed point has a
// lower primitive period and was found at that level already.
bool word_is_periodic(uint32_t bits, int k) {
    for (int q = 1; q < k; ++q) {
        if (k % q != 0) continue;
        const uint32_t mask = (1u << (k - q)) - 1u;
        if (((bits ^ (bits >> q)) & mask) == 0u) return true;
    }
    return false;
}

struct PointHit {
    double x;
    float residual;
    uint32_t word;
};

// Extended-precision Newton polish: the double-precision residual of f^k at a
// root is limited by rounding amplified along the orbit, not by the point
// accuracy, so the final residual is measured in long double.
void polish_fixed_point(const UnimodalMap& f, int k, double lo, double hi, double& root,
                        double& residual) {
    long double x = root;
    long double res = residual;
    for (int it = 0; it < 4; ++it) {
        long double v = x, prod = 1.0L;
        for (int i = 0; i < k; ++i) {
            long double fv, fd;
            f.value_deriv_ld(v, fv, fd);
            v = fv;
            prod *= fd;
        }
        const long double g = v - x;
        res = g < 0.0L ? -g : g;
        const long double dg = prod - 1.0L;
        if (res == 0.0L || dg == 0.0L) break;
        const long double xn = x - g / dg;
        if (!(xn > lo && xn < hi) || xn == x) break;
        x = xn;
    }
    root = static_cast<double>(x);
    residual = static_cast<double>(res);
}

// Bracketed Newton for f^k(x) = x on a monotone branch domain.
// Returns true when a root was accepted.
bool solve_fixed_point(const UnimodalMap& f, int k, double a, double b, double ga,
                       double gb, double tol, uint32_t bits, double& root,
                       double& residual) {
    if ((ga > 0.0) == (gb > 0.0)) return false;
    double lo = a, hi = b, flo = ga;
    double x = 0.5 * (a + b);
    int calm = 0;
    double g = 0.0;
    for (int it = 0; it < 96; ++it) {
        double v, prod, scale;
        eval_power(f, k, x, v, prod, &scale);
        g = v - x;
        const double floor = 4.0 * DBL_EPSILON * scale;
        if (std::abs(g) <= std::max(tol, floor)) {
            root = x;
            residual = std::abs(g);
            polish_fixed_point(f, k, a, b, root, residual);
            return true;
        }
        if ((g > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = g;
        } else {
            hi = x;
        }
        const double dg = prod - 1.0;
        double xn = (std::abs(dg) > 1e-12) ? x - g / dg : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 4.0 * DBL_EPSILON * (1.0 + std::abs(x))) {
            if (++calm >= 2) {
                root = xn;
                residual = std::abs(g);
                polish_fixed_point(f, k, a, b, root, residual);
                return true;
            }
        } else {
            calm = 0;
        }
        x = xn;
    }
    throw numerical_error("periodic point refinement did not converge on branch " +
                          Itinerary{bits, k}.str());
}

// A genuine fixed point of f^k inside branch w carries itinerary w. Interior
// branch endpoints are precritical, so deep-level endpoint arithmetic is
// noise-dominated; validating the itinerary filters any phantom bracket.
bool itinerary_matches(const UnimodalMap& f, int k, double x, uint32_t bits) {
    const double c = f.critical_point();
    double v = x;
    for (int j = 0; j < k; ++j) {
        const bool right = v >= c;
        if (right != (((bits >> j) & 1u) != 0u)) return false;
        v = f.value(v);
    }
    return true;
}

// Fixed points of f^k inside one branch domain. The only admissible endpoint
// root is the boundary fixed point -1 (the all-L word); after recording it
// the interior is still probed so a second crossing cannot hide.
void roots_in_branch(const UnimodalMap& f, int k, double a, double b, double tol,
                     uint32_t bits, std::vector<PointHit>& out) {
    if (!(b > a)) return;
    double ga = eval_power_value(f, k, a) - a;
    const double gb = eval_power_value(f, k, b) - b;
    double root, res;
    if (a == -1.0 && std::abs(ga) <= std::max(tol, 1e-11)) {
        out.push_back({a, static_cast<float>(std::abs(ga)), bits});
        a += std::max(1e-9 * (b - a), 4.0 * DBL_EPSILON);
        ga = eval_power_value(f, k, a) - a;
    }
    if (solve_fixed_point(f, k, a, b, ga, gb, tol, bits, root, res) &&
        itinerary_matches(f, k, root, bits))
        out.push_back({root, static_cast<float>(res), bits});
}

struct Node {
    double a, b;
    uint32_t bits;
    int depth;
};

// Children prepend a symbol: domain(s.w) = I_s intersected with the branch
// pullback of domain(w) clipped to the branch image [-1, f(c)].
bool pull_back(const UnimodalMap& f, Side s, double lo, double hi, double& a, double& b) {
    const double fc = f.critical_value();
    lo = std::max(lo, -1.0);
    hi = std::min(hi, fc);
    if (!(hi > lo)) return false;
    const double xa = f.inverse_branch(s, lo);
    const double xb = f.inverse_branch(s, hi);
    a = std::min(xa, xb);
    b = std::max(xa, xb);
    return b > a;
}

// One DFS pass; parallelised over subtrees hanging below split_depth.
// Per-level results are merged by sorting, so the thread count and the visit
// order never influence the output.
void run_walk(const UnimodalMap& f, int max_depth, double tol, bool solve,
              std::vector<std::vector<PointHit>>* hits, std::vector<double>* largest,
              std::vector<uint64_t>* nonempty) {
    const int split_depth = std::min(max_depth, 6);
    std::vector<Node> frontier;
    {
        std::vector<Node> stack;
        stack.push_back({-1.0, 1.0, 0u, 0});
        while (!stack.empty()) {
            const Node n = stack.back();
            stack.pop_back();
            if (n.depth >= 1) {
                if (nonempty) (*nonempty)[n.depth - 1] += 1;
                if (largest) {
                    double& rec = (*largest)[n.depth - 1];
                    rec = std::max(rec, n.b - n.a);
                }
                if (solve && !word_is_periodic(n.bits, n.depth))
                    roots_in_branch(f, n.depth, n.a, n.b, tol, n.bits,
                                    (*hits)[n.depth - 1]);
            }
            if (n.depth == split_depth) {
                if (n.depth < max_depth) frontier.push_back(n);
                continue;
            }
            double a, b;
            if (pull_back(f, Side::R, n.a, n.b, a, b))
                stack.push_back({a, b, (n.bits << 1) | 1u, n.depth + 1});
            if (pull_back(f, Side::L, n.a, n.b, a, b))
                stack.push_back({a, b, n.bits << 1, n.depth + 1});
        }
    }
    if (frontier.empty()) return;

    struct TaskOut {
        std::vector<std::vector<PointHit>> hits;
        std::vector<double> largest;
        std::vector<uint64_t> nonempty;
    };
    std::vector<TaskOut> outs(frontier.size());
    parallel_for(frontier.size(), [&](size_t i) {
        TaskOut& o = outs[i];
        o.largest.assign(static_cast<size_t>(max_depth), 0.0);
        o.nonempty.assign(static_cast<size_t>(max_depth), 0);
        if (solve) o.hits.resize(static_cast<size_t>(max_depth));
        Node n = frontier[i];
        // Descend from the frontier node without re-reporting it.
        std::vector<Node> stack;
        double a, b;
        if (pull_back(f, Side::R, n.a, n.b, a, b))
            stack.push_back({a, b, (n.bits << 1) | 1u, n.depth + 1});
        if (pull_back(f, Side::L, n.a, n.b, a, b))
            stack.push_back({a, b, n.bits << 1, n.depth + 1});
        while (!stack.empty()) {
            const Node m = stack.back();
            stack.pop_back();
            o.nonempty[m.depth - 1] += 1;
            double& rec = o.largest[m.depth - 1];
            rec = std::max(rec, m.b - m.a);
            if (solve && !word_is_periodic(m.bits, m.depth))
                roots_in_branch(f, m.depth, m.a, m.b, tol, m.bits, o.hits[m.depth - 1]);
            if (m.depth == max_depth) continue;
            if (pull_back(f, Side::R, m.a, m.b, a, b))
                stack.push_back({a, b, (m.bits << 1) | 1u, m.depth + 1});
            if (pull_back(f, Side::L, m.a, m.b, a, b))
                stack.push_back({a, b, m.bits << 1, m.depth + 1});
        }
    });
    for (const TaskOut& o : outs) {
        for (int k = 0; k < max_depth; ++k) {
            if (nonempty) (*nonempty)[k] += o.nonempty[k];
            if (largest) (*largest)[k] = std::max((*largest)[k], o.largest[k]);
            if (solve)
                (*hits)[k].insert((*hits)[k].end(), o.hits[k].begin(), o.hits[k].end());
        }
    }
}

uint32_t rotate_left(uint32_t bits, int r, int k) {
    if (r == 0) return bits;
    const uint32_t mask = (k >= 32) ? ~0u : ((1u << k) - 1u);
    return ((bits >> r) | (bits << (k - r))) & mask;
}

// The image of a point with branch word w has word rotate_left(w), so cycles
// are exactly the rotation classes of the solved words. Grouping by word
// algebra stays exact where boundary-adjacent periodic points collide below
// double resolution; members whose branch collapsed there are filled by
// forward iteration of their cycle mates.
std::vector<PeriodicOrbit> group_level(const UnimodalMap& f, int k,
                                       std::vector<PointHit>& hits) {
    std::vector<PeriodicOrbit> cycles;
    if (hits.empty()) return cycles;
    std::sort(hits.begin(), hits.end(),
              [](const PointHit& l, const PointHit& r) { return l.x < r.x; });
    hits.erase(std::unique(hits.begin(), hits.end(),
                           [](const PointHit& l, const PointHit& r) {
                               return l.word == r.word && std::abs(l.x - r.x) < 1e-9;
                           }),
               hits.end());

    // canonical word of the class -> hit index per rotation offset
    std::map<uint32_t, std::vector<int>> classes;
    for (size_t i = 0; i < hits.size(); ++i) {
        uint32_t canon = hits[i].word;
        uint32_t canon_rank = Itinerary{canon, k}.rank();
        for (int r = 1; r < k; ++r) {
            const uint32_t rot = rotate_left(hits[i].word, r, k);
            const uint32_t rank = Itinerary{rot, k}.rank();
            if (rank < canon_rank) {
                canon = rot;
                canon_rank = rank;
            }
        }
        auto [it, inserted] = classes.try_emplace(canon);
        if (inserted) it->second.assign(static_cast<size_t>(k), -1);
        int offset = 0;
        while (rotate_left(canon, offset, k) != hits[i].word) ++offset;
        if (it->second[static_cast<size_t>(offset)] >= 0)
            throw numerical_error("duplicate periodic point for one branch word at period " +
                                  std::to_string(k));
        it->second[static_cast<size_t>(offset)] = static_cast<int>(i);
    }

    for (const auto& [canon, slots] : classes) {
        int start = -1;
        for (int j = 0; j < k; ++j)
            if (slots[static_cast<size_t>(j)] >= 0) {
                start = j;
                break;
            }
        std::vector<double> pts(static_cast<size_t>(k), 0.0);
        float res = 0.0f;
        double cur = hits[static_cast<size_t>(slots[static_cast<size_t>(start)])].x;
        pts[static_cast<size_t>(start)] = cur;
        res = hits[static_cast<size_t>(slots[static_cast<size_t>(start)])].residual;
        for (int i = 1; i <= k; ++i) {
            const int idx = (start + i) % k;
            const double y = f.value(cur);
            if (i == k) {
                if (std::abs(y - pts[static_cast<size_t>(start)]) > 1e-8)
                    throw numerical_error("periodic orbit failed to close at period " +
                                          std::to_string(k) + " (word " +
                                          Itinerary{canon, k}.str() + ")");
                break;
            }
            const int slot = slots[static_cast<size_t>(idx)];
            if (slot >= 0) {
                cur = hits[static_cast<size_t>(slot)].x;
                if (std::abs(cur - y) > 1e-8)
                    throw numerical_error("periodic orbit mates disagree at period " +
                                          std::to_string(k) + " (word " +
                                          Itinerary{canon, k}.str() + ")");
                res = std::max(res, hits[static_cast<size_t>(slot)].residual);
            } else {
                cur = std::clamp(y, -1.0, 1.0);
            }
            pts[static_cast<size_t>(idx)] = cur;
        }

        PeriodicOrbit orbit;
        orbit.period = k;
        orbit.points = std::move(pts);
        KahanSum logsum;
        double sign = 1.0;
        for (double x : orbit.points) {
            const double d = f.deriv(x);
            if (d == 0.0)
                throw hypothesis_error("zero derivative on a periodic orbit (period " +
                                       std::to_string(k) + ")");
            if (d < 0.0) sign = -sign;
            logsum.add(std::log(std::abs(d)));
        }
        orbit.log_abs_multiplier = logsum.value();
        orbit.multiplier = sign * std::exp(logsum.value());
        orbit.itinerary = Itinerary{canon, k};
        orbit.residual = static_cast<double>(res);
        cycles.push_back(std::move(orbit));
    }
    std::sort(cycles.begin(), cycles.end(), [](const PeriodicOrbit& l, const PeriodicOrbit& r) {
        return l.points[0] < r.points[0];
    });
    return cycles;
}

} // namespace

OrbitTable enumerate_orbits(const UnimodalMap& f, int max_period, double tol) {
    if (max_period < 1 || max_period > kPeriodCap)
        throw config_error("period must be between 1 and " + std::to_string(kPeriodCap));
    if (tol < 1e-12) throw config_error("orbit tolerance must be >= 1e-12");
    std::vector<std::vector<PointHit>> hits(static_cast<size_t>(max_period));
    run_walk(f, max_period, tol, true, &hits, nullptr, nullptr);
    OrbitTable table;
    table.max_period = max_period;
    table.cycles.resize(static_cast<size_t>(max_period));
    for (int k = 1; k <= max_period; ++k)
        table.cycles[k - 1] = group_level(f, k, hits[k - 1]);
    return table;
}

BranchScan scan_branch_domains(const UnimodalMap& f, int depth) {
    if (depth < 1 || depth > kBranchDepthCap)
        throw config_error("branch depth must be between 1 and " +
                           std::to_string(kBranchDepthCap));
    std::vector<double> largest(static_cast<size_t>(depth), 0.0);
    std::vector<uint64_t> nonempty(static_cast<size_t>(depth), 0);
    run_walk(f, depth, 1e-12, false, nullptr, &largest, &nonempty);
    return BranchScan{largest.back(), nonempty.back()};
}

double inverse_branch(const MapDescriptor& m, double t, Side side, double y) {
    return m.at(t).inverse_branch(side, y);
}

std::vector<PeriodicOrbit> find_periodic_points(const MapDescriptor& m, double t, int p,
                                                double tol) {
    const OrbitTable table = enumerate_orbits(m.at(t), p, tol);
    std::vector<PeriodicOrbit> out;
    for (int q = 1; q <= p; ++q) {
        if (p % q != 0) continue;
        for (const PeriodicOrbit& orbit : table.primitive(q)) out.push_back(orbit);
    }
    return out;
}

double multiplier(const MapDescriptor& m, double t, const PeriodicOrbit& orbit) {
    const UnimodalMap f = m.at(t);
    KahanSum logsum;
    double sign = 1.0;
    for (double x : orbit.points) {
        const double d = f.deriv(x);
        if (d == 0.0)
            throw hypothesis_error("zero derivative at an orbit point contradicts the "
                                   "repelling hypothesis");
        if (d < 0.0) sign = -sign;
        logsum.add(std::log(std::abs(d)));
    }
    return sign * std::exp(logsum.value());
}

namespace {

// Newton correction of every cycle point at fixed t; all points must settle
// with residual <= 1e-10.
bool correct_cycle(const UnimodalMap& f, int p, std::vector<double>& pts,
                   int& worst_iters) {
    worst_iters = 0;
    for (double& x : pts) {
        double xi = std::clamp(x, -1.0, 1.0);
        bool ok = false;
        for (int it = 1; it <= 24; ++it) {
            double v, prod, scale;
            eval_power(f, p, xi, v, prod, &scale);
            const double g = v - xi;
            if (std::abs(g) <= 1e-12 || std::abs(g) <= 8.0 * DBL_EPSILON * scale) {
                worst_iters = std::max(worst_iters, it);
                ok = true;
                break;
            }
            const double dg = prod - 1.0;
            if (std::abs(dg) < 1e-9) return false;
            xi = std::clamp(xi - g / dg, -1.0, 1.0);
        }
        if (!ok) return false;
        x = xi;
    }
    return true;
}

double cycle_residual(const UnimodalMap& f, int p, const std::vector<double>& pts) {
    double worst = 0.0;
    for (double x : pts) worst = std::max(worst, std::abs(eval_power_value(f, p, x) - x));
    return worst;
}

PeriodicOrbit rebuild_orbit(const UnimodalMap& f, int p, const std::vector<double>& pts,
                            double residual) {
    PeriodicOrbit orbit;
    orbit.period = p;
    orbit.points = pts;
    orbit.residual = residual;
    KahanSum logsum;
    double sign = 1.0;
    uint32_t bits = 0;
    for (int s = 0; s < p; ++s) {
        const double d = f.deriv(pts[static_cast<size_t>(s)]);
        if (d < 0.0) sign = -sign;
        logsum.add(std::log(std::abs(d)));
        if (pts[static_cast<size_t>(s)] >= f.critical_point()) bits |= (1u << s);
    }
    orbit.log_abs_multiplier = logsum.value();
    orbit.multiplier = sign * std::exp(logsum.value());
    orbit.itinerary = Itinerary{bits, p};
    return orbit;
}

} // namespace

std::vector<std::pair<double, PeriodicOrbit>> continue_orbit(const MapDescriptor& m,
                                                             const PeriodicOrbit& orbit,
                                                             double t_from, double t_to,
                                                             int steps) {
    if (steps < 1) throw config_error("continue_orbit: steps must be >= 1");
    m.window().require(t_from);
    m.window().require(t_to);
    const int p = orbit.period;
    {
        const UnimodalMap f0 = m.at(t_from);
        if (cycle_residual(f0, p, orbit.points) > 1e-8)
            throw config_error("continue_orbit: orbit is not valid at t_from");
    }

    std::vector<std::pair<double, PeriodicOrbit>> path;
    path.emplace_back(t_from, orbit);
    if (t_to == t_from) return path;

    const double span = t_to - t_from;
    double h = span / steps;
    double t = t_from;
    std::vector<double> pts = orbit.points;
    std::vector<double> prev_pts = pts;
    double prev_h = 0.0;

    while ((span > 0.0) ? (t < t_to - 1e-15) : (t > t_to + 1e-15)) {
        double t_next = t + h;
        if ((span > 0.0) ? (t_next > t_to) : (t_next < t_to)) t_next = t_to;

        std::vector<double> trial(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
            double guess = pts[i];
            if (prev_h != 0.0)
                guess += (pts[i] - prev_pts[i]) / prev_h * (t_next - t);
            trial[i] = std::clamp(guess, -1.0, 1.0);
        }
        const UnimodalMap f = m.at(t_next);
        int iters = 0;
        const bool converged = correct_cycle(f, p, trial, iters);
        if (!converged || iters > 5) {
            const double h_new = 0.5 * h;
            if (std::abs(h_new) < 1e-6) {
                if (!converged)
                    throw numerical_error("orbit continuation stalled near t = " +
                                          std::to_string(t_next));
            } else {
                h = h_new;
                continue;
            }
        }
        const double res = cycle_residual(f, p, trial);
        if (res > 1e-10)
            throw numerical_error("orbit continuation residual too large at t = " +
                                  std::to_string(t_next));
        PeriodicOrbit cur = rebuild_orbit(f, p, trial, res);
        if (std::abs(cur.multiplier) < 1.01)
            throw hypothesis_error(
                "orbit multiplier approaches 1 near t = " + std::to_string(t_next) +
                " (near-bifurcation); last good t = " + std::to_string(t));
        prev_pts = pts;
        prev_h = t_next - t;
        pts = trial;
        t = t_next;
        path.emplace_back(t, std::move(cur));
    }
    return path;
}

} // namespace srb
