#include "esrline/magnetoqs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace esrline {
namespace magnetoqs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGeomTol = 1e-13;

int other_u(int axis) { return (axis + 1) % 3; }
int other_v(int axis) { return (axis + 2) % 3; }

// log((w + r) / rho) evaluated stably: for w < 0 the numerator cancels
// catastrophically (r -> |w| as rho -> 0), so use the identity
// (w + r) * (r - w) = rho^2  =>  (w + r)/rho = rho/(r - w).
double log_ratio(double w, double rho, double r) {
    return w >= 0 ? std::log((w + r) / rho) : std::log(rho / (r - w));
}

// Sixth-order antiderivative of 1/r used by the exact parallel-bar Neumann
// integral (corner-difference evaluation). Coordinates are pre-scaled to
// order one; the small-term guards below are absolute.
double bar_kernel_f(double x, double y, double z) {
    const double eps = 1e-14;
    const double x2 = x * x, y2 = y * y, z2 = z * z;
    const double r = std::sqrt(x2 + y2 + z2);
    if (r < eps) return 0.0;
    double f = 0.0;

    const double ryz = std::sqrt(y2 + z2);
    if (ryz > eps)
        f += (y2 * z2 / 4 - y2 * y2 / 24 - z2 * z2 / 24) * x * log_ratio(x, ryz, r);
    const double rxz = std::sqrt(x2 + z2);
    if (rxz > eps)
        f += (x2 * z2 / 4 - x2 * x2 / 24 - z2 * z2 / 24) * y * log_ratio(y, rxz, r);
    const double rxy = std::sqrt(x2 + y2);
    if (rxy > eps)
        f += (x2 * y2 / 4 - x2 * x2 / 24 - y2 * y2 / 24) * z * log_ratio(z, rxy, r);

    f += r * (x2 * x2 + y2 * y2 + z2 * z2 - 3 * (x2 * y2 + y2 * z2 + x2 * z2)) / 60.0;

    if (std::fabs(z) > eps) f -= (x * y * z2 * z / 6) * std::atan(x * y / (z * r));
    if (std::fabs(y) > eps) f -= (x * y2 * y * z / 6) * std::atan(x * z / (y * r));
    if (std::fabs(x) > eps) f -= (x2 * x * y * z / 6) * std::atan(y * z / (x * r));
    return f;
}

struct QuadDiff {
    double pt[4];
    double sgn[4];
};

// Double-integration corner combination for an interval pair of widths
// (a, d) at offset E:  H(E+d) - H(E+d-a) - H(E) + H(E-a).
QuadDiff quad_diff(double E, double a, double d) {
    return {{E + d, E + d - a, E, E - a}, {1.0, -1.0, -1.0, 1.0}};
}

// Exact Neumann integral between two parallel rectangular bars with current
// along `axis`. Inputs are the two bounding boxes.
double parallel_bar_inductance(const Box& A, const Box& B, int axis) {
    const int u = other_u(axis), v = other_v(axis);
    // Relative offsets only; then scale to order-one magnitudes. The integral
    // is homogeneous of degree 1 after the 1/(a b c d) normalization.
    double E = B.lo(u) - A.lo(u);
    double P = B.lo(v) - A.lo(v);
    double l3 = B.lo(axis) - A.lo(axis);
    double scale = std::max({A.extent(0), A.extent(1), A.extent(2), B.extent(0),
                             B.extent(1), B.extent(2), std::fabs(E), std::fabs(P),
                             std::fabs(l3)});
    if (scale == 0.0) return 0.0;
    const double inv = 1.0 / scale;

    const double a = A.extent(u) * inv, d = B.extent(u) * inv;
    const double b = A.extent(v) * inv, c = B.extent(v) * inv;
    const double l1 = A.extent(axis) * inv, l2 = B.extent(axis) * inv;
    E *= inv;
    P *= inv;
    l3 *= inv;

    const QuadDiff qx = quad_diff(E, a, d);
    const QuadDiff qy = quad_diff(P, b, c);
    const QuadDiff qz = quad_diff(l3, l1, l2);

    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                sum += qx.sgn[i] * qy.sgn[j] * qz.sgn[k] *
                       bar_kernel_f(qx.pt[i], qy.pt[j], qz.pt[k]);

    return kMu0 / (4 * kPi) * sum / (a * b * c * d) * scale;
}

// Thin-filament mutual inductance between two parallel centroid lines.
double parallel_line_inductance(const Box& A, const Box& B, int axis) {
    const int u = other_u(axis), v = other_v(axis);
    const double du = (B.lo(u) + B.hi(u) - A.lo(u) - A.hi(u)) / 2;
    const double dv = (B.lo(v) + B.hi(v) - A.lo(v) - A.hi(v)) / 2;
    const double rho = std::hypot(du, dv);
    const double s0 = A.lo(axis), s1 = A.hi(axis);
    const double t0 = B.lo(axis), t1 = B.hi(axis);
    auto H = [&](double w) {
        if (rho > 0)
            return w * std::asinh(w / rho) - std::sqrt(w * w + rho * rho);
        // Colinear non-overlapping limit.
        double aw = std::fabs(w);
        return aw > 0 ? aw * std::log(aw) - aw : 0.0;
    };
    double val = H(t1 - s0) - H(t1 - s1) - H(t0 - s0) + H(t0 - s1);
    return kMu0 / (4 * kPi) * val;
}

} // namespace

int Filament::axis() const {
    Vec3 d = end - start;
    double ax = std::fabs(d.x), ay = std::fabs(d.y), az = std::fabs(d.z);
    if (ax >= ay && ax >= az) return 0;
    return ay >= az ? 1 : 2;
}

Box Filament::bounding_box() const {
    const int k = axis();
    const int u = other_u(k), v = other_v(k);
    double lo[3], hi[3];
    lo[k] = std::min(start[k], end[k]);
    hi[k] = std::max(start[k], end[k]);
    Vec3 c = (start + end) / 2;
    lo[u] = c[u] - width / 2;
    hi[u] = c[u] + width / 2;
    lo[v] = c[v] - height / 2;
    hi[v] = c[v] + height / 2;
    return {lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]};
}

double partial_inductance(const Filament& a, const Filament& b) {
    const int ka = a.axis(), kb = b.axis();
    if (ka != kb) return 0.0; // orthogonal current directions

    const Box A = a.bounding_box(), B = b.bounding_box();
    const double sign = a.direction().dot(b.direction()) >= 0 ? 1.0 : -1.0;

    const bool same = A.overlap_volume(B) > 0.999 * std::min(A.volume(), B.volume()) &&
                      std::fabs(A.volume() - B.volume()) < 1e-9 * A.volume();
    if (!same && A.overlap_volume(B) > 1e-9 * std::min(A.volume(), B.volume()))
        throw OverlappingDistinctFilaments("distinct filaments share volume");

    // Far pairs: thin-filament kernel avoids the corner-difference
    // cancellation; near pairs (and the self term) use the exact bar formula.
    double maxdim = 0;
    for (int d = 0; d < 3; ++d)
        maxdim = std::max({maxdim, A.extent(d), B.extent(d)});
    const double dist = (A.center() - B.center()).norm();
    if (dist > 50.0 * maxdim) return sign * parallel_line_inductance(A, B, ka);
    return sign * parallel_bar_inductance(A, B, ka);
}

FilamentMesh discretize_filaments(const Scene& scene, Subdivision subdivision,
                                  int segments_per_length) {
    if (subdivision.nx < 1 || subdivision.ny < 1 || segments_per_length < 1)
        throw ValidationError("subdivision counts must be >= 1");
    const auto& bricks = scene.conductors();
    if (scene.ports().empty()) throw NoPortNets("scene has no ports");

    // Port-connected, non-floating bricks.
    std::vector<int> included(bricks.size(), 0);
    std::vector<std::size_t> frontier;
    for (const auto& p : scene.ports()) {
        for (const auto& net : {p.positive_net, p.negative_net})
            for (auto i : scene.bricks_on_net(net))
                if (!included[i]) included[i] = 1, frontier.push_back(i);
    }
    if (frontier.empty()) throw NoPortNets("no bricks on any port net");
    while (!frontier.empty()) {
        std::size_t i = frontier.back();
        frontier.pop_back();
        for (std::size_t j = 0; j < bricks.size(); ++j) {
            if (included[j] || bricks[j].floating()) continue;
            if (bricks[i].extents.touches(bricks[j].extents, kGeomTol))
                included[j] = 1, frontier.push_back(j);
        }
    }

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < bricks.size(); ++i)
        if (included[i]) active.push_back(i);

    // Axis per brick: longest extent carries the current.
    std::vector<int> axis(bricks.size(), 0);
    for (auto i : active) {
        const Box& e = bricks[i].extents;
        axis[i] = 0;
        if (e.extent(1) >= e.extent(0) && e.extent(1) >= e.extent(2)) axis[i] = 1;
        else if (e.extent(2) >= e.extent(0) && e.extent(2) >= e.extent(1)) axis[i] = 2;
    }

    // Cut coordinates: brick ends plus every contact center projection, so
    // contact planes coincide with node planes exactly.
    std::vector<std::vector<double>> cuts(bricks.size());
    for (auto i : active) {
        cuts[i] = {bricks[i].extents.lo(axis[i]), bricks[i].extents.hi(axis[i])};
    }
    struct Contact {
        std::size_t a, b;
        Vec3 center;
    };
    std::vector<Contact> contacts;
    for (std::size_t ii = 0; ii < active.size(); ++ii) {
        for (std::size_t jj = ii + 1; jj < active.size(); ++jj) {
            std::size_t i = active[ii], j = active[jj];
            if (!bricks[i].extents.touches(bricks[j].extents, kGeomTol)) continue;
            Vec3 c = bricks[i].extents.contact_center(bricks[j].extents);
            contacts.push_back({i, j, c});
            cuts[i].push_back(std::clamp(c[axis[i]], bricks[i].extents.lo(axis[i]),
                                         bricks[i].extents.hi(axis[i])));
            cuts[j].push_back(std::clamp(c[axis[j]], bricks[j].extents.lo(axis[j]),
                                         bricks[j].extents.hi(axis[j])));
        }
    }
    // Port attach coordinates.
    for (const auto& p : scene.ports()) {
        auto add_cut = [&](const std::string& net, const std::optional<Vec3>& loc) {
            if (!loc) return;
            for (auto i : scene.bricks_on_net(net)) {
                if (!included[i]) continue;
                cuts[i].push_back(std::clamp((*loc)[axis[i]], bricks[i].extents.lo(axis[i]),
                                             bricks[i].extents.hi(axis[i])));
            }
        };
        add_cut(p.positive_net, p.positive_location);
        add_cut(p.negative_net, p.negative_location);
    }

    // Node planes: deduplicated cuts, each interval subdivided.
    std::vector<std::vector<double>> planes(bricks.size());
    for (auto i : active) {
        auto& c = cuts[i];
        std::sort(c.begin(), c.end());
        const double len = bricks[i].extents.extent(axis[i]);
        std::vector<double> dedup;
        for (double v : c)
            if (dedup.empty() || v - dedup.back() > 1e-9 * len) dedup.push_back(v);
        std::vector<double> pl;
        for (std::size_t k = 0; k + 1 < dedup.size(); ++k) {
            const double a = dedup[k], b = dedup[k + 1];
            const int n = std::max(1, (int)std::lround(segments_per_length * (b - a) / len));
            for (int s = 0; s < n; ++s) pl.push_back(a + (b - a) * s / n);
        }
        pl.push_back(dedup.back());
        planes[i] = pl;
    }

    // One raw node per (brick, plane); contacts merge nodes via union-find.
    std::vector<std::size_t> node_base(bricks.size(), 0);
    std::size_t n_raw = 0;
    for (auto i : active) {
        node_base[i] = n_raw;
        n_raw += planes[i].size();
    }
    std::vector<std::size_t> parent(n_raw);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    auto nearest_plane = [&](std::size_t brick, double coord) {
        const auto& pl = planes[brick];
        std::size_t best = 0;
        double bd = std::fabs(pl[0] - coord);
        for (std::size_t k = 1; k < pl.size(); ++k)
            if (std::fabs(pl[k] - coord) < bd) bd = std::fabs(pl[k] - coord), best = k;
        return best;
    };
    for (const auto& c : contacts) {
        unite(node_base[c.a] + nearest_plane(c.a, c.center[axis[c.a]]),
              node_base[c.b] + nearest_plane(c.b, c.center[axis[c.b]]));
    }

    auto raw_position = [&](std::size_t brick, std::size_t plane_idx) {
        Vec3 p = bricks[brick].extents.center();
        double v[3] = {p.x, p.y, p.z};
        v[axis[brick]] = planes[brick][plane_idx];
        return Vec3{v[0], v[1], v[2]};
    };

    // Port terminals: the nearest node of each brick on the terminal net,
    // bundled within the merge radius.
    FilamentMesh mesh;
    std::vector<std::pair<std::size_t, std::size_t>> terminal_raw; // per port (pos,neg)
    for (const auto& p : scene.ports()) {
        std::size_t term[2] = {n_raw, n_raw};
        int t = 0;
        for (const auto& net : {p.positive_net, p.negative_net}) {
            const std::optional<Vec3>& loc =
                t == 0 ? p.positive_location : p.negative_location;
            std::vector<std::pair<double, std::size_t>> candidates;
            for (auto i : scene.bricks_on_net(net)) {
                if (!included[i]) continue;
                std::size_t best = 0;
                double bd = 1e300;
                for (std::size_t k = 0; k < planes[i].size(); ++k) {
                    Vec3 pos = raw_position(i, k);
                    double d = loc ? (pos - *loc).norm()
                                   : pos.x + pos.y + pos.z; // deterministic fallback
                    if (d < bd) bd = d, best = k;
                }
                candidates.push_back({bd, node_base[i] + best});
            }
            if (candidates.empty())
                throw NoPortNets("port '" + p.id + "': net has no discretized bricks");
            std::sort(candidates.begin(), candidates.end());
            term[t] = candidates[0].second;
            for (std::size_t k = 1; k < candidates.size(); ++k)
                if (candidates[k].first <= p.terminal_merge_radius)
                    unite(candidates[k].second, term[t]);
            ++t;
        }
        terminal_raw.push_back({term[0], term[1]});
    }

    // Compact node numbering (deterministic: ordered by representative id).
    std::vector<int> compact(n_raw, -1);
    int n_nodes = 0;
    for (std::size_t r = 0; r < n_raw; ++r) {
        std::size_t rep = find(r);
        if (compact[rep] < 0) {
            compact[rep] = n_nodes++;
            mesh.node_positions.push_back(Vec3{});
        }
        compact[r] = compact[rep];
    }
    // Representative positions: first raw node mapped to each compact id.
    {
        std::vector<int> seen(n_nodes, 0);
        for (auto i : active)
            for (std::size_t k = 0; k < planes[i].size(); ++k) {
                int id = compact[node_base[i] + k];
                if (!seen[id]) seen[id] = 1, mesh.node_positions[id] = raw_position(i, k);
            }
    }
    for (auto& [pos, neg] : terminal_raw)
        mesh.port_terminals.push_back({compact[pos], compact[neg]});

    // Filaments: cross-section grid between consecutive node planes.
    for (auto i : active) {
        const Box& e = bricks[i].extents;
        const int k = axis[i];
        const int u = other_u(k), v = other_v(k);
        const double w_cell = e.extent(u) / subdivision.nx;
        const double h_cell = e.extent(v) / subdivision.ny;
        const double sigma = scene.brick_conductivity(bricks[i]);
        for (std::size_t pk = 0; pk + 1 < planes[i].size(); ++pk) {
            for (int cu = 0; cu < subdivision.nx; ++cu) {
                for (int cv = 0; cv < subdivision.ny; ++cv) {
                    double c[3];
                    c[u] = e.lo(u) + (cu + 0.5) * w_cell;
                    c[v] = e.lo(v) + (cv + 0.5) * h_cell;
                    Filament f;
                    c[k] = planes[i][pk];
                    f.start = Vec3{c[0], c[1], c[2]};
                    c[k] = planes[i][pk + 1];
                    f.end = Vec3{c[0], c[1], c[2]};
                    f.width = w_cell;
                    f.height = h_cell;
                    f.conductivity = sigma;
                    f.parent_brick = bricks[i].id;
                    f.node_start = compact[node_base[i] + pk];
                    f.node_end = compact[node_base[i] + pk + 1];
                    mesh.filaments.push_back(std::move(f));
                }
            }
        }
    }
    return mesh;
}

Eigen::MatrixXcd FilamentSystem::impedance() const {
    const auto n = resistance.size();
    Eigen::MatrixXcd Z(n, n);
    const double w = 2 * kPi * frequency;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            Z(i, j) = Complex(i == j ? resistance(i) : 0.0, w * inductance(i, j));
    return Z;
}

FilamentSystem FilamentSystem::at_frequency(double f) const {
    FilamentSystem s = *this;
    s.frequency = f;
    return s;
}

FilamentSystem assemble_impedance(FilamentMesh mesh, double frequency) {
    if (frequency < 0) throw ValidationError("frequency must be >= 0");
    const std::size_t n = mesh.filaments.size();
    FilamentSystem sys;
    sys.frequency = frequency;
    sys.resistance.resize(n);
    sys.inductance.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = mesh.filaments[i];
        if (f.conductivity <= 0)
            throw ZeroConductivity("filament of brick '" + f.parent_brick +
                                   "' has non-positive conductivity");
        sys.resistance(i) = f.length() / (f.conductivity * f.width * f.height);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double m = partial_inductance(mesh.filaments[i], mesh.filaments[j]);
            sys.inductance(i, j) = m;
            sys.inductance(j, i) = m;
        }
    }
    sys.mesh = std::move(mesh);
    return sys;
}

CurrentSolution solve_currents(const FilamentSystem& system, Complex terminal_current,
                               std::size_t port_index) {
    const auto& mesh = system.mesh;
    if (port_index >= mesh.port_terminals.size())
        throw ValidationError("port index out of range");
    const int n_fil = static_cast<int>(mesh.filaments.size());
    const int n_nodes = static_cast<int>(mesh.node_positions.size());
    const auto [pos, neg] = mesh.port_terminals[port_index];
    if (pos == neg) throw SingularSystem("port terminals are shorted at one node");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_nodes, n_fil);
    for (int k = 0; k < n_fil; ++k) {
        A(mesh.filaments[k].node_start, k) += 1.0;
        A(mesh.filaments[k].node_end, k) -= 1.0;
    }

    // Ground the negative terminal and solve the bordered KVL/KCL system
    //   [ Z  -Ar^T ] [I]   [ 0 ]
    //   [ Ar   0   ] [v] = [ J ]
    // directly. Eliminating I first (nodal Schur complement) squares the
    // condition number of Z and breaks down once the inductive part
    // dominates; the pivoted LU of the full system does not.
    std::vector<int> keep;
    keep.reserve(n_nodes - 1);
    for (int i = 0; i < n_nodes; ++i)
        if (i != neg) keep.push_back(i);
    const int nk = n_nodes - 1;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n_fil + nk, n_fil + nk);
    M.topLeftCorner(n_fil, n_fil) = system.impedance();
    for (int i = 0; i < nk; ++i)
        for (int k = 0; k < n_fil; ++k) {
            M(k, n_fil + i) = -A(keep[i], k); // branch drop = (A^T v)_k
            M(n_fil + i, k) = A(keep[i], k);
        }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n_fil + nk);
    for (int i = 0; i < nk; ++i)
        if (keep[i] == pos) rhs(n_fil + i) = terminal_current;

    Eigen::VectorXcd x = Eigen::PartialPivLU<Eigen::MatrixXcd>(M).solve(rhs);
    if (!x.allFinite()) throw SingularSystem("nodal system is singular");

    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_nodes);
    for (int i = 0; i < nk; ++i) v(keep[i]) = x(n_fil + i);

    CurrentSolution sol;
    sol.currents = x.head(n_fil);
    sol.node_voltages = v;
    sol.frequency = system.frequency;
    sol.terminal_current = terminal_current;

    // KCL residual against the injection vector.
    Eigen::VectorXcd J = Eigen::VectorXcd::Zero(n_nodes);
    J(pos) = terminal_current;
    J(neg) = -terminal_current;
    Eigen::VectorXcd res = A.cast<Complex>() * sol.currents - J;
    sol.kcl_residual = res.cwiseAbs().maxCoeff();
    const double iref = std::max(std::abs(terminal_current), 1e-30);
    if (sol.kcl_residual > 1e-9 * iref)
        throw ConvergenceFailure("Kirchhoff residual " + std::to_string(sol.kcl_residual) +
                                 " exceeds tolerance");

    sol.port_impedance = std::abs(terminal_current) > 0
                             ? (v(pos) - v(neg)) / terminal_current
                             : Complex(0, 0);
    double loss = 0;
    for (int k = 0; k < n_fil; ++k)
        loss += system.resistance(k) * std::norm(sol.currents(k)) / 2.0;
    sol.ohmic_loss = loss;
    return sol;
}

CVec3 segment_field(const Vec3& a, const Vec3& b, Complex current, const Vec3& point) {
    const Vec3 ab = b - a;
    const double len = ab.norm();
    if (len <= 0) return {};
    const Vec3 u = ab / len;
    const Vec3 ap = point - a;
    const double s0 = u.dot(ap);
    const Vec3 rho_vec = ap - s0 * u;
    const double rho = rho_vec.norm();
    if (rho < 1e-18) return {}; // on the segment axis: dl x r = 0
    const double s1 = s0 - len;
    const double ra = ap.norm();
    const double rb = (point - b).norm();
    const double mag = kMu0 / (4 * kPi * rho) * (s0 / ra - s1 / rb);
    const Vec3 dir = u.cross(rho_vec / rho);
    CVec3 out;
    out.x = current * (mag * dir.x);
    out.y = current * (mag * dir.y);
    out.z = current * (mag * dir.z);
    return out;
}

CVec3 biot_savart(const CurrentSolution& solution, const std::vector<Filament>& filaments,
                  const Vec3& point) {
    for (const auto& f : filaments)
        if (f.bounding_box().strictly_contains(point, kGeomTol))
            throw PointInsideConductor("field point lies inside a conductor");
    CVec3 total;
    for (std::size_t k = 0; k < filaments.size(); ++k)
        total = total + segment_field(filaments[k].start, filaments[k].end,
                                      solution.currents(static_cast<Eigen::Index>(k)), point);
    return total;
}

std::vector<FieldSample> b_field_at_probes(const Scene& scene,
                                           const CurrentSolution& solution,
                                           const std::vector<Filament>& filaments,
                                           const ProbeSet& probes) {
    (void)scene;
    std::vector<FieldSample> out;
    out.reserve(probes.points.size());
    for (const auto& p : probes.points) {
        FieldSample s;
        s.position = p;
        s.B = biot_savart(solution, filaments, p);
        out.push_back(s);
    }
    return out;
}

} // namespace magnetoqs
} // namespace esrline
