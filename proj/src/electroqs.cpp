#include "esrline/electroqs.hpp"

#include <algorithm>
#include <cmath>

namespace esrline {
namespace electroqs {

namespace {

constexpr double kPi = 3.14159265358979323846;

int other_u(int axis) { return (axis + 1) % 3; }
int other_v(int axis) { return (axis + 2) % 3; }

// 2-point Gauss-Legendre abscissae on [-1/2, 1/2].
constexpr double kG2 = 0.28867513459481287; // 1/(2*sqrt(3))

// Average of 1/|p - r'| over a rectangle, by recursive 2x2 subdivision with
// a tensor 2-point Gauss rule on the leaves.
double avg_inv_r(const Vec3& p, const Vec3& center, int axis, double w, double h,
                 int depth) {
    const int u = other_u(axis), v = other_v(axis);
    const double dist = (p - center).norm();
    const double edge = std::max(w, h);
    if (dist > 2.0 * edge || depth >= 7) {
        double sum = 0;
        for (double gu : {-kG2, kG2}) {
            for (double gv : {-kG2, kG2}) {
                double c[3] = {center.x, center.y, center.z};
                c[u] += gu * w;
                c[v] += gv * h;
                sum += 1.0 / (p - Vec3{c[0], c[1], c[2]}).norm();
            }
        }
        return sum / 4.0;
    }
    double sum = 0;
    for (double su : {-0.25, 0.25}) {
        for (double sv : {-0.25, 0.25}) {
            double c[3] = {center.x, center.y, center.z};
            c[u] += su * w;
            c[v] += sv * h;
            sum += avg_inv_r(p, Vec3{c[0], c[1], c[2]}, axis, w / 2, h / 2, depth + 1);
        }
    }
    return sum / 4.0;
}

// E field of a unit charge spread uniformly over a rectangle, evaluated by
// the same subdivision strategy (point-charge leaves).
Vec3 unit_panel_field(const Vec3& p, const Vec3& center, int axis, double w, double h,
                      int depth) {
    const double dist = (p - center).norm();
    const double edge = std::max(w, h);
    if (dist > 3.0 * edge || depth >= 7) {
        const Vec3 d = p - center;
        const double r = d.norm();
        return d / (r * r * r);
    }
    const int u = other_u(axis), v = other_v(axis);
    Vec3 sum{};
    for (double su : {-0.25, 0.25}) {
        for (double sv : {-0.25, 0.25}) {
            double c[3] = {center.x, center.y, center.z};
            c[u] += su * w;
            c[v] += sv * h;
            sum = sum + unit_panel_field(p, Vec3{c[0], c[1], c[2]}, axis, w / 2, h / 2,
                                         depth + 1);
        }
    }
    return sum / 4.0;
}

} // namespace

std::vector<Panel> discretize_panels(const Scene& scene, double max_panel_edge) {
    if (max_panel_edge <= 0) throw ValidationError("max_panel_edge must be positive");
    constexpr double tol = 1e-13;
    std::vector<Panel> out;
    // Panels centered on a metal-metal contact face are buried, not exposed
    // to the dielectric; keeping them produces (near-)coincident panels from
    // both sides of the interface and wrecks the conditioning of P.
    auto buried = [&](const Vec3& c, const std::string& own_brick) {
        for (const auto& other : scene.conductors())
            if (other.id != own_brick && other.extents.contains(c, tol)) return true;
        return false;
    };
    for (const auto& brick : scene.conductors()) {
        const Box& e = brick.extents;
        for (int axis = 0; axis < 3; ++axis) {
            const int u = other_u(axis), v = other_v(axis);
            const double wu = e.extent(u), wv = e.extent(v);
            const int nu = std::max(1, (int)std::ceil(wu / max_panel_edge));
            const int nv = std::max(1, (int)std::ceil(wv / max_panel_edge));
            for (double plane : {e.lo(axis), e.hi(axis)}) {
                for (int i = 0; i < nu; ++i) {
                    for (int j = 0; j < nv; ++j) {
                        Panel p;
                        double c[3];
                        c[axis] = plane;
                        c[u] = e.lo(u) + (i + 0.5) * wu / nu;
                        c[v] = e.lo(v) + (j + 0.5) * wv / nv;
                        p.center = {c[0], c[1], c[2]};
                        if (buried(p.center, brick.id)) continue;
                        p.normal_axis = axis;
                        p.width = wu / nu;
                        p.height = wv / nv;
                        p.parent_brick = brick.id;
                        p.net = brick.net;
                        out.push_back(std::move(p));
                    }
                }
            }
        }
    }
    return out;
}

double potential_coefficient(const Panel& a, const Panel& b, double eps_eff) {
    const double k = 1.0 / (4 * kPi * kEps0 * eps_eff);
    const double dist = (a.center - b.center).norm();
    const bool same_geom = dist < 1e-15 && a.normal_axis == b.normal_axis &&
                           std::fabs(a.width - b.width) < 1e-15 &&
                           std::fabs(a.height - b.height) < 1e-15;
    if (same_geom) {
        // Closed-form self potential of a uniformly charged w x h rectangle
        // at its center, divided by total charge.
        const double w = a.width, h = a.height;
        const double integral = 2 * w * std::asinh(h / w) + 2 * h * std::asinh(w / h);
        return k * integral / (w * h);
    }
    if (dist < 1e-15)
        throw CoincidentDistinctPanels("distinct panels share a center point");
    const double pab = avg_inv_r(a.center, b.center, b.normal_axis, b.width, b.height, 0);
    const double pba = avg_inv_r(b.center, a.center, a.normal_axis, a.width, a.height, 0);
    return k * (pab + pba) / 2.0;
}

std::string PanelSystem::group_key(const Panel& p) {
    // FLOATING bricks are individually equipotential; named nets are one group.
    return p.floating() ? "brick:" + p.parent_brick : p.net;
}

PanelSystem build_panel_system(std::vector<Panel> panels, double eps_eff) {
    if (eps_eff < 1.0) throw ValidationError("effective permittivity must be >= 1");
    PanelSystem sys;
    sys.effective_permittivity = eps_eff;
    const std::size_t n = panels.size();
    sys.P.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double p = potential_coefficient(panels[i], panels[j], eps_eff);
            sys.P(i, j) = p;
            sys.P(j, i) = p;
        }
    }
    sys.group_of_panel.reserve(n);
    for (const auto& p : panels) sys.group_of_panel.push_back(PanelSystem::group_key(p));
    sys.panels = std::move(panels);
    return sys;
}

namespace {

ChargeSolution solve_impl(const PanelSystem& system,
                          const std::vector<int>& driven, // per panel: 1 = prescribed
                          const Eigen::VectorXcd& prescribed,
                          const std::vector<std::string>& float_groups,
                          const std::vector<int>& float_index) // per panel, -1 if driven
{
    const int n = static_cast<int>(system.panels.size());
    const int f = static_cast<int>(float_groups.size());
    bool any_driven = false;
    for (int i = 0; i < n; ++i) any_driven |= driven[i] == 1;
    if (!any_driven) throw ValidationError("at least one driven net is required");

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + f, n + f);
    M.topLeftCorner(n, n) = system.P;
    for (int i = 0; i < n; ++i) {
        if (float_index[i] >= 0) {
            M(i, n + float_index[i]) = -1.0;       // unknown group potential
            M(n + float_index[i], i) = 1.0;        // zero total group charge
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

    Eigen::VectorXd rhs_re = Eigen::VectorXd::Zero(n + f);
    Eigen::VectorXd rhs_im = Eigen::VectorXd::Zero(n + f);
    for (int i = 0; i < n; ++i) {
        if (driven[i]) {
            rhs_re(i) = prescribed(i).real();
            rhs_im(i) = prescribed(i).imag();
        }
    }
    Eigen::VectorXd sol_re = lu.solve(rhs_re);
    Eigen::VectorXd sol_im = lu.solve(rhs_im);
    if (!sol_re.allFinite() || !sol_im.allFinite())
        throw SingularSystem("panel system is singular");

    ChargeSolution out;
    out.effective_permittivity = system.effective_permittivity;
    out.charges.resize(n);
    for (int i = 0; i < n; ++i) out.charges(i) = Complex(sol_re(i), sol_im(i));
    for (int g = 0; g < f; ++g)
        out.group_potentials[float_groups[g]] = Complex(sol_re(n + g), sol_im(n + g));
    for (int i = 0; i < n; ++i)
        if (driven[i]) out.group_potentials[system.group_of_panel[i]] = prescribed(i);
    return out;
}

} // namespace

ChargeSolution solve_charges(const PanelSystem& system,
                             const std::map<std::string, Complex>& net_potentials) {
    const int n = static_cast<int>(system.panels.size());
    std::vector<int> driven(n, 0);
    Eigen::VectorXcd prescribed = Eigen::VectorXcd::Zero(n);
    std::vector<std::string> float_groups;
    std::vector<int> float_index(n, -1);
    std::map<std::string, int> float_ids;
    for (int i = 0; i < n; ++i) {
        const std::string& g = system.group_of_panel[i];
        auto it = net_potentials.find(g);
        if (it == net_potentials.end() && !system.panels[i].floating())
            it = net_potentials.find(system.panels[i].net);
        if (it != net_potentials.end()) {
            driven[i] = 1;
            prescribed(i) = it->second;
        } else {
            auto [fit, inserted] = float_ids.emplace(g, (int)float_groups.size());
            if (inserted) float_groups.push_back(g);
            float_index[i] = fit->second;
        }
    }
    return solve_impl(system, driven, prescribed, float_groups, float_index);
}

ChargeSolution solve_charges_profile(const PanelSystem& system,
                                     const std::vector<std::string>& driven_groups,
                                     const Eigen::VectorXcd& panel_potentials) {
    const int n = static_cast<int>(system.panels.size());
    if (panel_potentials.size() != n)
        throw ValidationError("panel potential vector size mismatch");
    std::vector<int> driven(n, 0);
    std::vector<std::string> float_groups;
    std::vector<int> float_index(n, -1);
    std::map<std::string, int> float_ids;
    for (int i = 0; i < n; ++i) {
        const std::string& g = system.group_of_panel[i];
        bool is_driven = std::find(driven_groups.begin(), driven_groups.end(), g) !=
                             driven_groups.end() ||
                         std::find(driven_groups.begin(), driven_groups.end(),
                                   system.panels[i].net) != driven_groups.end();
        if (is_driven) {
            driven[i] = 1;
        } else {
            auto [fit, inserted] = float_ids.emplace(g, (int)float_groups.size());
            if (inserted) float_groups.push_back(g);
            float_index[i] = fit->second;
        }
    }
    return solve_impl(system, driven, panel_potentials, float_groups, float_index);
}

Complex ChargeSolution::net_charge(const PanelSystem& system,
                                   const std::string& group) const {
    Complex q{0, 0};
    for (int i = 0; i < charges.size(); ++i)
        if (system.group_of_panel[i] == group || system.panels[i].net == group)
            q += charges(i);
    return q;
}

CVec3 e_field(const ChargeSolution& solution, const std::vector<Panel>& panels,
              const Vec3& point) {
    const double k = 1.0 / (4 * kPi * kEps0 * solution.effective_permittivity);
    CVec3 total;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const Panel& p = panels[i];
        const Vec3 g = unit_panel_field(point, p.center, p.normal_axis, p.width,
                                        p.height, 0);
        const Complex q = solution.charges(static_cast<Eigen::Index>(i));
        total.x += q * (k * g.x);
        total.y += q * (k * g.y);
        total.z += q * (k * g.z);
    }
    return total;
}

Eigen::MatrixXd capacitance_matrix(const PanelSystem& system,
                                   const std::vector<std::string>& driven_nets) {
    const int m = static_cast<int>(driven_nets.size());
    if (m < 1) throw ValidationError("need at least one driven net");
    Eigen::MatrixXd C(m, m);
    for (int kcol = 0; kcol < m; ++kcol) {
        std::map<std::string, Complex> pots;
        for (int j = 0; j < m; ++j)
            pots[driven_nets[j]] = Complex(j == kcol ? 1.0 : 0.0, 0.0);
        ChargeSolution sol = solve_charges(system, pots);
        for (int j = 0; j < m; ++j)
            C(j, kcol) = sol.net_charge(system, driven_nets[j]).real();
    }
    return C;
}

std::vector<FieldSample> e_field_at_probes(const Scene& scene,
                                           const ChargeSolution& solution,
                                           const std::vector<Panel>& panels,
                                           const ProbeSet& probes) {
    std::vector<FieldSample> out;
    out.reserve(probes.points.size());
    for (const auto& pt : probes.points) {
        if (scene.point_inside_conductor(pt))
            throw PointInsideConductor("probe point lies inside a conductor");
        FieldSample s;
        s.position = pt;
        s.E = e_field(solution, panels, pt);
        out.push_back(s);
    }
    return out;
}

} // namespace electroqs
} // namespace esrline
