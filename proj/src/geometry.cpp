#include "dumbbell/geometry.hpp"
#include "dumbbell/constants.hpp"
#include "dumbbell/cross_section.hpp"  // gauss_legendre

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace dumbbell {

const char* to_string(Region r)
{
    switch (r) {
        case Region::left: return "left";
        case Region::corridor: return "corridor";
        default: return "right";
    }
}

const char* to_string(BTag t)
{
    switch (t) {
        case BTag::axis: return "axis";
        case BTag::wall: return "wall";
        case BTag::outer_left: return "outer_left";
        case BTag::outer_right: return "outer_right";
        default: return "inner_sphere";
    }
}

void DumbbellSpec::validate() const
{
    if (N < 3) throw std::invalid_argument("DumbbellSpec: N >= 3 required");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("DumbbellSpec: eps in (0, 0.5) required");
    if (R_left < 8.0 || R_right < 8.0) throw std::invalid_argument("DumbbellSpec: truncation radii >= 8 required");
    if (!(grading_ratio > 0.0 && grading_ratio < 1.0))
        throw std::invalid_argument("DumbbellSpec: grading_ratio in (0,1) required");
    if (h_far <= 0.0 || rel_step <= 0.0 || junction_frac < 2.0)
        throw std::invalid_argument("DumbbellSpec: positive steps required");
    if (n_alpha < 4 || corridor_cells < 4) throw std::invalid_argument("DumbbellSpec: resolution too coarse");
}

std::vector<double> graded_steps(double len, double h0, double growth, double hmax)
{
    std::vector<double> steps;
    double h = std::min(h0, hmax), acc = 0.0;
    while (acc < len - 1e-14) {
        steps.push_back(h);
        acc += h;
        h = std::min(h * growth, hmax);
    }
    const double scale = len / acc;
    for (double& v : steps) v *= scale;
    return steps;
}

// same grading, but only the far tail absorbs the length fit, so the fine end
// of the grid does not move when len changes
std::vector<double> graded_steps_fixed_head(double len, double h0, double growth, double hmax)
{
    std::vector<double> steps;
    double h = std::min(h0, hmax), acc = 0.0;
    while (acc < len - 1e-14) {
        steps.push_back(std::min(h, len - acc));
        acc += steps.back();
        h = std::min(h * growth, hmax);
    }
    if (steps.size() >= 2 && steps.back() < 0.4 * steps[steps.size() - 2]) {
        const double merged = steps.back() + steps[steps.size() - 2];
        steps.pop_back();
        steps.back() = merged;
    }
    return steps;
}

double MeridianMesh::tri_area(int t) const
{
    const auto& T = tris[t];
    const Eigen::Vector2d a = verts[T[0]], b = verts[T[1]], c = verts[T[2]];
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

void MeridianMesh::build_locator()
{
    double zmin = 1e300, zmax = -1e300, smin = 1e300, smax = -1e300;
    for (const auto& v : verts) {
        zmin = std::min(zmin, v.x());
        zmax = std::max(zmax, v.x());
        smin = std::min(smin, v.y());
        smax = std::max(smax, v.y());
    }
    const int n = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(nt()))));
    loc_.nx = n;
    loc_.ny = n;
    loc_.z0 = zmin;
    loc_.s0 = smin;
    loc_.dz = (zmax - zmin) / n;
    loc_.ds = (smax - smin) / n;
    loc_.cells.assign(static_cast<size_t>(n) * n, {});
    for (int t = 0; t < nt(); ++t) {
        double tz0 = 1e300, tz1 = -1e300, ts0 = 1e300, ts1 = -1e300;
        for (int k = 0; k < 3; ++k) {
            const auto& v = verts[tris[t][k]];
            tz0 = std::min(tz0, v.x());
            tz1 = std::max(tz1, v.x());
            ts0 = std::min(ts0, v.y());
            ts1 = std::max(ts1, v.y());
        }
        int i0 = std::clamp(static_cast<int>((tz0 - loc_.z0) / loc_.dz), 0, n - 1);
        int i1 = std::clamp(static_cast<int>((tz1 - loc_.z0) / loc_.dz), 0, n - 1);
        int j0 = std::clamp(static_cast<int>((ts0 - loc_.s0) / loc_.ds), 0, n - 1);
        int j1 = std::clamp(static_cast<int>((ts1 - loc_.s0) / loc_.ds), 0, n - 1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                loc_.cells[static_cast<size_t>(j) * n + i].push_back(t);
    }
}

bool MeridianMesh::locate(double z, double s, int& tri, std::array<double, 3>& bary) const
{
    if (loc_.cells.empty()) throw std::runtime_error("MeridianMesh: locator not built");
    const int i = std::clamp(static_cast<int>((z - loc_.z0) / loc_.dz), 0, loc_.nx - 1);
    const int j = std::clamp(static_cast<int>((s - loc_.s0) / loc_.ds), 0, loc_.ny - 1);
    double best = -1e300;
    int best_t = -1;
    std::array<double, 3> best_b{};
    for (int t : loc_.cells[static_cast<size_t>(j) * loc_.nx + i]) {
        const auto& T = tris[t];
        const Eigen::Vector2d a = verts[T[0]], b = verts[T[1]], c = verts[T[2]];
        const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        const double l1 = ((z - a.x()) * (c - a).y() - (s - a.y()) * (c - a).x()) / det;
        const double l2 = ((b - a).x() * (s - a.y()) - (b - a).y() * (z - a.x())) / det;
        const double l0 = 1.0 - l1 - l2;
        const double m = std::min({l0, l1, l2});
        if (m > best) {
            best = m;
            best_t = t;
            best_b = {l0, l1, l2};
        }
        if (m >= 0.0) break;
    }
    if (best_t < 0 || best < -1e-8) return false;
    tri = best_t;
    bary = best_b;
    return true;
}

double MeridianMesh::interpolate(const Eigen::VectorXd& nodal, double z, double s) const
{
    int t;
    std::array<double, 3> b;
    if (!locate(z, s, t, b)) throw std::runtime_error("interpolate: point outside mesh");
    return b[0] * nodal[tris[t][0]] + b[1] * nodal[tris[t][1]] + b[2] * nodal[tris[t][2]];
}

void MeridianMesh::dump(std::ostream& os) const
{
    char buf[128];
    for (const auto& v : verts) {
        std::snprintf(buf, sizeof buf, "vertex %.12g %.12g\n", v.x(), v.y());
        os << buf;
    }
    for (int t = 0; t < nt(); ++t) {
        std::snprintf(buf, sizeof buf, "tri %d %d %d %s\n", tris[t][0], tris[t][1],
                      tris[t][2], to_string(tri_region[t]));
        os << buf;
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : bedges)
        for (int v : {e.a, e.b})
            if (seen.insert({v, static_cast<int>(e.tag)}).second) {}
    for (const auto& [v, tag] : seen) {
        std::snprintf(buf, sizeof buf, "bnd %d %s\n", v, to_string(static_cast<BTag>(tag)));
        os << buf;
    }
}

namespace {

struct Builder {
    MeridianMesh m;

    int add_vertex(double z, double s)
    {
        m.verts.emplace_back(z, s);
        return m.nv() - 1;
    }
    void add_tri(int a, int b, int c, Region r)
    {
        // orient counterclockwise
        const Eigen::Vector2d pa = m.verts[a], pb = m.verts[b], pc = m.verts[c];
        const double det = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
        if (std::abs(det) < 1e-16) return;  // degenerate sliver (collapsed axis node)
        if (det > 0) m.tris.push_back({a, b, c});
        else m.tris.push_back({a, c, b});
        m.tri_region.push_back(r);
    }
    void add_bedge(int a, int b, BTag t) { m.bedges.push_back({a, b, t}); }

    void finalize()
    {
        m.dirichlet.assign(m.nv(), 0);
        for (const auto& e : m.bedges)
            if (e.tag == BTag::wall || e.tag == BTag::outer_left || e.tag == BTag::outer_right)
                m.dirichlet[e.a] = m.dirichlet[e.b] = 1;
        m.build_locator();
    }
};

// Polar block around `center`. Angles run from the shared base ray (index 0)
// to the axis ray (last index). `base` holds existing vertex indices for the
// first base.size() radii along the base ray; remaining base-ray vertices are
// created and tagged `base_tag`. The axis ray lies at angle where s = 0.
struct PolarSpec {
    Eigen::Vector2d center;
    std::vector<double> alphas;  // angle measured so that pos = center + rho*(cos a, sin a)
    std::vector<double> radii;   // ascending
    std::vector<int> base;       // reused vertex indices on alphas.front()
    int center_vertex = -1;
    BTag base_tag = BTag::wall;
    BTag outer_tag = BTag::outer_left;
    Region region = Region::left;
    bool outer_is_boundary = true;
    bool base_is_boundary_beyond_reuse = true;
};

void build_polar(Builder& B, const PolarSpec& ps)
{
    const int nr = static_cast<int>(ps.radii.size());
    const int na = static_cast<int>(ps.alphas.size());
    std::vector<std::vector<int>> ring(nr, std::vector<int>(na, -1));
    for (int k = 0; k < nr; ++k) {
        for (int l = 0; l < na; ++l) {
            if (l == 0 && k < static_cast<int>(ps.base.size())) {
                ring[k][l] = ps.base[k];
                continue;
            }
            const double a = ps.alphas[l];
            double z = ps.center.x() + ps.radii[k] * std::cos(a);
            double s = ps.center.y() + ps.radii[k] * std::sin(a);
            if (std::abs(s) < 1e-13 * std::max(1.0, ps.radii[k])) s = 0.0;
            ring[k][l] = B.add_vertex(z, s);
        }
    }
    // fan around the center
    for (int l = 0; l + 1 < na; ++l) B.add_tri(ps.center_vertex, ring[0][l], ring[0][l + 1], ps.region);
    // rings
    for (int k = 0; k + 1 < nr; ++k) {
        for (int l = 0; l + 1 < na; ++l) {
            const int a = ring[k][l], b = ring[k][l + 1];
            const int c = ring[k + 1][l], d = ring[k + 1][l + 1];
            if ((k + l) % 2 == 0) {
                B.add_tri(a, c, d, ps.region);
                B.add_tri(a, d, b, ps.region);
            } else {
                B.add_tri(a, c, b, ps.region);
                B.add_tri(b, c, d, ps.region);
            }
        }
    }
    // base ray boundary beyond the reused vertices
    if (ps.base_is_boundary_beyond_reuse) {
        const int k0 = std::max(0, static_cast<int>(ps.base.size()) - 1);
        for (int k = k0; k + 1 < nr; ++k) B.add_bedge(ring[k][0], ring[k + 1][0], ps.base_tag);
    }
    // axis ray: last angle (s = 0 there)
    B.add_bedge(ps.center_vertex, ring[0][na - 1], BTag::axis);
    for (int k = 0; k + 1 < nr; ++k) B.add_bedge(ring[k][na - 1], ring[k + 1][na - 1], BTag::axis);
    // outer arc
    if (ps.outer_is_boundary)
        for (int l = 0; l + 1 < na; ++l) B.add_bedge(ring[nr - 1][l], ring[nr - 1][l + 1], ps.outer_tag);
}

std::vector<double> polar_radii(std::vector<double> seed, double R, double growth,
                                double rel_step, double h_far)
{
    double rho = seed.empty() ? 0.0 : seed.back();
    double h = seed.size() >= 2 ? seed[seed.size() - 1] - seed[seed.size() - 2]
                                : std::min(h_far, 0.05);
    std::vector<double> radii = std::move(seed);
    while (rho < R - 1e-12) {
        h = std::min({h * growth, std::max(rel_step * rho, h), h_far});
        rho = std::min(rho + h, R);
        if (R - rho < 0.4 * h) rho = R;
        radii.push_back(rho);
    }
    return radii;
}

std::vector<double> uniform_angles(double a0, double a1, int n)
{
    std::vector<double> as(n + 1);
    for (int i = 0; i <= n; ++i) as[i] = a0 + (a1 - a0) * i / n;
    return as;
}

} // namespace

MeridianMesh build_mesh(const DumbbellSpec& spec)
{
    spec.validate();
    const double eps = spec.eps;
    const double growth = 1.0 / spec.grading_ratio;

    Builder B;
    B.m.N = spec.N;
    B.m.eps = eps;
    B.m.tube_radius = eps;
    B.m.R_left = spec.R_left;
    B.m.R_right = spec.R_right;

    // transverse grid on [0, eps], refined toward the wall (s = eps)
    std::vector<double> sv;
    {
        auto st = graded_steps(eps, eps / spec.junction_frac, growth, eps / spec.corridor_cells);
        std::reverse(st.begin(), st.end());
        sv.push_back(0.0);
        for (double h : st) sv.push_back(sv.back() + h);
        sv.back() = eps;
    }
    // longitudinal grid on [0, 1], refined toward both junctions; the cap
    // scales with eps so the e^{sqrt(lambda1) z / eps} channel modes stay
    // resolved (k dz of order one half)
    std::vector<double> zv;
    {
        auto half = graded_steps(0.5, eps / spec.junction_frac, growth,
                                 std::min({spec.h_far, 0.05, 0.21 * eps}));
        zv.push_back(0.0);
        for (double h : half) zv.push_back(zv.back() + h);
        for (size_t i = half.size(); i-- > 0;) zv.push_back(zv.back() + half[i]);
        zv.back() = 1.0;
    }

    const int ms = static_cast<int>(sv.size()) - 1;
    const int mz = static_cast<int>(zv.size()) - 1;
    std::vector<std::vector<int>> grid(mz + 1, std::vector<int>(ms + 1));
    for (int j = 0; j <= mz; ++j)
        for (int i = 0; i <= ms; ++i) grid[j][i] = B.add_vertex(zv[j], sv[i]);
    for (int j = 0; j < mz; ++j)
        for (int i = 0; i < ms; ++i) {
            const int a = grid[j][i], b = grid[j + 1][i], c = grid[j + 1][i + 1], d = grid[j][i + 1];
            if ((i + j) % 2 == 0) {
                B.add_tri(a, b, c, Region::corridor);
                B.add_tri(a, c, d, Region::corridor);
            } else {
                B.add_tri(a, b, d, Region::corridor);
                B.add_tri(b, c, d, Region::corridor);
            }
        }
    for (int j = 0; j < mz; ++j) {
        B.add_bedge(grid[j][ms], grid[j + 1][ms], BTag::wall);
        B.add_bedge(grid[j][0], grid[j + 1][0], BTag::axis);
    }

    // left polar block, base ray = corridor column z = 0
    {
        PolarSpec ps;
        ps.center = {0.0, 0.0};
        ps.center_vertex = grid[0][0];
        ps.alphas = uniform_angles(0.5 * PI, PI, spec.n_alpha);
        std::vector<double> seed(sv.begin() + 1, sv.end());
        ps.radii = polar_radii(seed, spec.R_left, growth, spec.rel_step, spec.h_far);
        for (int i = 1; i <= ms; ++i) ps.base.push_back(grid[0][i]);
        ps.base_tag = BTag::wall;
        ps.outer_tag = BTag::outer_left;
        ps.region = Region::left;
        build_polar(B, ps);
    }
    // right polar block, base ray = corridor column z = 1
    {
        PolarSpec ps;
        ps.center = {1.0, 0.0};
        ps.center_vertex = grid[mz][0];
        ps.alphas = uniform_angles(0.5 * PI, 0.0, spec.n_alpha);  // ends on the axis
        std::vector<double> seed(sv.begin() + 1, sv.end());
        ps.radii = polar_radii(seed, spec.R_right, growth, spec.rel_step, spec.h_far);
        for (int i = 1; i <= ms; ++i) ps.base.push_back(grid[mz][i]);
        ps.base_tag = BTag::wall;
        ps.outer_tag = BTag::outer_right;
        ps.region = Region::right;
        build_polar(B, ps);
    }

    B.finalize();
    return std::move(B.m);
}

MeridianMesh build_half_space_mesh(const DumbbellSpec& spec, bool right)
{
    spec.validate();
    Builder B;
    B.m.N = spec.N;
    const double growth = 1.0 / spec.grading_ratio;
    const double R = right ? spec.R_right : spec.R_left;

    PolarSpec ps;
    ps.center = right ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 0.0);
    ps.center_vertex = B.add_vertex(ps.center.x(), ps.center.y());
    ps.alphas = right ? uniform_angles(0.5 * PI, 0.0, spec.n_alpha)
                      : uniform_angles(0.5 * PI, PI, spec.n_alpha);
    ps.radii = polar_radii({}, R, growth, spec.rel_step, spec.h_far);
    ps.base_tag = BTag::wall;
    ps.outer_tag = right ? BTag::outer_right : BTag::outer_left;
    ps.region = right ? Region::right : Region::left;
    build_polar(B, ps);
    // the fan center sits on the Dirichlet face
    B.m.bedges.push_back({ps.center_vertex, ps.center_vertex, BTag::wall});
    if (right) B.m.R_right = R;
    else B.m.R_left = R;
    B.finalize();
    return std::move(B.m);
}

MeridianMesh build_cylinder_mesh(int N, double length, double radius, int nz, int ns)
{
    Builder B;
    B.m.N = N;
    B.m.tube_radius = radius;
    std::vector<std::vector<int>> grid(nz + 1, std::vector<int>(ns + 1));
    for (int j = 0; j <= nz; ++j)
        for (int i = 0; i <= ns; ++i)
            grid[j][i] = B.add_vertex(length * j / nz, radius * i / ns);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < ns; ++i) {
            const int a = grid[j][i], b = grid[j + 1][i], c = grid[j + 1][i + 1], d = grid[j][i + 1];
            B.add_tri(a, b, c, Region::corridor);
            B.add_tri(a, c, d, Region::corridor);
        }
    for (int j = 0; j < nz; ++j) {
        B.add_bedge(grid[j][ns], grid[j + 1][ns], BTag::wall);
        B.add_bedge(grid[j][0], grid[j + 1][0], BTag::axis);
    }
    for (int i = 0; i < ns; ++i) {
        B.add_bedge(grid[0][i], grid[0][i + 1], BTag::wall);
        B.add_bedge(grid[nz][i], grid[nz][i + 1], BTag::wall);
    }
    B.finalize();
    return std::move(B.m);
}

MeridianMesh build_exterior_annulus(int N, double R_out, int n_alpha,
                                    double rel_step, double h_far)
{
    Builder B;
    B.m.N = N;
    B.m.R_left = R_out;
    const auto alphas = uniform_angles(0.5 * PI, PI, n_alpha);
    std::vector<double> radii{1.0};
    radii = polar_radii(std::move(radii), R_out, 1.3, rel_step, h_far);

    const int nr = static_cast<int>(radii.size());
    const int na = static_cast<int>(alphas.size());
    std::vector<std::vector<int>> ring(nr, std::vector<int>(na));
    for (int k = 0; k < nr; ++k)
        for (int l = 0; l < na; ++l) {
            double z = radii[k] * std::cos(alphas[l]);
            double s = radii[k] * std::sin(alphas[l]);
            if (std::abs(s) < 1e-13 * radii[k]) s = 0.0;
            ring[k][l] = B.add_vertex(z, s);
        }
    for (int k = 0; k + 1 < nr; ++k)
        for (int l = 0; l + 1 < na; ++l) {
            const int a = ring[k][l], b = ring[k][l + 1];
            const int c = ring[k + 1][l], d = ring[k + 1][l + 1];
            if ((k + l) % 2 == 0) {
                B.add_tri(a, c, d, Region::left);
                B.add_tri(a, d, b, Region::left);
            } else {
                B.add_tri(a, c, b, Region::left);
                B.add_tri(b, c, d, Region::left);
            }
        }
    for (int k = 0; k + 1 < nr; ++k) {
        B.add_bedge(ring[k][0], ring[k + 1][0], BTag::wall);       // z = 0 face
        B.add_bedge(ring[k][na - 1], ring[k + 1][na - 1], BTag::axis);
    }
    for (int l = 0; l + 1 < na; ++l) {
        B.add_bedge(ring[0][l], ring[0][l + 1], BTag::inner_sphere);
        B.add_bedge(ring[nr - 1][l], ring[nr - 1][l + 1], BTag::outer_left);
    }
    B.finalize();
    return std::move(B.m);
}

ModelMeshData build_model_mesh(int N, double L_tube, double R, int n_alpha,
                               int ns_tube, double grading_ratio,
                               double rel_step, double h_far)
{
    if (L_tube <= 2.0 || R <= 3.0) throw std::invalid_argument("build_model_mesh: domain too small");
    Builder B;
    B.m.N = N;
    B.m.tube_radius = 1.0;
    B.m.R_right = R;
    const double growth = 1.0 / grading_ratio;

    // transverse grid on [0,1], refined toward the tube wall
    std::vector<double> sv;
    {
        auto st = graded_steps(1.0, 1.0 / (2.5 * ns_tube), growth, 1.0 / ns_tube);
        std::reverse(st.begin(), st.end());
        sv.push_back(0.0);
        for (double h : st) sv.push_back(sv.back() + h);
        sv.back() = 1.0;
    }
    // longitudinal grid on [-L_tube, 1], refined toward the junction z = 1;
    // the grid near the junction must not depend on the tube length
    std::vector<double> zv;
    {
        // the far cap stays small enough to resolve the e^{sqrt(lambda1) z}
        // decay with second-order recovery accuracy
        auto st = graded_steps_fixed_head(L_tube + 1.0, 1.0 / (2.0 * ns_tube), growth,
                                          std::min(h_far, 0.13));
        zv.push_back(1.0);
        for (double h : st) zv.push_back(zv.back() - h);
        zv.back() = -L_tube;
        std::reverse(zv.begin(), zv.end());
    }
    const int ms = static_cast<int>(sv.size()) - 1;
    const int mz = static_cast<int>(zv.size()) - 1;
    std::vector<std::vector<int>> grid(mz + 1, std::vector<int>(ms + 1));
    for (int j = 0; j <= mz; ++j)
        for (int i = 0; i <= ms; ++i) grid[j][i] = B.add_vertex(zv[j], sv[i]);
    for (int j = 0; j < mz; ++j)
        for (int i = 0; i < ms; ++i) {
            const int a = grid[j][i], b = grid[j + 1][i], c = grid[j + 1][i + 1], d = grid[j][i + 1];
            if ((i + j) % 2 == 0) {
                B.add_tri(a, b, c, Region::corridor);
                B.add_tri(a, c, d, Region::corridor);
            } else {
                B.add_tri(a, b, d, Region::corridor);
                B.add_tri(b, c, d, Region::corridor);
            }
        }
    for (int j = 0; j < mz; ++j) {
        B.add_bedge(grid[j][ms], grid[j + 1][ms], BTag::wall);     // tube wall
        B.add_bedge(grid[j][0], grid[j + 1][0], BTag::axis);
    }
    for (int i = 0; i < ms; ++i)
        B.add_bedge(grid[0][i], grid[0][i + 1], BTag::outer_left);  // far tube cap

    PolarSpec ps;
    ps.center = {1.0, 0.0};
    ps.center_vertex = grid[mz][0];
    ps.alphas = uniform_angles(0.5 * PI, 0.0, n_alpha);
    std::vector<double> seed(sv.begin() + 1, sv.end());
    ps.radii = polar_radii(seed, R, growth, rel_step, h_far);
    for (int i = 1; i <= ms; ++i) ps.base.push_back(grid[mz][i]);
    ps.base_tag = BTag::wall;  // flat face {z=1, s>=1}
    ps.outer_tag = BTag::outer_right;
    ps.region = Region::right;
    build_polar(B, ps);

    ModelMeshData out;
    out.L_tube = L_tube;
    out.R = R;
    for (int i = 0; i < ms; ++i) out.sigma_edges.emplace_back(grid[mz][i], grid[mz][i + 1]);
    B.finalize();
    out.mesh = std::move(B.m);
    return out;
}

double SamplingCurve::measure() const
{
    double t = 0.0;
    for (const auto& n : nodes) t += n.weight;
    return t;
}

SamplingCurve curve(const MeridianMesh& mesh, CurveKind kind, double value, int quad_order)
{
    if (quad_order < 2) quad_order = 2;
    SamplingCurve c;
    c.kind = kind;
    c.value = value;
    const double om = omega_meridian(mesh.N);
    std::vector<double> x, w;

    switch (kind) {
        case CurveKind::half_sphere_left: {
            if (value <= 0.0 || (mesh.R_left > 0 && value >= mesh.R_left))
                throw std::invalid_argument("curve: half_sphere_left radius outside domain");
            gauss_legendre(quad_order, 0.5 * PI, PI, x, w);
            for (int q = 0; q < quad_order; ++q) {
                CurveNode n;
                n.pos = {value * std::cos(x[q]), value * std::sin(x[q])};
                n.normal = {std::cos(x[q]), std::sin(x[q])};
                n.weight = om * std::pow(n.pos.y(), mesh.N - 2) * value * w[q];
                c.nodes.push_back(n);
            }
            break;
        }
        case CurveKind::half_sphere_right: {
            if (value <= 0.0 || (mesh.R_right > 0 && value >= mesh.R_right))
                throw std::invalid_argument("curve: half_sphere_right radius outside domain");
            gauss_legendre(quad_order, 0.0, 0.5 * PI, x, w);
            for (int q = 0; q < quad_order; ++q) {
                CurveNode n;
                n.pos = {1.0 + value * std::cos(x[q]), value * std::sin(x[q])};
                n.normal = {std::cos(x[q]), std::sin(x[q])};
                n.weight = om * std::pow(n.pos.y(), mesh.N - 2) * value * w[q];
                c.nodes.push_back(n);
            }
            break;
        }
        case CurveKind::slice: {
            const double smax = mesh.eps > 0 ? mesh.eps : mesh.tube_radius;
            if (smax <= 0.0) throw std::invalid_argument("curve: mesh has no transverse extent");
            gauss_legendre(quad_order, 0.0, smax, x, w);
            for (int q = 0; q < quad_order; ++q) {
                CurveNode n;
                n.pos = {value, x[q]};
                n.normal = {1.0, 0.0};
                n.weight = om * std::pow(x[q], mesh.N - 2) * w[q];
                c.nodes.push_back(n);
            }
            break;
        }
        case CurveKind::wall_left: {
            // S_eps = {z=0, s >= eps}: value is ignored except as inner radius
            const double s0 = value > 0 ? value : mesh.eps;
            const double s1 = mesh.R_left * (1.0 - 1e-9);
            gauss_legendre(std::max(quad_order, 48), s0, s1, x, w);
            for (size_t q = 0; q < x.size(); ++q) {
                CurveNode n;
                n.pos = {0.0, x[q]};
                n.normal = {1.0, 0.0};
                n.weight = om * std::pow(x[q], mesh.N - 2) * w[q];
                c.nodes.push_back(n);
            }
            break;
        }
    }

    int t;
    std::array<double, 3> b;
    for (const auto& n : c.nodes)
        if (!mesh.locate(n.pos.x(), n.pos.y(), t, b))
            throw std::invalid_argument("curve: quadrature node outside the mesh");
    return c;
}

} // namespace dumbbell
