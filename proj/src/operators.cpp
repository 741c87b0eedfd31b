#include "dumbbell/operators.hpp"
#include "dumbbell/constants.hpp"
#include "dumbbell/cross_section.hpp"  // gauss_legendre

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace dumbbell {

namespace {

void build_reduction(const MeridianMesh& mesh, SparseOperator& op)
{
    op.full2free.assign(mesh.nv(), -1);
    for (int i = 0; i < mesh.nv(); ++i)
        if (!mesh.dirichlet[i]) {
            op.full2free[i] = static_cast<int>(op.free2full.size());
            op.free2full.push_back(i);
        }
    const int nf = static_cast<int>(op.free2full.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < op.full.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.full, k); it; ++it) {
            const int i = op.full2free[it.row()], j = op.full2free[it.col()];
            if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
        }
    op.reduced.resize(nf, nf);
    op.reduced.setFromTriplets(trip.begin(), trip.end());
}

struct TriQuad {
    // edge midpoints, degree-2 exact
    Eigen::Vector2d pts[3];
    double bary[3][3];
};

TriQuad tri_quad(const MeridianMesh& m, int t)
{
    const auto& T = m.tris[t];
    const Eigen::Vector2d a = m.verts[T[0]], b = m.verts[T[1]], c = m.verts[T[2]];
    TriQuad q;
    q.pts[0] = 0.5 * (a + b);
    q.pts[1] = 0.5 * (b + c);
    q.pts[2] = 0.5 * (c + a);
    const double bb[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q.bary[i][j] = bb[i][j];
    return q;
}

} // namespace

double SparseOperator::symmetry_defect() const
{
    Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(full.transpose()) - full;
    double m = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

Eigen::VectorXd SparseOperator::expand(const Eigen::VectorXd& fv) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(full.rows());
    for (size_t i = 0; i < free2full.size(); ++i) out[free2full[i]] = fv[static_cast<int>(i)];
    return out;
}

Eigen::VectorXd SparseOperator::restrict_to_free(const Eigen::VectorXd& u) const
{
    Eigen::VectorXd out(free2full.size());
    for (size_t i = 0; i < free2full.size(); ++i) out[static_cast<int>(i)] = u[free2full[i]];
    return out;
}

SparseOperator stiffness(const MeridianMesh& mesh)
{
    const double om = omega_meridian(mesh.N);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.nt()) * 9);
    for (int t = 0; t < mesh.nt(); ++t) {
        const auto& T = mesh.tris[t];
        const Eigen::Vector2d a = mesh.verts[T[0]], b = mesh.verts[T[1]], c = mesh.verts[T[2]];
        const double area = mesh.tri_area(t);
        // constant P1 gradients
        Eigen::Vector2d g[3];
        g[0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2.0 * area);
        g[1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2.0 * area);
        g[2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
        const TriQuad q = tri_quad(mesh, t);
        double wgt = 0.0;
        for (int k = 0; k < 3; ++k) wgt += std::pow(q.pts[k].y(), mesh.N - 2) / 3.0;
        wgt *= om * area;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(T[i], T[j], wgt * g[i].dot(g[j]));
    }
    SparseOperator op;
    op.full.resize(mesh.nv(), mesh.nv());
    op.full.setFromTriplets(trip.begin(), trip.end());
    build_reduction(mesh, op);
    return op;
}

SparseOperator weighted_mass(const MeridianMesh& mesh,
                             const std::function<double(double, double)>& p)
{
    const double om = omega_meridian(mesh.N);
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < mesh.nt(); ++t) {
        const auto& T = mesh.tris[t];
        const double area = mesh.tri_area(t);
        const TriQuad q = tri_quad(mesh, t);
        for (int k = 0; k < 3; ++k) {
            const double pv = p(q.pts[k].x(), q.pts[k].y());
            if (pv < 0.0) throw std::invalid_argument("weighted_mass: negative weight sample");
            if (pv == 0.0) continue;
            const double wgt = om * area / 3.0 * std::pow(q.pts[k].y(), mesh.N - 2) * pv;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    trip.emplace_back(T[i], T[j], wgt * q.bary[k][i] * q.bary[k][j]);
        }
    }
    SparseOperator op;
    op.full.resize(mesh.nv(), mesh.nv());
    op.full.setFromTriplets(trip.begin(), trip.end());
    build_reduction(mesh, op);
    return op;
}

SparseOperator boundary_mass(const MeridianMesh& mesh, BTag tag)
{
    const double om = omega_meridian(mesh.N);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> gx, gw;
    gauss_legendre(3, 0.0, 1.0, gx, gw);
    for (const auto& e : mesh.bedges) {
        if (e.tag != tag || e.a == e.b) continue;
        const Eigen::Vector2d a = mesh.verts[e.a], b = mesh.verts[e.b];
        const double len = (b - a).norm();
        for (size_t q = 0; q < gx.size(); ++q) {
            const Eigen::Vector2d x = a + gx[q] * (b - a);
            const double wgt = om * std::pow(x.y(), mesh.N - 2) * len * gw[q];
            const double sh[2] = {1.0 - gx[q], gx[q]};
            const int idx[2] = {e.a, e.b};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    trip.emplace_back(idx[i], idx[j], wgt * sh[i] * sh[j]);
        }
    }
    SparseOperator op;
    op.full.resize(mesh.nv(), mesh.nv());
    op.full.setFromTriplets(trip.begin(), trip.end());
    build_reduction(mesh, op);
    return op;
}

Eigen::VectorXd line_source(const MeridianMesh& mesh,
                            const std::vector<Eigen::Vector2d>& pts,
                            const std::vector<double>& wts,
                            const std::function<double(double, double)>& g)
{
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.nv());
    int t;
    std::array<double, 3> b;
    for (size_t q = 0; q < pts.size(); ++q) {
        if (!mesh.locate(pts[q].x(), pts[q].y(), t, b))
            throw std::invalid_argument("line_source: point outside mesh");
        const double v = wts[q] * g(pts[q].x(), pts[q].y());
        for (int k = 0; k < 3; ++k) rhs[mesh.tris[t][k]] += v * b[k];
    }
    return rhs;
}

Eigen::MatrixX2d recover_gradients(const DiscreteField& u)
{
    const MeridianMesh& m = *u.mesh;
    Eigen::MatrixX2d g = Eigen::MatrixX2d::Zero(m.nv(), 2);
    Eigen::VectorXd wsum = Eigen::VectorXd::Zero(m.nv());
    for (int t = 0; t < m.nt(); ++t) {
        const auto& T = m.tris[t];
        const Eigen::Vector2d a = m.verts[T[0]], b = m.verts[T[1]], c = m.verts[T[2]];
        const double area = m.tri_area(t);
        Eigen::Vector2d gb[3];
        gb[0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2.0 * area);
        gb[1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2.0 * area);
        gb[2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
        Eigen::Vector2d gu = Eigen::Vector2d::Zero();
        for (int k = 0; k < 3; ++k) gu += u.values[T[k]] * gb[k];
        for (int k = 0; k < 3; ++k) {
            g.row(T[k]) += area * gu.transpose();
            wsum[T[k]] += area;
        }
    }
    for (int i = 0; i < m.nv(); ++i)
        if (wsum[i] > 0) g.row(i) /= wsum[i];
    return g;
}

namespace {

double eval_at(const MeridianMesh& m, const Eigen::VectorXd& nodal, int t,
               const std::array<double, 3>& b)
{
    return b[0] * nodal[m.tris[t][0]] + b[1] * nodal[m.tris[t][1]] + b[2] * nodal[m.tris[t][2]];
}

Eigen::Vector2d eval_grad_at(const MeridianMesh& m, const Eigen::MatrixX2d& g, int t,
                             const std::array<double, 3>& b)
{
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) out += b[k] * g.row(m.tris[t][k]).transpose();
    return out;
}

} // namespace

double surface_integral(const DiscreteField& u, const Eigen::MatrixX2d& grads,
                        const SamplingCurve& c, SurfIntegrand kind)
{
    const MeridianMesh& m = *u.mesh;
    double acc = 0.0;
    int t;
    std::array<double, 3> b;
    for (const auto& n : c.nodes) {
        if (!m.locate(n.pos.x(), n.pos.y(), t, b))
            throw std::invalid_argument("surface_integral: curve/mesh mismatch");
        double v = 0.0;
        switch (kind) {
            case SurfIntegrand::one: v = 1.0; break;
            case SurfIntegrand::u: v = eval_at(m, u.values, t, b); break;
            case SurfIntegrand::u2: {
                const double uu = eval_at(m, u.values, t, b);
                v = uu * uu;
                break;
            }
            case SurfIntegrand::u_dnu: {
                const double uu = eval_at(m, u.values, t, b);
                v = uu * eval_grad_at(m, grads, t, b).dot(n.normal);
                break;
            }
            case SurfIntegrand::dnu2: {
                const double dn = eval_grad_at(m, grads, t, b).dot(n.normal);
                v = dn * dn;
                break;
            }
            case SurfIntegrand::grad2: v = eval_grad_at(m, grads, t, b).squaredNorm(); break;
        }
        acc += n.weight * v;
    }
    return acc;
}

double surface_integral(const FieldExpr& f, const SamplingCurve& c, SurfIntegrand kind)
{
    double acc = 0.0;
    for (const auto& n : c.nodes) {
        double v = 0.0;
        switch (kind) {
            case SurfIntegrand::one: v = 1.0; break;
            case SurfIntegrand::u: v = f.val(n.pos.x(), n.pos.y()); break;
            case SurfIntegrand::u2: {
                const double uu = f.val(n.pos.x(), n.pos.y());
                v = uu * uu;
                break;
            }
            case SurfIntegrand::u_dnu:
                v = f.val(n.pos.x(), n.pos.y()) * f.grad(n.pos.x(), n.pos.y()).dot(n.normal);
                break;
            case SurfIntegrand::dnu2: {
                const double dn = f.grad(n.pos.x(), n.pos.y()).dot(n.normal);
                v = dn * dn;
                break;
            }
            case SurfIntegrand::grad2: v = f.grad(n.pos.x(), n.pos.y()).squaredNorm(); break;
        }
        acc += n.weight * v;
    }
    return acc;
}

double surface_integral(const SamplingCurve& c,
                        const std::function<double(double, double)>& f)
{
    double acc = 0.0;
    for (const auto& n : c.nodes) acc += n.weight * f(n.pos.x(), n.pos.y());
    return acc;
}

RegionIntegral region_integral(
    const MeridianMesh& mesh, const std::function<bool(double, double)>& inside,
    const DiscreteField& u,
    const std::function<double(const Eigen::Vector2d&, double, const Eigen::Vector2d&)>& f)
{
    // triangles are classified by centroid: exact for mesh-aligned cuts,
    // one-cell band error for curved ones
    const double om = omega_meridian(mesh.N);
    RegionIntegral out;
    for (int t = 0; t < mesh.nt(); ++t) {
        const auto& T = mesh.tris[t];
        const Eigen::Vector2d a = mesh.verts[T[0]], b = mesh.verts[T[1]], c = mesh.verts[T[2]];
        const Eigen::Vector2d ctr = (a + b + c) / 3.0;
        if (!inside(ctr.x(), ctr.y())) continue;
        const double area = mesh.tri_area(t);
        Eigen::Vector2d gb[3];
        gb[0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / (2.0 * area);
        gb[1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / (2.0 * area);
        gb[2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
        Eigen::Vector2d gu = Eigen::Vector2d::Zero();
        for (int k = 0; k < 3; ++k) gu += u.values[T[k]] * gb[k];
        const TriQuad q = tri_quad(mesh, t);
        for (int k = 0; k < 3; ++k) {
            const double uv = q.bary[k][0] * u.values[T[0]] + q.bary[k][1] * u.values[T[1]] +
                              q.bary[k][2] * u.values[T[2]];
            out.value += om * area / 3.0 * std::pow(q.pts[k].y(), mesh.N - 2) *
                         f(q.pts[k], uv, gu);
        }
        out.empty = false;
    }
    return out;
}

RegionIntegral region_integral(const MeridianMesh& mesh,
                               const std::function<bool(double, double)>& inside,
                               const std::function<double(double, double)>& f)
{
    const double om = omega_meridian(mesh.N);
    RegionIntegral out;
    for (int t = 0; t < mesh.nt(); ++t) {
        const auto& T = mesh.tris[t];
        const Eigen::Vector2d ctr = (mesh.verts[T[0]] + mesh.verts[T[1]] + mesh.verts[T[2]]) / 3.0;
        if (!inside(ctr.x(), ctr.y())) continue;
        const double area = mesh.tri_area(t);
        const TriQuad q = tri_quad(mesh, t);
        for (int k = 0; k < 3; ++k)
            out.value += om * area / 3.0 * std::pow(q.pts[k].y(), mesh.N - 2) *
                         f(q.pts[k].x(), q.pts[k].y());
        out.empty = false;
    }
    return out;
}

DiscreteField solve_dirichlet(const MeridianMesh& mesh, const SparseOperator& K,
                              const Eigen::VectorXd& rhs_full)
{
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(K.reduced);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_dirichlet: factorization failed");
    const Eigen::VectorXd rhs = K.restrict_to_free(rhs_full);
    const Eigen::VectorXd sol = solver.solve(rhs);
    DiscreteField f;
    f.mesh = &mesh;
    f.values = K.expand(sol);
    return f;
}

} // namespace dumbbell
