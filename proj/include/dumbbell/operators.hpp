// Axisymmetric weak forms on a MeridianMesh: P1 stiffness and weighted mass,
// boundary (Steklov) mass, embedded line sources, surface and region
// integrals with the s^{N-2} weight, and nodal gradient recovery.
#ifndef DUMBBELL_OPERATORS_HPP
#define DUMBBELL_OPERATORS_HPP

#include "dumbbell/geometry.hpp"

#include <Eigen/Sparse>
#include <functional>

namespace dumbbell {

struct DiscreteField {
    const MeridianMesh* mesh = nullptr;
    Eigen::VectorXd values;

    double eval(double z, double s) const { return mesh->interpolate(values, z, s); }
};

// Scalar expression with analytic gradient in meridian coordinates.
struct FieldExpr {
    std::function<double(double z, double s)> val;
    std::function<Eigen::Vector2d(double z, double s)> grad;
};

struct SparseOperator {
    Eigen::SparseMatrix<double> full;      // over the full node set, symmetric
    Eigen::SparseMatrix<double> reduced;   // over free nodes
    std::vector<int> free2full;
    std::vector<int> full2free;            // -1 for constrained nodes

    double quad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
    {
        return u.dot(full * v);
    }
    double symmetry_defect() const;
    Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;  // zeros on constrained
    Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full_values) const;
};

// omega_{N-2} int s^{N-2} grad(u).grad(v)
SparseOperator stiffness(const MeridianMesh& mesh);

// omega_{N-2} int s^{N-2} p u v  (throws if the weight samples negative)
SparseOperator weighted_mass(const MeridianMesh& mesh,
                             const std::function<double(double, double)>& p);

// omega_{N-2} int_{tagged edges} s^{N-2} u v dl
SparseOperator boundary_mass(const MeridianMesh& mesh, BTag tag);

// RHS functional of an embedded line source: rhs_i = sum_q w_q g(x_q) N_i(x_q).
// Points need not align with the mesh; P1 shape functions are interpolated.
Eigen::VectorXd line_source(const MeridianMesh& mesh,
                            const std::vector<Eigen::Vector2d>& pts,
                            const std::vector<double>& wts,
                            const std::function<double(double, double)>& g);

// area-weighted average of adjacent triangle gradients at each vertex
Eigen::MatrixX2d recover_gradients(const DiscreteField& u);

enum class SurfIntegrand { one, u, u2, u_dnu, dnu2, grad2 };

double surface_integral(const DiscreteField& u, const Eigen::MatrixX2d& grads,
                        const SamplingCurve& c, SurfIntegrand kind);
double surface_integral(const FieldExpr& f, const SamplingCurve& c, SurfIntegrand kind);
double surface_integral(const SamplingCurve& c,
                        const std::function<double(double, double)>& f);

struct RegionIntegral {
    double value = 0.0;
    bool empty = true;
};

// 3-point (edge midpoint) quadrature over triangles whose sample points pass
// `inside`; integrand sees the midpoint, interpolated u and triangle gradient.
RegionIntegral region_integral(
    const MeridianMesh& mesh, const std::function<bool(double, double)>& inside,
    const DiscreteField& u,
    const std::function<double(const Eigen::Vector2d&, double, const Eigen::Vector2d&)>& f);

RegionIntegral region_integral(const MeridianMesh& mesh,
                               const std::function<bool(double, double)>& inside,
                               const std::function<double(double, double)>& f);

// Dirichlet solve K u = rhs with zeros on constrained nodes.
DiscreteField solve_dirichlet(const MeridianMesh& mesh, const SparseOperator& K,
                              const Eigen::VectorXd& rhs_full);

} // namespace dumbbell

#endif
