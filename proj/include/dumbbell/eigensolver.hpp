// Generalized symmetric eigensolver for the pencil (K, M_p) on meridian
// meshes: shift-invert subspace iteration with Rayleigh-Ritz on the free
// nodes, plus a dense Cholesky/Jacobi oracle for small problems.
#ifndef DUMBBELL_EIGENSOLVER_HPP
#define DUMBBELL_EIGENSOLVER_HPP

#include "dumbbell/operators.hpp"
#include "dumbbell/weight_model.hpp"

#include <string>
#include <utility>

namespace dumbbell {

struct SpectralResult {
    std::vector<double> eigenvalues;        // ascending
    std::vector<DiscreteField> eigenfields; // M-orthonormal, full node set
    std::vector<double> residuals;          // ||K u - lambda M u|| / ||u||
    std::string domain;
};

// k smallest finite eigenvalues of K u = lambda M u. The kernel of M never
// enters: every iterate passes through (K - sigma M)^{-1} M.
SpectralResult solve_pencil(const MeridianMesh& mesh, const SparseOperator& K,
                            const SparseOperator& M, int k, double tol,
                            double shift = 0.0,
                            const Eigen::VectorXd* guess_full = nullptr,
                            const char* domain = "");

SpectralResult solve_weighted(const MeridianMesh& mesh, const PWeight& p, int k,
                              double tol, double shift = 0.0,
                              const DiscreteField* track = nullptr);

struct LimitSpectra {
    SpectralResult dplus;
    SpectralResult dminus;
    double gap_rel = 0.0;  // min_j |lambda_k0(D+) - lambda_j(D-)| / lambda_k0(D+)
};

// Spectra of the decoupled truncated half spaces; throws std::runtime_error
// when the relative gap falls below `gap_threshold`.
LimitSpectra limit_spectra(const DumbbellSpec& spec, const PWeight& p, int k,
                           double gap_threshold = 0.2, double tol = 1e-9);

// Index of the eigenfield with maximal |<u, M g>| overlap.
int track_index(const SpectralResult& res, const SparseOperator& M,
                const Eigen::VectorXd& guess_full);

// lambda_k0(D+) discretized on the dumbbell triangulation itself: every node
// with z <= 1 is constrained, so the difference to lambda^eps isolates the
// channel coupling instead of mesh-to-mesh bias. Conforming spaces give
// lambda^eps <= reference exactly.
double matched_reference_lambda(const MeridianMesh& dumbbell_mesh, const PWeight& p,
                                double tol = 1e-10);

// Scales the field by +-1 so the recovered du/dx1 at the on-axis node nearest
// e1 (right side) is positive. Throws on a zero field or an ambiguous sign.
DiscreteField sign_normalize(const DiscreteField& field);

// Dense oracle: hand-rolled Cholesky reduction + cyclic Jacobi sweeps.
// Returns the finite eigenvalues ascending; eigenvectors optional.
std::vector<double> dense_jacobi_pencil(Eigen::MatrixXd K, Eigen::MatrixXd M,
                                        std::vector<Eigen::VectorXd>* vecs = nullptr);

// The channel attenuates the eigenfield by exp(-sqrt(lambda1(Sigma))/eps) per
// unit length, so its left lobe lies far below the eigensolver's residual
// floor. continue_left re-solves (K - lambda M) u = 0 on a cascade of
// subdomains {z < cut}, each fed by the previous stage's trace renormalized
// to unit amplitude; every left-side quantity is evaluated on the stage whose
// cut lies just right of the sampling location (quotients are scale free).
struct LeftContinuation {
    std::vector<double> cuts;           // descending corridor grid lines
    std::vector<DiscreteField> stages;  // stage j is consistent on {z < cuts[j]}
    const DiscreteField* global = nullptr;

    // deepest stage whose cut exceeds z; the global field when none does
    const DiscreteField& field_for(double z) const;
    const DiscreteField& final_stage() const;
};

LeftContinuation continue_left(const PWeight& p, double lambda,
                               const DiscreteField& u_global, double eps,
                               double lambda1_sigma);

} // namespace dumbbell

#endif
