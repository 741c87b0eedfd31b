#include "dumbbell/eigensolver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace dumbbell {

namespace {

// deterministic start vectors
double lcg(uint64_t& state)
{
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>((state >> 11) & ((1ULL << 52) - 1)) / (1ULL << 52) - 0.5;
}

// cyclic Jacobi on a symmetric matrix; V accumulates rotations
void jacobi_sweeps(Eigen::MatrixXd& S, Eigen::MatrixXd& V)
{
    const int n = static_cast<int>(S.rows());
    V = Eigen::MatrixXd::Identity(n, n);
    const double base = S.norm();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * S(p, q) * S(p, q);
        if (std::sqrt(off) <= 1e-15 * (base + 1e-300)) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(S(p, q)) <= 1e-18 * base) continue;
                const double theta = 0.5 * (S(q, q) - S(p, p)) / S(p, q);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double sip = S(i, p), siq = S(i, q);
                    S(i, p) = c * sip - s * siq;
                    S(i, q) = s * sip + c * siq;
                }
                for (int i = 0; i < n; ++i) {
                    const double spi = S(p, i), sqi = S(q, i);
                    S(p, i) = c * spi - s * sqi;
                    S(q, i) = s * spi + c * sqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
    }
}

// lower Cholesky, in place
void cholesky(Eigen::MatrixXd& A)
{
    const int n = static_cast<int>(A.rows());
    for (int j = 0; j < n; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
        if (d <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
        A(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double v = A(i, j);
            for (int k = 0; k < j; ++k) v -= A(i, k) * A(j, k);
            A(i, j) = v / A(j, j);
        }
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i) A(i, j) = 0.0;
}

void solve_lower(const Eigen::MatrixXd& L, Eigen::MatrixXd& B)
{
    const int n = static_cast<int>(L.rows());
    for (int c = 0; c < B.cols(); ++c)
        for (int i = 0; i < n; ++i) {
            double v = B(i, c);
            for (int k = 0; k < i; ++k) v -= L(i, k) * B(k, c);
            B(i, c) = v / L(i, i);
        }
}

void solve_lower_transpose(const Eigen::MatrixXd& L, Eigen::MatrixXd& B)
{
    const int n = static_cast<int>(L.rows());
    for (int c = 0; c < B.cols(); ++c)
        for (int i = n - 1; i >= 0; --i) {
            double v = B(i, c);
            for (int k = i + 1; k < n; ++k) v -= L(k, i) * B(k, c);
            B(i, c) = v / L(i, i);
        }
}

} // namespace

std::vector<double> dense_jacobi_pencil(Eigen::MatrixXd K, Eigen::MatrixXd M,
                                        std::vector<Eigen::VectorXd>* vecs)
{
    Eigen::MatrixXd L = K;
    cholesky(L);
    Eigen::MatrixXd S = M;
    solve_lower(L, S);                       // L^{-1} M
    S.transposeInPlace();
    solve_lower(L, S);                       // L^{-1} (L^{-1} M)^T = L^{-1} M L^{-T}
    S = 0.5 * (S + S.transpose().eval());    // kill roundoff asymmetry
    Eigen::MatrixXd V;
    jacobi_sweeps(S, V);

    const int n = static_cast<int>(S.rows());
    std::vector<std::pair<double, int>> mu(n);
    double mu_max = 0.0;
    for (int i = 0; i < n; ++i) {
        mu[i] = {S(i, i), i};
        mu_max = std::max(mu_max, std::abs(S(i, i)));
    }
    std::sort(mu.begin(), mu.end(), [](auto& a, auto& b) { return a.first > b.first; });

    std::vector<double> lambdas;
    if (vecs) vecs->clear();
    for (const auto& [m, idx] : mu) {
        if (m <= 1e-12 * mu_max) break;  // kernel of M
        lambdas.push_back(1.0 / m);
        if (vecs) {
            Eigen::MatrixXd q = V.col(idx);
            solve_lower_transpose(L, q);
            vecs->push_back(q.col(0));
        }
    }
    return lambdas;
}

SpectralResult solve_pencil(const MeridianMesh& mesh, const SparseOperator& K,
                            const SparseOperator& M, int k, double tol,
                            double shift, const Eigen::VectorXd* guess_full,
                            const char* domain)
{
    const int nf = static_cast<int>(K.free2full.size());
    if (M.full.norm() == 0.0) throw std::invalid_argument("solve_pencil: zero mass matrix");
    if (k < 1 || k > nf) throw std::invalid_argument("solve_pencil: bad eigenpair count");

    const Eigen::SparseMatrix<double>& Kf = K.reduced;
    const Eigen::SparseMatrix<double>& Mf = M.reduced;

    Eigen::SparseMatrix<double> A = Kf - shift * Mf;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_pencil: factorization of K - sigma M failed");

    const int m = std::min(nf, std::max(2 * k + 2, k + 4));
    Eigen::MatrixXd X(nf, m);
    uint64_t seed = 0x9e3779b97f4a7c15ULL;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < nf; ++i) X(i, j) = lcg(seed);
    if (guess_full) X.col(0) = K.restrict_to_free(*guess_full);

    std::vector<double> lambdas(k, 0.0);
    Eigen::MatrixXd ritz;
    bool converged = false;
    for (int iter = 0; iter < 300 && !converged; ++iter) {
        // shift-invert application and K-orthonormalization
        Eigen::MatrixXd Y(nf, m);
        for (int j = 0; j < m; ++j) Y.col(j) = lu.solve((Mf * X.col(j)).eval());
        for (int j = 0; j < m; ++j) {
            for (int l = 0; l < j; ++l) {
                const double c = Y.col(l).dot(Kf * Y.col(j));
                Y.col(j) -= c * Y.col(l);
            }
            const double nrm = std::sqrt(std::max(Y.col(j).dot(Kf * Y.col(j)), 1e-300));
            Y.col(j) /= nrm;
        }
        // Rayleigh-Ritz on the pencil restricted to span(Y)
        Eigen::MatrixXd Kp = Y.transpose() * (Kf * Y).eval();
        Eigen::MatrixXd Mp = Y.transpose() * (Mf * Y).eval();
        Kp = 0.5 * (Kp + Kp.transpose().eval());
        Mp = 0.5 * (Mp + Mp.transpose().eval());
        Eigen::MatrixXd L = Kp;
        cholesky(L);
        Eigen::MatrixXd S = Mp;
        solve_lower(L, S);
        S.transposeInPlace();
        solve_lower(L, S);
        S = 0.5 * (S + S.transpose().eval());
        Eigen::MatrixXd V;
        jacobi_sweeps(S, V);
        std::vector<std::pair<double, int>> mu(m);
        for (int i = 0; i < m; ++i) mu[i] = {S(i, i), i};
        std::sort(mu.begin(), mu.end(), [](auto& a, auto& b) { return a.first > b.first; });
        Eigen::MatrixXd Q(m, m);
        for (int i = 0; i < m; ++i) Q.col(i) = V.col(mu[i].second);
        solve_lower_transpose(L, Q);
        ritz = Y * Q;

        converged = true;
        for (int i = 0; i < k; ++i) {
            if (mu[i].first <= 0.0) { converged = false; break; }
            lambdas[i] = 1.0 / mu[i].first;
            const Eigen::VectorXd r = Kf * ritz.col(i) - lambdas[i] * (Mf * ritz.col(i));
            if (r.norm() > tol * ritz.col(i).norm()) converged = false;
        }
        X = ritz;
        if (iter == 299 && !converged)
            throw std::runtime_error("solve_pencil: no convergence within iteration cap");
    }

    SpectralResult out;
    out.domain = domain;
    for (int i = 0; i < k; ++i) {
        const double mn = std::sqrt(ritz.col(i).dot(Mf * ritz.col(i)));
        Eigen::VectorXd u = ritz.col(i) / mn;
        // Rayleigh-Ritz acts on the unshifted pencil, so the Ritz values are
        // the eigenvalues themselves; the shift only steers the subspace.
        const double lam = lambdas[i];
        const Eigen::VectorXd r = Kf * u - lam * (Mf * u);
        out.eigenvalues.push_back(lam);
        out.residuals.push_back(r.norm() / u.norm());
        DiscreteField f;
        f.mesh = &mesh;
        f.values = K.expand(u);
        out.eigenfields.push_back(std::move(f));
    }
    return out;
}

SpectralResult solve_weighted(const MeridianMesh& mesh, const PWeight& p, int k,
                              double tol, double shift, const DiscreteField* track)
{
    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [&](double z, double s) { return p.eval(z, s); });
    Eigen::VectorXd guess;
    const Eigen::VectorXd* gp = nullptr;
    if (track) {
        guess = Eigen::VectorXd::Zero(mesh.nv());
        int t;
        std::array<double, 3> b;
        for (int i = 0; i < mesh.nv(); ++i) {
            const auto& v = mesh.verts[i];
            if (track->mesh->locate(v.x(), v.y(), t, b))
                guess[i] = b[0] * track->values[track->mesh->tris[t][0]] +
                           b[1] * track->values[track->mesh->tris[t][1]] +
                           b[2] * track->values[track->mesh->tris[t][2]];
        }
        gp = &guess;
    }
    return solve_pencil(mesh, K, M, k, tol, shift, gp, "dumbbell");
}

int track_index(const SpectralResult& res, const SparseOperator& M,
                const Eigen::VectorXd& guess_full)
{
    int best = 0;
    double best_ov = -1.0;
    for (size_t i = 0; i < res.eigenfields.size(); ++i) {
        const double ov = std::abs(guess_full.dot(M.full * res.eigenfields[i].values));
        if (ov > best_ov) {
            best_ov = ov;
            best = static_cast<int>(i);
        }
    }
    return best;
}

LimitSpectra limit_spectra(const DumbbellSpec& spec, const PWeight& p, int k,
                           double gap_threshold, double tol)
{
    LimitSpectra out;
    const MeridianMesh mplus = build_half_space_mesh(spec, true);
    const MeridianMesh mminus = build_half_space_mesh(spec, false);
    {
        const SparseOperator K = stiffness(mplus);
        const SparseOperator M = weighted_mass(mplus, [&](double z, double s) { return p.eval(z, s); });
        out.dplus = solve_pencil(mplus, K, M, k, tol, 0.0, nullptr, "D+");
        out.dplus.domain = "D+";
    }
    {
        const SparseOperator K = stiffness(mminus);
        const SparseOperator M = weighted_mass(mminus, [&](double z, double s) { return p.eval(z, s); });
        out.dminus = solve_pencil(mminus, K, M, std::max(k, 5), tol, 0.0, nullptr, "D-");
        out.dminus.domain = "D-";
    }
    // eigenfields reference local meshes; keep only spectra for the limit data
    out.dplus.eigenfields.clear();
    out.dminus.eigenfields.clear();

    const double l0 = out.dplus.eigenvalues[0];
    double gap = 1e300;
    for (double lj : out.dminus.eigenvalues) gap = std::min(gap, std::abs(l0 - lj));
    out.gap_rel = gap / l0;
    if (out.gap_rel < gap_threshold)
        throw std::runtime_error("limit_spectra: spectral gap " + std::to_string(out.gap_rel) +
                                 " below threshold (lambda_k0(D+) too close to sigma_p(D-))");
    return out;
}

const DiscreteField& LeftContinuation::field_for(double z) const
{
    const DiscreteField* best = global;
    for (size_t j = 0; j < cuts.size(); ++j)
        if (cuts[j] > z + 1e-12) best = &stages[j];
    return *best;
}

const DiscreteField& LeftContinuation::final_stage() const
{
    return stages.empty() ? *global : stages.back();
}

LeftContinuation continue_left(const PWeight& p, double lambda,
                               const DiscreteField& u_global, double eps,
                               double lambda1_sigma)
{
    const MeridianMesh& mesh = *u_global.mesh;
    LeftContinuation lc;
    lc.global = &u_global;

    const double rate = std::sqrt(std::max(lambda1_sigma / (eps * eps) - lambda, 1.0));
    // corridor grid lines available as cuts
    std::vector<double> zlines;
    for (int i = 0; i < mesh.nv(); ++i) {
        const auto& v = mesh.verts[i];
        if (v.y() < 0.5 * eps && v.x() > 1e-12 && v.x() < 1.0 - 1e-12) zlines.push_back(v.x());
    }
    std::sort(zlines.begin(), zlines.end());
    zlines.erase(std::unique(zlines.begin(), zlines.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 zlines.end());
    if (zlines.empty()) return lc;

    const auto snap = [&](double z) {
        double best = zlines.front();
        for (double v : zlines)
            if (std::abs(v - z) < std::abs(best - z)) best = v;
        return best;
    };

    // The top cut sits high, where the global eigenvector still carries ample
    // signal; later cuts keep the within-stage dynamic range around e^{-14}.
    // The last cut stays above 4 eps so every sampled scale (hat slices, the
    // fit window) lies inside the final stage.
    std::vector<double> cuts;
    double c = snap(0.95);
    cuts.push_back(c);
    while (c * rate > 15.0) {
        const double next = snap(c - 14.0 / rate);
        if (next >= c - 1e-12 || next < 4.0 * eps) break;
        c = next;
        cuts.push_back(c);
    }

    const SparseOperator K = stiffness(mesh);
    const SparseOperator M = weighted_mass(mesh, [&](double z, double s) { return p.eval(z, s); });
    const Eigen::SparseMatrix<double> A = K.full - lambda * M.full;

    const DiscreteField* prev = &u_global;
    for (double cut : cuts) {
        // unknowns: free nodes with z < cut; data: the z = cut column
        std::vector<int> role(mesh.nv(), 0);  // 0 outside, 1 interior, 2 data
        std::vector<int> idx(mesh.nv(), -1);
        int ni = 0;
        for (int i = 0; i < mesh.nv(); ++i) {
            const double z = mesh.verts[i].x();
            if (std::abs(z - cut) < 1e-12) role[i] = 2;
            else if (z < cut && !mesh.dirichlet[i]) {
                role[i] = 1;
                idx[i] = ni++;
            }
        }
        // renormalized data from the previous stage
        double scale = 0.0;
        for (int i = 0; i < mesh.nv(); ++i)
            if (role[i] == 2) scale = std::max(scale, std::abs(prev->values[i]));
        if (!(scale > 0.0))
            throw std::runtime_error("continue_left: vanishing trace data at the cut");

        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
                const int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
                if (role[i] != 1) continue;
                if (role[j] == 1) trip.emplace_back(idx[i], idx[j], it.value());
                else if (role[j] == 2) rhs[idx[i]] -= it.value() * prev->values[j] / scale;
            }
        Eigen::SparseMatrix<double> Aii(ni, ni);
        Aii.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(Aii);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("continue_left: stage factorization failed");
        const Eigen::VectorXd x = lu.solve(rhs);

        DiscreteField stage;
        stage.mesh = &mesh;
        stage.values = Eigen::VectorXd::Zero(mesh.nv());
        for (int i = 0; i < mesh.nv(); ++i) {
            if (role[i] == 1) stage.values[i] = x[idx[i]];
            else if (role[i] == 2) stage.values[i] = prev->values[i] / scale;
        }
        lc.stages.push_back(std::move(stage));
        lc.cuts.push_back(cut);
        prev = &lc.stages.back();
    }
    return lc;
}

double matched_reference_lambda(const MeridianMesh& dumbbell_mesh, const PWeight& p,
                                double tol)
{
    MeridianMesh ref = dumbbell_mesh;
    for (int i = 0; i < ref.nv(); ++i)
        if (ref.verts[i].x() <= 1.0 + 1e-12) ref.dirichlet[i] = 1;
    ref.build_locator();
    const SparseOperator K = stiffness(ref);
    const SparseOperator M = weighted_mass(ref, [&](double z, double s) { return p.eval(z, s); });
    return solve_pencil(ref, K, M, 1, tol, 0.0, nullptr, "D+ matched").eigenvalues[0];
}

DiscreteField sign_normalize(const DiscreteField& field)
{
    const MeridianMesh& m = *field.mesh;
    if (field.values.norm() == 0.0)
        throw std::invalid_argument("sign_normalize: zero field");
    // on-axis node nearest e1 on the right side
    int best = -1;
    double best_d = 1e300;
    for (int i = 0; i < m.nv(); ++i) {
        const auto& v = m.verts[i];
        if (v.y() > 1e-12 || v.x() < 1.0 - 1e-12) continue;
        const double d = std::abs(v.x() - 1.0);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best < 0) throw std::runtime_error("sign_normalize: no on-axis node right of e1");
    const Eigen::MatrixX2d g = recover_gradients(field);
    const double d1 = g(best, 0);
    if (std::abs(d1) < 1e-10)
        throw std::runtime_error("sign_normalize: du/dx1 at e1 below 1e-10, sign ambiguous");
    DiscreteField out = field;
    if (d1 < 0.0) out.values = -out.values;
    return out;
}

} // namespace dumbbell
