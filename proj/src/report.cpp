#include "dumbbell/report.hpp"
#include "dumbbell/constants.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace dumbbell {

namespace {

std::vector<double> geomspace(double a, double b, int n)
{
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    return out;
}

// meshless polar product quadrature of f over {rho0<|x|<rho1} x {alpha range}
double polar_integral(int N, const std::function<double(double, double)>& f,
                      double rho0, double rho1, double a0, double a1,
                      int nr_panels, int na)
{
    std::vector<double> ax, aw, rx, rw;
    gauss_legendre(na, a0, a1, ax, aw);
    double total = 0.0;
    // geometric radial panels handle the |x|^{-2N} decay
    const double grow = std::pow(rho1 / rho0, 1.0 / nr_panels);
    double lo = rho0;
    for (int p = 0; p < nr_panels; ++p) {
        const double hi = lo * grow;
        gauss_legendre(8, lo, hi, rx, rw);
        for (size_t i = 0; i < rx.size(); ++i)
            for (size_t j = 0; j < ax.size(); ++j) {
                const double z = rx[i] * std::cos(ax[j]);
                const double s = rx[i] * std::sin(ax[j]);
                total += rw[i] * aw[j] * std::pow(rx[i], N - 1) *
                         std::pow(std::sin(ax[j]), N - 2) * f(z, s);
            }
        lo = hi;
    }
    return total * omega_meridian(N);
}

struct Csv {
    std::string body;
    void row(const std::string& line) { body += line + "\n"; }
    void write(const std::string& dir, const std::string& name) const
    {
        std::ofstream out(dir + "/" + name, std::ios::binary);
        out << body;
    }
};

double median_derivative_residual(const LabSession::Rung& rung, const PWeight& p,
                                  double k_tilde, int quad_order)
{
    const double eps = rung.eps;
    std::vector<double> rs;
    const double r1 = -1.15 * eps, r0 = -std::min(0.4, 4.0 * k_tilde);
    for (int i = 0; i <= 22; ++i) rs.push_back(r0 + (r1 - r0) * i / 22.0);
    const auto ds = derivative_residual(rung.left.final_stage(), p, rung.lambda, eps,
                                        FreqRegime::left, rs, quad_order);
    double scale = 0.0;
    for (const auto& d : ds) scale = std::max(scale, std::abs(d.closed));
    std::vector<double> rel;
    for (const auto& d : ds) rel.push_back(std::abs(d.numeric - d.closed) / scale);
    std::sort(rel.begin(), rel.end());
    return rel[rel.size() / 2];
}

} // namespace

std::string csv_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

LabSession::LabSession(ExperimentConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

const CrossSectionSpectrum& LabSession::cs()
{
    if (!cs_)
        cs_ = std::make_unique<CrossSectionSpectrum>(
            solve_cross_section(cfg_.dumbbell.N, cfg_.cross_section_resolution));
    return *cs_;
}

const AngularProfile& LabSession::angular()
{
    if (!ap_) ap_ = std::make_unique<AngularProfile>(angular_profile(cfg_.dumbbell.N, 64));
    return *ap_;
}

const ModelDomainMesh& LabSession::model()
{
    if (!model_)
        model_ = std::make_unique<ModelDomainMesh>(build_model_mesh(
            cfg_.dumbbell.N, cfg_.L_tube, cfg_.R_model, cfg_.model_n_alpha,
            cfg_.model_ns_tube, cfg_.dumbbell.grading_ratio, cfg_.dumbbell.rel_step,
            cfg_.dumbbell.h_far));
    return *model_;
}

const ProfilePair& LabSession::profiles()
{
    if (!profiles_) {
        profiles_ = std::make_unique<ProfilePair>(compute_profiles(model(), cs()));
    }
    return *profiles_;
}

const LimitSpectra& LabSession::limits()
{
    if (!limits_) {
        DumbbellSpec spec = cfg_.dumbbell;
        spec.eps = cfg_.eps_ladder.front();
        limits_ = std::make_unique<LimitSpectra>(
            limit_spectra(spec, cfg_.weight, 3, cfg_.gap_threshold, cfg_.eig_tol));
    }
    return *limits_;
}

std::unique_ptr<LabSession::Rung> LabSession::solve_rung(const DumbbellSpec& spec,
                                                         const Rung* track)
{
    auto rung = std::make_unique<Rung>();
    rung->eps = spec.eps;
    rung->mesh = std::make_unique<MeridianMesh>(build_mesh(spec));
    const double shift = track ? 0.9 * track->lambda : 0.0;
    rung->spec = solve_weighted(*rung->mesh, cfg_.weight, track ? 2 : 1, cfg_.eig_tol, shift,
                                track ? &track->u : nullptr);
    int branch = 0;
    if (track) {
        // continue the simple branch by maximal M-inner-product overlap
        const SparseOperator M = weighted_mass(
            *rung->mesh, [&](double z, double s) { return cfg_.weight.eval(z, s); });
        Eigen::VectorXd guess = Eigen::VectorXd::Zero(rung->mesh->nv());
        int t;
        std::array<double, 3> b;
        for (int i = 0; i < rung->mesh->nv(); ++i) {
            const auto& v = rung->mesh->verts[i];
            if (track->u.mesh->locate(v.x(), v.y(), t, b))
                guess[i] = b[0] * track->u.values[track->u.mesh->tris[t][0]] +
                           b[1] * track->u.values[track->u.mesh->tris[t][1]] +
                           b[2] * track->u.values[track->u.mesh->tris[t][2]];
        }
        branch = track_index(rung->spec, M, guess);
    }
    rung->lambda = rung->spec.eigenvalues[branch];
    rung->u = sign_normalize(rung->spec.eigenfields[branch]);
    rung->matched_ref = matched_reference_lambda(*rung->mesh, cfg_.weight, cfg_.eig_tol);
    rung->left = continue_left(cfg_.weight, rung->lambda, rung->u, spec.eps, cs().lambda1);
    return rung;
}

LabSession::Rung& LabSession::rung(double eps)
{
    auto it = rungs_.find(eps);
    if (it != rungs_.end()) return *it->second;
    // track from the nearest larger ladder rung already solved
    const Rung* track = nullptr;
    for (auto& [e, r] : rungs_)
        if (e > eps && (!track || e < track->eps)) track = r.get();
    DumbbellSpec spec = cfg_.dumbbell;
    spec.eps = eps;
    auto rung_ptr = solve_rung(spec, track);
    auto& ref = *rung_ptr;
    rungs_[eps] = std::move(rung_ptr);
    return ref;
}

std::vector<double> LabSession::fit_window(double eps) const
{
    return geomspace(cfg_.fit_window_lo_factor * eps, cfg_.fit_window_hi,
                     cfg_.fit_window_count);
}

namespace {

void claims_cross_section(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const auto& cs3 = lab.cs();
    const double ex3 = cross_section_lambda1_extrapolated(3, cfg.cross_section_resolution);
    const double ex4 = cross_section_lambda1_extrapolated(4, cfg.cross_section_resolution);
    const double rel3 = std::abs(cs3.lambda1 - ex3) / ex3;
    const double rel4 = std::abs(ex4 - PI * PI) / (PI * PI);
    claims.push_back({1, "cross-section lambda1", rel3 < 1e-3 && rel4 < 1e-4,
                      cs3.lambda1,
                      "lambda1(N=3)=" + csv_num(cs3.lambda1) + " vs extrapolated " + csv_num(ex3) +
                          "; N=4 extrapolated vs pi^2 rel " + csv_num(rel4)});

    const auto& ap = lab.angular();
    const double up_err = std::abs(ap.upsilonN - std::sqrt(2.0 * PI / 3.0));
    double ray_err = 0.0;
    for (int N : {3, 4, 5})
        ray_err = std::max(ray_err, std::abs(y1_eigenvalue_check(N, 64) - (N - 1)));
    claims.push_back({2, "angular data", up_err < 1e-6 && ray_err < 1e-5, ap.upsilonN,
                      "Upsilon_3 err " + csv_num(up_err) + "; max Rayleigh deviation " +
                          csv_num(ray_err)});

    Csv csv;
    csv.row("N,resolution,lambda1,lambda1_extrapolated,upsilonN,rayleigh_dev");
    for (int N : {3, 4, 5}) {
        const auto c = solve_cross_section(N, cfg.cross_section_resolution);
        const auto a = angular_profile(N, 64);
        csv.row(std::to_string(N) + "," + std::to_string(cfg.cross_section_resolution) + "," +
                csv_num(c.lambda1) + "," +
                csv_num(cross_section_lambda1_extrapolated(N, cfg.cross_section_resolution)) +
                "," + csv_num(a.upsilonN) + "," +
                csv_num(std::abs(y1_eigenvalue_check(N, 64) - (N - 1))));
    }
    csv.write(out, "cross_section.csv");
}

void claims_oracles(LabSession& lab, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const int N = cfg.dumbbell.N;
    const auto p3 = poincare_optimal_constant(N, 10.0, std::max(32, cfg.dumbbell.n_alpha),
                                              std::min(0.08, cfg.dumbbell.rel_step),
                                              std::min(0.4, cfg.dumbbell.h_far), cfg.eig_tol);
    claims.push_back({3, "optimal Poincare constant",
                      std::abs(p3.constant - 2.0) / 2.0 <= 0.02 &&
                          std::abs(p3.trial_quotient - 2.0) <= 1e-6,
                      p3.constant,
                      "steklov " + csv_num(p3.constant) + ", trial " + csv_num(p3.trial_quotient) +
                          ", correlation " + csv_num(p3.correlation)});

    // constant-frequency oracles
    FieldExpr w;
    w.val = [N](double z, double s) {
        const double r = std::sqrt(z * z + s * s);
        return z / std::pow(r, N);
    };
    w.grad = [N](double z, double s) -> Eigen::Vector2d {
        const double r2 = z * z + s * s;
        const double rN = std::pow(std::sqrt(r2), N);
        return {1.0 / rN - N * z * z / (rN * r2), -N * z * s / (rN * r2)};
    };
    const auto annulus = build_exterior_annulus(N, 8.0, cfg.dumbbell.n_alpha,
                                                cfg.dumbbell.rel_step, cfg.dumbbell.h_far);
    double ext_dev = 0.0;
    for (const auto& s : frequency_exterior_model(w, annulus, {1.0, 1.6, 2.4, 3.2, 4.0},
                                                  cfg.quad_order)
                             .samples)
        ext_dev = std::max(ext_dev, std::abs(s.N - (N - 1)) / (N - 1));
    // tube oracle through the interpolated field and gradient recovery (the
    // expression route would be exact by construction, d1 h = sqrt(l1) h)
    const auto h = eval_h(lab.cs());
    const auto tube = build_cylinder_mesh(N, 4.0, 1.0, 96, 32);
    DiscreteField hf;
    hf.mesh = &tube;
    hf.values.resize(tube.nv());
    for (int i = 0; i < tube.nv(); ++i)
        hf.values[i] = h.val(tube.verts[i].x() - 4.0, tube.verts[i].y());
    double tube_dev = 0.0;
    const double g = lab.cs().sqrt_lambda1();
    for (const auto& s :
         frequency_tube_model(hf, {0.8, 1.4, 2.0, 2.6, 3.2}, cfg.quad_order).samples)
        tube_dev = std::max(tube_dev, std::abs(s.N - g) / g);
    claims.push_back({4, "constant-frequency oracles", ext_dev < 0.01 && tube_dev < 0.01,
                      ext_dev,
                      "exterior max rel dev " + csv_num(ext_dev) + ", tube max rel dev " +
                          csv_num(tube_dev)});

    // Kelvin energy identity for the pair (x1, x1/|x|^N) across the unit sphere
    FieldExpr lin;
    lin.val = [](double z, double) { return z; };
    lin.grad = [](double, double) -> Eigen::Vector2d { return {1.0, 0.0}; };
    const auto ktr = kelvin(lin, {0.0, 0.0}, N);
    const double lhs_vol = polar_integral(
        N, [&](double z, double s) { return lin.grad(z, s).squaredNorm(); }, 1e-6, 1.0,
        0.5 * PI, PI, 24, 48);
    std::vector<double> ax, aw;
    gauss_legendre(64, 0.5 * PI, PI, ax, aw);
    double trace = 0.0;
    for (size_t q = 0; q < ax.size(); ++q)
        trace += aw[q] * omega_meridian(N) * std::pow(std::sin(ax[q]), N - 2) *
                 std::cos(ax[q]) * std::cos(ax[q]);
    const double lhs = lhs_vol + (N - 2) * trace;
    const double rhs = polar_integral(
        N, [&](double z, double s) { return ktr.grad(z, s).squaredNorm(); }, 1.0, 60.0,
        0.5 * PI, PI, 48, 48);
    claims.push_back({5, "Kelvin energy identity", std::abs(lhs - rhs) / std::abs(rhs) < 0.01,
                      lhs, "interior side " + csv_num(lhs) + ", exterior side " + csv_num(rhs)});
}

void claims_profiles(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const double g = lab.cs().sqrt_lambda1();
    const auto& pp = lab.profiles();
    const auto tube = frequency_tube_model(pp.phi1, {-3.0}, cfg.quad_order);
    const double n_phi1 = tube.samples[0].N;
    const auto ext = frequency_exterior_model(pp.phi2, true, {5.0}, cfg.quad_order);
    const double n_hat = ext.samples[0].N;
    const int N = cfg.dumbbell.N;
    claims.push_back({6, "profile frequencies",
                      std::abs(n_phi1 - g) / g < 0.05 &&
                          std::abs(n_hat - (N - 1)) / (N - 1) < 0.05,
                      n_phi1,
                      "N_Phi1(-3)=" + csv_num(n_phi1) + " vs " + csv_num(g) + "; N_hat(5)=" +
                          csv_num(n_hat) + " vs " + csv_num(static_cast<double>(N - 1))});

    // gnuplot-ready frequency curves of the junction profiles
    Csv fcsv;
    fcsv.row("kind,r,N");
    std::vector<double> tube_rs;
    for (double r = -6.0; r <= 0.9; r += 0.25) tube_rs.push_back(r);
    for (const auto& smp : frequency_tube_model(pp.phi1, tube_rs, cfg.quad_order).samples)
        if (!smp.dropped)
            fcsv.row("phi1_tube," + csv_num(smp.r) + "," + csv_num(smp.N));
    std::vector<double> ext_ts;
    for (double t = 1.0; t <= 8.0; t += 0.5) ext_ts.push_back(t);
    for (const auto& smp : frequency_exterior_model(pp.phi2, true, ext_ts, cfg.quad_order).samples)
        if (!smp.dropped)
            fcsv.row("phi2_exterior," + csv_num(smp.r) + "," + csv_num(smp.N));
    fcsv.write(out, "profile_freq.csv");

    Csv csv;
    csv.row("check,value,window");
    const double C2 = pp.phi1.eval(0.0, 0.0) / std::exp(-0.5 * g);
    csv.row("phi1_tube_decay_C2," + csv_num(C2) + ",x1=0");
    csv.row("phi1_farfield_c," + csv_num(fit_farfield_constant(pp.phi1, lab.model(), 4.0, true)) +
            ",t=4");
    csv.row("phi2_farfield_c," + csv_num(fit_farfield_constant(pp.phi2, lab.model(), 4.0, false)) +
            ",t=4");
    csv.row("phi1_freq_deep," + csv_num(n_phi1) + ",r=-3");
    csv.row("phi2_exterior_freq," + csv_num(n_hat) + ",t=5");
    csv.write(out, "profile_checks.csv");
}

void claims_spectra(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    // reported (not asserted) index bookkeeping on the truncated domains:
    // k_bar = 1 + card{j : lambda_j(D-) <= lambda_1(D+)}
    int k_bar = 1;
    for (double lj : lab.limits().dminus.eigenvalues)
        if (lj <= lab.limits().dplus.eigenvalues[0]) ++k_bar;
    Csv csv;
    csv.row("eps,lambda_eps,lambda_matched_ref,gap_matched,lambda1_Dplus,gap_rel_Dminus,k_bar");
    bool decreasing = true, positive = true;
    double prev_gap = 1e300;
    for (double eps : cfg.eps_ladder) {
        auto& r = lab.rung(eps);
        const double gap = r.matched_ref - r.lambda;
        positive = positive && gap > 0.0;
        decreasing = decreasing && gap < prev_gap;
        prev_gap = gap;
        csv.row(csv_num(eps) + "," + csv_num(r.lambda) + "," + csv_num(r.matched_ref) + "," +
                csv_num(gap) + "," + csv_num(lab.limits().dplus.eigenvalues[0]) + "," +
                csv_num(lab.limits().gap_rel) + "," + std::to_string(k_bar));
    }
    csv.write(out, "spectra.csv");
    auto& small = lab.rung(cfg.eps_ladder.back());
    claims.push_back({8, "eigenvalue convergence trend", positive && decreasing,
                      small.matched_ref - small.lambda,
                      "matched-reference gaps strictly decreasing along the ladder; D- gap_rel " +
                          csv_num(lab.limits().gap_rel)});
}

void emit_frequency_csv(LabSession& lab, const std::string& out)
{
    const auto& cfg = lab.cfg();
    Csv csv;
    csv.row("regime,eps,r,D,H,N");
    for (double eps : cfg.eps_ladder) {
        auto& rung = lab.rung(eps);
        std::vector<double> rs;
        for (double r = -0.9; r <= -1.1 * eps; r += 0.05) rs.push_back(r);
        for (double r = 0.05; r <= 0.96; r += 0.05) rs.push_back(r);
        for (double r = 1.0 + 1.1 * eps + 0.02; r <= 3.0; r += 0.1) rs.push_back(r);
        for (double r : rs) {
            // left spheres live in D-, where only the final stage carries
            // accurate values; corridor slices use the stage local to r
            const DiscreteField& f = r < 0.0 ? rung.left.final_stage()
                                   : r < 1.0 ? rung.left.field_for(r + 0.02)
                                             : rung.u;
            const auto fp = frequency_dumbbell(f, cfg.weight, rung.lambda, eps, {r},
                                               cfg.quad_order);
            const auto& s = fp.samples[0];
            if (s.dropped) continue;
            csv.row(std::string(to_string(s.regime)) + "," + csv_num(eps) + "," + csv_num(r) +
                    "," + csv_num(s.D) + "," + csv_num(s.H) + "," + csv_num(s.N));
        }
    }
    csv.write(out, "frequency.csv");
}

void claims_right_limit(LabSession& lab, std::vector<Claim>& claims)
{
    // Prop right-junction limit at t = 0.1 with eps = 0.01
    const auto& cfg = lab.cfg();
    auto& r = lab.rung(0.01);
    const auto fp = frequency_dumbbell(r.u, cfg.weight, r.lambda, 0.01, {1.1}, cfg.quad_order);
    const double val = fp.samples[0].N;
    claims.push_back({7, "right-junction frequency limit", val >= 0.9 && val <= 1.1, val,
                      "N_eps(1.1) at eps=0.01 = " + csv_num(val)});
}

void claims_blowup(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const int N = cfg.dumbbell.N;
    const auto& ap = lab.angular();
    const double eps = cfg.eps_ladder.back();
    auto& rung = lab.rung(eps);
    const auto& uL = rung.left.final_stage();
    const auto U = rescale(uL, eps, RescaleKind::U_normalized, cfg.k_tilde, 1.0,
                           cfg.quad_order);
    const auto Us = U.as_scalar();
    const auto window = lab.fit_window(eps);

    Csv hu;
    hu.row("lambda,H_U,mu");
    const auto hs = H_U(*uL.mesh, Us, window, cfg.quad_order);
    const auto mus = mu_projection(N, Us, ap, window, cfg.quad_order);
    for (size_t i = 0; i < hs.size(); ++i)
        hu.row(csv_num(hs[i].first) + "," + csv_num(hs[i].second) + "," +
               csv_num(mus[i].second));
    hu.write(out, "hu.csv");

    const auto fit = fit_power(hs);
    claims.push_back({9, "singularity rate", std::abs(fit.exponent + 2.0 * (N - 1)) <= 0.4,
                      fit.exponent,
                      "H_U log-log slope " + csv_num(fit.exponent) + " on [" +
                          csv_num(fit.lambda_min) + ", " + csv_num(fit.lambda_max) + "]"});

    const auto est = beta_from_fit(*uL.mesh, Us, ap, window, cfg.quad_order);
    const double bform = beta_from_formula(*uL.mesh, Us, cfg.weight,
                                           lab.limits().dplus.eigenvalues[0], ap,
                                           cfg.quad_order);
    const bool signs = est.beta_fit < 0.0 && bform < 0.0;
    const double reldiff = std::abs(bform - est.beta_fit) / std::abs(est.beta_fit);
    claims.push_back({10, "beta coefficient consistency", signs && reldiff <= 0.10,
                      est.beta_fit,
                      "beta_fit " + csv_num(est.beta_fit) + ", beta_mu " + csv_num(est.beta_mu) +
                          ", beta_formula " + csv_num(bform) + ", rel diff " + csv_num(reldiff)});

    Csv beta;
    beta.row("eps,beta_fit,beta_formula,exponent");
    for (double e : cfg.eps_ladder) {
        auto& rg = lab.rung(e);
        const auto& uf = rg.left.final_stage();
        const auto Ue = rescale(uf, e, RescaleKind::U_normalized, cfg.k_tilde, 1.0,
                                cfg.quad_order);
        const auto wdw = lab.fit_window(e);
        const auto be = beta_from_fit(*uf.mesh, Ue.as_scalar(), ap, wdw, cfg.quad_order);
        const double bf = beta_from_formula(*uf.mesh, Ue.as_scalar(), cfg.weight,
                                            lab.limits().dplus.eigenvalues[0], ap,
                                            cfg.quad_order);
        beta.row(csv_num(e) + "," + csv_num(be.beta_fit) + "," + csv_num(bf) + "," +
                 csv_num(be.h_fit.exponent));
    }
    beta.write(out, "beta.csv");

    // nodal exclusion
    const auto scan = nodal_sign_scan(uL, {0.05, 0.1}, false, 64);
    Csv nodal;
    nodal.row("eps,r,min_u");
    bool nodal_ok = true;
    for (const auto& [r, mn] : scan.min_on_sphere) {
        nodal.row(csv_num(eps) + "," + csv_num(r) + "," + csv_num(mn));
        nodal_ok = nodal_ok && mn > 0.0;
    }
    const auto scan_r = nodal_sign_scan(rung.u, {2.0 * eps, 4.0 * eps}, true, 64);
    for (const auto& [r, mn] : scan_r.min_on_sphere) {
        nodal.row(csv_num(eps) + "," + csv_num(1.0 + r) + "," + csv_num(mn));
        nodal_ok = nodal_ok && mn > 0.0;
    }
    nodal.write(out, "nodal.csv");
    claims.push_back({11, "nodal exclusion", nodal_ok,
                      scan.min_on_sphere.front().second,
                      "min over Gamma_r^- at r in {0.05, 0.1} and right analogue all positive"});

    // blow-up limits against the junction profiles
    const auto tld = rescale(rung.u, eps, RescaleKind::right_tilde, cfg.k_tilde, 1.0,
                             cfg.quad_order);
    const auto cr_t = compare_blowup_to_profile(tld, lab.profiles().phi1);
    const auto hat = rescale(rung.left.final_stage(), eps, RescaleKind::left_hat,
                             cfg.k_tilde, 1.0, cfg.quad_order);
    const auto cr_h = compare_blowup_to_profile(hat, lab.profiles().phi2);
    claims.push_back({12, "blow-up profiles",
                      cr_t.rel_residual <= 0.10 && cr_t.c > 0.0 && cr_h.rel_residual <= 0.10,
                      cr_t.rel_residual,
                      "tilde: c=" + csv_num(cr_t.c) + " res=" + csv_num(cr_t.rel_residual) +
                          "; hat: c=" + csv_num(cr_h.c) + " res=" + csv_num(cr_h.rel_residual)});

    // sensitivity of the beta consistency to the normalization radius
    Csv kts;
    kts.row("k_tilde,beta_fit,beta_formula,rel_diff");
    for (double kt : {0.20, 0.25, 0.30}) {
        const auto Ukt = rescale(uL, eps, RescaleKind::U_normalized, kt, 1.0, cfg.quad_order);
        const auto bekt = beta_from_fit(*uL.mesh, Ukt.as_scalar(), ap, window, cfg.quad_order);
        const double bfkt = beta_from_formula(*uL.mesh, Ukt.as_scalar(), cfg.weight,
                                              lab.limits().dplus.eigenvalues[0], ap,
                                              cfg.quad_order);
        kts.row(csv_num(kt) + "," + csv_num(bekt.beta_fit) + "," + csv_num(bfkt) + "," +
                csv_num(std::abs(bfkt - bekt.beta_fit) / std::abs(bekt.beta_fit)));
    }
    kts.write(out, "ktilde_sensitivity.csv");

    // mu expansion diagnostics
    const auto me = mu_expansion_check(*uL.mesh, Us, cfg.weight,
                                       lab.limits().dplus.eigenvalues[0], ap, window,
                                       cfg.quad_order);
    Csv mucsv;
    mucsv.row("lambda,deviation,bracket,correction_exponent");
    for (const auto& [lam, dev] : me.deviation)
        mucsv.row(csv_num(lam) + "," + csv_num(dev) + "," + csv_num(me.bracket) + "," +
                  csv_num(me.correction_exponent));
    mucsv.write(out, "mu_expansion.csv");
}

void claims_identities(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const double eps = 0.1;
    auto& coarse = lab.rung(eps);

    DumbbellSpec fine_spec = cfg.dumbbell;
    fine_spec.eps = eps;
    fine_spec.n_alpha *= 2;
    fine_spec.corridor_cells *= 2;
    fine_spec.rel_step *= 0.5;
    fine_spec.h_far *= 0.5;
    fine_spec.junction_frac *= 2.0;
    const auto fine = lab.solve_rung(fine_spec, &coarse);

    Csv csv;
    csv.row("site,eps,t,residual_coarse,residual_fine,rate");
    bool rates_ok = true;
    const auto poho = [&](PohozaevSite site, const char* name, double t) {
        const DiscreteField& uc = site == PohozaevSite::right
                                      ? coarse.u
                                      : (site == PohozaevSite::left
                                             ? coarse.left.final_stage()
                                             : coarse.left.field_for(t + 0.05));
        const DiscreteField& uf = site == PohozaevSite::right
                                      ? fine->u
                                      : (site == PohozaevSite::left
                                             ? fine->left.final_stage()
                                             : fine->left.field_for(t + 0.05));
        const double rc = pohozaev_residual(uc, cfg.weight, coarse.lambda, eps, site, t,
                                            cfg.quad_order);
        const double rf = pohozaev_residual(uf, cfg.weight, fine->lambda, eps, site, t,
                                            cfg.quad_order);
        const double rate = std::log2(rc / rf);
        rates_ok = rates_ok && rate >= 0.8;
        csv.row(std::string(name) + "," + csv_num(eps) + "," + csv_num(t) + "," + csv_num(rc) +
                "," + csv_num(rf) + "," + csv_num(rate));
    };
    poho(PohozaevSite::left, "left", 0.5);
    poho(PohozaevSite::right, "right", 0.5);
    poho(PohozaevSite::corridor, "corridor", 0.5);

    const double dc = median_derivative_residual(coarse, cfg.weight, cfg.k_tilde, cfg.quad_order);
    const double df = median_derivative_residual(*fine, cfg.weight, cfg.k_tilde, cfg.quad_order);
    const double drate = std::log2(dc / df);
    rates_ok = rates_ok && drate >= 0.8;
    csv.row("derivative_left," + csv_num(eps) + ",window," + csv_num(dc) + "," + csv_num(df) +
            "," + csv_num(drate));
    csv.write(out, "identities.csv");

    // exact scale invariance of the quotients
    DiscreteField u3 = coarse.left.final_stage();
    u3.values *= 3.0;
    const std::vector<double> rs{-0.5, -0.3, 0.4, 0.7};
    const auto a = frequency_dumbbell(coarse.left.final_stage(), cfg.weight, coarse.lambda,
                                      eps, rs, cfg.quad_order);
    const auto b = frequency_dumbbell(u3, cfg.weight, coarse.lambda, eps, rs, cfg.quad_order);
    double scale_dev = 0.0;
    for (size_t i = 0; i < rs.size(); ++i)
        scale_dev = std::max(scale_dev,
                             std::abs(a.samples[i].N - b.samples[i].N) / std::abs(a.samples[i].N));
    claims.push_back({13, "identity residual rates and scale invariance",
                      rates_ok && scale_dev <= 1e-12, scale_dev,
                      "all Pohozaev and derivative rates >= 0.8; quotient scale deviation " +
                          csv_num(scale_dev)});

    // coercivity data
    Csv co;
    co.row("eps,r,ratio");
    for (double e : cfg.eps_ladder) {
        auto& rg = lab.rung(e);
        for (double r : {-0.5, -0.25, 0.3, 0.5, 0.8}) {
            if (r < 0 && -r <= e) continue;
            const auto& f = rg.left.field_for(std::abs(r) + 0.05);
            co.row(csv_num(e) + "," + csv_num(r) + "," +
                   csv_num(coercivity_ratio(f, cfg.weight, rg.lambda, e, r)));
        }
    }
    co.write(out, "coercivity.csv");
}

void claims_robustness(LabSession& lab, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    const double eps = cfg.eps_ladder.back();
    auto& base = lab.rung(eps);
    const double lam0 = lab.limits().dplus.eigenvalues[0];

    const auto nu = [&](const LabSession::Rung& r) {
        const auto fp = frequency_dumbbell(r.left.final_stage(), cfg.weight, lam0, r.eps,
                                           {-0.25}, cfg.quad_order);
        return fp.samples[0].N;
    };
    DumbbellSpec wide = cfg.dumbbell;
    wide.eps = eps;
    wide.R_left *= 2.0;
    const auto rung_wide = lab.solve_rung(wide, &base);
    const double nu_base = nu(base), nu_wide = nu(*rung_wide);
    const double rdiff = std::abs(nu_wide - nu_base) / std::abs(nu_base);

    // tube-length robustness of Phi1
    const auto md2 = build_model_mesh(cfg.dumbbell.N, 2.0 * cfg.L_tube, cfg.R_model,
                                      cfg.model_n_alpha, cfg.model_ns_tube,
                                      cfg.dumbbell.grading_ratio, cfg.dumbbell.rel_step,
                                      cfg.dumbbell.h_far);
    const auto phi1b = compute_phi1(md2);
    const auto& phi1a = lab.profiles().phi1;
    double scale = 0.0, diff = 0.0;
    for (double z = -2.0; z <= 1.0; z += 0.1)
        for (double s : {0.0, 0.3, 0.6, 0.9}) {
            const double va = phi1a.eval(z, s);
            scale = std::max(scale, std::abs(va));
            diff = std::max(diff, std::abs(va - phi1b.eval(z, s)));
        }
    claims.push_back({14, "truncation robustness", rdiff < 0.01 && diff < 1e-4 * scale,
                      rdiff,
                      "N_U(-0.25) rel change " + csv_num(rdiff) + " under R_left doubling; Phi1 " +
                          "rel change " + csv_num(diff / scale) + " under L_tube doubling"});
}

void claims_envelopes(LabSession& lab, const std::string& out, std::vector<Claim>& claims)
{
    const auto& cfg = lab.cfg();
    Csv csv;
    csv.row("eps,C3,C5,c_lower,sup_u,r0,tube_x1_min,hatgamma2,hatgamma3,hatgamma4");
    bool ok = true;
    const double g = lab.cs().sqrt_lambda1();
    double sup_min = 1e300, sup_max = 0.0;
    for (double eps : cfg.eps_ladder) {
        auto& rung = lab.rung(eps);
        const auto rep = check_envelopes(rung.u, lab.profiles(), eps, lab.cs());
        ok = ok && rep.violations == 0 && rep.C3 > 0.0 && std::isfinite(rep.C3) &&
             rep.c_lower > 0.0;
        sup_min = std::min(sup_min, rep.sup_u);
        sup_max = std::max(sup_max, rep.sup_u);
        double hg[3];
        int i = 0;
        for (double R : {2.0, 3.0, 4.0}) {
            const auto& f = rung.left.field_for(std::min(R * eps + 0.03, 0.9));
            hg[i] = hat_gamma_ratio(f, eps, R, cfg.quad_order);
            ok = ok && hg[i] <= std::exp(4.0 * g * (R - 1.0));
            ++i;
        }
        csv.row(csv_num(eps) + "," + csv_num(rep.C3) + "," + csv_num(rep.C5) + "," +
                csv_num(rep.c_lower) + "," + csv_num(rep.sup_u) + "," + csv_num(rep.r0) + "," +
                csv_num(rep.tube_x1_min) + "," + csv_num(hg[0]) + "," + csv_num(hg[1]) + "," +
                csv_num(hg[2]));
    }
    ok = ok && sup_max / sup_min < 10.0;  // uniform L^infty stability across the ladder
    csv.write(out, "envelopes.csv");
    claims.push_back({15, "envelope bounds", ok, sup_max,
                      "fitted constants finite across the ladder; sup|u| within [" +
                          csv_num(sup_min) + ", " + csv_num(sup_max) + "]"});
}

} // namespace

std::vector<Claim> run_acceptance(LabSession& lab, const std::string& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::vector<Claim> claims;
    claims_cross_section(lab, out_dir, claims);
    claims_oracles(lab, claims);
    claims_profiles(lab, out_dir, claims);
    claims_right_limit(lab, claims);
    claims_spectra(lab, out_dir, claims);
    emit_frequency_csv(lab, out_dir);
    claims_blowup(lab, out_dir, claims);
    claims_identities(lab, out_dir, claims);
    claims_robustness(lab, claims);
    claims_envelopes(lab, out_dir, claims);
    std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
        return a.id < b.id;
    });
    write_summary(lab.cfg(), claims, out_dir);
    return claims;
}

int run_task(const std::string& task, LabSession& lab, const std::string& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::vector<Claim> claims;
    if (task == "cross-section") {
        claims_cross_section(lab, out_dir, claims);
    } else if (task == "spectra") {
        claims_spectra(lab, out_dir, claims);
    } else if (task == "frequency") {
        emit_frequency_csv(lab, out_dir);
        claims_right_limit(lab, claims);
    } else if (task == "profiles") {
        claims_profiles(lab, out_dir, claims);
        // export the junction profiles in the mesh-dump field format
        std::ofstream f1(out_dir + "/phi1.field");
        lab.profiles().phi1.mesh->dump(f1);
        for (int i = 0; i < lab.profiles().phi1.mesh->nv(); ++i)
            f1 << "field " << i << " " << csv_num(lab.profiles().phi1.values[i]) << "\n";
        std::ofstream f2(out_dir + "/phi2.field");
        lab.profiles().phi2.mesh->dump(f2);
        for (int i = 0; i < lab.profiles().phi2.mesh->nv(); ++i)
            f2 << "field " << i << " " << csv_num(lab.profiles().phi2.values[i]) << "\n";
    } else if (task == "blowup") {
        claims_blowup(lab, out_dir, claims);
    } else if (task == "identities") {
        claims_oracles(lab, claims);
        claims_identities(lab, out_dir, claims);
    } else if (task == "full-report") {
        const auto all = run_acceptance(lab, out_dir);
        for (const auto& c : all)
            if (!c.pass) return 1;
        return 0;
    } else {
        throw std::invalid_argument("unknown task '" + task + "'");
    }
    write_summary(lab.cfg(), claims, out_dir);
    for (const auto& c : claims)
        if (!c.pass) return 1;
    return 0;
}

void write_summary(const ExperimentConfig& cfg, const std::vector<Claim>& claims,
                   const std::string& out_dir)
{
    std::ofstream txt(out_dir + "/summary.txt", std::ios::binary);
    for (const auto& c : claims)
        txt << (c.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.name
            << " = " << csv_num(c.value) << " (" << c.detail << ")\n";
    txt << "\neffective config:\n" << cfg.to_json_string() << "\n";

    nlohmann::json j;
    j["config"] = nlohmann::json::parse(cfg.to_json_string());
    nlohmann::json cl = nlohmann::json::array();
    for (const auto& c : claims)
        cl.push_back({{"id", c.id},
                      {"name", c.name},
                      {"pass", c.pass},
                      {"value", c.value},
                      {"detail", c.detail}});
    j["claims"] = cl;
    std::ofstream js(out_dir + "/summary.json", std::ios::binary);
    js << j.dump(2) << "\n";
}

} // namespace dumbbell
