// Experiment orchestration: the shared computation session, the acceptance
// claim evaluations, CSV emission, and the summary documents.
#ifndef DUMBBELL_REPORT_HPP
#define DUMBBELL_REPORT_HPP

#include "dumbbell/blowup.hpp"
#include "dumbbell/config.hpp"

#include <map>
#include <memory>

namespace dumbbell {

struct Claim {
    int id = 0;
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

// Lazily computed shared artifacts of a run. Meshes are pinned behind
// unique_ptr so DiscreteField back-references stay valid.
class LabSession {
public:
    explicit LabSession(ExperimentConfig cfg);

    const ExperimentConfig& cfg() const { return cfg_; }

    const CrossSectionSpectrum& cs();
    const AngularProfile& angular();
    const ModelDomainMesh& model();
    const ProfilePair& profiles();
    const LimitSpectra& limits();

    struct Rung {
        double eps = 0.0;
        std::unique_ptr<MeridianMesh> mesh;
        SpectralResult spec;
        DiscreteField u;  // sign-normalized ground state
        double lambda = 0.0;
        double matched_ref = 0.0;  // lambda_k0(D+) on the same triangulation
        LeftContinuation left;
    };

    // solves on demand; rungs on the configured ladder reuse branch tracking
    Rung& rung(double eps);
    // a rung with a modified geometry (robustness and refinement studies)
    std::unique_ptr<Rung> solve_rung(const DumbbellSpec& spec, const Rung* track) ;

    std::vector<double> fit_window(double eps) const;

private:
    ExperimentConfig cfg_;
    std::unique_ptr<CrossSectionSpectrum> cs_;
    std::unique_ptr<AngularProfile> ap_;
    std::unique_ptr<ModelDomainMesh> model_;
    std::unique_ptr<ProfilePair> profiles_;
    std::unique_ptr<LimitSpectra> limits_;
    std::map<double, std::unique_ptr<Rung>> rungs_;
};

// Evaluates the full acceptance battery (claims 1-15), writing the CSV data
// files into out_dir along the way.
std::vector<Claim> run_acceptance(LabSession& lab, const std::string& out_dir);

// CLI task entry; returns the process exit code (0 pass, 1 check failure,
// 2 configuration/assumption failure handled by the caller).
int run_task(const std::string& task, LabSession& lab, const std::string& out_dir);

void write_summary(const ExperimentConfig& cfg, const std::vector<Claim>& claims,
                   const std::string& out_dir);

std::string csv_num(double v);

} // namespace dumbbell

#endif
