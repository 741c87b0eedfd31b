// Experiment configuration: geometry, weight, ladder, sampling grids and
// solver settings, with JSON (de)serialization and tier presets.
#ifndef DUMBBELL_CONFIG_HPP
#define DUMBBELL_CONFIG_HPP

#include "dumbbell/geometry.hpp"
#include "dumbbell/weight_model.hpp"

#include <string>

namespace dumbbell {

struct ExperimentConfig {
    std::string tier = "default";
    DumbbellSpec dumbbell;                          // eps is taken from the ladder per run
    std::vector<double> eps_ladder{0.2, 0.1, 0.05, 0.02};
    PWeight weight = PWeight::default_model();

    double L_tube = 12.0;
    double R_model = 26.0;
    int model_ns_tube = 22;
    int model_n_alpha = 24;

    int cross_section_resolution = 2000;
    int quad_order = 48;
    double eig_tol = 1e-12;
    double gap_threshold = 0.2;

    double k_tilde = 0.25;               // left normalization radius
    double fit_window_lo_factor = 4.0;   // times eps
    double fit_window_hi = 0.2;
    int fit_window_count = 10;

    std::string out_dir = "out";
    bool serial = true;

    void validate() const;  // throws std::invalid_argument (CLI exit code 2)

    static ExperimentConfig tier_preset(const std::string& tier);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_string() const;
};

} // namespace dumbbell

#endif
