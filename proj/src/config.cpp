#include "dumbbell/config.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace dumbbell {

void ExperimentConfig::validate() const
{
    dumbbell.validate();
    if (eps_ladder.empty()) throw std::invalid_argument("config: empty eps ladder");
    for (size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0 && eps_ladder[i] < 0.5))
            throw std::invalid_argument("config: eps ladder values must lie in (0, 0.5)");
        if (i > 0 && eps_ladder[i] >= eps_ladder[i - 1])
            throw std::invalid_argument("config: eps ladder must be strictly decreasing");
    }
    const auto violations = weight.validate();
    if (!violations.empty())
        throw std::invalid_argument("config: weight model violates support constraints: " +
                                    violations.front());
    if (eig_tol <= 0.0 || gap_threshold <= 0.0)
        throw std::invalid_argument("config: tolerances must be positive");
    if (!(k_tilde > 0.0 && k_tilde < 1.0))
        throw std::invalid_argument("config: k_tilde must lie in (0,1)");
    if (fit_window_hi <= 0.0 || fit_window_lo_factor <= 0.0 || fit_window_count < 5)
        throw std::invalid_argument("config: bad fit window");
    if (L_tube <= 2.0 || R_model <= 3.0)
        throw std::invalid_argument("config: model domain too small");
}

ExperimentConfig ExperimentConfig::tier_preset(const std::string& tier)
{
    ExperimentConfig c;
    c.tier = tier;
    if (tier == "tiny") {
        c.eig_tol = 1e-11;
        c.dumbbell.n_alpha = 12;
        c.dumbbell.corridor_cells = 6;
        c.dumbbell.rel_step = 0.18;
        c.dumbbell.h_far = 0.8;
        c.eps_ladder = {0.2, 0.1};
        c.L_tube = 8.0;
        c.R_model = 10.0;
        c.model_ns_tube = 12;
        c.model_n_alpha = 12;
        c.cross_section_resolution = 500;
        c.quad_order = 32;
        c.fit_window_count = 6;
    } else if (tier == "default") {
        // struct defaults
    } else if (tier == "fine") {
        c.dumbbell.n_alpha = 32;
        c.dumbbell.corridor_cells = 14;
        c.dumbbell.rel_step = 0.07;
        c.dumbbell.h_far = 0.35;
        c.cross_section_resolution = 4000;
        c.quad_order = 64;
        c.model_ns_tube = 30;
        c.model_n_alpha = 32;
    } else {
        throw std::invalid_argument("config: unknown tier '" + tier + "'");
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig c = tier_preset(j.value("tier", std::string("default")));
    if (j.contains("dumbbell")) {
        const auto& d = j["dumbbell"];
        c.dumbbell.N = d.value("N", c.dumbbell.N);
        c.dumbbell.R_left = d.value("R_left", c.dumbbell.R_left);
        c.dumbbell.R_right = d.value("R_right", c.dumbbell.R_right);
        c.dumbbell.h_far = d.value("h_far", c.dumbbell.h_far);
        c.dumbbell.grading_ratio = d.value("grading_ratio", c.dumbbell.grading_ratio);
        c.dumbbell.rel_step = d.value("rel_step", c.dumbbell.rel_step);
        c.dumbbell.n_alpha = d.value("n_alpha", c.dumbbell.n_alpha);
        c.dumbbell.corridor_cells = d.value("corridor_cells", c.dumbbell.corridor_cells);
    }
    if (j.contains("eps_ladder")) c.eps_ladder = j["eps_ladder"].get<std::vector<double>>();
    if (j.contains("weight")) {
        c.weight.bumps.clear();
        for (const auto& b : j["weight"]["bumps"])
            c.weight.bumps.push_back({b.at("center").get<double>(), b.at("radius").get<double>(),
                                      b.at("amplitude").get<double>()});
    }
    if (j.contains("model")) {
        const auto& m = j["model"];
        c.L_tube = m.value("L_tube", c.L_tube);
        c.R_model = m.value("R", c.R_model);
        c.model_ns_tube = m.value("ns_tube", c.model_ns_tube);
        c.model_n_alpha = m.value("n_alpha", c.model_n_alpha);
    }
    c.cross_section_resolution = j.value("cross_section_resolution", c.cross_section_resolution);
    c.quad_order = j.value("quad_order", c.quad_order);
    c.eig_tol = j.value("eig_tol", c.eig_tol);
    c.gap_threshold = j.value("gap_threshold", c.gap_threshold);
    c.k_tilde = j.value("k_tilde", c.k_tilde);
    if (j.contains("fit_window")) {
        const auto& w = j["fit_window"];
        c.fit_window_lo_factor = w.value("lo_factor", c.fit_window_lo_factor);
        c.fit_window_hi = w.value("hi", c.fit_window_hi);
        c.fit_window_count = w.value("count", c.fit_window_count);
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.serial = j.value("serial", c.serial);
    return c;
}

std::string ExperimentConfig::to_json_string() const
{
    nlohmann::json j;
    j["tier"] = tier;
    j["dumbbell"] = {{"N", dumbbell.N},
                     {"R_left", dumbbell.R_left},
                     {"R_right", dumbbell.R_right},
                     {"h_far", dumbbell.h_far},
                     {"grading_ratio", dumbbell.grading_ratio},
                     {"rel_step", dumbbell.rel_step},
                     {"n_alpha", dumbbell.n_alpha},
                     {"corridor_cells", dumbbell.corridor_cells}};
    j["eps_ladder"] = eps_ladder;
    nlohmann::json bumps = nlohmann::json::array();
    for (const auto& b : weight.bumps)
        bumps.push_back({{"center", b.center}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    j["weight"] = {{"bumps", bumps}};
    j["model"] = {{"L_tube", L_tube}, {"R", R_model}, {"ns_tube", model_ns_tube},
                  {"n_alpha", model_n_alpha}};
    j["cross_section_resolution"] = cross_section_resolution;
    j["quad_order"] = quad_order;
    j["eig_tol"] = eig_tol;
    j["gap_threshold"] = gap_threshold;
    j["k_tilde"] = k_tilde;
    j["fit_window"] = {{"lo_factor", fit_window_lo_factor}, {"hi", fit_window_hi},
                       {"count", fit_window_count}};
    j["out_dir"] = out_dir;
    j["serial"] = serial;
    return j.dump(2);
}

} // namespace dumbbell
