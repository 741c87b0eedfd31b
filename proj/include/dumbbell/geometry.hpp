// Axisymmetric meridian meshes of the truncated dumbbell and of the
// auxiliary domains (half spaces, tube-plus-half-space model, exterior
// annulus), plus sampling curves for surface quadrature.
#ifndef DUMBBELL_GEOMETRY_HPP
#define DUMBBELL_GEOMETRY_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dumbbell {

enum class Region : uint8_t { left = 0, corridor = 1, right = 2 };

// outer_left doubles as the far tube cap on the model mesh; inner_sphere
// marks the Steklov boundary of the exterior annulus.
enum class BTag : uint8_t { axis, wall, outer_left, outer_right, inner_sphere };

const char* to_string(Region r);
const char* to_string(BTag t);

struct DumbbellSpec {
    int N = 3;
    double eps = 0.1;
    double R_left = 8.0;
    double R_right = 8.0;
    double h_far = 0.5;          // absolute cap on the step length far out
    double grading_ratio = 0.7;  // refinement factor toward junction circles
    double rel_step = 0.10;      // radial step <= rel_step * radius
    double junction_frac = 8.0;  // min edge at the junction circles = eps / junction_frac
    int n_alpha = 24;            // angular intervals per polar block
    int corridor_cells = 10;     // transverse cells across (0, eps)

    void validate() const;  // throws std::invalid_argument on a degenerate spec
};

struct BoundaryEdge {
    int a, b;
    BTag tag;
};

struct MeridianMesh {
    int N = 3;
    double eps = 0.0;          // channel radius when the mesh has a corridor
    double tube_radius = 0.0;  // transverse extent for slice curves (model/cylinder)
    double R_left = 0.0, R_right = 0.0;

    std::vector<Eigen::Vector2d> verts;  // (z, s)
    std::vector<std::array<int, 3>> tris;
    std::vector<Region> tri_region;
    std::vector<BoundaryEdge> bedges;
    std::vector<char> dirichlet;  // per-vertex constraint mask

    int nv() const { return static_cast<int>(verts.size()); }
    int nt() const { return static_cast<int>(tris.size()); }
    double tri_area(int t) const;

    // point location (background-grid accelerated)
    void build_locator();
    bool locate(double z, double s, int& tri, std::array<double, 3>& bary) const;
    double interpolate(const Eigen::VectorXd& nodal, double z, double s) const;

    void dump(std::ostream& os) const;

private:
    struct Locator {
        double z0 = 0, s0 = 0, dz = 1, ds = 1;
        int nx = 0, ny = 0;
        std::vector<std::vector<int>> cells;
    };
    Locator loc_;
};

MeridianMesh build_mesh(const DumbbellSpec& spec);

// Decoupled half-space domain D^+ (right=true) or D^- for the limit spectra;
// the full junction face is a Dirichlet wall.
MeridianMesh build_half_space_mesh(const DumbbellSpec& spec, bool right);

// [0,length] x [0,radius] meridian rectangle, Dirichlet except on the axis.
MeridianMesh build_cylinder_mesh(int N, double length, double radius, int nz, int ns);

// Meridian of D^- \ B(0,1) truncated at |x| = R_out; the unit half sphere is
// tagged inner_sphere and left free (Steklov boundary).
MeridianMesh build_exterior_annulus(int N, double R_out, int n_alpha,
                                    double rel_step, double h_far);

// Tube (-L_tube,1) x (0,1) joined to the meridian of D^+ cut at |x-e1| = R.
// The junction disk Sigma = {z=1, s<=1} is an interior facet set.
struct ModelMeshData {
    MeridianMesh mesh;
    std::vector<std::pair<int, int>> sigma_edges;  // vertex pairs along Sigma
    double L_tube = 12.0;
    double R = 20.0;
};
ModelMeshData build_model_mesh(int N, double L_tube, double R, int n_alpha,
                               int ns_tube, double grading_ratio,
                               double rel_step, double h_far);

enum class CurveKind { half_sphere_left, slice, half_sphere_right, wall_left };

struct CurveNode {
    Eigen::Vector2d pos;     // (z, s)
    Eigen::Vector2d normal;  // meridian direction of the outward normal nu
    double weight;           // includes omega_{N-2} s^{N-2} and arc weight
};

struct SamplingCurve {
    CurveKind kind;
    double value;
    std::vector<CurveNode> nodes;
    double measure() const;  // integral of 1
};

SamplingCurve curve(const MeridianMesh& mesh, CurveKind kind, double value,
                    int quad_order);

// graded step sequence: h0, h0*growth, ... capped at hmax, rescaled to fit len
std::vector<double> graded_steps(double len, double h0, double growth, double hmax);
// variant that keeps the fine head fixed and lets only the tail absorb the fit
std::vector<double> graded_steps_fixed_head(double len, double h0, double growth, double hmax);

} // namespace dumbbell

#endif
