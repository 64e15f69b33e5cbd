#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/level_curves.hpp"
#include "atlas/sphere_field.hpp"
#include "atlas/sphere_mesh.hpp"

namespace atlas {

struct CriticalPoint {
    Vec3q position;
    double radius = 0;
    quad value = 0;
    Kind kind = Kind::degenerate;
    bool in_singular_set = false;
    int index = 0;
    std::string index_method;  // "hessian-sign" or "winding"
    std::pair<double, double> tangent_hessian_eigenvalues{0, 0};
    double tangential_residual = 0;
};

nlohmann::json to_json(const CriticalPoint& p);

struct ZeroSearchOptions {
    int max_edge_subdivision = 30;
    int max_face_subdivision = 16;
    bool vertex_minima_seeds = true;
};

struct ZeroSearchResult {
    std::vector<CriticalPoint> zeros;
    int mesh_winding_total = 0;  // sum of face windings, 2 when every edge was resolved
    int unresolved_edges = 0;
    int unresolved_faces = 0;    // nonzero-winding cells whose zeros were not all found
    int index_sum = 0;
    bool audit_ok = false;
};

class GenericityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zeros of the tangential gradient of f on the sphere (a, r) carried by mesh.
// extra_seeds are refined alongside the mesh candidates.
ZeroSearchResult find_sphere_zeros(const FieldPair& f, const Center& a, const quad& r, const SphereMesh& mesh,
                                   const Tolerances& tol, const std::vector<Vec3q>& extra_seeds = {},
                                   const ZeroSearchOptions& opt = {});

// Mesh-depth escalation until the Poincare-Hopf audit passes.
ZeroSearchResult find_sphere_zeros_audited(const FieldPair& f, const Center& a, const quad& r, int depth,
                                           int max_depth, const Tolerances& tol,
                                           const std::vector<Vec3q>& extra_seeds = {});

Center choose_generic_center(const Polynomial& f, std::uint64_t seed);
Center draw_center(std::uint64_t seed);
bool minors_vanish_identically(const Polynomial& f, const Center& a);

// Nondegeneracy of every non-singular zero on the sampled spheres.
bool validate_center(const FieldPair& f, const Center& a, const std::vector<double>& sample_radii,
                     const Tolerances& tol, int depth = 5);

struct RadiusSample {
    double radius = 0;
    int nonsingular_zeros = 0;
    int singular_zeros = 0;
    bool audit_ok = false;
    bool kinds_matched = true;
    bool refinement_step = false;
};

struct RadiusDiagnostics {
    double chosen_R = 0;
    std::vector<RadiusSample> branch_count_history;
    bool property_P_stable = false;
    bool kinds_stable = false;
    bool value_interval_disjointness = true;
    bool level_transversality = true;
    std::string caveat;
};

nlohmann::json to_json(const RadiusDiagnostics& d);

struct RadiusOptions {
    double growth = 2.0;
    int stable_steps = 3;
    int max_doublings = 10;
    int refine_bisections = 5;
    int depth = 6;
    int max_depth = 8;
};

struct RadiusChoice {
    double R = 0;
    RadiusDiagnostics diagnostics;
    ZeroSearchResult zeros;  // zeros on the chosen sphere
};

// Doubling from R0 until the non-singular zero count and kinds are stable over
// three consecutive radii, then bisection towards the smallest radius with the
// same count and kinds. Candidate values are checked against the zero values
// on every tested sphere at or above the chosen radius.
RadiusChoice choose_radius(const FieldPair& f, const Center& a, const std::vector<double>& candidates, double R0,
                           const Tolerances& tol, const RadiusOptions& opt = {});

// Continue each zero on sphere r0 to sphere r1 and pair it with a zero of
// `found`. Returns the matched index per source zero (-1 when no match).
std::vector<int> match_zeros_across_radii(const FieldPair& f, const Center& a, const std::vector<CriticalPoint>& from,
                                          double r0, const std::vector<CriticalPoint>& found, double r1,
                                          const Tolerances& tol);

// Positions of the zeros on sphere r0 carried along the polar curve to sphere
// r1; zeros whose continuation fails are dropped.
std::vector<Vec3q> continue_zeros(const FieldPair& f, const Center& center, const std::vector<CriticalPoint>& from,
                                  double r0, double r1, const Tolerances& tol);

CriticalPoint make_critical_point(const FieldPair& f, const Vec3q& a, const quad& r, const Vec3q& x,
                                  const Tolerances& tol);

}  // namespace atlas
