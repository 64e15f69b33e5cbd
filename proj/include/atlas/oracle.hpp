#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/branches.hpp"
#include "atlas/curve_tracer.hpp"
#include "atlas/level_curves.hpp"
#include "atlas/sphere_field.hpp"

namespace atlas {

struct Box {
    Vec3d lo, hi;

    static Box cube(const Vec3d& center, double half)
    {
        return {center - Vec3d(half, half, half), center + Vec3d(half, half, half)};
    }
};

// ---- marching tetrahedra -------------------------------------------------

struct TriangleSoup {
    std::vector<Vec3d> vertices;
    std::vector<std::array<int, 3>> triangles;
};

// Isosurface f = t on an n^3-cell grid, every cube split into six
// tetrahedra along its main diagonal. Grid values equal to t count as
// positive. Vertices are shared through their grid edge, so the output is a
// deterministic triangulated surface. The plain version uses OpenMP.
TriangleSoup marching_tetrahedra(const PolyField<double>& f, double t, const Box& box, int n);
TriangleSoup marching_tetrahedra_serial(const PolyField<double>& f, double t, const Box& box, int n);

struct SurfaceComponent {
    int vertices = 0, edges = 0, faces = 0;
    int chi = 0;
    bool has_boundary = false;  // an edge with a single incident triangle
    double min_distance = 0;
    std::vector<int> triangle_ids;
};

// Components through shared vertices, numbered by their smallest triangle.
std::vector<SurfaceComponent> surface_components(const TriangleSoup& soup, const Vec3d& a);

nlohmann::json soup_to_json(const TriangleSoup& soup);

// ---- planar level curves for z-independent f -----------------------------

struct PlanarBox {
    double x0, x1, y0, y1;
};

// All components of {f = t} in the plane z = z0 inside the box, seeded from
// the roots on `lines` horizontal and `lines` vertical lines.
std::vector<TracedCurve> planar_level_curves(const FieldPair& f, double t, const PlanarBox& box, double z0,
                                             int lines = 1024);

// Real roots in (lo, hi) of the polynomial with the given coefficients
// (constant first), isolated between the roots of its derivatives.
std::vector<quad> real_roots(const std::vector<quad>& coefficients, const quad& lo, const quad& hi);

// ---- fiber samples -------------------------------------------------------

struct FiberComponent {
    int chi = 0;
    bool touches_box_boundary = false;
    double min_distance_to_a = 0;
    bool intersects_ball_R = false;
};

struct FiberSample {
    double t = 0;
    Box box;
    int resolution = 0;
    bool planar = false;  // f independent of z: fiber = curve x R
    std::vector<FiberComponent> per_component;
    int components() const { return static_cast<int>(per_component.size()); }
    int chi_total() const;
};

struct OracleConfig {
    int resolution_3d = 128;
    int resolution_2d = 1024;
};

FiberSample extract_fiber(const FieldPair& f, double t, const Box& box, const Vec3d& a, double R,
                          const OracleConfig& cfg = {});

// Euler characteristic of f^-1(t) inside H, the component of the
// complement of f^-1(lambda) outside Int B_R that meets the sphere in
// `region` of the traced level set. Only fiber components within R' of a
// are seen. A component missing the ball is attributed through the tangency
// branch at its point closest to a. nullopt when the computation is
// inconclusive.
std::optional<int> euler_outside_ball(const FieldPair& f, double t, SphereLevelSet& level_set, int region,
                                      double R_prime, const std::vector<TangencyBranch>& branches,
                                      const OracleConfig& cfg = {});

// Some component of f^-1(t) minus Int B_R is compact: it neither reaches the
// box boundary nor comes back to the ball.
bool compact_component_test(const FieldPair& f, double t, const Vec3d& a, double R, const Box& box,
                            const OracleConfig& cfg = {});

struct SweepRow {
    double t = 0;
    int component_id = 0;
    double min_distance = 0;
    int chi = 0;
    bool compact = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::pair<double, double>> max_min_distance;  // (t, max over components)
};

// t = lambda + sign * 10^-k for the given exponents and both signs in `signs`.
std::vector<double> sweep_schedule(double lambda, const std::vector<int>& signs, int k_min, int k_max);

SweepResult min_fiber_distance_sweep(const FieldPair& f, const std::vector<double>& schedule, const Vec3d& a, double R,
                                     const Box& box, const OracleConfig& cfg = {});

std::string sweep_to_csv(const SweepResult& s);

// Critical values of f found from grid seeds in the box, clustered.
std::vector<double> compute_K0(const FieldPair& f, const Box& box, const Tolerances& tol, int seeds_per_axis = 12);

}  // namespace atlas
