#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "atlas/numeric.hpp"
#include "atlas/poly.hpp"

namespace atlas {

inline constexpr int kMaxMeshDepth = 9;

struct SphereMesh {
    Vec3d center;
    double radius = 1;
    int depth = 0;
    std::vector<Vec3d> unit;      // points on the unit sphere
    std::vector<Vec3d> vertices;  // center + radius * unit
    std::vector<std::array<int, 3>> faces;
    std::vector<std::vector<int>> vertex_neighbors;
    std::vector<std::array<int, 3>> face_neighbors;  // across edge (v0v1, v1v2, v2v0)

    std::size_t edge_count() const;
    double mean_edge_length() const;
};

SphereMesh build_mesh(const Vec3d& center, double radius, int depth);

// f(v) - lambda at every vertex. The plain version uses OpenMP; the serial
// one is the reference.
std::vector<double> sample_level_values(const PolyField<double>& f, const SphereMesh& mesh, double lambda);
std::vector<double> sample_level_values_serial(const PolyField<double>& f, const SphereMesh& mesh, double lambda);

// Tangential gradient of f at every vertex.
std::vector<Vec3d> sample_tangential_field(const PolyField<double>& f, const SphereMesh& mesh);
std::vector<Vec3d> sample_tangential_field_serial(const PolyField<double>& f, const SphereMesh& mesh);

enum class FaceClass : signed char { negative = -1, band = 0, positive = 1 };

struct BandDecomposition {
    std::vector<signed char> vertex_sign;  // -1, 0 (within tolerance), +1
    std::vector<FaceClass> face_class;
    std::vector<int> face_label;  // region id for strict faces, -1 for band faces
    std::vector<int> band_label;  // band component for band faces, -1 otherwise
    std::vector<int> region_sign;
    std::vector<std::vector<int>> region_faces;
    int band_components = 0;
};

// Union-find decomposition of the strict-sign faces and of the mixed band.
// Labels are canonical (numbered by the smallest face index they contain).
BandDecomposition decompose_band(const SphereMesh& mesh, const std::vector<double>& level_values, double vertex_tol);
// Same decomposition with parallel min-label propagation.
BandDecomposition decompose_band_parallel(const SphereMesh& mesh, const std::vector<double>& level_values,
                                          double vertex_tol);

nlohmann::json mesh_to_json(const SphereMesh& mesh, const BandDecomposition& band);

}  // namespace atlas
