#include "atlas/sphere_mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace atlas {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent[a] = b;
    }
};

}  // namespace

std::size_t SphereMesh::edge_count() const { return faces.size() * 3 / 2; }

double SphereMesh::mean_edge_length() const
{
    if (faces.empty()) return 0;
    double s = 0;
    for (const auto& f : faces) s += norm(vertices[f[0]] - vertices[f[1]]);
    return s / static_cast<double>(faces.size());
}

SphereMesh build_mesh(const Vec3d& center, double radius, int depth)
{
    if (radius <= 0) throw std::invalid_argument("mesh radius must be positive");
    if (depth < 0 || depth > kMaxMeshDepth) throw std::invalid_argument("mesh depth out of range");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                            {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    // A fixed generic rotation keeps mesh vertices and edges off the
    // coordinate axes and planes, where zeros of axis-aligned inputs sit.
    const double ca = std::cos(0.3), sa = std::sin(0.3), cb = std::cos(0.7), sb = std::sin(0.7);
    const double cc = std::cos(1.1), sc = std::sin(1.1);
    for (auto& p : v) {
        p = normalized(p);
        Vec3d q{ca * p.x - sa * p.y, sa * p.x + ca * p.y, p.z};
        q = {q.x, cb * q.y - sb * q.z, sb * q.y + cb * q.z};
        p = {cc * q.x + sc * q.z, q.y, -sc * q.x + cc * q.z};
    }
    std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int level = 0; level < depth; ++level) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back(normalized(v[a] + v[b]));
            int id = static_cast<int>(v.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(f.size() * 4);
        for (const auto& tri : f) {
            int ab = midpoint(tri[0], tri[1]);
            int bc = midpoint(tri[1], tri[2]);
            int ca = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f.swap(next);
    }

    SphereMesh m;
    m.center = center;
    m.radius = radius;
    m.depth = depth;
    m.unit = v;
    m.vertices.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m.vertices[i] = center + v[i] * radius;
    m.faces = f;

    m.vertex_neighbors.assign(v.size(), {});
    std::map<std::pair<int, int>, std::pair<int, int>> edge_faces;
    for (std::size_t fi = 0; fi < f.size(); ++fi) {
        for (int e = 0; e < 3; ++e) {
            int a = f[fi][e], b = f[fi][(e + 1) % 3];
            m.vertex_neighbors[a].push_back(b);
            auto key = std::minmax(a, b);
            auto it = edge_faces.find(key);
            if (it == edge_faces.end()) edge_faces.emplace(key, std::make_pair(static_cast<int>(fi), -1));
            else it->second.second = static_cast<int>(fi);
        }
    }
    for (auto& nb : m.vertex_neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    m.face_neighbors.resize(f.size());
    for (std::size_t fi = 0; fi < f.size(); ++fi) {
        for (int e = 0; e < 3; ++e) {
            auto key = std::minmax(f[fi][e], f[fi][(e + 1) % 3]);
            const auto& pr = edge_faces.at(key);
            m.face_neighbors[fi][e] = pr.first == static_cast<int>(fi) ? pr.second : pr.first;
        }
    }
    return m;
}

std::vector<double> sample_level_values(const PolyField<double>& f, const SphereMesh& mesh, double lambda)
{
    std::vector<double> out(mesh.vertices.size());
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = f.value(mesh.vertices[i]) - lambda;
    return out;
}

std::vector<double> sample_level_values_serial(const PolyField<double>& f, const SphereMesh& mesh, double lambda)
{
    std::vector<double> out(mesh.vertices.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.value(mesh.vertices[i]) - lambda;
    return out;
}

std::vector<Vec3d> sample_tangential_field(const PolyField<double>& f, const SphereMesh& mesh)
{
    std::vector<Vec3d> out(mesh.vertices.size());
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        Vec3d g = f.sample(mesh.vertices[i], false).grad;
        const Vec3d& u = mesh.unit[i];
        out[i] = g - u * dot(g, u);
    }
    return out;
}

std::vector<Vec3d> sample_tangential_field_serial(const PolyField<double>& f, const SphereMesh& mesh)
{
    std::vector<Vec3d> out(mesh.vertices.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        Vec3d g = f.sample(mesh.vertices[i], false).grad;
        const Vec3d& u = mesh.unit[i];
        out[i] = g - u * dot(g, u);
    }
    return out;
}

namespace {

void classify_faces(const SphereMesh& mesh, const std::vector<double>& values, double vertex_tol,
                    BandDecomposition& out)
{
    out.vertex_sign.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.vertex_sign[i] = std::abs(values[i]) < vertex_tol ? 0 : (values[i] > 0 ? 1 : -1);
    out.face_class.resize(mesh.faces.size());
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& t = mesh.faces[fi];
        int s0 = out.vertex_sign[t[0]], s1 = out.vertex_sign[t[1]], s2 = out.vertex_sign[t[2]];
        if (s0 == 1 && s1 == 1 && s2 == 1) out.face_class[fi] = FaceClass::positive;
        else if (s0 == -1 && s1 == -1 && s2 == -1) out.face_class[fi] = FaceClass::negative;
        else out.face_class[fi] = FaceClass::band;
    }
}

void finish_labels(const SphereMesh& mesh, const std::vector<int>& root, BandDecomposition& out)
{
    std::map<int, int> region_id, band_id;
    out.face_label.assign(mesh.faces.size(), -1);
    out.band_label.assign(mesh.faces.size(), -1);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        int r = root[fi];
        if (out.face_class[fi] == FaceClass::band) {
            auto [it, fresh] = band_id.emplace(r, static_cast<int>(band_id.size()));
            out.band_label[fi] = it->second;
        } else {
            auto [it, fresh] = region_id.emplace(r, static_cast<int>(region_id.size()));
            out.face_label[fi] = it->second;
            if (fresh) {
                out.region_sign.push_back(out.face_class[fi] == FaceClass::positive ? 1 : -1);
                out.region_faces.emplace_back();
            }
            out.region_faces[it->second].push_back(static_cast<int>(fi));
        }
    }
    out.band_components = static_cast<int>(band_id.size());
}

}  // namespace

BandDecomposition decompose_band(const SphereMesh& mesh, const std::vector<double>& level_values, double vertex_tol)
{
    BandDecomposition out;
    classify_faces(mesh, level_values, vertex_tol, out);
    UnionFind uf(mesh.faces.size());
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi)
        for (int nb : mesh.face_neighbors[fi])
            if (out.face_class[nb] == out.face_class[fi]) uf.unite(static_cast<int>(fi), nb);
    std::vector<int> root(mesh.faces.size());
    for (std::size_t fi = 0; fi < root.size(); ++fi) root[fi] = uf.find(static_cast<int>(fi));
    finish_labels(mesh, root, out);
    return out;
}

BandDecomposition decompose_band_parallel(const SphereMesh& mesh, const std::vector<double>& level_values,
                                          double vertex_tol)
{
    BandDecomposition out;
    classify_faces(mesh, level_values, vertex_tol, out);
    const long n = static_cast<long>(mesh.faces.size());
    std::vector<int> label(mesh.faces.size());
    std::iota(label.begin(), label.end(), 0);
    std::vector<int> next(label);
    bool changed = true;
    while (changed) {
        changed = false;
#pragma omp parallel for schedule(static) reduction(|| : changed)
        for (long fi = 0; fi < n; ++fi) {
            int best = label[fi];
            for (int nb : mesh.face_neighbors[fi])
                if (out.face_class[nb] == out.face_class[fi]) best = std::min(best, label[nb]);
            // pointer jumping shortens long chains
            best = std::min(best, label[best]);
            next[fi] = best;
            if (best != label[fi]) changed = true;
        }
        label.swap(next);
    }
    finish_labels(mesh, label, out);
    return out;
}

nlohmann::json mesh_to_json(const SphereMesh& mesh, const BandDecomposition& band)
{
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& p : mesh.vertices) verts.push_back({p.x, p.y, p.z});
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    // a vertex takes the region of the first strict face that uses it
    std::vector<int> vregion(mesh.vertices.size(), -1);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi)
        if (band.face_label[fi] >= 0)
            for (int v : mesh.faces[fi])
                if (vregion[v] < 0) vregion[v] = band.face_label[fi];
    return {{"center", {mesh.center.x, mesh.center.y, mesh.center.z}},
            {"radius", mesh.radius},
            {"depth", mesh.depth},
            {"vertices", verts},
            {"faces", faces},
            {"vertex_sign", band.vertex_sign},
            {"vertex_region", vregion},
            {"face_region", band.face_label}};
}

}  // namespace atlas
