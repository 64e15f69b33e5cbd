#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "atlas/oracle.hpp"

namespace atlas {

namespace {

// Kuhn split: tetrahedron k walks from corner 0 to corner 7 adding the axes
// in the order of permutation k. Corner bit 1 = x, 2 = y, 4 = z.
constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};

struct Grid {
    Box box;
    int n;
    Vec3d h;
    std::int64_t node(int i, int j, int k) const { return (std::int64_t(k) * (n + 1) + j) * (n + 1) + i; }
    Vec3d point(std::int64_t id) const
    {
        std::int64_t i = id % (n + 1), j = (id / (n + 1)) % (n + 1), k = id / ((n + 1) * (n + 1));
        return {box.lo.x + h.x * i, box.lo.y + h.y * j, box.lo.z + h.z * k};
    }
};

struct EdgeTri {
    std::array<std::pair<std::int64_t, std::int64_t>, 3> e;  // grid edges carrying the vertices
};

std::vector<double> grid_values(const PolyField<double>& f, const Grid& g, bool parallel)
{
    const std::int64_t m = std::int64_t(g.n + 1) * (g.n + 1) * (g.n + 1);
    std::vector<double> v(m);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t id = 0; id < m; ++id) {
            Vec3d p = g.point(id);
            v[id] = f.value(p);
        }
    } else {
        for (std::int64_t id = 0; id < m; ++id) {
            Vec3d p = g.point(id);
            v[id] = f.value(p);
        }
    }
    return v;
}

void cell_triangles(const Grid& g, const std::vector<double>& v, double t, int i, int j, int k,
                    std::vector<EdgeTri>& out)
{
    std::int64_t c[8];
    for (int b = 0; b < 8; ++b) c[b] = g.node(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
    for (const auto& tet : kTets) {
        std::int64_t id[4];
        bool pos[4];
        int npos = 0;
        for (int q = 0; q < 4; ++q) {
            id[q] = c[tet[q]];
            pos[q] = v[id[q]] >= t;
            npos += pos[q];
        }
        if (npos == 0 || npos == 4) continue;
        auto edge = [&](int a, int b) { return std::make_pair(std::min(id[a], id[b]), std::max(id[a], id[b])); };
        if (npos == 1 || npos == 3) {
            int lone = 0;
            for (int q = 0; q < 4; ++q)
                if (pos[q] == (npos == 1)) lone = q;
            EdgeTri tri;
            int w = 0;
            for (int q = 0; q < 4; ++q)
                if (q != lone) tri.e[w++] = edge(lone, q);
            out.push_back(tri);
        } else {
            int p0 = -1, p1 = -1, m0 = -1, m1 = -1;
            for (int q = 0; q < 4; ++q) {
                if (pos[q]) (p0 < 0 ? p0 : p1) = q;
                else (m0 < 0 ? m0 : m1) = q;
            }
            // quad p0m0 - p0m1 - p1m1 - p1m0
            out.push_back({{edge(p0, m0), edge(p0, m1), edge(p1, m1)}});
            out.push_back({{edge(p0, m0), edge(p1, m1), edge(p1, m0)}});
        }
    }
}

TriangleSoup assemble(const Grid& g, const std::vector<double>& v, double t, std::vector<EdgeTri>& tris)
{
    // vertex ids by sorted edge key so the result does not depend on threads
    std::vector<std::pair<std::int64_t, std::int64_t>> keys;
    keys.reserve(tris.size() * 3);
    for (const auto& tri : tris)
        for (const auto& e : tri.e) keys.push_back(e);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    TriangleSoup soup;
    soup.vertices.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto [a, b] = keys[i];
        double va = v[a] - t, vb = v[b] - t;
        double s = va / (va - vb);
        soup.vertices[i] = g.point(a) + (g.point(b) - g.point(a)) * s;
    }
    auto index = [&](const std::pair<std::int64_t, std::int64_t>& e) {
        return static_cast<int>(std::lower_bound(keys.begin(), keys.end(), e) - keys.begin());
    };
    soup.triangles.reserve(tris.size());
    for (const auto& tri : tris) {
        std::array<int, 3> t3 = {index(tri.e[0]), index(tri.e[1]), index(tri.e[2])};
        if (t3[0] == t3[1] || t3[1] == t3[2] || t3[0] == t3[2]) continue;
        soup.triangles.push_back(t3);
    }
    return soup;
}

Grid make_grid(const Box& box, int n)
{
    Grid g{box, n, (box.hi - box.lo) / double(n)};
    return g;
}

}  // namespace

TriangleSoup marching_tetrahedra(const PolyField<double>& f, double t, const Box& box, int n)
{
    Grid g = make_grid(box, n);
    auto v = grid_values(f, g, true);
    // slabs in z keep the merge order deterministic
    std::vector<std::vector<EdgeTri>> slab(n);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) cell_triangles(g, v, t, i, j, k, slab[k]);
    std::vector<EdgeTri> tris;
    for (auto& s : slab) tris.insert(tris.end(), s.begin(), s.end());
    return assemble(g, v, t, tris);
}

TriangleSoup marching_tetrahedra_serial(const PolyField<double>& f, double t, const Box& box, int n)
{
    Grid g = make_grid(box, n);
    auto v = grid_values(f, g, false);
    std::vector<EdgeTri> tris;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) cell_triangles(g, v, t, i, j, k, tris);
    return assemble(g, v, t, tris);
}

std::vector<SurfaceComponent> surface_components(const TriangleSoup& soup, const Vec3d& a)
{
    const int nv = static_cast<int>(soup.vertices.size());
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& t : soup.triangles) {
        int r0 = find(t[0]);
        parent[find(t[1])] = r0;
        parent[find(t[2])] = r0;
    }
    std::unordered_map<int, int> comp_of_root;
    std::vector<SurfaceComponent> comps;
    for (int ti = 0; ti < static_cast<int>(soup.triangles.size()); ++ti) {
        int r = find(soup.triangles[ti][0]);
        auto [it, fresh] = comp_of_root.try_emplace(r, static_cast<int>(comps.size()));
        if (fresh) comps.emplace_back();
        comps[it->second].triangle_ids.push_back(ti);
    }
    for (auto& c : comps) {
        std::vector<int> verts;
        std::vector<std::pair<int, int>> edges;
        for (int ti : c.triangle_ids) {
            const auto& t = soup.triangles[ti];
            for (int q = 0; q < 3; ++q) {
                verts.push_back(t[q]);
                edges.push_back({std::min(t[q], t[(q + 1) % 3]), std::max(t[q], t[(q + 1) % 3])});
            }
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        std::sort(edges.begin(), edges.end());
        int unique_edges = 0;
        for (std::size_t i = 0; i < edges.size();) {
            std::size_t j = i;
            while (j < edges.size() && edges[j] == edges[i]) ++j;
            if (j - i == 1) c.has_boundary = true;
            ++unique_edges;
            i = j;
        }
        c.vertices = static_cast<int>(verts.size());
        c.edges = unique_edges;
        c.faces = static_cast<int>(c.triangle_ids.size());
        c.chi = c.vertices - c.edges + c.faces;
        c.min_distance = std::numeric_limits<double>::infinity();
        for (int v : verts) c.min_distance = std::min(c.min_distance, norm(soup.vertices[v] - a));
    }
    return comps;
}

nlohmann::json soup_to_json(const TriangleSoup& soup)
{
    nlohmann::json v = nlohmann::json::array(), t = nlohmann::json::array();
    for (const auto& p : soup.vertices) v.push_back({p.x, p.y, p.z});
    for (const auto& tri : soup.triangles) t.push_back({tri[0], tri[1], tri[2]});
    return {{"vertices", v}, {"triangles", t}};
}

}  // namespace atlas
