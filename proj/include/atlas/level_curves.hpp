#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "atlas/curve_tracer.hpp"
#include "atlas/sphere_field.hpp"

namespace atlas {

// A local extremum of f on a sphere, used to seed level curves.
struct SphereExtremum {
    Vec3q x;
    Kind kind = Kind::min;
};

struct Region {
    int id = 0;
    int sign = 0;                      // sign of f - level in the region
    int boundary_circle_count = 0;
    int parent_curve = -1;             // curve enclosing the region as seen from the pole, -1 for the pole region
    std::vector<int> boundary_curves;
    std::vector<int> member_points;    // caller-defined indices of points located inside
    std::vector<int> face_set;         // optional mesh faces assigned to the region
};

// The level set {f = level} on a sphere, as traced closed curves, with the
// regions of its complement. Curves are discovered from crossings along
// great arcs from a reference pole to every extremum; any crossing found
// later that belongs to no traced curve gets traced on the spot.
class SphereLevelSet {
public:
    SphereLevelSet(const FieldPair& f, const Vec3q& center, const quad& r, const quad& level,
                   const std::vector<SphereExtremum>& extrema, TraceOptions opt = {});

    const std::vector<TracedCurve>& curves() const { return curves_; }
    std::size_t circle_count() const { return curves_.size(); }
    bool ok() const { return ok_; }
    const quad& level() const { return level_; }
    const quad& radius() const { return r_; }
    const Vec3q& center() const { return c_; }
    const Vec3q& pole() const { return pole_; }

    // Parity of crossings with each curve along the arc from the pole to q.
    std::vector<char> sides(const Vec3q& q);
    int region_of(const Vec3q& q);
    const std::vector<Region>& regions();
    int region_count() { return static_cast<int>(regions().size()); }

    // Index of the traced curve passing through the curve point y, or -1.
    int curve_through(const Vec3q& y) const;
    // Like curve_through, tracing a new curve from y when none matches.
    int locate_or_trace(const Vec3q& y);
    // A point strictly inside the region.
    std::optional<Vec3q> sample_point(int region_id);

    nlohmann::json to_json();

private:
    std::vector<char> crossing_parity(const Vec3q& q, int ignore_curve);
    int add_curve(const Vec3q& seed);
    void build_regions();

    const FieldPair& f_;
    Vec3q c_;
    quad r_;
    quad level_;
    TraceOptions opt_;
    Vec3q pole_;
    int pole_sign_ = 1;
    std::vector<TracedCurve> curves_;
    std::vector<std::vector<char>> nesting_;  // nesting_[i][j]: curve i lies inside curve j
    std::vector<Region> regions_;
    bool regions_valid_ = false;
    bool ok_ = true;
};

}  // namespace atlas
