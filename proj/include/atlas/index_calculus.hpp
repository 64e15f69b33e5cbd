#pragma once

#include <string>
#include <vector>

#include "atlas/critical_set.hpp"

namespace atlas {

struct IndexedZero {
    CriticalPoint point;
    int index = 0;
    std::string method;
};

struct WindingOptions {
    double loop_rel = 1e-3;  // loop radius relative to the sphere radius
    int samples = 256;
    int max_halvings = 6;
};

// Rotation number of the tangential gradient around a geodesic circle of
// radius loop_r centred at p. nullopt when every tried loop passes too close
// to a zero of the field.
std::optional<int> winding_index(const PolyField<quad>& f, const Vec3q& a, const quad& r, const Vec3q& p,
                                 const WindingOptions& opt = {});

IndexedZero point_index(const FieldPair& f, const Vec3q& a, const CriticalPoint& p, const Tolerances& tol,
                        const WindingOptions& opt = {});

// Sum of indices of the non-singular members; singular-set points never count.
int region_index_sum(const std::vector<CriticalPoint>& members);

bool poincare_hopf_audit(const std::vector<IndexedZero>& zeros);
bool poincare_hopf_audit(const std::vector<CriticalPoint>& zeros);

}  // namespace atlas
