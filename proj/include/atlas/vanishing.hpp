#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/branches.hpp"
#include "atlas/level_curves.hpp"

namespace atlas {

enum class Outcome { positive, negative, undetermined };
enum class VanishingVerdict { vanishing, none, undetermined };

std::string to_string(Outcome o);
std::string to_string(VanishingVerdict v);

struct CandidateLists {
    // keyed by candidate index in the collect_candidates output
    std::map<int, std::vector<int>> P_min, P_max;  // branch ids
    std::vector<int> Lambda_min, Lambda_max;
};

// P_min(l): min branches with f decreasing to l; P_max(l): max branches with
// f increasing to l.
CandidateLists build_candidate_lists(const std::vector<TangencyBranch>& branches,
                                     const std::vector<Candidate>& candidates);

struct CriticalRadii {
    std::vector<double> radii;
    bool complete = true;  // false when a crossing lies beyond every traced radius
};

// Radii r > R where some branch value crosses delta. These are the critical
// values of the distance to a on the level set outside B_R.
CriticalRadii distance_critical_values_on_level(const FieldPair& f, const Center& a, double delta,
                                                const std::vector<TangencyBranch>& branches, double R,
                                                const Tolerances& tol);

enum class FlowEnd { landed, stalled, failed };

struct FlowResult {
    FlowEnd end = FlowEnd::failed;
    Vec3q x;
};

// Move x along {f = delta} in the direction of increasing (or decreasing)
// distance to a until the distance equals target. Stalls at critical points
// of the distance on the level set.
FlowResult flow_on_level(const PolyField<quad>& f, const Vec3q& a, const quad& delta, const Vec3q& x,
                         const quad& target, int max_steps = 20000);

struct TestResult {
    Outcome outcome = Outcome::undetermined;
    double delta = 0;
    std::vector<double> critical_radii;
    double radius_used = 0;  // R' for the enlarged test
    std::string detail;
};

struct VanishingOptions {
    int flow_samples = 24;     // per curve and direction
    double first_rung = 1e-3;  // relative offset of the lowest ladder sphere
    int depth = 6;
};

// Whether the component of f^-1(f(p)) through the branch point p meets the
// sphere of radius R only in isolated points. Decided on a ladder of spheres
// between the critical radii: curves of f = f(p) are linked by flowing along
// the level set, and p's circle must not connect to a curve that reaches the
// sphere of radius R.
TestResult isolated_intersection_test(const FieldPair& f, const Center& a, const TangencyBranch& p,
                                      const std::vector<TangencyBranch>& branches, double R,
                                      const std::vector<CriticalPoint>& zeros_R, const Tolerances& tol,
                                      const VanishingOptions& opt = {});

// Whether f^-1(lambda) misses the region of the sphere of radius R' minus
// f^-1(f(p)) that contains the branch point.
TestResult enlarged_radius_test(const FieldPair& f, const Center& a, const TangencyBranch& p, double lambda,
                                double R_prime, double R, const std::vector<CriticalPoint>& zeros_R,
                                const Tolerances& tol, const VanishingOptions& opt = {});

struct Witness {
    int branch = -1;
    std::string side;  // from-above for P_min, from-below for P_max
    std::string test;  // isolated-intersection | enlarged-radius
    TestResult result;
};

struct VanishingReport {
    double lambda = 0;
    std::vector<std::string> sides;
    std::vector<Witness> witnesses;
    VanishingVerdict verdict = VanishingVerdict::none;
};

VanishingReport detect_vanishing(const FieldPair& f, const Center& a, double lambda, const std::vector<int>& P_min,
                                 const std::vector<int>& P_max, const std::vector<TangencyBranch>& branches, double R,
                                 const std::vector<CriticalPoint>& zeros_R, const Tolerances& tol,
                                 const VanishingOptions& opt = {});

nlohmann::json to_json(const VanishingReport& r);

// Zeros on the sphere of radius rho, seeded by continuing the zeros on the
// sphere of radius R.
ZeroSearchResult zeros_on_sphere(const FieldPair& f, const Center& a, double rho, const std::vector<CriticalPoint>& zeros_R,
                                 double R, const Tolerances& tol, int depth);

std::vector<SphereExtremum> extrema_of(const std::vector<CriticalPoint>& zeros);

}  // namespace atlas
