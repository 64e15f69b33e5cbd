#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/branches.hpp"
#include "atlas/oracle.hpp"
#include "atlas/vanishing.hpp"

namespace atlas {

enum class Status { typical, atypical, undetermined, collides_with_K0 };
enum class Tri { yes, no, undetermined };

std::string to_string(Status s);
std::string to_string(Tri t);

struct PipelineConfig {
    std::uint64_t seed = 1;
    int depth = 6;
    double r0 = 1;
    double radius_scale = 1;  // multiplies the chosen R (stability reruns)
    bool oracle = false;
    std::vector<double> lambdas;  // extra query values
    int max_center_draws = 8;
    int max_circle_doublings = 6;
    double oracle_offset = 1e-2;  // |t - lambda| for the Euler cross-check
    int sweep_k_max = 4;
    Tolerances tol;
    OracleConfig oracle_cfg;
};

struct RegionEvidence {
    int region = 0;
    int sign = 0;
    int boundary_circles = 0;
    std::vector<int> members;  // branch ids of the candidate based in the region
    int index_sum = 0;
    bool indices_resolved = true;
    // oracle only
    std::optional<double> t;
    double R_prime = 0;
    std::optional<int> euler;
};

struct FibrationConditions {
    Tri no_vanishing = Tri::undetermined;
    Tri no_compact_component = Tri::undetermined;
    Tri euler_constant = Tri::undetermined;
    std::vector<double> t_samples;
    int chi_at_lambda = 0;
    std::vector<int> chi_at_samples;
};

struct Verdict {
    Candidate candidate;
    Status status = Status::undetermined;
    int circle_count = 0;
    bool level_set_ok = true;
    std::vector<RegionEvidence> regions;
    std::optional<VanishingReport> vanishing;
    std::optional<FibrationConditions> conditions;
    std::optional<SweepResult> sweep;
    bool euler_agrees = true;  // every computed euler equals its index sum
    std::vector<std::string> undetermined_parts;
    std::string rationale;

    double lambda() const { return candidate.lambda; }
};

struct Report {
    Polynomial polynomial;
    Center center;
    double R = 0;
    int depth = 0;
    Tolerances tol;
    std::vector<double> K0;
    std::vector<TangencyBranch> branches;
    ZeroSearchResult zeros;
    RadiusDiagnostics radius;
    int circle_doublings = 0;  // extra doublings for stable level circles
    int center_draws = 1;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
    double seconds = 0;

    std::vector<double> atypical_values() const;
};

// Throws GenericityError when no drawn center is generic and ResourceCapError
// when the sphere audit cannot be completed within the depth cap.
Report analyze(const Polynomial& f, const PipelineConfig& config);

// Oracle-side conditions for a fibration at lambda: no vanishing component,
// no compact fiber component outside the ball for t near lambda, and
// constant Euler characteristic of the (box-clipped) fiber.
FibrationConditions check_fibration_conditions(const FieldPair& f, double lambda, const VanishingReport& vanishing,
                                               double D_radius, const Vec3d& a, double R, const OracleConfig& cfg);

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const Report& r);

}  // namespace atlas
