#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/critical_set.hpp"

namespace atlas {

enum class Direction { increasing, decreasing, undetermined };
enum class LimitKind { finite, plus_infinity, minus_infinity, undetermined };

std::string to_string(Direction d);
std::string to_string(LimitKind k);

struct BranchSample {
    double r = 0;
    Vec3q x;
    quad value = 0;
    Kind kind = Kind::degenerate;
    double sphere_residual = 0;  // | |x-a|^2 - r^2 | / r^2
};

struct TangencyBranch {
    int id = 0;
    CriticalPoint base;
    std::vector<BranchSample> samples;
    Direction direction = Direction::undetermined;
    LimitKind limit_kind = LimitKind::undetermined;
    double limit = std::numeric_limits<double>::quiet_NaN();
    double limit_error = std::numeric_limits<double>::infinity();
    double decay_exponent = 0;
    Kind kind = Kind::degenerate;
    bool lost = false;             // continuation failed before r_max
    bool monotone = true;
    bool kind_constant = true;
    std::string diagnostic;

    bool finite_limit() const { return limit_kind == LimitKind::finite; }
};

struct BranchOptions {
    double growth = 1.25;
    double r_max_factor = 1024;    // r_max = factor * R
    double divergence_threshold = 1e8;
    int min_samples = 8;
};

TangencyBranch trace_branch(const FieldPair& f, const Center& a, const CriticalPoint& p, double R,
                            const Tolerances& tol, const BranchOptions& opt = {});

struct LimitEstimate {
    LimitKind kind = LimitKind::undetermined;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::infinity();
    double alpha = 0;
};

// Limit of f along samples (r_k, v_k) with geometric r_k. threshold is the
// divergence threshold already scaled by the coefficient magnitude.
LimitEstimate estimate_limit(const std::vector<double>& r, const std::vector<double>& v, double threshold,
                             int min_samples = 8);
void estimate_limit(TangencyBranch& b, double threshold, int min_samples = 8);

struct Candidate {
    double lambda = 0;
    double error = 0;
    std::vector<int> members;      // branch ids
    bool collides_with_K0 = false;
};

class AmbiguousClusteringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite limits clustered within lambda_cluster_tol * (1 + |lambda|).
std::vector<Candidate> collect_candidates(const std::vector<TangencyBranch>& branches, const std::vector<double>& K0,
                                          const Tolerances& tol);

// Branch points whose continuations meet within dedup_tol (R too small).
bool branches_merge(const std::vector<TangencyBranch>& branches, const Tolerances& tol);

nlohmann::json to_json(const TangencyBranch& b, bool with_samples = false);
// Polylines of (r, x, y, z, f) per branch.
nlohmann::json branches_to_json(const std::vector<TangencyBranch>& branches);

}  // namespace atlas

namespace atlas {

// One branch per non-singular zero, traced in parallel; ids follow zero order.
std::vector<TangencyBranch> trace_branches(const FieldPair& f, const Center& a, const std::vector<CriticalPoint>& zeros,
                                           double R, const Tolerances& tol, const BranchOptions& opt = {});

}  // namespace atlas
