#include <cmath>

#include "atlas/pipeline.hpp"

namespace atlas {

namespace {

nlohmann::json number_or_null(double x)
{
    if (std::isfinite(x)) return x;
    return nullptr;
}

nlohmann::json tolerances_json(const Tolerances& t)
{
    return {{"grad_tol_base", t.grad_tol_base}, {"hess_tol", t.hess_tol},       {"newton_tol", t.newton_tol},
            {"dedup_tol", t.dedup_tol},         {"vertex_tol", t.vertex_tol}, {"lambda_cluster_tol", t.lambda_cluster_tol}};
}

nlohmann::json center_json(const Center& c)
{
    Vec3d d = c.as_double();
    return {{"seed", c.seed},
            {"exact", {to_string(c.a[0]), to_string(c.a[1]), to_string(c.a[2])}},
            {"approx", {d.x, d.y, d.z}}};
}

nlohmann::json sweep_json(const SweepResult& s)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"t", r.t}, {"component_id", r.component_id}, {"min_distance", r.min_distance},
                        {"chi", r.chi}, {"compact", r.compact}});
    nlohmann::json mm = nlohmann::json::array();
    for (const auto& [t, m] : s.max_min_distance) mm.push_back({{"t", t}, {"max_min_distance", number_or_null(m)}});
    return {{"rows", rows}, {"max_min_distance", mm}};
}

}  // namespace

nlohmann::json to_json(const Verdict& v)
{
    nlohmann::json j;
    j["lambda"] = v.lambda();
    j["lambda_error"] = number_or_null(v.candidate.error);
    j["members"] = v.candidate.members;
    j["collides_with_K0"] = v.candidate.collides_with_K0;
    j["status"] = to_string(v.status);
    j["rationale"] = v.rationale;
    if (v.status == Status::collides_with_K0) return j;

    j["circle_count"] = v.circle_count;
    j["region_count"] = v.regions.size();
    j["level_set_ok"] = v.level_set_ok;
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : v.regions) {
        nlohmann::json e{{"region", r.region},
                         {"sign", r.sign},
                         {"boundary_circles", r.boundary_circles},
                         {"members", r.members},
                         {"index_sum", r.index_sum},
                         {"indices_resolved", r.indices_resolved}};
        if (r.t) {
            e["oracle"] = {{"t", *r.t},
                           {"R_prime", r.R_prime},
                           {"euler_outside_ball", r.euler ? nlohmann::json(*r.euler) : nlohmann::json(nullptr)}};
        }
        regions.push_back(std::move(e));
    }
    j["regions"] = regions;
    if (v.vanishing) j["vanishing"] = to_json(*v.vanishing);
    if (!v.undetermined_parts.empty()) j["undetermined_parts"] = v.undetermined_parts;
    if (v.conditions) {
        const auto& c = *v.conditions;
        j["fibration_conditions"] = {{"no_vanishing", to_string(c.no_vanishing)},
                                     {"no_compact_component", to_string(c.no_compact_component)},
                                     {"euler_constant", to_string(c.euler_constant)},
                                     {"t_samples", c.t_samples},
                                     {"chi_at_lambda", c.chi_at_lambda},
                                     {"chi_at_samples", c.chi_at_samples}};
        j["euler_agrees"] = v.euler_agrees;
    }
    if (v.sweep) j["sweep"] = sweep_json(*v.sweep);
    return j;
}

nlohmann::json to_json(const Report& r)
{
    nlohmann::json j;
    j["schema"] = "atlas-at-infinity/1";
    j["polynomial"] = {{"text", to_string(r.polynomial)}, {"terms", to_json(r.polynomial)}};
    j["config"] = {{"center", center_json(r.center)},
                   {"R", r.R},
                   {"mesh_depth", r.depth},
                   {"tolerances", tolerances_json(r.tol)},
                   {"center_draws", r.center_draws}};
    j["K0"] = r.K0;

    nlohmann::json branches = nlohmann::json::array();
    for (const auto& b : r.branches) branches.push_back(to_json(b));
    j["branches"] = branches;

    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
    j["verdicts"] = verdicts;
    j["atypical_values"] = r.atypical_values();

    j["diagnostics"] = {{"radius", to_json(r.radius)},
                        {"circle_doublings", r.circle_doublings},
                        {"sphere_audit",
                         {{"zeros", r.zeros.zeros.size()},
                          {"index_sum", r.zeros.index_sum},
                          {"mesh_winding_total", r.zeros.mesh_winding_total},
                          {"audit_ok", r.zeros.audit_ok}}},
                        {"seconds", r.seconds}};
    j["notes"] = r.notes;
    return j;
}

}  // namespace atlas
