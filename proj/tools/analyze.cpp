// analyze <poly-file>: candidate atypical values at infinity of a real
// polynomial in three variables.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "atlas/pipeline.hpp"

namespace {

enum Exit { ok = 0, input_error = 2, genericity_failure = 3, resource_cap = 4 };

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

void print_summary(const atlas::Report& r)
{
    std::cout << "f = " << atlas::to_string(r.polynomial) << "\n";
    atlas::Vec3d a = r.center.as_double();
    std::cout << "center (" << a.x << ", " << a.y << ", " << a.z << "), R = " << r.R << ", "
              << r.branches.size() << " tangency branches\n";
    std::cout << "K0 estimate:";
    for (double k : r.K0) std::cout << " " << k;
    std::cout << (r.K0.empty() ? " none\n" : "\n");
    for (const auto& v : r.verdicts) {
        std::cout << "lambda = " << v.lambda() << ": " << atlas::to_string(v.status);
        if (v.status != atlas::Status::collides_with_K0) {
            std::cout << " (" << v.circle_count << " circles, " << v.regions.size() << " regions, sums";
            for (const auto& e : v.regions) std::cout << " " << e.index_sum;
            if (v.vanishing) std::cout << ", vanishing " << atlas::to_string(v.vanishing->verdict);
            std::cout << ")";
        }
        std::cout << "\n";
    }
    for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Atypical values at infinity of a polynomial R^3 -> R"};
    std::string poly_file, mesh_path, branches_path, json_path, sweep_path;
    atlas::PipelineConfig cfg;
    app.add_option("poly-file", poly_file, "polynomial as an expression or JSON term list")->required();
    app.add_option("--seed", cfg.seed, "center seed")->capture_default_str();
    app.add_option("--depth", cfg.depth, "icosphere depth")->check(CLI::Range(1, atlas::kMaxMeshDepth))->capture_default_str();
    app.add_option("--r0", cfg.r0, "starting radius")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--oracle", cfg.oracle, "cross-check with fiber topology");
    app.add_option("--lambda", cfg.lambdas, "extra value to classify (repeatable)");
    app.add_option("--export-mesh", mesh_path, "icosphere sign decomposition at the first candidate (JSON)");
    app.add_option("--export-branches", branches_path, "tangency branch polylines (JSON)");
    app.add_option("--export-sweep", sweep_path, "min-distance sweep (CSV, needs --oracle)");
    app.add_option("--json", json_path, "report path");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : input_error;
    }

    atlas::Polynomial poly;
    try {
        std::ifstream in(poly_file);
        if (!in) {
            std::cerr << "cannot read " << poly_file << "\n";
            return input_error;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        poly = atlas::read_polynomial_text(ss.str());
        if (poly.is_constant()) {
            std::cerr << "constant polynomial\n";
            return input_error;
        }
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_error;
    }

    atlas::Report report;
    try {
        report = atlas::analyze(poly, cfg);
    } catch (const atlas::GenericityError& e) {
        std::cerr << "genericity failure: " << e.what() << "\n";
        return genericity_failure;
    } catch (const atlas::ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return resource_cap;
    } catch (const atlas::AmbiguousClusteringError& e) {
        std::cerr << "genericity failure: " << e.what() << "\n";
        return genericity_failure;
    }

    print_summary(report);

    bool written = true;
    if (!json_path.empty()) written &= write_file(json_path, atlas::to_json(report).dump(2) + "\n");
    if (!branches_path.empty())
        written &= write_file(branches_path, atlas::branches_to_json(report.branches).dump() + "\n");
    if (!mesh_path.empty()) {
        atlas::FieldPair f(poly);
        double lambda = 0;
        for (const auto& v : report.verdicts)
            if (v.status != atlas::Status::collides_with_K0) {
                lambda = v.lambda();
                break;
            }
        auto mesh = atlas::build_mesh(report.center.as_double(), report.R, cfg.depth);
        auto values = atlas::sample_level_values(f.d, mesh, lambda);
        auto band = atlas::decompose_band(mesh, values, cfg.tol.vertex_tol);
        auto j = atlas::mesh_to_json(mesh, band);
        j["lambda"] = lambda;
        written &= write_file(mesh_path, j.dump() + "\n");
    }
    if (!sweep_path.empty()) {
        atlas::SweepResult all;
        for (const auto& v : report.verdicts)
            if (v.sweep) all.rows.insert(all.rows.end(), v.sweep->rows.begin(), v.sweep->rows.end());
        written &= write_file(sweep_path, atlas::sweep_to_csv(all));
    }
    if (!written) {
        std::cerr << "failed to write an output file\n";
        return input_error;
    }
    return ok;
}
