#include "jetcartan/dsl.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace jetcartan;

    CLI::App app{"jetcartan: jet-space field-theory identities over an exact symbolic kernel"};
    app.require_subcommand(1);

    std::string file;
    std::vector<std::string> ids;
    dsl::RunOptions options;
    std::uint64_t seed = 0;
    int trials = 0;
    double tol = 0.0;
    bool as_json = false;
    bool mutated = false;
    int orientation = 1;

    auto add_common = [&](CLI::App* cmd, bool with_ids) {
        cmd->add_option("file", file, "document file")->required();
        if (with_ids) cmd->add_option("ids", ids, "check ids (default: document requests or all)");
        cmd->add_option("--seed", seed, "sampling seed (default 0)");
        cmd->add_option("--trials", trials, "sample points per check (default 20)");
        cmd->add_option("--tol", tol, "relative tolerance (default 1e-8)");
        cmd->add_option("--orientation", orientation, "volume orientation, +1 or -1");
        cmd->add_flag("--json", as_json, "emit the JSON report");
        cmd->add_flag("--mutated", mutated, "mutation-testing mode: flip one sign per identity");
    };

    CLI::App* check = app.add_subcommand("check", "run identity checks");
    add_common(check, true);
    CLI::App* report = app.add_subcommand("report", "run checks and emit the JSON report");
    add_common(report, true);
    CLI::App* efc = app.add_subcommand("einstein-from-currents",
                                       "test conservation of the total current for basic fields");
    add_common(efc, false);

    CLI::App* compute = app.add_subcommand("compute", "print components of a named object");
    std::string what, name;
    compute->add_option("file", file, "document file")->required();
    compute->add_option("what", what,
                        "metric|einstein|ricci|scalar_curvature|connection|torsion|curvature|"
                        "komar_current|energy")
        ->required();
    compute->add_option("name", name, "object name")->required();

    CLI::App* oracle = app.add_subcommand(
        "oracle", "maintenance: re-derive the frozen residual templates and print the fixture");

    CLI11_PARSE(app, argc, argv);

    try {
        if (oracle->parsed()) {
            std::cout << render_residual_fixture(derive_residual_templates());
            return 0;
        }

        dsl::Document doc = dsl::parse_document(read_file(file));
        options.seed = seed;
        if (trials > 0) options.trials = trials;
        if (tol > 0) options.tol = tol;
        options.orientation = orientation;
        options.mutated = mutated;

        if (compute->parsed()) {
            std::cout << dsl::compute_object(doc, what, name);
            return 0;
        }
        if (efc->parsed()) {
            auto result = dsl::einstein_from_currents(doc, options);
            if (as_json) {
                std::cout << "{\n  \"identity_pass\": " << (result.identity_pass ? "true" : "false")
                          << ",\n  \"conserved\": " << (result.conserved ? "true" : "false")
                          << ",\n  \"residual_magnitude\": " << result.residual_magnitude
                          << "\n}\n";
            } else {
                std::cout << "current-identity: " << (result.identity_pass ? "pass" : "FAIL")
                          << "\nconserved-for-all-fields: " << (result.conserved ? "yes" : "no")
                          << "\nresidual-magnitude: " << result.residual_magnitude << "\n";
            }
            return (result.identity_pass && result.conserved) ? 0 : 1;
        }

        dsl::Report rep = dsl::run_checks(doc, ids, options);
        if (report->parsed() || as_json) std::cout << dsl::report_json(rep, options);
        else std::cout << dsl::report_text(rep);
        if (mutated) {
            // in mutation mode success means every check failed
            for (const auto& r : rep.results)
                if (r.pass) return 1;
            return 0;
        }
        return rep.all_pass ? 0 : 1;
    } catch (const dsl::DslError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
