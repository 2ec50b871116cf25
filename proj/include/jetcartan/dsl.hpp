#pragma once

#include "jetcartan/verify.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jetcartan {
namespace dsl {

struct DslError : std::runtime_error {
    int line;
    int column;
    DslError(const std::string& message, int line_, int column_)
        : std::runtime_error(message + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ")"),
          line(line_), column(column_) {}
};

struct CoupledModel {
    std::string scalar_name;
    std::string yangmills_name;
};

// Parsed, fully resolved document. Declaration order respects dependencies;
// names are unique per kind.
struct Document {
    std::vector<std::pair<std::string, Chart>> charts;
    std::vector<std::pair<std::string, MetricField>> metrics;
    std::vector<std::pair<std::string, AffineConnectionField>> connections;
    std::vector<std::pair<std::string, LinearConnection>> linear_connections;
    std::vector<std::pair<std::string, GaugeStructure>> gauges;
    std::vector<std::pair<std::string, GaugeField>> gauge_fields;
    std::vector<std::pair<std::string, FiberedChart>> fibered;
    std::vector<std::pair<std::string, Section>> sections;
    std::vector<std::pair<std::string, JetLagrangian>> lagrangians;
    std::vector<std::pair<std::string, std::shared_ptr<ScalarModel>>> scalars;
    std::vector<std::pair<std::string, std::shared_ptr<DiracModel>>> diracs;
    std::vector<std::pair<std::string, std::shared_ptr<YangMillsModel>>> yangmills;
    std::vector<std::pair<std::string, std::shared_ptr<GravityModel>>> gravities;
    std::vector<std::pair<std::string, std::shared_ptr<KomarData>>> komars;
    std::vector<std::pair<std::string, CoupledModel>> coupled;
    std::vector<std::string> vacuum_metrics;   // `vacuum <metric>` declarations
    std::vector<std::string> check_requests;   // `check <id>|all`

    template <typename T>
    static const T* find(const std::vector<std::pair<std::string, T>>& list,
                         const std::string& name) {
        for (const auto& [n, v] : list)
            if (n == name) return &v;
        return nullptr;
    }
};

Document parse_document(const std::string& text);

// Canonical re-rendering of a parsed document. print_document(parse(t))
// re-parses to a document whose component expressions are numerically
// equal to the original's.
std::string print_document(const Document& doc);

// Identity-check registry derived from the document's contents. The
// orientation flag feeds the Hodge-based checks.
std::vector<IdentityCheck> build_registry(const Document& doc, int orientation = 1);

struct RunOptions {
    std::uint64_t seed = 0;
    std::optional<int> trials;
    std::optional<double> tol;
    int orientation = 1;
    bool mutated = false; // mutation-testing mode: every check must fail
};

struct Report {
    std::vector<CheckResult> results;
    bool all_pass = true;
};

// run the document's requested checks (or all registered when none/`all`)
Report run_checks(const Document& doc, const std::vector<std::string>& only_ids,
                  const RunOptions& options);

// einstein-from-currents: verifies the total-current identity and reports
// whether the current is conserved for a basis of vector fields (equivalent
// to the vanishing of the einstein residual). `conserved` is the verdict;
// `identity_pass` must always hold.
struct EinsteinFromCurrentsResult {
    bool identity_pass = false;
    bool conserved = false;
    double residual_magnitude = 0.0;
};
EinsteinFromCurrentsResult einstein_from_currents(const Document& doc, const RunOptions& options);

// deterministic JSON (schema 1); no timing fields
std::string report_json(const Report& report, const RunOptions& options);
std::string report_text(const Report& report);

// `compute <object>`: print components of a named object (metric, einstein
// tensor of a metric via `einstein <metric>`, connection, curvature, ...)
std::string compute_object(const Document& doc, const std::string& what,
                           const std::string& name);

} // namespace dsl
} // namespace jetcartan
