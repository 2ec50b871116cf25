#include "jetcartan/dsl.hpp"
#include "jetcartan/parse.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace jetcartan;

namespace {

Assignment to_assignment(const py::dict& values) {
    Assignment a;
    for (const auto& item : values)
        a[Symbol::intern(py::cast<std::string>(item.first))] = py::cast<CDouble>(item.second);
    return a;
}

Domain to_domain(const py::dict& box) {
    Domain d;
    for (const auto& item : box) {
        auto iv = py::cast<std::pair<double, double>>(item.second);
        d.set(py::cast<std::string>(item.first), iv.first, iv.second);
    }
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "jetcartan: exact symbolic kernel and jet-space field-theory checks";

    py::class_<Expr>(m, "Expr")
        .def("__str__", &Expr::str)
        .def("__repr__", [](const Expr& e) { return "Expr(" + e.str() + ")"; })
        .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
        .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
        .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
        .def("__truediv__", [](const Expr& a, const Expr& b) { return a / b; })
        .def("__neg__", [](const Expr& a) { return -a; })
        .def("diff",
             [](const Expr& e, const std::string& var, int order) {
                 return diff(e, Symbol::intern(var), order);
             },
             py::arg("var"), py::arg("order") = 1)
        .def("subst",
             [](const Expr& e, const std::string& var, const Expr& r) {
                 return subst(e, Symbol::intern(var), r);
             })
        .def("eval",
             [](const Expr& e, const py::dict& values) { return eval(e, to_assignment(values)); })
        .def("free_variables", [](const Expr& e) {
            std::vector<std::string> names;
            for (Symbol s : e.free_variables()) names.push_back(s.name());
            return names;
        });

    m.def("parse_expr", [](const std::string& text) { return parse_expr(text); },
          "parse an infix expression into an exact expression tree");
    m.def("variable", [](const std::string& name) { return Expr::variable(name); });
    m.def("rational", [](std::int64_t num, std::int64_t den) { return Expr::rational(num, den); },
          py::arg("num"), py::arg("den") = 1);

    m.def(
        "equal_numeric",
        [](const Expr& a, const Expr& b, const py::dict& box, int trials, double tol,
           std::uint64_t seed) {
            EqualityReport r = equal_numeric(a, b, to_domain(box), trials, tol, seed);
            py::dict out;
            out["pass"] = r.pass;
            out["worst_rel_error"] = r.worst_rel_error;
            py::dict point;
            for (const auto& [sym, val] : r.worst_point) point[sym.name().c_str()] = val.real();
            out["worst_point"] = point;
            out["trials"] = r.trials;
            if (!r.failure.empty()) out["error"] = r.failure;
            return out;
        },
        py::arg("lhs"), py::arg("rhs"), py::arg("box"), py::arg("trials") = 20,
        py::arg("tol") = 1e-8, py::arg("seed") = 0,
        "randomized identity test over a sampling box");

    py::class_<dsl::Document>(m, "Document")
        .def("check_ids", [](const dsl::Document& doc) {
            std::vector<std::string> ids;
            for (const auto& c : dsl::build_registry(doc)) ids.push_back(c.id);
            return ids;
        });

    m.def("parse_document",
          [](const std::string& text) { return dsl::parse_document(text); },
          "parse a model-definition document");

    m.def(
        "run_report",
        [](const dsl::Document& doc, const std::vector<std::string>& ids, std::uint64_t seed,
           int trials, double tol, bool mutated) {
            dsl::RunOptions opt;
            opt.seed = seed;
            if (trials > 0) opt.trials = trials;
            if (tol > 0) opt.tol = tol;
            opt.mutated = mutated;
            return dsl::report_json(dsl::run_checks(doc, ids, opt), opt);
        },
        py::arg("doc"), py::arg("ids") = std::vector<std::string>{}, py::arg("seed") = 0,
        py::arg("trials") = 0, py::arg("tol") = 0.0, py::arg("mutated") = false,
        "run identity checks and return the JSON report");

    m.def(
        "einstein_from_currents",
        [](const dsl::Document& doc, std::uint64_t seed) {
            dsl::RunOptions opt;
            opt.seed = seed;
            auto r = dsl::einstein_from_currents(doc, opt);
            py::dict out;
            out["identity_pass"] = r.identity_pass;
            out["conserved"] = r.conserved;
            out["residual_magnitude"] = r.residual_magnitude;
            return out;
        },
        py::arg("doc"), py::arg("seed") = 0);

    m.def("print_document",
          [](const dsl::Document& doc) { return dsl::print_document(doc); },
          "render a document back to its canonical text form");

    m.def("compute",
          [](const dsl::Document& doc, const std::string& what, const std::string& name) {
              return dsl::compute_object(doc, what, name);
          });
}
