#include "jetcartan/dsl.hpp"
#include "jetcartan/parse.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace jetcartan {
namespace dsl {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    void advance() {
        if (pos < text.size()) {
            if (text[pos] == '\n') { ++line; col = 1; }
            else ++col;
            ++pos;
        }
    }
    void skip_ws(bool stop_at_newline = false) {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') advance();
                continue;
            }
            if (stop_at_newline && c == '\n') return;
            if (std::isspace(static_cast<unsigned char>(c))) { advance(); continue; }
            return;
        }
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek(bool stop_at_newline = false) {
        skip_ws(stop_at_newline);
        return pos < text.size() ? text[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& msg) { throw DslError(msg, line, col); }

    std::string word() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_'))
            fail(std::string("expected identifier, found '") + c + "'");
        std::string out;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '-')) {
            out += text[pos];
            advance();
        }
        return out;
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            advance();
            return true;
        }
        return false;
    }
    bool accept_word(const std::string& w) {
        skip_ws();
        std::size_t save_pos = pos;
        int save_line = line, save_col = col;
        if (pos < text.size() &&
            (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            std::string got = word();
            if (got == w) return true;
            pos = save_pos;
            line = save_line;
            col = save_col;
        }
        return false;
    }

    // expression slice: up to any of the delimiters at paren depth 0
    std::string until(const std::string& delims, bool newline_delimits) {
        skip_ws();
        std::string out;
        int depth = 0;
        int start_line = line, start_col = col;
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') advance();
                continue;
            }
            if (c == '(') ++depth;
            if (c == ')') {
                if (depth == 0) break;
                --depth;
            }
            if (depth == 0 && delims.find(c) != std::string::npos) break;
            if (depth == 0 && newline_delimits && c == '\n') break;
            out += c;
            advance();
        }
        // trim
        std::size_t b = out.find_first_not_of(" \t\r\n");
        std::size_t e = out.find_last_not_of(" \t\r\n");
        if (b == std::string::npos) throw DslError("expected expression", start_line, start_col);
        return out.substr(b, e - b + 1);
    }

    Expr expr(const std::string& delims, bool newline_delimits = false) {
        int at_line = line, at_col = col;
        std::string slice = until(delims, newline_delimits);
        try {
            return parse_expr(slice);
        } catch (const ParseError& err) {
            throw DslError(err.what(), at_line, at_col);
        }
    }

    double number(const std::string& delims) {
        int at_line = line, at_col = col;
        Expr e = expr(delims);
        if (!e.free_variables().empty())
            throw DslError("expected a numeric value", at_line, at_col);
        try {
            return eval(e, {}).real();
        } catch (const EvalError& err) {
            throw DslError(err.what(), at_line, at_col);
        }
    }

    int integer(const std::string& delims) {
        return static_cast<int>(std::llround(number(delims)));
    }
};

// [e, e; e, e] row-major matrix of expressions
std::vector<std::vector<Expr>> parse_matrix(Cursor& cur) {
    cur.expect('[');
    std::vector<std::vector<Expr>> rows;
    rows.emplace_back();
    for (;;) {
        rows.back().push_back(cur.expr(",;]"));
        char c = cur.peek();
        if (c == ',') { cur.advance(); continue; }
        if (c == ';') {
            cur.advance();
            rows.emplace_back();
            continue;
        }
        if (c == ']') {
            cur.advance();
            break;
        }
        cur.fail("expected ',', ';' or ']' in matrix");
    }
    return rows;
}

std::vector<Expr> parse_vector(Cursor& cur) {
    auto rows = parse_matrix(cur);
    if (rows.size() != 1) cur.fail("expected a single-row vector");
    return rows[0];
}

template <typename T>
const T& lookup(Cursor& cur, const std::vector<std::pair<std::string, T>>& list,
                const std::string& name, const char* kind) {
    const T* found = Document::find(list, name);
    if (!found) cur.fail(std::string("unresolved ") + kind + " name: " + name);
    return *found;
}

template <typename T>
void check_unique(Cursor& cur, const std::vector<std::pair<std::string, T>>& list,
                  const std::string& name) {
    if (Document::find(list, name)) cur.fail("duplicate name: " + name);
}

void parse_indexed_entries(Cursor& cur, int arity,
                           const std::function<void(const std::vector<int>&, Expr)>& sink) {
    cur.expect('{');
    while (!cur.accept('}')) {
        cur.expect('[');
        std::vector<int> idx;
        for (int k = 0; k < arity; ++k) {
            idx.push_back(cur.integer(",]"));
            if (k + 1 < arity) cur.expect(',');
        }
        cur.expect(']');
        cur.expect('=');
        sink(idx, cur.expr(";}\n", true));
        cur.accept(';');
    }
}

} // namespace

Document parse_document(const std::string& text) {
    Document doc;
    Cursor cur{text};
    while (!cur.eof()) {
        std::string kw = cur.word();
        if (kw == "chart") {
            std::string name = cur.word();
            check_unique(cur, doc.charts, name);
            if (cur.word() != "dim") cur.fail("expected 'dim'");
            int dim = cur.integer(" \t\n");
            if (cur.word() != "coords") cur.fail("expected 'coords'");
            std::vector<std::string> coords;
            for (int k = 0; k < dim; ++k) coords.push_back(cur.word());
            std::vector<std::pair<double, double>> box(coords.size(), {-1.0, 1.0});
            if (cur.accept_word("box")) {
                cur.expect('{');
                while (!cur.accept('}')) {
                    std::string cn = cur.word();
                    int found = -1;
                    for (std::size_t k = 0; k < coords.size(); ++k)
                        if (coords[k] == cn) found = static_cast<int>(k);
                    if (found < 0) cur.fail("box names unknown coordinate: " + cn);
                    cur.expect('[');
                    double lo = cur.number(",");
                    cur.expect(',');
                    double hi = cur.number("]");
                    cur.expect(']');
                    box[found] = {lo, hi};
                }
            }
            try {
                doc.charts.emplace_back(name, Chart(coords, box));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "metric") {
            std::string name = cur.word();
            check_unique(cur, doc.metrics, name);
            if (cur.word() != "on") cur.fail("expected 'on'");
            Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
            std::string signature;
            if (cur.accept_word("signature")) signature = cur.word();
            cur.expect('{');
            auto rows = parse_matrix(cur);
            cur.expect('}');
            const int m = chart.dim();
            if (static_cast<int>(rows.size()) != m) cur.fail("metric row count mismatch");
            ExprMatrix g = expr_matrix(m, m);
            for (int a = 0; a < m; ++a) {
                if (static_cast<int>(rows[a].size()) != m) cur.fail("metric column count mismatch");
                for (int b = 0; b < m; ++b) g[a][b] = rows[a][b];
            }
            // symmetrize structurally when entries match numerically is not
            // allowed: require literal symmetry, sharing nodes
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < a; ++b) {
                    if (g[a][b].str() != g[b][a].str()) cur.fail("metric entries not symmetric");
                    g[a][b] = g[b][a];
                }
            try {
                doc.metrics.emplace_back(name, MetricField(chart, g, signature));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "connection") {
            std::string name = cur.word();
            check_unique(cur, doc.connections, name);
            if (cur.accept_word("levi_civita")) {
                const MetricField& g = lookup(cur, doc.metrics, cur.word(), "metric");
                doc.connections.emplace_back(name, levi_civita(g));
            } else {
                if (cur.word() != "on") cur.fail("expected 'on' or 'levi_civita'");
                Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
                bool symmetric = cur.accept_word("symmetric");
                AffineConnectionField conn(chart, chart.dim());
                parse_indexed_entries(cur, 3, [&](const std::vector<int>& idx, Expr e) {
                    if (idx[0] < 0 || idx[0] >= chart.dim() || idx[1] < 0 ||
                        idx[1] >= chart.dim() || idx[2] < 0 || idx[2] >= chart.dim())
                        cur.fail("connection index out of range");
                    conn.G(idx[0], idx[1], idx[2]) = e;
                    if (symmetric) conn.G(idx[0], idx[2], idx[1]) = e;
                });
                conn.mark_symmetric(symmetric);
                if (symmetric) conn.validate_symmetry();
                doc.connections.emplace_back(name, conn);
            }
        } else if (kw == "linearconn") {
            std::string name = cur.word();
            check_unique(cur, doc.linear_connections, name);
            if (cur.word() != "on") cur.fail("expected 'on'");
            Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
            if (cur.word() != "fiber") cur.fail("expected 'fiber'");
            int n = cur.integer(" \t\n{");
            std::vector<std::string> fibers;
            for (int i = 0; i < n; ++i) fibers.push_back(name + "_f" + std::to_string(i));
            FiberedChart fc(chart, fibers);
            std::vector<ExprMatrix> comps(chart.dim(), expr_matrix(n, n));
            parse_indexed_entries(cur, 3, [&](const std::vector<int>& idx, Expr e) {
                if (idx[0] < 0 || idx[0] >= chart.dim() || idx[1] < 0 || idx[1] >= n ||
                    idx[2] < 0 || idx[2] >= n)
                    cur.fail("linear connection index out of range");
                comps[idx[0]][idx[1]][idx[2]] = e;
            });
            try {
                doc.linear_connections.emplace_back(name, LinearConnection(fc, comps));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "gauge") {
            std::string name = cur.word();
            check_unique(cur, doc.gauges, name);
            if (cur.word() != "frame") cur.fail("expected 'frame'");
            std::string frame = cur.word();
            if (frame == "u1") doc.gauges.emplace_back(name, GaugeStructure::u1());
            else if (frame == "su2") doc.gauges.emplace_back(name, GaugeStructure::su2());
            else cur.fail("unknown gauge frame: " + frame + " (supported: u1, su2)");
        } else if (kw == "gaugefield") {
            std::string name = cur.word();
            check_unique(cur, doc.gauge_fields, name);
            if (cur.word() != "gauge") cur.fail("expected 'gauge'");
            const GaugeStructure& G = lookup(cur, doc.gauges, cur.word(), "gauge structure");
            if (cur.word() != "on") cur.fail("expected 'on'");
            Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
            std::vector<std::vector<Expr>> comps(
                G.algebra_dim(), std::vector<Expr>(chart.dim(), Expr::integer(0)));
            parse_indexed_entries(cur, 2, [&](const std::vector<int>& idx, Expr e) {
                if (idx[0] < 0 || idx[0] >= G.algebra_dim() || idx[1] < 0 ||
                    idx[1] >= chart.dim())
                    cur.fail("gauge field index out of range");
                comps[idx[0]][idx[1]] = e;
            });
            try {
                doc.gauge_fields.emplace_back(name, GaugeField(G, chart, comps));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "fibered") {
            std::string name = cur.word();
            check_unique(cur, doc.fibered, name);
            if (cur.word() != "on") cur.fail("expected 'on'");
            Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
            if (cur.word() != "fibers") cur.fail("expected 'fibers'");
            std::vector<std::string> fibers;
            while (true) {
                fibers.push_back(cur.word());
                char c = cur.peek();
                if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) break;
                // another fiber name unless it's a new declaration keyword:
                // fibers end at a newline in practice; stop on keywords
                std::size_t save = cur.pos;
                int sl = cur.line, sc = cur.col;
                std::string next = cur.word();
                static const std::vector<std::string> keywords{
                    "chart", "metric", "connection", "linearconn", "gauge", "gaugefield",
                    "fibered", "section", "lagrangian", "model", "komar", "vacuum", "check"};
                bool is_kw = false;
                for (const auto& k : keywords) is_kw = is_kw || (k == next);
                cur.pos = save;
                cur.line = sl;
                cur.col = sc;
                if (is_kw) break;
            }
            try {
                doc.fibered.emplace_back(name, FiberedChart(chart, fibers));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "section") {
            std::string name = cur.word();
            check_unique(cur, doc.sections, name);
            if (cur.word() != "on") cur.fail("expected 'on'");
            const FiberedChart& fc = lookup(cur, doc.fibered, cur.word(), "fibered chart");
            std::vector<Expr> comps(fc.fiber_dim(), Expr::integer(0));
            cur.expect('{');
            while (!cur.accept('}')) {
                std::string fn = cur.word();
                int idx = -1;
                for (int i = 0; i < fc.fiber_dim(); ++i)
                    if (fc.fiber(i).name() == fn) idx = i;
                if (idx < 0) cur.fail("unknown fiber coordinate: " + fn);
                cur.expect('=');
                comps[idx] = cur.expr(";}\n", true);
                cur.accept(';');
            }
            try {
                doc.sections.emplace_back(name, Section(fc, comps));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "lagrangian") {
            std::string name = cur.word();
            check_unique(cur, doc.lagrangians, name);
            if (cur.word() != "on") cur.fail("expected 'on'");
            const FiberedChart& fc = lookup(cur, doc.fibered, cur.word(), "fibered chart");
            bool metric_dep = cur.accept_word("metric");
            cur.expect('{');
            Expr density = cur.expr("}");
            cur.expect('}');
            try {
                doc.lagrangians.emplace_back(name, JetLagrangian(fc, density, metric_dep));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "model") {
            std::string submodel = cur.word();
            std::string name = cur.word();
            if (submodel == "scalar") {
                check_unique(cur, doc.scalars, name);
                cur.expect('{');
                const MetricField* g = nullptr;
                const LinearConnection* kap = nullptr;
                const GaugeField* gfield = nullptr;
                Expr mass = Expr::integer(0);
                std::vector<Expr> phi, phibar;
                while (!cur.accept('}')) {
                    std::string key = cur.word();
                    if (key == "metric") g = &lookup(cur, doc.metrics, cur.word(), "metric");
                    else if (key == "connection")
                        kap = &lookup(cur, doc.linear_connections, cur.word(), "linear connection");
                    else if (key == "gaugefield")
                        gfield = &lookup(cur, doc.gauge_fields, cur.word(), "gauge field");
                    else if (key == "mass") { mass = cur.expr(";}\n", true); cur.accept(';'); }
                    else if (key == "phi") phi = parse_vector(cur);
                    else if (key == "phibar") phibar = parse_vector(cur);
                    else cur.fail("unknown scalar model key: " + key);
                }
                if (!g) cur.fail("scalar model needs a metric");
                try {
                    LinearConnection kappa = gfield
                        ? expand_to_linear(*gfield, name + "_e")
                        : (kap ? *kap
                               : LinearConnection(
                                     FiberedChart(g->chart(), {name + "_f0"}),
                                     std::vector<ExprMatrix>(g->dim(), expr_matrix(1, 1))));
                    doc.scalars.emplace_back(
                        name, std::make_shared<ScalarModel>(*g, kappa, mass, phi, phibar));
                } catch (const std::exception& e) {
                    cur.fail(e.what());
                }
            } else if (submodel == "dirac") {
                check_unique(cur, doc.diracs, name);
                if (cur.word() != "on") cur.fail("expected 'on'");
                Chart chart = lookup(cur, doc.charts, cur.word(), "chart");
                cur.expect('{');
                ExprMatrix tetrad = expr_matrix(4, 4);
                for (int l = 0; l < 4; ++l) tetrad[l][l] = Expr::integer(1);
                std::vector<Expr> A(4, Expr::integer(0));
                Expr mass = Expr::integer(0);
                std::vector<Expr> psi, psibar;
                while (!cur.accept('}')) {
                    std::string key = cur.word();
                    if (key == "tetrad") {
                        auto rows = parse_matrix(cur);
                        if (rows.size() != 4 || rows[0].size() != 4)
                            cur.fail("tetrad must be a 4x4 matrix");
                        for (int l = 0; l < 4; ++l)
                            for (int a = 0; a < 4; ++a) tetrad[l][a] = rows[l][a];
                    } else if (key == "potential") A = parse_vector(cur);
                    else if (key == "mass") { mass = cur.expr(";}\n", true); cur.accept(';'); }
                    else if (key == "psi") psi = parse_vector(cur);
                    else if (key == "psibar") psibar = parse_vector(cur);
                    else cur.fail("unknown dirac model key: " + key);
                }
                try {
                    doc.diracs.emplace_back(
                        name, std::make_shared<DiracModel>(chart, tetrad, A, mass, psi, psibar));
                } catch (const std::exception& e) {
                    cur.fail(e.what());
                }
            } else if (submodel == "yangmills") {
                check_unique(cur, doc.yangmills, name);
                cur.expect('{');
                const MetricField* g = nullptr;
                const GaugeStructure* gs = nullptr;
                const GaugeField* field = nullptr;
                while (!cur.accept('}')) {
                    std::string key = cur.word();
                    if (key == "metric") g = &lookup(cur, doc.metrics, cur.word(), "metric");
                    else if (key == "gauge")
                        gs = &lookup(cur, doc.gauges, cur.word(), "gauge structure");
                    else if (key == "field")
                        field = &lookup(cur, doc.gauge_fields, cur.word(), "gauge field");
                    else cur.fail("unknown yang-mills model key: " + key);
                }
                if (!g || !gs || !field) cur.fail("yang-mills model needs metric, gauge, field");
                try {
                    doc.yangmills.emplace_back(
                        name, std::make_shared<YangMillsModel>(*g, *gs, *field));
                } catch (const std::exception& e) {
                    cur.fail(e.what());
                }
            } else if (submodel == "gravity") {
                check_unique(cur, doc.gravities, name);
                cur.expect('{');
                const MetricField* g = nullptr;
                const AffineConnectionField* conn = nullptr;
                while (!cur.accept('}')) {
                    std::string key = cur.word();
                    if (key == "metric") g = &lookup(cur, doc.metrics, cur.word(), "metric");
                    else if (key == "connection")
                        conn = &lookup(cur, doc.connections, cur.word(), "connection");
                    else cur.fail("unknown gravity model key: " + key);
                }
                if (!g) cur.fail("gravity model needs a metric");
                try {
                    doc.gravities.emplace_back(
                        name, conn ? std::make_shared<GravityModel>(*g, *conn)
                                   : std::make_shared<GravityModel>(*g));
                } catch (const std::exception& e) {
                    cur.fail(e.what());
                }
            } else if (submodel == "coupled") {
                cur.expect('{');
                CoupledModel cm;
                while (!cur.accept('}')) {
                    std::string key = cur.word();
                    if (key == "scalar") cm.scalar_name = cur.word();
                    else if (key == "yangmills") cm.yangmills_name = cur.word();
                    else cur.fail("unknown coupled model key: " + key);
                }
                if (!Document::find(doc.scalars, cm.scalar_name))
                    cur.fail("unresolved scalar model: " + cm.scalar_name);
                if (!Document::find(doc.yangmills, cm.yangmills_name))
                    cur.fail("unresolved yang-mills model: " + cm.yangmills_name);
                doc.coupled.emplace_back(name, cm);
            } else {
                cur.fail("unknown model kind: " + submodel);
            }
        } else if (kw == "komar") {
            std::string name = cur.word();
            check_unique(cur, doc.komars, name);
            cur.expect('{');
            const MetricField* g = nullptr;
            std::vector<Expr> X;
            while (!cur.accept('}')) {
                std::string key = cur.word();
                if (key == "metric") g = &lookup(cur, doc.metrics, cur.word(), "metric");
                else if (key == "vector") X = parse_vector(cur);
                else cur.fail("unknown komar key: " + key);
            }
            if (!g) cur.fail("komar block needs a metric");
            if (static_cast<int>(X.size()) != g->dim())
                cur.fail("komar vector dimension mismatch");
            try {
                doc.komars.emplace_back(name, std::make_shared<KomarData>(*g, X));
            } catch (const std::exception& e) {
                cur.fail(e.what());
            }
        } else if (kw == "vacuum") {
            std::string mname = cur.word();
            if (!Document::find(doc.metrics, mname)) cur.fail("unresolved metric name: " + mname);
            doc.vacuum_metrics.push_back(mname);
        } else if (kw == "check") {
            doc.check_requests.push_back(cur.word());
        } else {
            cur.fail("unknown declaration: " + kw);
        }
    }
    return doc;
}

// ------------------------------------------------------------- reporting

std::string report_json(const Report& report, const RunOptions& options) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["seed"] = options.seed;
    if (options.trials) j["trials"] = *options.trials;
    if (options.tol) j["tol"] = *options.tol;
    j["all_pass"] = report.all_pass;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        nlohmann::ordered_json c;
        c["id"] = r.id;
        c["anchor"] = r.anchor;
        c["status"] = r.pass ? "pass" : "fail";
        c["worst_rel_error"] = r.worst_rel_error;
        nlohmann::ordered_json point;
        for (const auto& [sym, val] : r.worst_point) point[sym.name()] = val.real();
        c["worst_point"] = point;
        c["trials"] = r.trials;
        c["seed"] = r.seed;
        if (!r.error.empty()) c["error"] = r.error;
        checks.push_back(c);
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

std::string report_text(const Report& report) {
    std::ostringstream os;
    for (const auto& r : report.results) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  (worst rel err "
           << r.worst_rel_error << ", " << r.wall_ms << " ms)";
        if (!r.error.empty()) os << "  [" << r.error << "]";
        os << "\n";
    }
    os << (report.all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    return os.str();
}


// ------------------------------------------------------------- printing

namespace {

std::string chart_name_of(const Document& doc, const Chart& chart) {
    for (const auto& [n, c] : doc.charts)
        if (c == chart) return n;
    throw std::runtime_error("chart not declared in this document");
}

std::string fibered_name_of(const Document& doc, const FiberedChart& fc) {
    for (const auto& [n, f] : doc.fibered) {
        if (!(f.base() == fc.base()) || f.fiber_dim() != fc.fiber_dim()) continue;
        bool same = true;
        for (int i = 0; i < fc.fiber_dim(); ++i) same = same && (f.fiber(i) == fc.fiber(i));
        if (same) return n;
    }
    throw std::runtime_error("fibered chart not declared in this document");
}

void print_expr_vector(std::ostringstream& os, const std::vector<Expr>& v) {
    os << "[ ";
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k].str();
    os << " ]";
}

} // namespace

std::string print_document(const Document& doc) {
    std::ostringstream os;
    for (const auto& [name, chart] : doc.charts) {
        os << "chart " << name << " dim " << chart.dim() << " coords";
        for (Symbol s : chart.coords()) os << " " << s.name();
        os << " box {";
        for (Symbol s : chart.coords()) {
            auto iv = chart.box().box.at(s);
            os << " " << s.name() << " [" << iv.first << "," << iv.second << "]";
        }
        os << " }\n";
    }
    for (const auto& [name, g] : doc.metrics) {
        os << "metric " << name << " on " << chart_name_of(doc, g.chart());
        if (!g.signature_tag().empty()) os << " signature " << g.signature_tag();
        os << " {\n  [ ";
        for (int a = 0; a < g.dim(); ++a) {
            for (int b = 0; b < g.dim(); ++b) os << (b ? ", " : "") << g.g(a, b).str();
            os << (a + 1 < g.dim() ? " ;\n    " : " ]\n");
        }
        os << "}\n";
    }
    for (const auto& [name, conn] : doc.connections) {
        os << "connection " << name << " on " << chart_name_of(doc, conn.chart());
        os << " {\n";
        const int m = conn.dim();
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (!conn.G(c, a, b).is_zero())
                        os << "  [" << c << "," << a << "," << b << "] = "
                           << conn.G(c, a, b).str() << "\n";
        os << "}\n";
        // symmetry is re-established entrywise; symmetric-only printing would
        // lose torsionful declarations
    }
    for (const auto& [name, lin] : doc.linear_connections) {
        os << "linearconn " << name << " on " << chart_name_of(doc, lin.chart().base())
           << " fiber " << lin.chart().fiber_dim() << " {\n";
        for (int a = 0; a < lin.chart().base_dim(); ++a)
            for (int i = 0; i < lin.chart().fiber_dim(); ++i)
                for (int j = 0; j < lin.chart().fiber_dim(); ++j)
                    if (!lin.k(a, i, j).is_zero())
                        os << "  [" << a << "," << i << "," << j << "] = "
                           << lin.k(a, i, j).str() << "\n";
        os << "}\n";
    }
    for (const auto& [name, G] : doc.gauges)
        os << "gauge " << name << " frame " << (G.algebra_dim() == 1 ? "u1" : "su2") << "\n";
    for (const auto& [name, f] : doc.gauge_fields) {
        std::string gname;
        for (const auto& [gn, G] : doc.gauges)
            if (G.algebra_dim() == f.structure().algebra_dim()) gname = gn;
        os << "gaugefield " << name << " gauge " << gname << " on "
           << chart_name_of(doc, f.base()) << " {\n";
        for (int I = 0; I < f.structure().algebra_dim(); ++I)
            for (int a = 0; a < f.base().dim(); ++a)
                if (!f.k(I, a).is_zero())
                    os << "  [" << I << "," << a << "] = " << f.k(I, a).str() << "\n";
        os << "}\n";
    }
    for (const auto& [name, fc] : doc.fibered) {
        os << "fibered " << name << " on " << chart_name_of(doc, fc.base()) << " fibers";
        for (int i = 0; i < fc.fiber_dim(); ++i) os << " " << fc.fiber(i).name();
        os << "\n";
    }
    for (const auto& [name, sec] : doc.sections) {
        os << "section " << name << " on " << fibered_name_of(doc, sec.chart) << " {\n";
        for (int i = 0; i < sec.chart.fiber_dim(); ++i)
            os << "  " << sec.chart.fiber(i).name() << " = " << sec.comps[i].str() << "\n";
        os << "}\n";
    }
    for (const auto& [name, lagr] : doc.lagrangians) {
        os << "lagrangian " << name << " on " << fibered_name_of(doc, lagr.chart);
        if (lagr.metric_dependent) os << " metric";
        os << " { " << lagr.density.str() << " }\n";
    }
    for (const auto& [name, model] : doc.scalars) {
        // the connection is re-emitted as an explicit linear connection
        os << "linearconn " << name << "_kappa on "
           << chart_name_of(doc, model->metric().chart()) << " fiber "
           << model->fiber_dim() << " {\n";
        for (int a = 0; a < model->metric().dim(); ++a)
            for (int i = 0; i < model->fiber_dim(); ++i)
                for (int j = 0; j < model->fiber_dim(); ++j)
                    if (!model->kappa().k(a, i, j).is_zero())
                        os << "  [" << a << "," << i << "," << j << "] = "
                           << model->kappa().k(a, i, j).str() << "\n";
        os << "}\n";
        std::string gname;
        for (const auto& [mn, mg] : doc.metrics)
            if (mg.chart() == model->metric().chart()) gname = mn;
        os << "model scalar " << name << " { metric " << gname << " connection " << name
           << "_kappa mass " << model->mass().str() << "\n  phi ";
        print_expr_vector(os, model->phi());
        os << "\n  phibar ";
        print_expr_vector(os, model->phibar());
        os << "\n}\n";
    }
    for (const auto& [name, model] : doc.diracs) {
        os << "model dirac " << name << " on " << chart_name_of(doc, model->base())
           << " { mass " << model->mass().str() << "\n  tetrad [ ";
        for (int l = 0; l < 4; ++l) {
            for (int a = 0; a < 4; ++a) os << (a ? ", " : "") << model->tetrad()[l][a].str();
            os << (l < 3 ? " ;\n           " : " ]\n");
        }
        os << "  potential ";
        print_expr_vector(os, model->potential());
        os << "\n  psi ";
        print_expr_vector(os, model->psi());
        os << "\n  psibar ";
        print_expr_vector(os, model->psibar());
        os << "\n}\n";
    }
    for (const auto& [name, model] : doc.yangmills) {
        std::string gname, sname, fname;
        for (const auto& [mn, mg] : doc.metrics)
            if (mg.chart() == model->metric().chart()) gname = mn;
        for (const auto& [gn, G] : doc.gauges)
            if (G.algebra_dim() == model->structure().algebra_dim()) sname = gn;
        for (const auto& [fn, f] : doc.gauge_fields) {
            if (f.structure().algebra_dim() != model->structure().algebra_dim()) continue;
            bool same = true;
            for (int I = 0; I < f.structure().algebra_dim() && same; ++I)
                for (int a = 0; a < f.base().dim() && same; ++a)
                    same = f.k(I, a).same_node(model->field().k(I, a));
            if (same) fname = fn;
        }
        os << "model yangmills " << name << " { metric " << gname << " gauge " << sname
           << " field " << fname << " }\n";
    }
    for (const auto& [name, model] : doc.gravities) {
        std::string gname;
        for (const auto& [mn, mg] : doc.metrics)
            if (mg.chart() == model->metric().chart()) gname = mn;
        os << "model gravity " << name << " { metric " << gname << " }\n";
    }
    for (const auto& [name, cm] : doc.coupled)
        os << "model coupled " << name << " { scalar " << cm.scalar_name << " yangmills "
           << cm.yangmills_name << " }\n";
    for (const auto& [name, komar] : doc.komars) {
        std::string gname;
        for (const auto& [mn, mg] : doc.metrics)
            if (mg.chart() == komar->metric().chart()) gname = mn;
        os << "komar " << name << " { metric " << gname << " vector ";
        print_expr_vector(os, komar->vector_field());
        os << " }\n";
    }
    for (const auto& name : doc.vacuum_metrics) os << "vacuum " << name << "\n";
    for (const auto& req : doc.check_requests) os << "check " << req << "\n";
    return os.str();
}

std::string compute_object(const Document& doc, const std::string& what,
                           const std::string& name) {
    std::ostringstream os;
    auto print_matrix = [&os](const ExprMatrix& m) {
        for (const auto& row : m) {
            for (std::size_t j = 0; j < row.size(); ++j)
                os << (j ? ", " : "[") << row[j].str();
            os << "]\n";
        }
    };
    if (what == "metric") {
        const MetricField* g = Document::find(doc.metrics, name);
        if (!g) throw std::runtime_error("unknown metric: " + name);
        print_matrix(g->lower());
    } else if (what == "einstein") {
        const MetricField* g = Document::find(doc.metrics, name);
        if (!g) throw std::runtime_error("unknown metric: " + name);
        TensorField G = einstein(*g);
        const int m = g->dim();
        ExprMatrix out = expr_matrix(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) out[a][b] = G.at({a, b});
        print_matrix(out);
    } else if (what == "ricci") {
        const MetricField* g = Document::find(doc.metrics, name);
        if (!g) throw std::runtime_error("unknown metric: " + name);
        TensorField ric = ricci(base_curvature(levi_civita(*g)));
        const int m = g->dim();
        ExprMatrix out = expr_matrix(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) out[a][b] = ric.at({a, b});
        print_matrix(out);
    } else if (what == "scalar_curvature") {
        const MetricField* g = Document::find(doc.metrics, name);
        if (!g) throw std::runtime_error("unknown metric: " + name);
        os << scalar_curvature(*g, ricci(base_curvature(levi_civita(*g)))).str() << "\n";
    } else if (what == "connection") {
        const AffineConnectionField* c = Document::find(doc.connections, name);
        if (!c) throw std::runtime_error("unknown connection: " + name);
        const int m = c->dim();
        for (int k = 0; k < m; ++k)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (!c->G(k, a, b).is_zero())
                        os << "G[" << k << "][" << a << "][" << b << "] = "
                           << c->G(k, a, b).str() << "\n";
    } else if (what == "torsion") {
        const AffineConnectionField* c = Document::find(doc.connections, name);
        if (!c) throw std::runtime_error("unknown connection: " + name);
        TensorField tau = torsion_form(*c);
        for (int a = 0; a < c->dim(); ++a) os << tau.at({a}).str() << "\n";
    } else if (what == "curvature") {
        const GaugeField* f = Document::find(doc.gauge_fields, name);
        if (!f) throw std::runtime_error("unknown gauge field: " + name);
        auto rho = gauge_curvature(*f);
        for (std::size_t I = 0; I < rho.size(); ++I)
            for (std::size_t a = 0; a < rho[I].size(); ++a)
                for (std::size_t b = 0; b < rho[I][a].size(); ++b)
                    if (!rho[I][a][b].is_zero())
                        os << "rho[" << I << "][" << a << "][" << b << "] = "
                           << rho[I][a][b].str() << "\n";
    } else if (what == "komar_current") {
        const auto* k = Document::find(doc.komars, name);
        if (!k) throw std::runtime_error("unknown komar block: " + name);
        for (const auto& e : (*k)->current()) os << e.str() << "\n";
    } else if (what == "energy") {
        const auto* grav = Document::find(doc.gravities, name);
        if (!grav) throw std::runtime_error("unknown gravity model: " + name);
        print_matrix((*grav)->energy_tensor());
    } else {
        throw std::runtime_error("unknown compute target: " + what);
    }
    return os.str();
}

} // namespace dsl
} // namespace jetcartan
