#pragma once

#include "jetcartan/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace jetcartan {

// Fibered chart (x^a, y^i) owning the generated jet symbol families:
//   y^i_a      "<fiber>_<coord>"
//   y^i_{ab}   "<fiber>_<coord>_<coord>"   (not symmetrized; JJE needs both orders)
//   ybar^i_a   "<fiber>_bar_<coord>"       (first-level coordinates of JJE)
class FiberedChart {
public:
    FiberedChart(Chart base, const std::vector<std::string>& fiber_names,
                 double fiber_lo = -1.0, double fiber_hi = 1.0);

    const Chart& base() const { return base_; }
    int base_dim() const { return base_.dim(); }
    int fiber_dim() const { return static_cast<int>(fibers_.size()); }

    Symbol fiber(int i) const { return fibers_[i]; }
    Symbol jet1(int i, int a) const { return jet1_[i][a]; }
    Symbol jet2(int i, int a, int b) const { return jet2_[i][a][b]; }
    Symbol bar(int i, int a) const { return bar_[i][a]; }

    Expr fiber_expr(int i) const { return Expr::variable(fibers_[i]); }
    Expr jet1_expr(int i, int a) const { return Expr::variable(jet1_[i][a]); }
    Expr jet2_expr(int i, int a, int b) const { return Expr::variable(jet2_[i][a][b]); }
    Expr bar_expr(int i, int a) const { return Expr::variable(bar_[i][a]); }

    // sampling domain: base box + fiber box + first / second jets + bars
    Domain first_jet_domain() const;
    Domain second_jet_domain() const;
    Domain double_jet_domain() const;

    // free-variable discipline helpers
    bool within_first_jet(const Expr& e) const;

private:
    Chart base_;
    std::vector<Symbol> fibers_;
    std::vector<std::vector<Symbol>> jet1_;
    std::vector<std::vector<std::vector<Symbol>>> jet2_;
    std::vector<std::vector<Symbol>> bar_;
    std::pair<double, double> fiber_range_;
};

// kappa^i_a(x, y): a section E -> JE in components.
class GeneralConnection {
public:
    GeneralConnection(FiberedChart chart, std::vector<std::vector<Expr>> comps);

    const FiberedChart& chart() const { return chart_; }
    const Expr& k(int i, int a) const { return comp_[i][a]; }
    const std::vector<std::vector<Expr>>& components() const { return comp_; }

private:
    FiberedChart chart_;
    std::vector<std::vector<Expr>> comp_; // [i][a]
};

// kappa_a^i_j(x): linear connection of a vector bundle, stored [a][i][j].
class LinearConnection {
public:
    LinearConnection(FiberedChart chart, std::vector<ExprMatrix> comps);

    const FiberedChart& chart() const { return chart_; }
    const Expr& k(int a, int i, int j) const { return comp_[a][i][j]; }
    const std::vector<ExprMatrix>& components() const { return comp_; }

    GeneralConnection to_general() const; // kappa^i_a = kappa_a^i_j y^j

private:
    FiberedChart chart_;
    std::vector<ExprMatrix> comp_;
};

// Orthonormal frame l_I of anti-Hermitian endomorphisms with its structure
// constants c^I_{JH} (exact constant Exprs) and Gram matrix.
class GaugeStructure {
public:
    GaugeStructure(int fiber_dim, std::vector<ExprMatrix> frame);

    int fiber_dim() const { return n_; }
    int algebra_dim() const { return static_cast<int>(frame_.size()); }
    const ExprMatrix& l(int I) const { return frame_[I]; }
    const Expr& c(int I, int J, int H) const { return c_[I][J][H]; }
    const Expr& gram(int I, int J) const { return gram_[I][J]; }
    bool orthonormal() const { return orthonormal_; }

    static GaugeStructure u1();
    static GaugeStructure su2();

private:
    int n_;
    std::vector<ExprMatrix> frame_;
    std::vector<std::vector<std::vector<Expr>>> c_;
    ExprMatrix gram_;
    bool orthonormal_ = false;
};

// kappa^I_a(x): gauge field in Lie-algebra components over an orthonormal frame.
class GaugeField {
public:
    GaugeField(GaugeStructure structure, Chart base, std::vector<std::vector<Expr>> comps);

    const GaugeStructure& structure() const { return structure_; }
    const Chart& base() const { return base_; }
    const Expr& k(int I, int a) const { return comp_[I][a]; }
    const std::vector<std::vector<Expr>>& components() const { return comp_; }

private:
    GaugeStructure structure_;
    Chart base_;
    std::vector<std::vector<Expr>> comp_; // [I][a]
};

// Connection of the bundle of connections; represented as a general
// connection on the connection-bundle fibered chart, with the flattened
// fiber indexing bookkept here. Coefficients are affine in the C-fibers.
struct Overconnection {
    enum class Kind { Linear, Gauge, Gravity };
    Kind kind;
    GeneralConnection conn;

    // linear: fiber (i, b, j) of y^i_{bj}; gauge: (I, b) of y^I_b;
    // gravity: (b, c, d) of y_b^c_d
    int flat_index(int i, int b, int j) const;
    int flat_index(int I, int b) const;
};

// ---------------------------------------------------------------- operations

// rho^i_{ab} = k^i_{a,b} - k^i_{b,a} + d_j k^i_a k^j_b - d_j k^i_b k^j_a
// returned as rho[i][a][b]
std::vector<ExprMatrix> curvature(const GeneralConnection& k);

// rho_{ab}^i_j for a linear connection, returned as rho[a][b][i][j]
std::vector<std::vector<ExprMatrix>> linear_curvature(const LinearConnection& k);

// rho^I_{ab} = k^I_{a,b} - k^I_{b,a} + c^I_{JH} k^J_a k^H_b, as rho[I][a][b]
std::vector<ExprMatrix> gauge_curvature(const GaugeField& k);

// nabla_a phi^i = d_a phi^i - kappa^i_a(x, phi)
std::vector<std::vector<Expr>> section_covariant_derivative(
    const GeneralConnection& k, const std::vector<Expr>& phi);

// s_Gamma on the JJE coordinates of fc, as a simultaneous substitution map.
std::map<Symbol, Expr> involution(const FiberedChart& fc, const AffineConnectionField& conn);

// J kappa as a substitution map on JJE coordinates (used to build kappa').
std::map<Symbol, Expr> jet_prolongation_map(const GeneralConnection& k);

struct ProlongedConnection {
    std::vector<std::vector<Expr>> first_level;   // [i][a] = (k'_a)^i, in (x, y, y_a)
    std::vector<ExprMatrix> second_level;         // [i][a][b] = (k'_a)^i_b
};

// kappa' = s_Gamma o J kappa (Gamma symmetric)
ProlongedConnection prolong(const GeneralConnection& k, const AffineConnectionField& conn);

// dual linear connection: kcheck[a][i][j] = -k[a][j][i] on the dual fiber chart
LinearConnection dual_connection(const LinearConnection& k);

// structure constants of an orthonormal frame: c^I_{JH} = <l^I, [l_J, l_H]>
std::vector<std::vector<std::vector<Expr>>> structure_constants(const std::vector<ExprMatrix>& frame);

// index lowering by the frame Gram matrix (identity for orthonormal frames)
std::vector<Expr> index_lower(const GaugeStructure& G, const std::vector<Expr>& upper);
// variant for explicit (possibly non-orthonormal) frames
std::vector<Expr> index_lower(const std::vector<ExprMatrix>& frame, const std::vector<Expr>& upper);

// (kup_a)^i_{bj} = d_b k_a^i_j - k_a^h_j y^i_{bh} + y^h_{bj} k_a^i_h
//                 + Gamma_a^c_b (k_c^i_j - y^i_{cj})
Overconnection overconnection_linear(const LinearConnection& k, const AffineConnectionField& conn);

// (kup_a)^I_b = k^I_{a,b} + c^I_{JH} k^J_a y^H_b + Gamma_a^c_b (k^I_c - y^I_c)
Overconnection overconnection_gauge(const GaugeField& k, const AffineConnectionField& conn);

// nabla_a kappa_b^i_j (resp. nabla_a kappa^I_b) with respect to the
// overconnection built from the same kappa; equals -rho.
std::vector<std::vector<ExprMatrix>> overconnection_covariant_derivative(
    const LinearConnection& k, const Overconnection& up);
std::vector<ExprMatrix> overconnection_covariant_derivative(
    const GaugeField& k, const Overconnection& up);

// expansion of a gauge field through its frame: kappa_a^i_j = kappa^I_a (l_I)^i_j
LinearConnection expand_to_linear(const GaugeField& k, const std::string& fiber_prefix = "e");

} // namespace jetcartan
