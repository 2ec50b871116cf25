#pragma once

#include "jetcartan/connections.hpp"

namespace jetcartan {

// Reserved metric symbols on a chart: gu_<ca>_<cb> for the inverse metric
// components and sqrtg for the density factor. Lagrangians carrying metric
// dependence are written in these symbols and bound to a MetricField later.
struct MetricSymbols {
    explicit MetricSymbols(const Chart& chart);

    Symbol gu(int a, int b) const { return gu_[a][b]; }
    Expr gu_expr(int a, int b) const { return Expr::variable(gu_[a][b]); }
    Symbol sqrtg() const { return sqrtg_; }
    Expr sqrtg_expr() const { return Expr::variable(sqrtg_); }

    std::map<Symbol, Expr> binding(const MetricField& g) const;
    Domain domain(double lo = -1.0, double hi = 1.0) const;

private:
    std::vector<std::vector<Symbol>> gu_;
    Symbol sqrtg_;
};

// First-order Lagrangian density in jet coordinates; may carry the reserved
// metric symbols (metric_dependent), resolved by substitute_metric.
struct JetLagrangian {
    FiberedChart chart;
    Expr density;
    bool metric_dependent = false;

    JetLagrangian(FiberedChart fc, Expr ell, bool metric_dep = false);
    JetLagrangian bind_metric(const MetricField& g) const;
};

// Field components phi^i(x) on a fibered chart.
struct Section {
    FiberedChart chart;
    std::vector<Expr> comps;

    Section(FiberedChart fc, std::vector<Expr> components);

    // substitution maps realizing j phi and j2 phi
    std::map<Symbol, Expr> first_jet() const;
    std::map<Symbol, Expr> second_jet() const;
};

// Morphism JE -> TE over E: base components Y^a and fiber components Y^i,
// all Exprs in first-jet coordinates.
struct LiftField {
    FiberedChart chart;
    std::vector<Expr> base_comp;   // Y^a
    std::vector<Expr> fiber_comp;  // Y^i
};

// Canonical energy-tensor / metric stress tensor values.
struct EnergyTensorField {
    enum class Form { MixedDensity, CovariantDensity };
    Form form = Form::MixedDensity;
    Chart chart;
    ExprMatrix comp; // U^a_b (mixed) or T_ab (covariant); carries one sqrt|g|
};

// d_a f = d_a f + y^i_a d_i f + y^i_{ab} d^b_i f
std::vector<Expr> horizontal_differential(const FiberedChart& fc, const Expr& f);

// E_i = d_i ell - d_a d^a_i ell (in second-jet symbols)
std::vector<Expr> euler_lagrange(const JetLagrangian& lagr);

// P^a_i = d ell / d y^i_a, indexed [a][i]
std::vector<std::vector<Expr>> momentum(const JetLagrangian& lagr);

// j phi^*(i_Y C) = (ell Y^a + P^a_i (Y^i - Y^b phi^i_{,b})) dx_a
std::vector<Expr> current_pullback(const LiftField& Y, const JetLagrangian& lagr,
                                   const Section& phi);

// U^a_b = ell delta^a_b - (y^i_b - kappa^i_b) P^a_i, in jet coordinates
EnergyTensorField canonical_energy_tensor(const JetLagrangian& lagr, const GeneralConnection& kappa);

// T_ab = d ell / d g^{ab} with the density rule d sqrtg / d g^{ab} = -1/2 g_ab sqrtg,
// symmetrized over the two metric slots; metric symbols substituted on output.
EnergyTensorField metric_stress_tensor(const JetLagrangian& lagr, const MetricField& g);

// Y = X . dl + W: Y^a = X^a, Y^i = X^a y^i_a + W^i
LiftField lift_from_current(const FiberedChart& fc, const std::vector<Expr>& X,
                            const std::vector<Expr>& W);

// d_a[current^a] + E_i theta^i - (Y^a d_a ell + ell d_a Y^a + d_i ell theta^i
//   + P^a_i d_a theta^i) along j2 phi, with theta^i = Y^i - Y^a phi^i_{,a}.
// Identically zero for every lift and section; the sign of the EL term is
// fixed by the first-variation oracle and frozen in fixtures/oracles.
Expr symmetry_defect(const LiftField& Y, const JetLagrangian& lagr, const Section& phi);

} // namespace jetcartan
