#include "jetcartan/variational.hpp"

namespace jetcartan {

// ----------------------------------------------------------- MetricSymbols

MetricSymbols::MetricSymbols(const Chart& chart) : sqrtg_(Symbol::intern("sqrtg")) {
    const int m = chart.dim();
    gu_.assign(m, std::vector<Symbol>(m, sqrtg_));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            gu_[a][b] = Symbol::intern("gu_" + chart.coord(a).name() + "_" + chart.coord(b).name());
}

std::map<Symbol, Expr> MetricSymbols::binding(const MetricField& g) const {
    std::map<Symbol, Expr> map;
    const int m = static_cast<int>(gu_.size());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) map.emplace(gu_[a][b], g.ginv(a, b));
    map.emplace(sqrtg_, g.sqrt_abs_det());
    return map;
}

Domain MetricSymbols::domain(double lo, double hi) const {
    Domain d;
    for (const auto& row : gu_)
        for (Symbol s : row) d.set(s, lo, hi);
    d.set(sqrtg_, 0.25, 2.0);
    return d;
}

// ----------------------------------------------------------- JetLagrangian

JetLagrangian::JetLagrangian(FiberedChart fc, Expr ell, bool metric_dep)
    : chart(std::move(fc)), density(std::move(ell)), metric_dependent(metric_dep) {
    Domain allowed = chart.first_jet_domain();
    if (metric_dependent) allowed.merge(MetricSymbols(chart.base()).domain());
    for (Symbol s : density.free_variables())
        if (!allowed.covers(s))
            throw std::invalid_argument("lagrangian density depends on " + s.name());
}

JetLagrangian JetLagrangian::bind_metric(const MetricField& g) const {
    if (!metric_dependent) return *this;
    MetricSymbols ms(chart.base());
    return JetLagrangian(chart, subst(density, ms.binding(g)), false);
}

// ----------------------------------------------------------------- Section

Section::Section(FiberedChart fc, std::vector<Expr> components)
    : chart(std::move(fc)), comps(std::move(components)) {
    if (static_cast<int>(comps.size()) != chart.fiber_dim())
        throw std::invalid_argument("section component count mismatch");
    for (const auto& e : comps)
        for (Symbol s : e.free_variables())
            if (!chart.base().box().covers(s))
                throw std::invalid_argument("section component depends on " + s.name());
}

std::map<Symbol, Expr> Section::first_jet() const {
    std::map<Symbol, Expr> map;
    const int m = chart.base_dim(), n = chart.fiber_dim();
    for (int i = 0; i < n; ++i) {
        map.emplace(chart.fiber(i), comps[i]);
        for (int a = 0; a < m; ++a)
            map.emplace(chart.jet1(i, a), diff(comps[i], chart.base().coord(a)));
    }
    return map;
}

std::map<Symbol, Expr> Section::second_jet() const {
    std::map<Symbol, Expr> map = first_jet();
    const int m = chart.base_dim(), n = chart.fiber_dim();
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                map.emplace(chart.jet2(i, a, b),
                            diff(diff(comps[i], chart.base().coord(a)), chart.base().coord(b)));
    return map;
}

// -------------------------------------------------------------- operations

std::vector<Expr> horizontal_differential(const FiberedChart& fc, const Expr& f) {
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<Expr> out(m, Expr::integer(0));
    for (int a = 0; a < m; ++a) {
        std::vector<Expr> terms{diff(f, fc.base().coord(a))};
        for (int i = 0; i < n; ++i) {
            Expr dfi = diff(f, fc.fiber(i));
            if (!dfi.is_zero()) terms.push_back(fc.jet1_expr(i, a) * dfi);
            for (int b = 0; b < m; ++b) {
                Expr dfib = diff(f, fc.jet1(i, b));
                if (!dfib.is_zero()) terms.push_back(fc.jet2_expr(i, b, a) * dfib);
            }
        }
        out[a] = sum(terms);
    }
    return out;
}

std::vector<Expr> euler_lagrange(const JetLagrangian& lagr) {
    if (lagr.metric_dependent)
        throw std::invalid_argument("euler_lagrange needs a metric-bound lagrangian");
    const FiberedChart& fc = lagr.chart;
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<Expr> out(n, Expr::integer(0));
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> terms{diff(lagr.density, fc.fiber(i))};
        for (int a = 0; a < m; ++a) {
            Expr Pa = diff(lagr.density, fc.jet1(i, a));
            if (Pa.is_zero()) continue;
            std::vector<Expr> da = horizontal_differential(fc, Pa);
            terms.push_back(-da[a]);
        }
        out[i] = sum(terms);
    }
    return out;
}

std::vector<std::vector<Expr>> momentum(const JetLagrangian& lagr) {
    const FiberedChart& fc = lagr.chart;
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<std::vector<Expr>> P(m, std::vector<Expr>(n, Expr::integer(0)));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) P[a][i] = diff(lagr.density, fc.jet1(i, a));
    return P;
}

std::vector<Expr> current_pullback(const LiftField& Y, const JetLagrangian& lagr,
                                   const Section& phi) {
    if (lagr.metric_dependent)
        throw std::invalid_argument("current_pullback needs a metric-bound lagrangian");
    const FiberedChart& fc = lagr.chart;
    const int m = fc.base_dim(), n = fc.fiber_dim();
    auto jphi = phi.first_jet();
    auto P = momentum(lagr);
    Expr ell_h = subst(lagr.density, jphi);
    std::vector<Expr> out(m, Expr::integer(0));
    for (int a = 0; a < m; ++a) {
        std::vector<Expr> terms{ell_h * subst(Y.base_comp[a], jphi)};
        for (int i = 0; i < n; ++i) {
            std::vector<Expr> theta{subst(Y.fiber_comp[i], jphi)};
            for (int b = 0; b < m; ++b)
                theta.push_back(-(subst(Y.base_comp[b], jphi) * diff(phi.comps[i], fc.base().coord(b))));
            terms.push_back(subst(P[a][i], jphi) * sum(theta));
        }
        out[a] = sum(terms);
    }
    return out;
}

EnergyTensorField canonical_energy_tensor(const JetLagrangian& lagr, const GeneralConnection& kappa) {
    const FiberedChart& fc = lagr.chart;
    const int m = fc.base_dim(), n = fc.fiber_dim();
    JetLagrangian bound = lagr;
    auto P = momentum(bound);
    EnergyTensorField U;
    U.form = EnergyTensorField::Form::MixedDensity;
    U.chart = fc.base();
    U.comp = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            if (a == b) terms.push_back(bound.density);
            for (int i = 0; i < n; ++i)
                terms.push_back(-((fc.jet1_expr(i, b) - kappa.k(i, b)) * P[a][i]));
            U.comp[a][b] = sum(terms);
        }
    return U;
}

EnergyTensorField metric_stress_tensor(const JetLagrangian& lagr, const MetricField& g) {
    if (!lagr.metric_dependent)
        throw std::invalid_argument("metric_stress_tensor: lagrangian has no declared metric dependence");
    const Chart& base = lagr.chart.base();
    const int m = base.dim();
    MetricSymbols ms(base);
    auto bind = ms.binding(g);
    EnergyTensorField T;
    T.form = EnergyTensorField::Form::CovariantDensity;
    T.chart = base;
    T.comp = expr_matrix(m, m);
    Expr dsqrt = diff(lagr.density, ms.sqrtg());
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            Expr sym = Expr::rational(1, 2) *
                       (diff(lagr.density, ms.gu(a, b)) + diff(lagr.density, ms.gu(b, a)));
            Expr chain = dsqrt * (Expr::rational(-1, 2) * g.g(a, b) * ms.sqrtg_expr());
            Expr value = subst(sym + chain, bind);
            T.comp[a][b] = value;
            T.comp[b][a] = value;
        }
    return T;
}

LiftField lift_from_current(const FiberedChart& fc, const std::vector<Expr>& X,
                            const std::vector<Expr>& W) {
    const int m = fc.base_dim(), n = fc.fiber_dim();
    LiftField Y{fc, X, std::vector<Expr>(n, Expr::integer(0))};
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> terms{W.empty() ? Expr::integer(0) : W[i]};
        for (int a = 0; a < m; ++a) terms.push_back(X[a] * fc.jet1_expr(i, a));
        Y.fiber_comp[i] = sum(terms);
    }
    return Y;
}

Expr symmetry_defect(const LiftField& Y, const JetLagrangian& lagr, const Section& phi) {
    if (lagr.metric_dependent)
        throw std::invalid_argument("symmetry_defect needs a metric-bound lagrangian");
    const FiberedChart& fc = lagr.chart;
    const int m = fc.base_dim(), n = fc.fiber_dim();
    auto jphi = phi.first_jet();
    auto j2phi = phi.second_jet();

    std::vector<Expr> current = current_pullback(Y, lagr, phi);
    Expr d_current = Expr::integer(0);
    for (int a = 0; a < m; ++a)
        d_current = d_current + diff(current[a], fc.base().coord(a));

    std::vector<Expr> E = euler_lagrange(lagr);
    auto P = momentum(lagr);
    Expr ell_h = subst(lagr.density, jphi);

    std::vector<Expr> theta_h(n, Expr::integer(0));
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> th{subst(Y.fiber_comp[i], jphi)};
        for (int a = 0; a < m; ++a)
            th.push_back(-(subst(Y.base_comp[a], jphi) * diff(phi.comps[i], fc.base().coord(a))));
        theta_h[i] = sum(th);
    }

    Expr el_term = Expr::integer(0);
    for (int i = 0; i < n; ++i) el_term = el_term + subst(E[i], j2phi) * theta_h[i];

    // Lie-derivative term along the lift, evaluated through the section
    Expr lie = Expr::integer(0);
    for (int a = 0; a < m; ++a) {
        Expr Ya = subst(Y.base_comp[a], jphi);
        lie = lie + Ya * diff(ell_h, fc.base().coord(a)) + ell_h * diff(Ya, fc.base().coord(a));
    }
    for (int i = 0; i < n; ++i) {
        lie = lie + subst(diff(lagr.density, fc.fiber(i)), jphi) * theta_h[i];
        for (int a = 0; a < m; ++a)
            lie = lie + subst(P[a][i], jphi) * diff(theta_h[i], fc.base().coord(a));
    }

    return d_current + el_term - lie;
}

} // namespace jetcartan
