#include "jetcartan/geometry.hpp"

#include <cmath>

namespace jetcartan {

MetricField::MetricField(Chart chart, ExprMatrix components, std::string signature_tag)
    : chart_(std::move(chart)), g_(std::move(components)), signature_(std::move(signature_tag)) {
    const int m = chart_.dim();
    if (static_cast<int>(g_.size()) != m)
        throw std::invalid_argument("metric dimension mismatch");
    for (int a = 0; a < m; ++a) {
        if (static_cast<int>(g_[a].size()) != m)
            throw std::invalid_argument("metric dimension mismatch");
        for (int b = 0; b < a; ++b)
            if (!g_[a][b].same_node(g_[b][a]))
                throw std::invalid_argument("metric components not symmetric as Exprs");
    }

    det_ = determinant(g_);

    // Determine the sign of det over the box (sampled; center first).
    PointSampler sampler(chart_.box(), 0xdecafbadull);
    double center = 0.0;
    bool have_sign = false;
    for (int t = 0; t < 8; ++t) {
        Assignment p = sampler.next();
        double v = eval(det_, p).real();
        if (std::abs(v) < 1e-12) {
            throw SingularMetricError("metric determinant vanishes near a sampled point");
        }
        if (!have_sign) {
            center = v;
            have_sign = true;
        } else if ((center > 0) != (v > 0)) {
            throw SingularMetricError("metric determinant changes sign over the chart box");
        }
    }
    det_sign_ = center > 0 ? 1 : -1;
    sqrtg_ = sqrt(Expr::integer(det_sign_) * det_);

    ExprMatrix adj = adjugate(g_);
    ginv_ = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) ginv_[a][b] = adj[a][b] / det_;
}

AffineConnectionField::AffineConnectionField(Chart chart, int dim)
    : chart_(std::move(chart)) {
    coeff_.assign(dim, expr_matrix(dim, dim));
}

void AffineConnectionField::validate_symmetry() const {
    const int m = dim();
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < a; ++b)
                if (!coeff_[c][a][b].same_node(coeff_[c][b][a]))
                    throw std::invalid_argument("connection is not symmetric");
}

AffineConnectionField levi_civita(const MetricField& g) {
    const Chart& chart = g.chart();
    const int m = chart.dim();
    AffineConnectionField conn(chart, m);
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                std::vector<Expr> terms;
                for (int d = 0; d < m; ++d) {
                    Expr inner = diff(g.g(d, b), chart.coord(a)) + diff(g.g(d, a), chart.coord(b)) -
                                 diff(g.g(a, b), chart.coord(d));
                    terms.push_back(g.ginv(c, d) * inner);
                }
                Expr value = Expr::rational(1, 2) * sum(terms);
                conn.G(c, a, b) = value;
                conn.G(c, b, a) = value;
            }
    conn.mark_symmetric(true);
    return conn;
}

TensorField base_curvature(const AffineConnectionField& conn) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    TensorField R(chart, {m, m, m, m});
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    Expr v = diff(conn.G(c, a, d), chart.coord(b)) -
                             diff(conn.G(c, b, d), chart.coord(a));
                    std::vector<Expr> quad;
                    for (int h = 0; h < m; ++h)
                        quad.push_back(conn.G(c, b, h) * conn.G(h, a, d) -
                                       conn.G(c, a, h) * conn.G(h, b, d));
                    v = v + sum(quad);
                    R.at({a, b, c, d}) = v;
                    R.at({b, a, c, d}) = -v;
                }
    return R;
}

TensorField ricci(const TensorField& riemann) {
    const Chart& chart = riemann.chart();
    const int m = chart.dim();
    TensorField ric(chart, {m, m});
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
            std::vector<Expr> terms;
            for (int b = 0; b < m; ++b) terms.push_back(riemann.at({a, b, b, c}));
            ric.at({a, c}) = sum(terms);
        }
    return ric;
}

Expr scalar_curvature(const MetricField& g, const TensorField& ricci_tensor) {
    const int m = g.dim();
    std::vector<Expr> terms;
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) terms.push_back(g.ginv(a, c) * ricci_tensor.at({a, c}));
    return sum(terms);
}

TensorField einstein(const MetricField& g, const AffineConnectionField& conn) {
    const int m = g.dim();
    TensorField R4 = base_curvature(conn);
    TensorField ric = ricci(R4);
    Expr R = scalar_curvature(g, ric);
    TensorField G(g.chart(), {m, m});
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            for (int c = 0; c < m; ++c) terms.push_back(g.ginv(a, c) * ric.at({c, b}));
            Expr mixed = sum(terms);
            if (a == b) mixed = mixed - Expr::rational(1, 2) * R;
            G.at({a, b}) = mixed;
        }
    return G;
}

TensorField einstein(const MetricField& g) { return einstein(g, levi_civita(g)); }

TensorField torsion_form(const AffineConnectionField& conn) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    TensorField tau(chart, {m});
    for (int a = 0; a < m; ++a) {
        std::vector<Expr> terms;
        for (int c = 0; c < m; ++c) terms.push_back(conn.G(c, a, c) - conn.G(c, c, a));
        tau.at({a}) = sum(terms);
    }
    return tau;
}

namespace {

int levi_civita_symbol(int a, int b, int c, int d) {
    int perm[4] = {a, b, c, d};
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (perm[i] == perm[j]) return 0;
            if (perm[i] > perm[j]) {
                std::swap(perm[i], perm[j]);
                sign = -sign;
            }
        }
    return sign;
}

} // namespace

TensorField hodge_star(const MetricField& g, const TensorField& two_form, int orientation) {
    const int m = g.dim();
    if (m != 4) throw std::invalid_argument("hodge_star: chart dimension must be 4");
    if (two_form.rank() != 2) throw std::invalid_argument("hodge_star: expected a 2-form");
    TensorField out(g.chart(), {m, m});
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
            std::vector<Expr> terms;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const int eps = levi_civita_symbol(a, b, c, d) * orientation;
                    if (eps == 0) continue;
                    std::vector<Expr> raised;
                    for (int e = 0; e < m; ++e)
                        for (int f = 0; f < m; ++f)
                            raised.push_back(g.ginv(a, e) * g.ginv(b, f) * two_form.at({e, f}));
                    terms.push_back(Expr::integer(eps) * sum(raised));
                }
            out.at({c, d}) = Expr::rational(1, 2) * g.sqrt_abs_det() * sum(terms);
        }
    return out;
}

TensorField covariant_divergence(const TensorField& xi, const AffineConnectionField& conn,
                                 const std::vector<ExprMatrix>& kappa) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    if (xi.rank() < 1 || xi.shape()[0] != m)
        throw std::invalid_argument("covariant_divergence: first slot must run over the base");
    const bool has_fiber = xi.rank() == 2;
    const int n = has_fiber ? xi.shape()[1] : 1;
    if (!kappa.empty() && (static_cast<int>(kappa.size()) != m ||
                           static_cast<int>(kappa[0].size()) != n))
        throw std::invalid_argument("covariant_divergence: kappa shape mismatch");

    TensorField tau = torsion_form(conn);
    TensorField out(chart, has_fiber ? std::vector<int>{n} : std::vector<int>{1});
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        for (int a = 0; a < m; ++a) {
            Expr comp = has_fiber ? xi.at({a, i}) : xi.at({a});
            terms.push_back(diff(comp, chart.coord(a)));
            if (!kappa.empty()) {
                for (int j = 0; j < n; ++j)
                    terms.push_back(-(kappa[a][i][j] * (has_fiber ? xi.at({a, j}) : xi.at({a}))));
            }
            terms.push_back(tau.at({a}) * comp);
        }
        out.at({i}) = sum(terms);
    }
    return out;
}

TensorField breve(const TensorField& xi, const MetricField& g) {
    TensorField out = xi;
    for (auto& e : out.data()) e = e / g.sqrt_abs_det();
    return out;
}

ExprMatrix cov_deriv_vector(const AffineConnectionField& conn, const std::vector<Expr>& X) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    ExprMatrix out = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms{diff(X[b], chart.coord(a))};
            for (int h = 0; h < m; ++h) terms.push_back(conn.G(b, a, h) * X[h]);
            out[a][b] = sum(terms);
        }
    return out;
}

TensorField cov_deriv_metric(const AffineConnectionField& conn, const MetricField& g) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    TensorField out(chart, {m, m, m});
    for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{diff(g.g(a, b), chart.coord(c))};
                for (int d = 0; d < m; ++d) {
                    terms.push_back(-(conn.G(d, c, a) * g.g(d, b)));
                    terms.push_back(-(conn.G(d, c, b) * g.g(a, d)));
                }
                out.at({c, a, b}) = sum(terms);
            }
    return out;
}

std::vector<Expr> div_mixed_density(const AffineConnectionField& conn, const ExprMatrix& U) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> terms;
        for (int a = 0; a < m; ++a) {
            terms.push_back(diff(U[a][b], chart.coord(a)));
            for (int d = 0; d < m; ++d) terms.push_back(-(conn.G(d, a, b) * U[a][d]));
        }
        out[b] = sum(terms);
    }
    return out;
}

} // namespace jetcartan
