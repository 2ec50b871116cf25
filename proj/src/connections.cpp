#include "jetcartan/connections.hpp"

#include <cmath>
#include <set>

namespace jetcartan {

// ----------------------------------------------------------- FiberedChart

FiberedChart::FiberedChart(Chart base, const std::vector<std::string>& fiber_names,
                           double fiber_lo, double fiber_hi)
    : base_(std::move(base)), fiber_range_(fiber_lo, fiber_hi) {
    const int m = base_.dim();
    std::set<std::string> seen;
    for (Symbol s : base_.coords()) seen.insert(s.name());
    auto claim = [&seen](const std::string& name) {
        if (!seen.insert(name).second)
            throw std::invalid_argument("fibered chart name clash: " + name);
        return Symbol::intern(name);
    };

    for (const auto& f : fiber_names) fibers_.push_back(claim(f));
    const int n = fiber_dim();
    if (n == 0) throw std::invalid_argument("fibered chart needs at least one fiber coordinate");
    jet1_.assign(n, std::vector<Symbol>(m, fibers_[0]));
    bar_.assign(n, std::vector<Symbol>(m, fibers_[0]));
    jet2_.assign(n, std::vector<std::vector<Symbol>>(m, std::vector<Symbol>(m, fibers_[0])));
    for (int i = 0; i < n; ++i) {
        const std::string fn = fibers_[i].name();
        for (int a = 0; a < m; ++a) {
            const std::string cn = base_.coord(a).name();
            jet1_[i][a] = claim(fn + "_" + cn);
            bar_[i][a] = claim(fn + "_bar_" + cn);
        }
    }
    for (int i = 0; i < n; ++i) {
        const std::string fn = fibers_[i].name();
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                jet2_[i][a][b] = claim(fn + "_" + base_.coord(a).name() + "_" + base_.coord(b).name());
    }
}

Domain FiberedChart::first_jet_domain() const {
    Domain d = base_.box();
    for (int i = 0; i < fiber_dim(); ++i) {
        d.set(fibers_[i], fiber_range_.first, fiber_range_.second);
        for (int a = 0; a < base_dim(); ++a)
            d.set(jet1_[i][a], fiber_range_.first, fiber_range_.second);
    }
    return d;
}

Domain FiberedChart::second_jet_domain() const {
    Domain d = first_jet_domain();
    for (int i = 0; i < fiber_dim(); ++i)
        for (int a = 0; a < base_dim(); ++a)
            for (int b = 0; b < base_dim(); ++b)
                d.set(jet2_[i][a][b], fiber_range_.first, fiber_range_.second);
    return d;
}

Domain FiberedChart::double_jet_domain() const {
    Domain d = second_jet_domain();
    for (int i = 0; i < fiber_dim(); ++i)
        for (int a = 0; a < base_dim(); ++a)
            d.set(bar_[i][a], fiber_range_.first, fiber_range_.second);
    return d;
}

bool FiberedChart::within_first_jet(const Expr& e) const {
    Domain d = first_jet_domain();
    for (Symbol s : e.free_variables())
        if (!d.covers(s)) return false;
    return true;
}

// ------------------------------------------------------------- connections

GeneralConnection::GeneralConnection(FiberedChart chart, std::vector<std::vector<Expr>> comps)
    : chart_(std::move(chart)), comp_(std::move(comps)) {
    if (static_cast<int>(comp_.size()) != chart_.fiber_dim())
        throw std::invalid_argument("connection components: fiber dimension mismatch");
    Domain allowed = chart_.base().box();
    for (int j = 0; j < chart_.fiber_dim(); ++j) allowed.set(chart_.fiber(j), -1, 1);
    for (int i = 0; i < chart_.fiber_dim(); ++i) {
        if (static_cast<int>(comp_[i].size()) != chart_.base_dim())
            throw std::invalid_argument("connection components: base dimension mismatch");
        for (const auto& e : comp_[i])
            for (Symbol s : e.free_variables())
                if (!allowed.covers(s))
                    throw std::invalid_argument("connection component depends on " + s.name());
    }
}

LinearConnection::LinearConnection(FiberedChart chart, std::vector<ExprMatrix> comps)
    : chart_(std::move(chart)), comp_(std::move(comps)) {
    const int m = chart_.base_dim(), n = chart_.fiber_dim();
    if (static_cast<int>(comp_.size()) != m)
        throw std::invalid_argument("linear connection: base dimension mismatch");
    for (const auto& mat : comp_) {
        if (static_cast<int>(mat.size()) != n)
            throw std::invalid_argument("linear connection: fiber dimension mismatch");
        for (const auto& row : mat)
            for (const auto& e : row)
                for (Symbol s : e.free_variables())
                    if (!chart_.base().box().covers(s))
                        throw std::invalid_argument("linear connection depends on " + s.name());
    }
}

GeneralConnection LinearConnection::to_general() const {
    const int m = chart_.base_dim(), n = chart_.fiber_dim();
    std::vector<std::vector<Expr>> comps(n, std::vector<Expr>(m, Expr::integer(0)));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            std::vector<Expr> terms;
            for (int j = 0; j < n; ++j) terms.push_back(comp_[a][i][j] * chart_.fiber_expr(j));
            comps[i][a] = sum(terms);
        }
    return GeneralConnection(chart_, std::move(comps));
}

// ---------------------------------------------------------- GaugeStructure

namespace {

ExprMatrix commutator(const ExprMatrix& a, const ExprMatrix& b) {
    ExprMatrix ab = matmul(a, b), ba = matmul(b, a);
    const int n = static_cast<int>(a.size());
    ExprMatrix out = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i][j] = ab[i][j] - ba[i][j];
    return out;
}

Expr neg_trace_product(const ExprMatrix& a, const ExprMatrix& b) {
    // <a, b> = Tr(a^dag b) = -Tr(a b) when a is anti-Hermitian
    ExprMatrix prod = matmul(a, b);
    std::vector<Expr> tr;
    for (std::size_t i = 0; i < prod.size(); ++i) tr.push_back(prod[i][i]);
    return -sum(tr);
}

} // namespace

GaugeStructure::GaugeStructure(int fiber_dim, std::vector<ExprMatrix> frame)
    : n_(fiber_dim), frame_(std::move(frame)) {
    const int dimL = algebra_dim();
    for (const auto& l : frame_) {
        if (static_cast<int>(l.size()) != n_)
            throw std::invalid_argument("gauge frame dimension mismatch");
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                CDouble lij = eval(l[i][j], {});
                CDouble lji = eval(l[j][i], {});
                if (std::abs(std::conj(lij) + lji) > 1e-12)
                    throw std::invalid_argument("gauge frame element is not anti-Hermitian");
            }
    }
    gram_ = expr_matrix(dimL, dimL);
    orthonormal_ = true;
    for (int I = 0; I < dimL; ++I)
        for (int J = 0; J < dimL; ++J) {
            gram_[I][J] = neg_trace_product(frame_[I], frame_[J]);
            CDouble v = eval(gram_[I][J], {});
            const double want = (I == J) ? 1.0 : 0.0;
            if (std::abs(v - CDouble(want)) > 1e-12) orthonormal_ = false;
        }
    if (!orthonormal_)
        throw std::invalid_argument("gauge frame is not orthonormal");
    c_ = structure_constants(frame_);
    // closure: [l_J, l_H] = c^I_{JH} l_I
    for (int J = 0; J < dimL; ++J)
        for (int H = 0; H < dimL; ++H) {
            ExprMatrix lhs = commutator(frame_[J], frame_[H]);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    std::vector<Expr> terms;
                    for (int I = 0; I < dimL; ++I) terms.push_back(c_[I][J][H] * frame_[I][i][j]);
                    if (std::abs(eval(sum(terms), {}) - eval(lhs[i][j], {})) > 1e-12)
                        throw std::invalid_argument("gauge frame does not close under commutators");
                }
        }
}

GaugeStructure GaugeStructure::u1() {
    ExprMatrix l = expr_matrix(1, 1);
    l[0][0] = Expr::imaginary_unit();
    return GaugeStructure(1, {l});
}

GaugeStructure GaugeStructure::su2() {
    // l_I = (i / sqrt(2)) sigma_I, orthonormal under Tr(A^dag B)
    Expr s = sqrt(Expr::rational(1, 2));
    Expr i = Expr::imaginary_unit();
    ExprMatrix l1 = expr_matrix(2, 2), l2 = expr_matrix(2, 2), l3 = expr_matrix(2, 2);
    l1[0][1] = i * s;
    l1[1][0] = i * s;
    l2[0][1] = s;
    l2[1][0] = -s;
    l3[0][0] = i * s;
    l3[1][1] = -(i * s);
    return GaugeStructure(2, {l1, l2, l3});
}

std::vector<std::vector<std::vector<Expr>>> structure_constants(const std::vector<ExprMatrix>& frame) {
    const int dimL = static_cast<int>(frame.size());
    for (int I = 0; I < dimL; ++I)
        for (int J = 0; J < dimL; ++J) {
            CDouble v = eval(neg_trace_product(frame[I], frame[J]), {});
            const double want = (I == J) ? 1.0 : 0.0;
            if (std::abs(v - CDouble(want)) > 1e-12)
                throw std::invalid_argument("structure_constants: frame pair (" + std::to_string(I) +
                                            "," + std::to_string(J) + ") is not orthonormal");
        }
    std::vector<std::vector<std::vector<Expr>>> c(
        dimL, std::vector<std::vector<Expr>>(dimL, std::vector<Expr>(dimL, Expr::integer(0))));
    for (int I = 0; I < dimL; ++I)
        for (int J = 0; J < dimL; ++J)
            for (int H = 0; H < dimL; ++H)
                c[I][J][H] = neg_trace_product(frame[I], commutator(frame[J], frame[H]));
    return c;
}

std::vector<Expr> index_lower(const GaugeStructure& G, const std::vector<Expr>& upper) {
    const int dimL = G.algebra_dim();
    std::vector<Expr> out(dimL, Expr::integer(0));
    for (int I = 0; I < dimL; ++I) {
        std::vector<Expr> terms;
        for (int J = 0; J < dimL; ++J) terms.push_back(G.gram(I, J) * upper[J]);
        out[I] = sum(terms);
    }
    return out;
}

std::vector<Expr> index_lower(const std::vector<ExprMatrix>& frame, const std::vector<Expr>& upper) {
    const int dimL = static_cast<int>(frame.size());
    std::vector<Expr> out(dimL, Expr::integer(0));
    for (int I = 0; I < dimL; ++I) {
        std::vector<Expr> terms;
        for (int J = 0; J < dimL; ++J)
            terms.push_back(neg_trace_product(frame[I], frame[J]) * upper[J]);
        out[I] = sum(terms);
    }
    return out;
}

GaugeField::GaugeField(GaugeStructure structure, Chart base, std::vector<std::vector<Expr>> comps)
    : structure_(std::move(structure)), base_(std::move(base)), comp_(std::move(comps)) {
    if (static_cast<int>(comp_.size()) != structure_.algebra_dim())
        throw std::invalid_argument("gauge field: algebra dimension mismatch");
    for (const auto& row : comp_) {
        if (static_cast<int>(row.size()) != base_.dim())
            throw std::invalid_argument("gauge field: base dimension mismatch");
        for (const auto& e : row)
            for (Symbol s : e.free_variables())
                if (!base_.box().covers(s))
                    throw std::invalid_argument("gauge field depends on " + s.name());
    }
}

// -------------------------------------------------------------- operations

std::vector<ExprMatrix> curvature(const GeneralConnection& k) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<ExprMatrix> rho(n, expr_matrix(m, m));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<Expr> terms{diff(k.k(i, a), fc.base().coord(b)),
                                        -diff(k.k(i, b), fc.base().coord(a))};
                for (int j = 0; j < n; ++j) {
                    terms.push_back(diff(k.k(i, a), fc.fiber(j)) * k.k(j, b));
                    terms.push_back(-(diff(k.k(i, b), fc.fiber(j)) * k.k(j, a)));
                }
                Expr r = sum(terms);
                rho[i][a][b] = r;
                rho[i][b][a] = -r;
            }
    return rho;
}

std::vector<std::vector<ExprMatrix>> linear_curvature(const LinearConnection& k) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<std::vector<ExprMatrix>> rho(m, std::vector<ExprMatrix>(m, expr_matrix(n, n)));
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::vector<Expr> terms{diff(k.k(a, i, j), fc.base().coord(b)),
                                            -diff(k.k(b, i, j), fc.base().coord(a))};
                    for (int h = 0; h < n; ++h) {
                        terms.push_back(k.k(a, i, h) * k.k(b, h, j));
                        terms.push_back(-(k.k(b, i, h) * k.k(a, h, j)));
                    }
                    Expr r = sum(terms);
                    rho[a][b][i][j] = r;
                    rho[b][a][i][j] = -r;
                }
    return rho;
}

std::vector<ExprMatrix> gauge_curvature(const GaugeField& k) {
    const Chart& base = k.base();
    const GaugeStructure& G = k.structure();
    const int m = base.dim(), dimL = G.algebra_dim();
    std::vector<ExprMatrix> rho(dimL, expr_matrix(m, m));
    for (int I = 0; I < dimL; ++I)
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                std::vector<Expr> terms{diff(k.k(I, a), base.coord(b)),
                                        -diff(k.k(I, b), base.coord(a))};
                for (int J = 0; J < dimL; ++J)
                    for (int H = 0; H < dimL; ++H)
                        terms.push_back(G.c(I, J, H) * k.k(J, a) * k.k(H, b));
                Expr r = sum(terms);
                rho[I][a][b] = r;
                rho[I][b][a] = -r;
            }
    return rho;
}

std::vector<std::vector<Expr>> section_covariant_derivative(
    const GeneralConnection& k, const std::vector<Expr>& phi) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    if (static_cast<int>(phi.size()) != n)
        throw std::invalid_argument("section dimension mismatch");
    std::map<Symbol, Expr> to_section;
    for (int j = 0; j < n; ++j) to_section.emplace(fc.fiber(j), phi[j]);
    std::vector<std::vector<Expr>> out(m, std::vector<Expr>(n, Expr::integer(0)));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            out[a][i] = diff(phi[i], fc.base().coord(a)) - subst(k.k(i, a), to_section);
    return out;
}

std::map<Symbol, Expr> involution(const FiberedChart& fc, const AffineConnectionField& conn) {
    conn.validate_symmetry();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::map<Symbol, Expr> map;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            map.emplace(fc.bar(i, a), fc.jet1_expr(i, a));
            map.emplace(fc.jet1(i, a), fc.bar_expr(i, a));
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{fc.jet2_expr(i, b, a)};
                for (int c = 0; c < m; ++c)
                    terms.push_back(conn.G(c, b, a) * (fc.bar_expr(i, c) - fc.jet1_expr(i, c)));
                map.emplace(fc.jet2(i, a, b), sum(terms));
            }
        }
    return map;
}

std::map<Symbol, Expr> jet_prolongation_map(const GeneralConnection& k) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::map<Symbol, Expr> map;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            map.emplace(fc.bar(i, a), k.k(i, a));
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{diff(k.k(i, a), fc.base().coord(b))};
                for (int j = 0; j < n; ++j)
                    terms.push_back(fc.jet1_expr(j, b) * diff(k.k(i, a), fc.fiber(j)));
                map.emplace(fc.jet2(i, a, b), sum(terms));
            }
        }
    return map;
}

ProlongedConnection prolong(const GeneralConnection& k, const AffineConnectionField& conn) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::map<Symbol, Expr> s_gamma = involution(fc, conn);
    std::map<Symbol, Expr> jk = jet_prolongation_map(k);

    ProlongedConnection out;
    out.first_level.assign(n, std::vector<Expr>(m, Expr::integer(0)));
    out.second_level.assign(n, expr_matrix(m, m));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            out.first_level[i][a] = subst(subst(fc.jet1_expr(i, a), s_gamma), jk);
            for (int b = 0; b < m; ++b) {
                // y^i_{ba} of the composite is the derivative of ybar^i_b in
                // direction a, i.e. (k'_a)^i_b
                out.second_level[i][a][b] = subst(subst(fc.jet2_expr(i, b, a), s_gamma), jk);
            }
        }
    return out;
}

LinearConnection dual_connection(const LinearConnection& k) {
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<std::string> dual_names;
    for (int i = 0; i < n; ++i) dual_names.push_back(fc.fiber(i).name() + "_dual");
    FiberedChart dual_chart(fc.base(), dual_names);
    std::vector<ExprMatrix> comps(m, expr_matrix(n, n));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) comps[a][i][j] = -k.k(a, j, i);
    return LinearConnection(dual_chart, std::move(comps));
}

int Overconnection::flat_index(int i, int b, int j) const {
    const int m = conn.chart().base_dim();
    const int n2 = conn.chart().fiber_dim() / m;
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    return (i * m + b) * n + j;
}

int Overconnection::flat_index(int I, int b) const {
    return I * conn.chart().base_dim() + b;
}

Overconnection overconnection_linear(const LinearConnection& k, const AffineConnectionField& conn) {
    conn.validate_symmetry();
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int j = 0; j < n; ++j)
                names.push_back("c" + std::to_string(i) + "_" + fc.base().coord(b).name() + "_" +
                                std::to_string(j) + "_" + fc.fiber(0).name());
    FiberedChart cchart(fc.base(), names);
    auto Y = [&](int i, int b, int j) { return cchart.fiber_expr((i * m + b) * n + j); };

    std::vector<std::vector<Expr>> comps(n * m * n, std::vector<Expr>(m, Expr::integer(0)));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < m; ++b)
                for (int j = 0; j < n; ++j) {
                    std::vector<Expr> terms{diff(k.k(a, i, j), fc.base().coord(b))};
                    for (int h = 0; h < n; ++h) {
                        terms.push_back(-(k.k(a, h, j) * Y(i, b, h)));
                        terms.push_back(Y(h, b, j) * k.k(a, i, h));
                    }
                    for (int c = 0; c < m; ++c)
                        terms.push_back(conn.G(c, a, b) * (k.k(c, i, j) - Y(i, c, j)));
                    comps[(i * m + b) * n + j][a] = sum(terms);
                }
    return Overconnection{Overconnection::Kind::Linear,
                          GeneralConnection(cchart, std::move(comps))};
}

Overconnection overconnection_gauge(const GaugeField& k, const AffineConnectionField& conn) {
    conn.validate_symmetry();
    const Chart& base = k.base();
    const GaugeStructure& G = k.structure();
    const int m = base.dim(), dimL = G.algebra_dim();
    std::vector<std::string> names;
    for (int I = 0; I < dimL; ++I)
        for (int b = 0; b < m; ++b)
            names.push_back("w" + std::to_string(I) + "_" + base.coord(b).name());
    FiberedChart cchart(base, names);
    auto Y = [&](int I, int b) { return cchart.fiber_expr(I * m + b); };

    std::vector<std::vector<Expr>> comps(dimL * m, std::vector<Expr>(m, Expr::integer(0)));
    for (int a = 0; a < m; ++a)
        for (int I = 0; I < dimL; ++I)
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{diff(k.k(I, a), base.coord(b))};
                for (int J = 0; J < dimL; ++J)
                    for (int H = 0; H < dimL; ++H)
                        terms.push_back(G.c(I, J, H) * k.k(J, a) * Y(H, b));
                for (int c = 0; c < m; ++c)
                    terms.push_back(conn.G(c, a, b) * (k.k(I, c) - Y(I, c)));
                comps[I * m + b][a] = sum(terms);
            }
    return Overconnection{Overconnection::Kind::Gauge,
                          GeneralConnection(cchart, std::move(comps))};
}

std::vector<std::vector<ExprMatrix>> overconnection_covariant_derivative(
    const LinearConnection& k, const Overconnection& up) {
    if (up.kind != Overconnection::Kind::Linear)
        throw std::invalid_argument("overconnection kind mismatch");
    const FiberedChart& fc = k.chart();
    const int m = fc.base_dim(), n = fc.fiber_dim();
    const FiberedChart& cc = up.conn.chart();
    if (cc.fiber_dim() != n * m * n)
        throw std::invalid_argument("overconnection does not match this connection");
    std::map<Symbol, Expr> at_section;
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int j = 0; j < n; ++j)
                at_section.emplace(cc.fiber((i * m + b) * n + j), k.k(b, i, j));

    std::vector<std::vector<ExprMatrix>> out(m, std::vector<ExprMatrix>(m, expr_matrix(n, n)));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Expr coeff = subst(up.conn.k((i * m + b) * n + j, a), at_section);
                    out[a][b][i][j] = diff(k.k(b, i, j), fc.base().coord(a)) - coeff;
                }
    return out;
}

std::vector<ExprMatrix> overconnection_covariant_derivative(
    const GaugeField& k, const Overconnection& up) {
    if (up.kind != Overconnection::Kind::Gauge)
        throw std::invalid_argument("overconnection kind mismatch");
    const Chart& base = k.base();
    const GaugeStructure& G = k.structure();
    const int m = base.dim(), dimL = G.algebra_dim();
    const FiberedChart& cc = up.conn.chart();
    if (cc.fiber_dim() != dimL * m)
        throw std::invalid_argument("overconnection does not match this gauge field");
    std::map<Symbol, Expr> at_section;
    for (int I = 0; I < dimL; ++I)
        for (int b = 0; b < m; ++b) at_section.emplace(cc.fiber(I * m + b), k.k(I, b));

    std::vector<ExprMatrix> out(dimL, expr_matrix(m, m));
    for (int I = 0; I < dimL; ++I)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Expr coeff = subst(up.conn.k(I * m + b, a), at_section);
                out[I][a][b] = diff(k.k(I, b), base.coord(a)) - coeff;
            }
    return out;
}

LinearConnection expand_to_linear(const GaugeField& k, const std::string& fiber_prefix) {
    const Chart& base = k.base();
    const GaugeStructure& G = k.structure();
    const int m = base.dim(), n = G.fiber_dim(), dimL = G.algebra_dim();
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(fiber_prefix + std::to_string(i));
    FiberedChart fc(base, names);
    std::vector<ExprMatrix> comps(m, expr_matrix(n, n));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<Expr> terms;
                for (int I = 0; I < dimL; ++I) terms.push_back(k.k(I, a) * G.l(I)[i][j]);
                comps[a][i][j] = sum(terms);
            }
    return LinearConnection(fc, std::move(comps));
}

} // namespace jetcartan
