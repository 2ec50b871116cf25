#include "jetcartan/models.hpp"
#include "jetcartan/verify.hpp"

namespace jetcartan {

namespace {

std::vector<std::string> scalar_fiber_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("ph" + std::to_string(i));
    for (int i = 0; i < n; ++i) names.push_back("pb" + std::to_string(i));
    return names;
}

} // namespace

// ---------------------------------------------------------------- scalar

ScalarModel::ScalarModel(MetricField g, LinearConnection kappa, Expr mass,
                         std::vector<Expr> phi, std::vector<Expr> phibar)
    : g_(std::move(g)),
      kappa_(std::move(kappa)),
      mass_(std::move(mass)),
      phi_(std::move(phi)),
      phibar_(std::move(phibar)),
      n_(kappa_.chart().fiber_dim()),
      chart_(g_.chart(), scalar_fiber_names(n_)),
      conn_(chart_, std::vector<std::vector<Expr>>(2 * n_, std::vector<Expr>(g_.dim(), Expr::integer(0)))),
      lagr_(chart_, Expr::integer(0), true),
      lagr_bound_(chart_, Expr::integer(0)) {
    const int m = g_.dim();
    if (static_cast<int>(phi_.size()) != n_ || static_cast<int>(phibar_.size()) != n_)
        throw std::invalid_argument("scalar model: field component count mismatch");

    // block connection on the doubled fiber: kappa on phi, its dual on phibar
    std::vector<std::vector<Expr>> comps(2 * n_, std::vector<Expr>(m, Expr::integer(0)));
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < m; ++a) {
            std::vector<Expr> tp, td;
            for (int j = 0; j < n_; ++j) {
                tp.push_back(kappa_.k(a, i, j) * chart_.fiber_expr(j));
                td.push_back(-(kappa_.k(a, j, i) * chart_.fiber_expr(n_ + j)));
            }
            comps[i][a] = sum(tp);
            comps[n_ + i][a] = sum(td);
        }
    conn_ = GeneralConnection(chart_, std::move(comps));

    // ell = 1/2 (g^{ab} nabla_a phibar_i nabla_b phi^i - m^2 phibar_i phi^i) sqrtg
    MetricSymbols ms(g_.chart());
    auto nphi = [&](int i, int a) {
        std::vector<Expr> t{chart_.jet1_expr(i, a)};
        for (int j = 0; j < n_; ++j) t.push_back(-(kappa_.k(a, i, j) * chart_.fiber_expr(j)));
        return sum(t);
    };
    auto nphibar = [&](int i, int a) {
        std::vector<Expr> t{chart_.jet1_expr(n_ + i, a)};
        for (int j = 0; j < n_; ++j) t.push_back(kappa_.k(a, j, i) * chart_.fiber_expr(n_ + j));
        return sum(t);
    };
    std::vector<Expr> kin;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < n_; ++i)
                kin.push_back(ms.gu_expr(a, b) * nphibar(i, a) * nphi(i, b));
    std::vector<Expr> massterm;
    for (int i = 0; i < n_; ++i)
        massterm.push_back(chart_.fiber_expr(n_ + i) * chart_.fiber_expr(i));
    Expr ell = Expr::rational(1, 2) *
               (sum(kin) - pow(mass_, 2) * sum(massterm)) * ms.sqrtg_expr();
    lagr_ = JetLagrangian(chart_, ell, true);
    lagr_bound_ = lagr_.bind_metric(g_);
}

Section ScalarModel::section() const {
    std::vector<Expr> comps = phi_;
    comps.insert(comps.end(), phibar_.begin(), phibar_.end());
    return Section(chart_, comps);
}

EnergyTensorField ScalarModel::energy_tensor() const {
    return canonical_energy_tensor(lagr_bound_, conn_);
}

EnergyTensorField ScalarModel::stress_tensor() const {
    return metric_stress_tensor(lagr_, g_);
}

std::vector<Expr> ScalarModel::onshell_divergence_rhs() const {
    const int m = g_.dim();
    auto rho = linear_curvature(kappa_);
    GeneralConnection kgen = kappa_.to_general();
    LinearConnection dual = dual_connection(kappa_);
    auto nphi = section_covariant_derivative(kgen, phi_);
    auto nphibar = section_covariant_derivative(dual.to_general(), phibar_);

    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> terms;
        for (int a = 0; a < m; ++a)
            for (int c = 0; c < m; ++c)
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j)
                        terms.push_back(g_.ginv(a, c) * rho[a][b][i][j] *
                                        (phibar_[i] * nphi[c][j] - nphibar[c][i] * phi_[j]));
        out[b] = Expr::rational(1, 2) * sum(terms);
    }
    return out;
}

std::vector<Expr> ScalarModel::el_pullback() const {
    auto E = euler_lagrange(lagr_bound_);
    Section sec = section();
    auto j2 = sec.second_jet();
    std::vector<Expr> out;
    out.reserve(E.size());
    for (const auto& e : E) out.push_back(subst(e, j2));
    return out;
}

std::vector<Expr> ScalarModel::offshell_defect() const {
    const int m = g_.dim();
    Section sec = section();
    auto j1 = sec.first_jet();
    EnergyTensorField U = energy_tensor();
    ExprMatrix Ux = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) Ux[a][b] = subst(U.comp[a][b], j1);

    AffineConnectionField lc = levi_civita(g_);
    std::vector<Expr> divU = div_mixed_density(lc, Ux);
    std::vector<Expr> rhs = onshell_divergence_rhs();
    std::vector<Expr> E = el_pullback();

    GeneralConnection kgen = kappa_.to_general();
    auto nphi = section_covariant_derivative(kgen, phi_);
    auto nphibar = section_covariant_derivative(dual_connection(kappa_).to_general(), phibar_);

    const ResidualTemplates& frozen = residual_templates();
    Expr c_phi = Expr::rational(frozen.scalar_e_phi.num(), frozen.scalar_e_phi.den());
    Expr c_phibar = Expr::rational(frozen.scalar_e_phibar.num(), frozen.scalar_e_phibar.den());
    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> res;
        for (int i = 0; i < n_; ++i) {
            res.push_back(c_phi * E[i] * nphi[b][i]);
            res.push_back(c_phibar * E[n_ + i] * nphibar[b][i]);
        }
        out[b] = divU[b] - g_.sqrt_abs_det() * rhs[b] - sum(res);
    }
    return out;
}

std::vector<std::vector<Expr>> ScalarModel::gauge_source(const GaugeStructure& G) const {
    // d ell / d kappa^I_c = 1/2 g^{ca} [ (phibar l_I) nabla_a phi
    //                                   - nabla_a phibar (l_I phi) ] sqrtg
    const int m = g_.dim(), dimL = G.algebra_dim();
    GeneralConnection kgen = kappa_.to_general();
    auto nphi = section_covariant_derivative(kgen, phi_);
    auto nphibar = section_covariant_derivative(dual_connection(kappa_).to_general(), phibar_);
    std::vector<std::vector<Expr>> out(dimL, std::vector<Expr>(m, Expr::integer(0)));
    for (int I = 0; I < dimL; ++I)
        for (int c = 0; c < m; ++c) {
            std::vector<Expr> terms;
            for (int a = 0; a < m; ++a)
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j) {
                        terms.push_back(g_.ginv(c, a) * phibar_[i] * G.l(I)[i][j] * nphi[a][j]);
                        terms.push_back(-(g_.ginv(c, a) * nphibar[a][i] * G.l(I)[i][j] * phi_[j]));
                    }
            out[I][c] = Expr::rational(1, 2) * sum(terms) * g_.sqrt_abs_det();
        }
    return out;
}

// ----------------------------------------------------------------- dirac

const std::vector<ExprMatrix>& DiracMatrices::gamma() {
    static const std::vector<ExprMatrix> g = [] {
        Expr i = Expr::imaginary_unit();
        Expr one = Expr::integer(1);
        std::vector<ExprMatrix> out(4, expr_matrix(4, 4));
        // gamma_0 = diag(1, 1, -1, -1)
        out[0][0][0] = one;
        out[0][1][1] = one;
        out[0][2][2] = -one;
        out[0][3][3] = -one;
        // gamma_k = [[0, sigma_k], [-sigma_k, 0]]
        // sigma_1
        out[1][0][3] = one;
        out[1][1][2] = one;
        out[1][2][1] = -one;
        out[1][3][0] = -one;
        // sigma_2
        out[2][0][3] = -i;
        out[2][1][2] = i;
        out[2][2][1] = i;
        out[2][3][0] = -i;
        // sigma_3
        out[3][0][2] = one;
        out[3][1][3] = -one;
        out[3][2][0] = -one;
        out[3][3][1] = one;
        return out;
    }();
    return g;
}

const ExprMatrix& DiracMatrices::eta() {
    static const ExprMatrix e = [] {
        ExprMatrix out = expr_matrix(4, 4);
        out[0][0] = Expr::integer(1);
        for (int k = 1; k < 4; ++k) out[k][k] = Expr::integer(-1);
        return out;
    }();
    return e;
}

namespace {

std::vector<std::string> dirac_fiber_names() {
    std::vector<std::string> names;
    for (int a = 0; a < 4; ++a) names.push_back("ps" + std::to_string(a));
    for (int a = 0; a < 4; ++a) names.push_back("pq" + std::to_string(a));
    return names;
}

MetricField tetrad_metric(const Chart& chart, const ExprMatrix& tetrad) {
    const int m = 4;
    const ExprMatrix& eta = DiracMatrices::eta();
    ExprMatrix g = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            std::vector<Expr> terms;
            for (int l = 0; l < m; ++l)
                for (int mu = 0; mu < m; ++mu)
                    terms.push_back(eta[l][mu] * tetrad[l][a] * tetrad[mu][b]);
            Expr v = sum(terms);
            g[a][b] = v;
            g[b][a] = v;
        }
    return MetricField(chart, g, "lorentzian");
}

bool is_flat_tetrad(const ExprMatrix& tetrad) {
    for (int l = 0; l < 4; ++l)
        for (int a = 0; a < 4; ++a) {
            const Expr& e = tetrad[l][a];
            if (l == a) {
                if (!e.is_one()) return false;
            } else if (!e.is_zero()) {
                return false;
            }
        }
    return true;
}

} // namespace

DiracModel::DiracModel(Chart chart, ExprMatrix tetrad, std::vector<Expr> A, Expr mass,
                       std::vector<Expr> psi, std::vector<Expr> psibar)
    : base_(std::move(chart)),
      tetrad_(std::move(tetrad)),
      A_(std::move(A)),
      mass_(std::move(mass)),
      psi_(std::move(psi)),
      psibar_(std::move(psibar)),
      g_(tetrad_metric(base_, tetrad_)),
      flat_tetrad_(is_flat_tetrad(tetrad_)),
      chart_(base_, dirac_fiber_names()),
      lagr_(chart_, Expr::integer(0), true),
      lagr_bound_(chart_, Expr::integer(0)) {
    const int m = 4;
    if (base_.dim() != 4) throw std::invalid_argument("dirac model needs a 4-dimensional chart");
    if (static_cast<int>(psi_.size()) != 4 || static_cast<int>(psibar_.size()) != 4)
        throw std::invalid_argument("dirac model: spinor component count mismatch");

    // spin coefficients omega_a^{l}{}_{mu} = theta^l_c (d_a E^c_mu + Gamma^c_{ad} E^d_mu)
    // with E the inverse tetrad; spinor connection
    //   Gcheck_a = i A_a + (1/4) omega_a^{lm} gamma_l gamma_m
    ExprMatrix E = expr_matrix(m, m); // E[c][mu]
    {
        Expr det = determinant(tetrad_);
        ExprMatrix adj = adjugate(tetrad_);
        for (int c = 0; c < m; ++c)
            for (int mu = 0; mu < m; ++mu) E[c][mu] = adj[c][mu] / det;
    }
    AffineConnectionField lc = levi_civita(g_);
    const auto& gam = DiracMatrices::gamma();
    const auto& eta = DiracMatrices::eta();
    spinor_conn_.assign(m, expr_matrix(4, 4));
    for (int a = 0; a < m; ++a) {
        // omega_lower[l][mu] = omega_a^l_mu
        ExprMatrix om = expr_matrix(m, m);
        for (int l = 0; l < m; ++l)
            for (int mu = 0; mu < m; ++mu) {
                std::vector<Expr> terms;
                for (int c = 0; c < m; ++c) {
                    terms.push_back(tetrad_[l][c] * diff(E[c][mu], base_.coord(a)));
                    for (int d = 0; d < m; ++d)
                        terms.push_back(tetrad_[l][c] * lc.G(c, a, d) * E[d][mu]);
                }
                om[l][mu] = sum(terms);
            }
        // raise the second frame index: omega_a^{lm} = omega_a^l_nu eta^{nu m}
        for (int al = 0; al < 4; ++al)
            for (int be = 0; be < 4; ++be) {
                std::vector<Expr> terms;
                if (al == be) terms.push_back(Expr::imaginary_unit() * A_[a]);
                for (int l = 0; l < m; ++l)
                    for (int mu = 0; mu < m; ++mu) {
                        Expr omega_up = om[l][mu] * eta[mu][mu]; // eta diagonal
                        if (omega_up.is_zero()) continue;
                        std::vector<Expr> gg;
                        for (int s = 0; s < 4; ++s)
                            gg.push_back(gam[l][al][s] * gam[mu][s][be]);
                        terms.push_back(Expr::rational(1, 4) * omega_up * sum(gg));
                    }
                spinor_conn_[a][al][be] = sum(terms);
            }
    }

    // ell = (i/2 g^{ab}(psibar gamma_a nabla_b psi - nabla_a psibar gamma_b psi)
    //        - m psibar psi) sqrtg, in jet symbols
    MetricSymbols ms(base_);
    auto npsiJ = [&](int al, int b) {
        std::vector<Expr> t{chart_.jet1_expr(al, b)};
        for (int be = 0; be < 4; ++be)
            t.push_back(-(spinor_conn_[b][al][be] * chart_.fiber_expr(be)));
        return sum(t);
    };
    auto npsibarJ = [&](int al, int b) {
        std::vector<Expr> t{chart_.jet1_expr(4 + al, b)};
        for (int be = 0; be < 4; ++be)
            t.push_back(chart_.fiber_expr(4 + be) * spinor_conn_[b][be][al]);
        return sum(t);
    };
    std::vector<Expr> kin;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            ExprMatrix ga = gamma_lower(a), gb = gamma_lower(b);
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be) {
                    if (!ga[al][be].is_zero())
                        kin.push_back(ms.gu_expr(a, b) * chart_.fiber_expr(4 + al) *
                                      ga[al][be] * npsiJ(be, b));
                    if (!gb[al][be].is_zero())
                        kin.push_back(-(ms.gu_expr(a, b) * npsibarJ(al, a) * gb[al][be] *
                                        chart_.fiber_expr(be)));
                }
        }
    std::vector<Expr> massterm;
    for (int al = 0; al < 4; ++al)
        massterm.push_back(chart_.fiber_expr(4 + al) * chart_.fiber_expr(al));
    Expr ell = (Expr::rational(1, 2) * Expr::imaginary_unit() * sum(kin) -
                mass_ * sum(massterm)) *
               ms.sqrtg_expr();
    lagr_ = JetLagrangian(chart_, ell, true);
    lagr_bound_ = lagr_.bind_metric(g_);
}

ExprMatrix DiracModel::gamma_lower(int a) const {
    const auto& gam = DiracMatrices::gamma();
    ExprMatrix out = expr_matrix(4, 4);
    for (int l = 0; l < 4; ++l) {
        if (tetrad_[l][a].is_zero()) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out[i][j] = out[i][j] + tetrad_[l][a] * gam[l][i][j];
    }
    return out;
}

ExprMatrix DiracModel::gamma_upper(int a) const {
    ExprMatrix out = expr_matrix(4, 4);
    for (int b = 0; b < 4; ++b) {
        ExprMatrix gb = gamma_lower(b);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out[i][j] = out[i][j] + g_.ginv(a, b) * gb[i][j];
    }
    return out;
}

Section DiracModel::section() const {
    std::vector<Expr> comps = psi_;
    comps.insert(comps.end(), psibar_.begin(), psibar_.end());
    return Section(chart_, comps);
}

std::vector<ExprMatrix> DiracModel::nabla_psi() const {
    std::vector<ExprMatrix> out(4, expr_matrix(4, 1));
    for (int a = 0; a < 4; ++a)
        for (int al = 0; al < 4; ++al) {
            std::vector<Expr> t{diff(psi_[al], base_.coord(a))};
            for (int be = 0; be < 4; ++be)
                t.push_back(-(spinor_conn_[a][al][be] * psi_[be]));
            out[a][al][0] = sum(t);
        }
    return out;
}

std::vector<ExprMatrix> DiracModel::nabla_psibar() const {
    std::vector<ExprMatrix> out(4, expr_matrix(1, 4));
    for (int a = 0; a < 4; ++a)
        for (int al = 0; al < 4; ++al) {
            std::vector<Expr> t{diff(psibar_[al], base_.coord(a))};
            for (int be = 0; be < 4; ++be)
                t.push_back(psibar_[be] * spinor_conn_[a][be][al]);
            out[a][0][al] = sum(t);
        }
    return out;
}

EnergyTensorField DiracModel::energy_tensor() const {
    // block connection: Gcheck on psi, minus-transpose on psibar
    std::vector<std::vector<Expr>> comps(8, std::vector<Expr>(4, Expr::integer(0)));
    for (int al = 0; al < 4; ++al)
        for (int a = 0; a < 4; ++a) {
            std::vector<Expr> tp, td;
            for (int be = 0; be < 4; ++be) {
                tp.push_back(spinor_conn_[a][al][be] * chart_.fiber_expr(be));
                td.push_back(-(chart_.fiber_expr(4 + be) * spinor_conn_[a][be][al]));
            }
            comps[al][a] = sum(tp);
            comps[4 + al][a] = sum(td);
        }
    GeneralConnection conn(chart_, std::move(comps));
    return canonical_energy_tensor(lagr_bound_, conn);
}

EnergyTensorField DiracModel::stress_tensor() const { return metric_stress_tensor(lagr_, g_); }

std::vector<Expr> DiracModel::onshell_divergence_rhs() const {
    std::vector<Expr> out(4, Expr::integer(0));
    for (int b = 0; b < 4; ++b) {
        std::vector<Expr> terms;
        for (int a = 0; a < 4; ++a) {
            Expr rho = Expr::imaginary_unit() *
                       (diff(A_[a], base_.coord(b)) - diff(A_[b], base_.coord(a)));
            ExprMatrix gup = gamma_upper(a);
            std::vector<Expr> cur;
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be)
                    cur.push_back(psibar_[al] * gup[al][be] * psi_[be]);
            terms.push_back(Expr::imaginary_unit() * rho * sum(cur));
        }
        out[b] = sum(terms) * g_.sqrt_abs_det();
    }
    return out;
}

std::vector<Expr> DiracModel::el_psi_pullback() const {
    auto E = euler_lagrange(lagr_bound_);
    auto j2 = section().second_jet();
    std::vector<Expr> out(4, Expr::integer(0));
    for (int al = 0; al < 4; ++al) out[al] = subst(E[al], j2);
    return out;
}

std::vector<Expr> DiracModel::el_psibar_pullback() const {
    auto E = euler_lagrange(lagr_bound_);
    auto j2 = section().second_jet();
    std::vector<Expr> out(4, Expr::integer(0));
    for (int al = 0; al < 4; ++al) out[al] = subst(E[4 + al], j2);
    return out;
}

std::vector<Expr> DiracModel::offshell_defect() const {
    if (!flat_tetrad_)
        throw std::invalid_argument("dirac off-shell defect is frozen for flat tetrads");
    const int m = 4;
    Section sec = section();
    auto j1 = sec.first_jet();

    EnergyTensorField T = stress_tensor();
    AffineConnectionField lc = levi_civita(g_);
    ExprMatrix Tmix = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            for (int c = 0; c < m; ++c)
                terms.push_back(g_.ginv(a, c) * subst(T.comp[c][b], j1));
            Tmix[a][b] = sum(terms);
        }
    std::vector<Expr> divT = div_mixed_density(lc, Tmix);
    std::vector<Expr> rhs = onshell_divergence_rhs();

    std::vector<Expr> Epsi = el_psi_pullback();      // row
    std::vector<Expr> Epsibar = el_psibar_pullback(); // column
    auto npsi = nabla_psi();
    auto npsibar = nabla_psibar();

    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> res;
        for (int al = 0; al < 4; ++al) {
            res.push_back(-(Epsi[al] * npsi[b][al][0]));
            res.push_back(-(npsibar[b][0][al] * Epsibar[al]));
        }
        // + 1/4 d_a (E gamma^a gamma_b psi) + 1/4 d_a (psibar gamma_b gamma^a E)
        for (int a = 0; a < m; ++a) {
            ExprMatrix gag = matmul(gamma_upper(a), gamma_lower(b));
            ExprMatrix gga = matmul(gamma_lower(b), gamma_upper(a));
            std::vector<Expr> t1, t2;
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be) {
                    t1.push_back(Epsi[al] * gag[al][be] * psi_[be]);
                    t2.push_back(psibar_[al] * gga[al][be] * Epsibar[be]);
                }
            res.push_back(Expr::rational(1, 4) * diff(sum(t1), base_.coord(a)));
            res.push_back(Expr::rational(1, 4) * diff(sum(t2), base_.coord(a)));
        }
        out[b] = divT[b] - rhs[b] - sum(res);
    }
    return out;
}

// ------------------------------------------------------------ yang-mills

namespace {

std::vector<std::string> ym_fiber_names(const Chart& base, int dimL) {
    std::vector<std::string> names;
    for (int I = 0; I < dimL; ++I)
        for (int b = 0; b < base.dim(); ++b)
            names.push_back("w" + std::to_string(I) + "_" + base.coord(b).name());
    return names;
}

} // namespace

YangMillsModel::YangMillsModel(MetricField g, GaugeStructure structure, GaugeField field)
    : g_(std::move(g)),
      structure_(std::move(structure)),
      field_(std::move(field)),
      chart_(g_.chart(), ym_fiber_names(g_.chart(), structure_.algebra_dim())),
      lc_(levi_civita(g_)),
      up_(overconnection_gauge(field_, lc_)),
      lagr_(chart_, Expr::integer(0), true),
      lagr_bound_(chart_, Expr::integer(0)) {
    const int m = g_.dim(), dimL = structure_.algebra_dim();

    // formal curvature rho^I_{ab} = y^I_{a,b} - y^I_{b,a} + c^I_{JH} y^J_a y^H_b
    auto fiber = [&](int I, int a) { return chart_.fiber_expr(I * m + a); };
    auto jet = [&](int I, int a, int b) { return chart_.jet1_expr(I * m + a, b); };
    std::vector<ExprMatrix> rhof(dimL, expr_matrix(m, m));
    for (int I = 0; I < dimL; ++I)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{jet(I, a, b), -jet(I, b, a)};
                for (int J = 0; J < dimL; ++J)
                    for (int H = 0; H < dimL; ++H)
                        terms.push_back(structure_.c(I, J, H) * fiber(J, a) * fiber(H, b));
                rhof[I][a][b] = sum(terms);
            }

    // ell = -1/4 g^{ac} g^{bd} rhobar_{ab I} rho^I_{cd} sqrtg (orthonormal frame)
    MetricSymbols ms(g_.chart());
    std::vector<Expr> terms;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d)
                    for (int I = 0; I < dimL; ++I)
                        terms.push_back(ms.gu_expr(a, c) * ms.gu_expr(b, d) * rhof[I][a][b] *
                                        rhof[I][c][d]);
    Expr ell = Expr::rational(-1, 4) * sum(terms) * ms.sqrtg_expr();
    lagr_ = JetLagrangian(chart_, ell, true);
    lagr_bound_ = lagr_.bind_metric(g_);
}

Section YangMillsModel::section() const {
    const int m = g_.dim(), dimL = structure_.algebra_dim();
    std::vector<Expr> comps(dimL * m, Expr::integer(0));
    for (int I = 0; I < dimL; ++I)
        for (int a = 0; a < m; ++a) comps[I * m + a] = field_.k(I, a);
    return Section(chart_, comps);
}

ExprMatrix YangMillsModel::energy_tensor_display() const {
    const int m = g_.dim(), dimL = structure_.algebra_dim();
    auto rho = gauge_curvature(field_);
    ExprMatrix out = expr_matrix(m, m);
    auto rho_up = [&](int I, int a, int c) {
        std::vector<Expr> t;
        for (int e = 0; e < m; ++e)
            for (int f = 0; f < m; ++f) t.push_back(g_.ginv(a, e) * g_.ginv(c, f) * rho[I][e][f]);
        return sum(t);
    };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            for (int I = 0; I < dimL; ++I)
                for (int c = 0; c < m; ++c) terms.push_back(rho_up(I, a, c) * rho[I][b][c]);
            if (a == b) {
                for (int I = 0; I < dimL; ++I)
                    for (int c = 0; c < m; ++c)
                        for (int d = 0; d < m; ++d)
                            terms.push_back(Expr::rational(-1, 4) * rho_up(I, c, d) * rho[I][c][d]);
            }
            out[a][b] = sum(terms) * g_.sqrt_abs_det();
        }
    return out;
}

ExprMatrix YangMillsModel::energy_tensor_canonical() const {
    EnergyTensorField U = canonical_energy_tensor(lagr_bound_, up_.conn);
    Section sec = section();
    auto j1 = sec.first_jet();
    const int m = g_.dim();
    ExprMatrix out = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out[a][b] = subst(U.comp[a][b], j1);
    return out;
}

ExprMatrix YangMillsModel::stress_tensor() const {
    EnergyTensorField T = metric_stress_tensor(lagr_, g_);
    Section sec = section();
    auto j1 = sec.first_jet();
    const int m = g_.dim();
    ExprMatrix out = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out[a][b] = subst(T.comp[a][b], j1);
    return out;
}

std::vector<std::vector<Expr>> YangMillsModel::el_pullback() const {
    const int m = g_.dim(), dimL = structure_.algebra_dim();
    auto E = euler_lagrange(lagr_bound_);
    auto j2 = section().second_jet();
    std::vector<std::vector<Expr>> out(dimL, std::vector<Expr>(m, Expr::integer(0)));
    for (int I = 0; I < dimL; ++I)
        for (int c = 0; c < m; ++c) out[I][c] = subst(E[I * m + c], j2);
    return out;
}

std::vector<Expr> YangMillsModel::offshell_defect() const {
    const int m = g_.dim(), dimL = structure_.algebra_dim();
    ExprMatrix U = energy_tensor_canonical();
    std::vector<Expr> divU = div_mixed_density(lc_, U);
    auto E = el_pullback();
    auto nk = overconnection_covariant_derivative(field_, up_);
    const ResidualTemplates& frozen = residual_templates();
    Expr c_gauge = Expr::rational(frozen.gauge_e.num(), frozen.gauge_e.den());
    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> res;
        for (int I = 0; I < dimL; ++I)
            for (int c = 0; c < m; ++c) res.push_back(c_gauge * E[I][c] * nk[I][b][c]);
        out[b] = divU[b] - sum(res);
    }
    return out;
}

std::vector<Expr> total_conservation_defect(const ScalarModel& matter, const YangMillsModel& gauge) {
    const MetricField& g = matter.metric();
    const int m = g.dim(), dimL = gauge.structure().algebra_dim();
    AffineConnectionField lc = levi_civita(g);

    Section msec = matter.section();
    auto j1m = msec.first_jet();
    EnergyTensorField Tm = matter.stress_tensor();
    ExprMatrix Tg = gauge.stress_tensor();

    ExprMatrix total = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> t;
            for (int c = 0; c < m; ++c)
                t.push_back(g.ginv(a, c) * (subst(Tm.comp[c][b], j1m) + Tg[c][b]));
            total[a][b] = sum(t);
        }
    std::vector<Expr> divT = div_mixed_density(lc, total);

    std::vector<Expr> Em = matter.el_pullback();
    GeneralConnection kgen = matter.kappa().to_general();
    auto nphi = section_covariant_derivative(kgen, std::vector<Expr>(
        msec.comps.begin(), msec.comps.begin() + matter.fiber_dim()));
    auto nphibar = section_covariant_derivative(
        dual_connection(matter.kappa()).to_general(),
        std::vector<Expr>(msec.comps.begin() + matter.fiber_dim(), msec.comps.end()));

    auto Egpure = gauge.el_pullback();
    auto source = matter.gauge_source(gauge.structure());
    auto rho = gauge_curvature(gauge.field());

    const ResidualTemplates& frozen = residual_templates();
    Expr c_m = Expr::rational(frozen.total_matter.num(), frozen.total_matter.den());
    Expr c_g = Expr::rational(frozen.total_gauge.num(), frozen.total_gauge.den());
    std::vector<Expr> out(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> res;
        for (int i = 0; i < matter.fiber_dim(); ++i) {
            res.push_back(c_m * Em[i] * nphi[b][i]);
            res.push_back(c_m * Em[matter.fiber_dim() + i] * nphibar[b][i]);
        }
        for (int I = 0; I < dimL; ++I)
            for (int c = 0; c < m; ++c)
                res.push_back(c_g * (Egpure[I][c] + source[I][c]) * rho[I][b][c]);
        out[b] = divT[b] - sum(res);
    }
    return out;
}

// ----------------------------------------------------------- gravitation

GravityModel::GravityModel(MetricField g) : GravityModel(g, levi_civita(g)) {}

GravityModel::GravityModel(MetricField g, AffineConnectionField gamma)
    : g_(std::move(g)),
      gamma_(std::move(gamma)),
      R4_(base_curvature(gamma_)),
      ric_(ricci(R4_)),
      R_(scalar_curvature(g_, ric_)) {
    gamma_.validate_symmetry();
}

Expr GravityModel::momentum(int a, int b, int c, int d) const {
    std::vector<Expr> terms;
    if (b == c) terms.push_back(-g_.ginv(a, d));
    if (a == c) terms.push_back(g_.ginv(b, d));
    if (terms.empty()) return Expr::integer(0);
    return sum(terms) * g_.sqrt_abs_det();
}

ExprMatrix GravityModel::energy_tensor() const {
    const int m = g_.dim();
    ExprMatrix out = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<Expr> terms;
            if (a == b) terms.push_back(R_ * g_.sqrt_abs_det());
            // - nabla_b Gamma_e^c_d P^{ae}_{cd} with nabla Gamma = -R4
            for (int e = 0; e < m; ++e)
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) {
                        Expr P = momentum(a, e, c, d);
                        if (P.is_zero()) continue;
                        terms.push_back(R4_.at({b, e, c, d}) * P);
                    }
            out[a][b] = sum(terms);
        }
    return out;
}

Expr GravityModel::overconnection_on_section(int a, int b, int c, int d) const {
    const int m = g_.dim();
    std::vector<Expr> terms{diff(gamma_.G(c, a, d), g_.chart().coord(b))};
    for (int h = 0; h < m; ++h) {
        terms.push_back(gamma_.G(h, a, d) * gamma_.G(c, b, h));
        terms.push_back(-(gamma_.G(h, b, d) * gamma_.G(c, a, h)));
    }
    return sum(terms);
}

std::vector<Expr> GravityModel::horizontal_current(const std::vector<Expr>& X) const {
    const int m = g_.dim();
    std::vector<Expr> out(m, Expr::integer(0));
    for (int a = 0; a < m; ++a) {
        std::vector<Expr> terms{R_ * g_.sqrt_abs_det() * X[a]};
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    Expr P = momentum(a, b, c, d);
                    if (P.is_zero()) continue;
                    std::vector<Expr> inner;
                    for (int e = 0; e < m; ++e) inner.push_back(X[e] * R4_.at({e, b, c, d}));
                    terms.push_back(P * sum(inner));
                }
        out[a] = sum(terms);
    }
    return out;
}

Expr GravityModel::current_identity_defect(const std::vector<Expr>& X) const {
    const int m = g_.dim();
    std::vector<Expr> cur = horizontal_current(X);
    Expr d = Expr::integer(0);
    for (int a = 0; a < m; ++a) d = d + diff(cur[a], g_.chart().coord(a));

    TensorField G = einstein(g_, gamma_);
    ExprMatrix nX = cov_deriv_vector(gamma_, X);
    Expr rhs = Expr::integer(0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            rhs = rhs + Expr::integer(-2) * G.at({a, b}) * nX[a][b] * g_.sqrt_abs_det();
    return d - rhs;
}

TensorField lie_derivative_connection(const AffineConnectionField& conn,
                                      const std::vector<Expr>& X) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    TensorField out(chart, {m, m, m}); // [a][b][c] = L_X Gamma_a^b_c
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                std::vector<Expr> terms{diff(diff(X[b], chart.coord(a)), chart.coord(c))};
                for (int d = 0; d < m; ++d) {
                    terms.push_back(X[d] * diff(conn.G(b, a, c), chart.coord(d)));
                    terms.push_back(conn.G(b, d, c) * diff(X[d], chart.coord(a)));
                    terms.push_back(conn.G(b, a, d) * diff(X[d], chart.coord(c)));
                    terms.push_back(-(conn.G(d, a, c) * diff(X[b], chart.coord(d))));
                }
                out.at({a, b, c}) = sum(terms);
            }
    return out;
}

TensorField lie_derivative_connection_via_curvature(const AffineConnectionField& conn,
                                                    const TensorField& R4,
                                                    const std::vector<Expr>& X) {
    const Chart& chart = conn.chart();
    const int m = chart.dim();
    ExprMatrix nX = cov_deriv_vector(conn, X); // [a][b] = nabla_a X^b
    TensorField out(chart, {m, m, m});
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c)
            for (int b = 0; b < m; ++b) {
                // nabla_a nabla_c X^b
                std::vector<Expr> terms{diff(nX[c][b], chart.coord(a))};
                for (int h = 0; h < m; ++h) {
                    terms.push_back(conn.G(b, a, h) * nX[c][h]);
                    terms.push_back(-(conn.G(h, a, c) * nX[h][b]));
                }
                for (int d = 0; d < m; ++d) terms.push_back(X[d] * R4.at({a, d, b, c}));
                out.at({a, b, c}) = sum(terms);
            }
    return out;
}

KomarData::KomarData(MetricField g, std::vector<Expr> X)
    : g_(std::move(g)), X_(std::move(X)), grav_(g_), lie_(g_.chart(), {1}) {
    const int m = g_.dim();
    const AffineConnectionField& lc = grav_.gamma();
    lie_ = lie_derivative_connection(lc, X_);

    // B[a][b] = nabla^b X^a - nabla^a X^b
    ExprMatrix nX = cov_deriv_vector(lc, X_);
    auto nup = [&](int a, int b) {
        std::vector<Expr> t;
        for (int c = 0; c < m; ++c) t.push_back(g_.ginv(a, c) * nX[c][b]);
        return sum(t);
    };
    ExprMatrix B = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) B[a][b] = nup(b, a) - nup(a, b);

    U_ = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            U_[a][b] = Expr::rational(1, 2) * B[a][b] * g_.sqrt_abs_det();

    // J^b = nabla_a B^{ab}
    J_.assign(m, Expr::integer(0));
    for (int b = 0; b < m; ++b) {
        std::vector<Expr> terms;
        for (int a = 0; a < m; ++a) {
            std::vector<Expr> t{diff(B[a][b], g_.chart().coord(a))};
            for (int h = 0; h < m; ++h) {
                t.push_back(lc.G(a, a, h) * B[h][b]);
                t.push_back(lc.G(b, a, h) * B[a][h]);
            }
            terms.push_back(sum(t));
        }
        J_[b] = sum(terms);
    }
}

Expr KomarData::divergence() const {
    const int m = g_.dim();
    const AffineConnectionField& lc = grav_.gamma();
    std::vector<Expr> terms;
    for (int b = 0; b < m; ++b) {
        terms.push_back(diff(J_[b], g_.chart().coord(b)));
        for (int h = 0; h < m; ++h) terms.push_back(lc.G(b, b, h) * J_[h]);
    }
    return sum(terms);
}

Expr KomarData::lift_component(int b, int c, int d) const {
    const int m = g_.dim();
    const AffineConnectionField& lc = grav_.gamma();
    std::vector<Expr> terms{-lie_.at({b, c, d})};
    for (int e = 0; e < m; ++e) {
        terms.push_back(X_[e] * diff(lc.G(c, b, d), g_.chart().coord(e)));
        terms.push_back(grav_.riemann().at({b, d, c, e}) * X_[e]);
    }
    terms.push_back(-(grav_.ricci_tensor().at({d, b}) * X_[c]));
    return sum(terms);
}

std::vector<Expr> KomarData::lift_current() const {
    const int m = g_.dim();
    const AffineConnectionField& lc = grav_.gamma();
    std::vector<Expr> out(m, Expr::integer(0));
    for (int a = 0; a < m; ++a) {
        std::vector<Expr> terms{grav_.scalar() * g_.sqrt_abs_det() * X_[a]};
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    Expr P = grav_.momentum(a, b, c, d);
                    if (P.is_zero()) continue;
                    std::vector<Expr> inner{lift_component(b, c, d)};
                    for (int e = 0; e < m; ++e)
                        inner.push_back(-(X_[e] * diff(lc.G(c, b, d), g_.chart().coord(e))));
                    terms.push_back(P * sum(inner));
                }
        out[a] = sum(terms);
    }
    return out;
}

} // namespace jetcartan
