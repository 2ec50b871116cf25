#pragma once

#include "jetcartan/variational.hpp"

namespace jetcartan {

// ---------------------------------------------------------------- scalar

// Charged spin-zero field: independent sections phi^i and phibar_i of
// mutually dual fibers, background linear connection kappa and metric g.
class ScalarModel {
public:
    ScalarModel(MetricField g, LinearConnection kappa, Expr mass,
                std::vector<Expr> phi, std::vector<Expr> phibar);

    const MetricField& metric() const { return g_; }
    const LinearConnection& kappa() const { return kappa_; }
    const FiberedChart& chart() const { return chart_; }  // fibers: phi then phibar
    int fiber_dim() const { return n_; }
    const Expr& mass() const { return mass_; }
    const std::vector<Expr>& phi() const { return phi_; }
    const std::vector<Expr>& phibar() const { return phibar_; }

    const JetLagrangian& lagrangian() const { return lagr_; }          // metric symbols
    const JetLagrangian& lagrangian_bound() const { return lagr_bound_; }
    const GeneralConnection& doubled_connection() const { return conn_; }
    Section section() const;                                           // (phi, phibar)

    EnergyTensorField energy_tensor() const;      // U^a_b, jet coordinates
    EnergyTensorField stress_tensor() const;      // T_ab, jet coordinates

    // nabla_a Ubreve^a_b = 1/2 g^{ac} rho_ab^i_j (phibar_i nabla_c phi^j
    //   - nabla_c phibar_i phi^j): the claimed on-shell covector (pulled back)
    std::vector<Expr> onshell_divergence_rhs() const;

    // off-shell defect: div(U) - sqrtg * RHS - (E_phi nabla_b phi + E_phibar
    //   nabla_b phibar); identically zero (oracle-frozen residual template)
    std::vector<Expr> offshell_defect() const;

    // EL densities pulled back along the sections: [phi^i..., phibar_i...]
    std::vector<Expr> el_pullback() const;

    // gauge-source d ell / d kappa^I_c for a frame expansion of kappa
    std::vector<std::vector<Expr>> gauge_source(const GaugeStructure& G) const; // [I][c]

private:
    MetricField g_;
    LinearConnection kappa_;
    Expr mass_;
    std::vector<Expr> phi_, phibar_;
    int n_;
    FiberedChart chart_;
    GeneralConnection conn_;
    JetLagrangian lagr_;
    JetLagrangian lagr_bound_;
};

// ----------------------------------------------------------------- dirac

struct DiracMatrices {
    // constant Dirac-representation gammas with exact entries,
    // {gamma_l, gamma_m} = 2 eta_lm, eta = diag(1,-1,-1,-1)
    static const std::vector<ExprMatrix>& gamma();
    static const ExprMatrix& eta();
};

class DiracModel {
public:
    // tetrad[l][a] = theta^l_a (orthonormal co-frame), A_a real potential
    DiracModel(Chart chart, ExprMatrix tetrad, std::vector<Expr> A, Expr mass,
               std::vector<Expr> psi, std::vector<Expr> psibar);

    const Chart& base() const { return base_; }
    const MetricField& metric() const { return g_; }
    const FiberedChart& chart() const { return chart_; }
    const JetLagrangian& lagrangian() const { return lagr_; }
    const JetLagrangian& lagrangian_bound() const { return lagr_bound_; }
    bool flat_tetrad() const { return flat_tetrad_; }
    const ExprMatrix& tetrad() const { return tetrad_; }
    const std::vector<Expr>& potential() const { return A_; }
    const Expr& mass() const { return mass_; }
    const std::vector<Expr>& psi() const { return psi_; }
    const std::vector<Expr>& psibar() const { return psibar_; }

    // spinor connection Gcheck_a = i A_a + 1/4 omega_a^{lm} gamma_l gamma_m
    const std::vector<ExprMatrix>& spinor_connection() const { return spinor_conn_; }
    ExprMatrix gamma_lower(int a) const;  // gamma_a = theta^l_a gamma_l
    ExprMatrix gamma_upper(int a) const;  // gamma^a = g^{ab} gamma_b

    Section section() const;
    std::vector<ExprMatrix> nabla_psi() const;     // [a] -> column as n x 1
    std::vector<ExprMatrix> nabla_psibar() const;  // [a] -> row as 1 x n

    EnergyTensorField energy_tensor() const;  // canonical U^a_b (jet coords)
    EnergyTensorField stress_tensor() const;  // T_ab via d ell / d g^{ab}

    // claimed on-shell covector: i rho_ab psibar gamma^a psi sqrtg with
    // rho_ab = i(d_b A_a - d_a A_b); pulled back
    std::vector<Expr> onshell_divergence_rhs() const;

    // off-shell defect of div(T) against the oracle-frozen residual template
    // (flat tetrads; template: -E nabla psi - nabla psibar E
    //  + 1/4 d_a(E gamma^a gamma_b psi) + 1/4 d_a(psibar gamma_b gamma^a E))
    std::vector<Expr> offshell_defect() const;

    std::vector<Expr> el_psi_pullback() const;     // row E_alpha (wrt psi)
    std::vector<Expr> el_psibar_pullback() const;  // column E^alpha (wrt psibar)

private:
    Chart base_;
    ExprMatrix tetrad_;
    std::vector<Expr> A_;
    Expr mass_;
    std::vector<Expr> psi_, psibar_;
    MetricField g_;
    bool flat_tetrad_;
    std::vector<ExprMatrix> spinor_conn_;
    FiberedChart chart_;
    JetLagrangian lagr_;
    JetLagrangian lagr_bound_;
};

// ------------------------------------------------------------ yang-mills

class YangMillsModel {
public:
    YangMillsModel(MetricField g, GaugeStructure structure, GaugeField field);

    const MetricField& metric() const { return g_; }
    const GaugeStructure& structure() const { return structure_; }
    const GaugeField& field() const { return field_; }
    const FiberedChart& chart() const { return chart_; }  // fibers w<I>_<coord>
    const JetLagrangian& lagrangian() const { return lagr_; }
    const JetLagrangian& lagrangian_bound() const { return lagr_bound_; }
    const Overconnection& overconnection() const { return up_; }

    Section section() const; // the gauge field as a section of C_G

    // U^a_b along j kappa, via the display (rhobar^{ac} rho_bc - 1/4 .. ) sqrtg
    ExprMatrix energy_tensor_display() const;
    // U^a_b along j kappa, via ell delta - P nabla kappa through the jet route
    ExprMatrix energy_tensor_canonical() const;
    // T_ab along j kappa via d ell / d g^{ab}
    ExprMatrix stress_tensor() const;

    // gauge-field EL densities pulled back: E^{cI} (source-free part)
    std::vector<std::vector<Expr>> el_pullback() const; // [I][c]

    // off-shell identity: div(U) = E^{cI} nabla_b kappa^I_c (source-free)
    std::vector<Expr> offshell_defect() const;

private:
    MetricField g_;
    GaugeStructure structure_;
    GaugeField field_;
    FiberedChart chart_;
    AffineConnectionField lc_;
    Overconnection up_;
    JetLagrangian lagr_;
    JetLagrangian lagr_bound_;
};

// coupled matter + gauge total conservation defect (pulled back covector):
// div(T_m + T_g) + 1/2(E_phi nabla_b phi + E_phibar nabla_b phibar)
//   - 1/2 E_full^{cI} rho_bc^I == 0 for arbitrary fields
std::vector<Expr> total_conservation_defect(const ScalarModel& matter, const YangMillsModel& gauge);

// ----------------------------------------------------------- gravitation

class GravityModel {
public:
    // Gamma defaults to the Levi-Civita connection of g
    explicit GravityModel(MetricField g);
    GravityModel(MetricField g, AffineConnectionField gamma);

    const MetricField& metric() const { return g_; }
    const AffineConnectionField& gamma() const { return gamma_; }
    const TensorField& riemann() const { return R4_; }
    const TensorField& ricci_tensor() const { return ric_; }
    const Expr& scalar() const { return R_; }

    // P^{ab}_{cd} = (-g^{ad} delta^b_c + g^{bd} delta^a_c) sqrtg
    Expr momentum(int a, int b, int c, int d) const;

    // U^a_b = R sqrtg delta^a_b - nabla_b Gamma_e^c_d P^{ae}_{cd} with
    // nabla Gamma = -R4 (covariant derivative w.r.t. the overconnection)
    ExprMatrix energy_tensor() const;

    // the over-connection coefficients (Gup_a)^c_{bd} evaluated along j Gamma
    Expr overconnection_on_section(int a, int b, int c, int d) const;

    // current of the horizontal lift X . Gup:
    //   cur^a = R sqrtg X^a + P^{ab}_{cd} X^e R4_{eb}^c_d
    std::vector<Expr> horizontal_current(const std::vector<Expr>& X) const;

    // d[cur] - <U, nabla X> = d[cur] + 2 G^a_b nabla_a X^b sqrtg; == 0
    Expr current_identity_defect(const std::vector<Expr>& X) const;

private:
    MetricField g_;
    AffineConnectionField gamma_;
    TensorField R4_;
    TensorField ric_;
    Expr R_;
};

// L_X Gamma_a^b_c, coordinate display (dd X + Gamma dX + X dGamma terms)
TensorField lie_derivative_connection(const AffineConnectionField& conn,
                                      const std::vector<Expr>& X);
// second display: nabla_a nabla_c X^b + X^d R4_{ad}^b_c
TensorField lie_derivative_connection_via_curvature(const AffineConnectionField& conn,
                                                    const TensorField& R4,
                                                    const std::vector<Expr>& X);

class KomarData {
public:
    KomarData(MetricField g, std::vector<Expr> X);

    const MetricField& metric() const { return g_; }
    const std::vector<Expr>& vector_field() const { return X_; }

    // J^b = nabla_a (nabla^b X^a - nabla^a X^b)
    const std::vector<Expr>& current() const { return J_; }
    // superpotential U^{ab} = 1/2 (nabla^b X^a - nabla^a X^b) sqrtg, with
    // d(2 U^{ab}) = J^b sqrtg
    const ExprMatrix& superpotential() const { return U_; }
    // divergence nabla_b J^b (identically zero off-shell)
    Expr divergence() const;

    // lift fiber components along j Gamma:
    //   Y_b^c_d = X^e d_e Gamma_b^c_d - L_X Gamma_b^c_d
    //             + R4_{bd}^c_e X^e - Ric_{db} X^c
    Expr lift_component(int b, int c, int d) const;
    // current of the lift: R sqrtg X^a + P^{ab}_{cd}(Y_b^c_d - X^e d_e Gamma_b^c_d);
    // equals J^a sqrtg (the lift theorem)
    std::vector<Expr> lift_current() const;

private:
    MetricField g_;
    std::vector<Expr> X_;
    GravityModel grav_;
    TensorField lie_;
    std::vector<Expr> J_;
    ExprMatrix U_;
};

} // namespace jetcartan
