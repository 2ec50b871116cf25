#pragma once

#include "jetcartan/chart.hpp"

#include <optional>
#include <string>

namespace jetcartan {

struct SingularMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Metric components g_{ab}(x) with exact symbolic inverse (adjugate/det),
// determinant and the density sqrt(|g|) = sqrt(sign * det).
class MetricField {
public:
    MetricField(Chart chart, ExprMatrix components, std::string signature_tag = "");

    const Chart& chart() const { return chart_; }
    int dim() const { return chart_.dim(); }
    const Expr& g(int a, int b) const { return g_[a][b]; }
    const Expr& ginv(int a, int b) const { return ginv_[a][b]; }
    const ExprMatrix& lower() const { return g_; }
    const ExprMatrix& inverse() const { return ginv_; }
    const Expr& det() const { return det_; }
    const Expr& sqrt_abs_det() const { return sqrtg_; }
    int det_sign() const { return det_sign_; }
    const std::string& signature_tag() const { return signature_; }

private:
    Chart chart_;
    ExprMatrix g_;
    ExprMatrix ginv_;
    Expr det_;
    Expr sqrtg_;
    int det_sign_ = 1;
    std::string signature_;
};

// Base connection coefficients stored as coeff[c][a][b], meaning the
// classical Christoffel symbol Gamma^c_{ab} (a: derivative slot, b: argument).
class AffineConnectionField {
public:
    AffineConnectionField(Chart chart, int dim);

    const Chart& chart() const { return chart_; }
    int dim() const { return chart_.dim(); }
    Expr& G(int c, int a, int b) { return coeff_[c][a][b]; }
    const Expr& G(int c, int a, int b) const { return coeff_[c][a][b]; }
    bool symmetric() const { return symmetric_; }
    void mark_symmetric(bool value) { symmetric_ = value; }
    void validate_symmetry() const; // throws unless coeff is (a,b)-symmetric as Exprs

private:
    Chart chart_;
    std::vector<ExprMatrix> coeff_; // [c][a][b]
    bool symmetric_ = false;
};

// Christoffel symbols of g: Gamma^c_{ab} = 1/2 g^{cd}(d_a g_db + d_b g_da - d_d g_ab).
AffineConnectionField levi_civita(const MetricField& g);

// Curvature of the base connection, stored R[a][b][c][d] = R_{ab}^c_d with
// the (a,b) pair antisymmetric. Equals the classical Riemann tensor read as
// R^c_{d b a}; the contraction R_{ab}^b_c is the classical Ricci tensor.
TensorField base_curvature(const AffineConnectionField& conn);

// Ric_{ac} = R_{ab}^b_c
TensorField ricci(const TensorField& riemann);
Expr scalar_curvature(const MetricField& g, const TensorField& ricci_tensor);
// G^a_b = R^a_b - (1/2) R delta^a_b  (built from levi-civita of g when conn omitted)
TensorField einstein(const MetricField& g, const AffineConnectionField& conn);
TensorField einstein(const MetricField& g);

// tau_a = Gamma_a^c_c - Gamma_c^c_a (in stored components)
TensorField torsion_form(const AffineConnectionField& conn);

// (*phi)_{cd} = 1/2 sqrt|g| eps_{abcd} g^{ae} g^{bf} phi_{ef}, dim 4 only.
TensorField hodge_star(const MetricField& g, const TensorField& two_form, int orientation = 1);

// nabla.xi = d_a xi^{ai} - kappa^i_{aj} xi^{aj} + tau_a xi^{ai} for a density
// xi^{ai} with an auxiliary fiber index (kappa[a][i][j] may be empty: no fiber).
TensorField covariant_divergence(const TensorField& xi, const AffineConnectionField& conn,
                                 const std::vector<ExprMatrix>& kappa);

// componentwise division by sqrt|g|
TensorField breve(const TensorField& xi, const MetricField& g);

// Classical covariant derivatives on base tensors (stored components).
ExprMatrix cov_deriv_vector(const AffineConnectionField& conn, const std::vector<Expr>& X);   // [a][b] = nabla_a X^b
TensorField cov_deriv_metric(const AffineConnectionField& conn, const MetricField& g);        // [c][a][b] = nabla_c g_ab
std::vector<Expr> div_mixed_density(const AffineConnectionField& conn, const ExprMatrix& U);  // [b] = nabla_a U^a_b (weight 1, symmetric conn)

} // namespace jetcartan
