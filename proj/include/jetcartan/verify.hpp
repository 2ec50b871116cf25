#pragma once

#include "jetcartan/models.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jetcartan {

// One registered identity: left/right expression arrays compared by
// randomized point evaluation over a sampling domain. A mutated build
// flips one sign in one term; every registered identity must then fail.
struct CheckData {
    std::vector<Expr> lhs;
    std::vector<Expr> rhs;
    Domain domain;
    int trials = 20;
    double tol = 1e-8;
};

struct IdentityCheck {
    std::string id;
    std::string anchor; // section + short quote from the source text
    std::function<CheckData(bool mutated)> build;
};

struct CheckResult {
    std::string id;
    std::string anchor;
    bool pass = false;
    double worst_rel_error = 0.0;
    Assignment worst_point;
    int trials = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0; // reported in text output; omitted from JSON so
                          // reports stay bit-identical for a fixed seed
    std::string error; // evaluation failures
};

CheckResult run_check(const IdentityCheck& check, std::uint64_t seed,
                      std::optional<int> trials = std::nullopt,
                      std::optional<double> tol = std::nullopt, bool mutated = false);

// Frozen residual templates (established once by the maintenance-mode
// oracle below on small instances; normal runs use these constants).
struct ResidualTemplates {
    // scalar: div U = sqrtg RHS + c_phi E_phi.grad phi + c_phibar E_phibar.grad phibar
    Rational scalar_e_phi{1};
    Rational scalar_e_phibar{1};
    // gauge: div U = c_gauge E^{cI} nabla_b kappa^I_c
    Rational gauge_e{1};
    // dirac: div T = RHS + c1 E.grad psi + c2 grad psibar.E
    //        + c3 d_a(E g^a g_b psi) + c4 d_a(psibar g_b g^a E)
    Rational dirac_e_psi{-1};
    Rational dirac_e_psibar{-1};
    Rational dirac_d_psi{1, 4};
    Rational dirac_d_psibar{1, 4};
    // total matter+gauge: div(T_m + T_g) = c_m (E.grad terms) + c_g E^{cI} rho_bc^I
    Rational total_matter{-1, 2};
    Rational total_gauge{1, 2};
};

const ResidualTemplates& residual_templates();

// Maintenance-mode re-derivation on 2-dimensional instances; aborts if the
// dictionary does not cancel. Used by the fixture guard test and the
// `jetcartan oracle` maintenance command, never by normal check runs.
ResidualTemplates derive_residual_templates();

// fixture IO: plain text key/value lines with an fnv64 checksum line
std::string render_residual_fixture(const ResidualTemplates& t);
ResidualTemplates load_residual_fixture(const std::string& path);
std::uint64_t fnv1a64(const std::string& data);

} // namespace jetcartan
