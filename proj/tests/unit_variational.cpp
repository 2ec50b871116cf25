#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jetcartan/variational.hpp"

using namespace jetcartan;

namespace {

std::uint64_t rng_state = 0x77aa11;
std::int64_t rnd_int(std::int64_t lo, std::int64_t hi) {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return lo + static_cast<std::int64_t>(rng_state % static_cast<std::uint64_t>(hi - lo + 1));
}

Expr rnd_poly(const std::vector<Expr>& gens) {
    std::vector<Expr> terms{Expr::rational(rnd_int(-2, 2), rnd_int(1, 3))};
    for (const auto& g : gens) {
        terms.push_back(Expr::rational(rnd_int(-2, 2), rnd_int(2, 4)) * g);
        if (rnd_int(0, 1)) terms.push_back(Expr::rational(rnd_int(-1, 1), 4) * g * gens[0]);
    }
    return sum(terms);
}

} // namespace

TEST_CASE("horizontal differential: coordinates and pullback commutation") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});

    auto d0 = horizontal_differential(fc, base.coord_expr(0));
    CHECK(d0[0].is_one());
    CHECK(d0[1].is_zero());

    auto du = horizontal_differential(fc, fc.fiber_expr(0));
    CHECK(du[0].same_node(fc.jet1_expr(0, 0)));
    CHECK(du[1].same_node(fc.jet1_expr(0, 1)));

    // d_a(f) along j2 phi equals d_a(f along j phi)
    Expr f = fc.fiber_expr(0) * fc.jet1_expr(0, 0) + sin(base.coord_expr(1)) * fc.fiber_expr(0);
    Section phi(fc, {base.coord_expr(0) * base.coord_expr(0) + cos(base.coord_expr(1))});
    auto da = horizontal_differential(fc, f);
    auto j2 = phi.second_jet();
    auto j1 = phi.first_jet();
    for (int a = 0; a < 2; ++a) {
        Expr lhs = subst(da[a], j2);
        Expr rhs = diff(subst(f, j1), base.coord(a));
        CHECK(equal_numeric(lhs, rhs, base.box(), 10).pass);
    }
}

TEST_CASE("euler-lagrange: free scalar, constant-force, null lagrangian") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});
    Expr msq = Expr::rational(1, 4); // m^2

    // ell = 1/2 sum_a (y_a)^2 - 1/2 m^2 y^2  ->  E = -m^2 y - sum_a y_{aa}
    Expr ell = Expr::rational(1, 2) * (pow(fc.jet1_expr(0, 0), 2) + pow(fc.jet1_expr(0, 1), 2)) -
               Expr::rational(1, 2) * msq * pow(fc.fiber_expr(0), 2);
    JetLagrangian L(fc, ell);
    auto E = euler_lagrange(L);
    Expr want = -(msq * fc.fiber_expr(0)) - fc.jet2_expr(0, 0, 0) - fc.jet2_expr(0, 1, 1);
    CHECK(equal_numeric(E[0], want, fc.second_jet_domain(), 10).pass);

    // ell = y -> E = 1
    JetLagrangian Ly(fc, fc.fiber_expr(0));
    CHECK(euler_lagrange(Ly)[0].is_one());

    // total divergence ell = sum_a d_a f_a with f_a(x, y): E = 0 numerically
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<Expr> gens{base.coord_expr(0), base.coord_expr(1), fc.fiber_expr(0)};
        Expr f0 = rnd_poly(gens), f1 = rnd_poly(gens);
        Expr div = horizontal_differential(fc, f0)[0] + horizontal_differential(fc, f1)[1];
        JetLagrangian Ld(fc, div);
        auto Ed = euler_lagrange(Ld);
        CHECK(equal_numeric(Ed[0], Expr::integer(0), fc.second_jet_domain(), 10, 1e-8, rep).pass);
    }
}

TEST_CASE("momentum") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});
    Expr ell = Expr::rational(1, 2) * (pow(fc.jet1_expr(0, 0), 2) + pow(fc.jet1_expr(0, 1), 2));
    auto P = momentum(JetLagrangian(fc, ell));
    CHECK(P[0][0].same_node(fc.jet1_expr(0, 0)));
    CHECK(P[1][0].same_node(fc.jet1_expr(0, 1)));

    auto Pz = momentum(JetLagrangian(fc, fc.fiber_expr(0)));
    CHECK(Pz[0][0].is_zero());
    CHECK(Pz[1][0].is_zero());
}

TEST_CASE("current pullback: vertical lifts and the X,W round trip") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u", "v"});
    std::vector<Expr> gens{base.coord_expr(0), base.coord_expr(1), fc.fiber_expr(0),
                           fc.fiber_expr(1), fc.jet1_expr(0, 0), fc.jet1_expr(1, 1)};
    Expr ell = rnd_poly(gens) * fc.jet1_expr(0, 0) + rnd_poly(gens);
    JetLagrangian L(fc, ell);
    Section phi(fc, {rnd_poly({base.coord_expr(0), base.coord_expr(1)}),
                     rnd_poly({base.coord_expr(0), base.coord_expr(1)})});
    auto jphi = phi.first_jet();
    auto P = momentum(L);

    // vertical lift: current^a = P^a_i Y^i along j phi
    LiftField vert{fc, {Expr::integer(0), Expr::integer(0)}, {rnd_poly(gens), rnd_poly(gens)}};
    auto cur = current_pullback(vert, L, phi);
    for (int a = 0; a < 2; ++a) {
        Expr want = subst(P[a][0] * vert.fiber_comp[0] + P[a][1] * vert.fiber_comp[1], jphi);
        CHECK(equal_numeric(cur[a], want, base.box(), 10).pass);
    }

    // Y = X . dl + W reproduces ell X^a + P^a_i W^i along j phi
    std::vector<Expr> X{rnd_poly(gens), rnd_poly(gens)};
    std::vector<Expr> W{rnd_poly(gens), rnd_poly(gens)};
    LiftField Y = lift_from_current(fc, X, W);
    CHECK(Y.fiber_comp[0].depends_on(fc.jet1(0, 0)));
    auto cur2 = current_pullback(Y, L, phi);
    Expr ell_h = subst(ell, jphi);
    for (int a = 0; a < 2; ++a) {
        Expr want = ell_h * subst(X[a], jphi) +
                    subst(P[a][0] * W[0] + P[a][1] * W[1], jphi);
        CHECK(equal_numeric(cur2[a], want, base.box(), 10).pass);
    }

    // zero lagrangian: zero current
    JetLagrangian Lz(fc, Expr::integer(0));
    auto curz = current_pullback(Y, Lz, phi);
    for (const auto& e : curz) CHECK(e.is_zero());
}

TEST_CASE("canonical energy tensor: constants and horizontal sections") {
    Chart base = Chart::with_default_box({"x"});
    FiberedChart fc(base, {"u"}, -3.0, 3.0);
    GeneralConnection k(fc, {{fc.fiber_expr(0)}});

    // constant lagrangian: U = ell delta
    JetLagrangian Lc(fc, Expr::rational(5, 3));
    EnergyTensorField U = canonical_energy_tensor(Lc, k);
    CHECK(equal_numeric(U.comp[0][0], Expr::rational(5, 3), fc.first_jet_domain()).pass);

    // along the horizontal section phi = e^x the (y - kappa) factor vanishes,
    // so U pulls back to ell delta for any lagrangian
    Expr ell = pow(fc.jet1_expr(0, 0), 2) + fc.fiber_expr(0) * fc.jet1_expr(0, 0);
    JetLagrangian L(fc, ell);
    EnergyTensorField U2 = canonical_energy_tensor(L, k);
    Section phi(fc, {exp(base.coord_expr(0))});
    auto jphi = phi.first_jet();
    CHECK(equal_numeric(subst(U2.comp[0][0], jphi), subst(ell, jphi), base.box(), 10).pass);
}

TEST_CASE("horizontal-lift current identity: (U o jphi) . X = current of X . kappa") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});
    std::vector<Expr> xg{base.coord_expr(0), base.coord_expr(1)};
    std::vector<std::vector<Expr>> kc(1, std::vector<Expr>(2));
    kc[0][0] = rnd_poly(xg) + rnd_poly(xg) * fc.fiber_expr(0);
    kc[0][1] = rnd_poly(xg) * fc.fiber_expr(0);
    GeneralConnection k(fc, kc);
    std::vector<Expr> gens{xg[0], xg[1], fc.fiber_expr(0), fc.jet1_expr(0, 0), fc.jet1_expr(0, 1)};
    JetLagrangian L(fc, rnd_poly(gens) + rnd_poly(gens) * fc.jet1_expr(0, 1));
    Section phi(fc, {rnd_poly(xg)});
    std::vector<Expr> X{rnd_poly(xg), rnd_poly(xg)};

    EnergyTensorField U = canonical_energy_tensor(L, k);
    auto jphi = phi.first_jet();
    // horizontal lift through kappa: Y^a = X^a, Y^i = X^a kappa^i_a
    LiftField Y{fc, X, {X[0] * k.k(0, 0) + X[1] * k.k(0, 1)}};
    auto cur = current_pullback(Y, L, phi);
    for (int a = 0; a < 2; ++a) {
        Expr contracted = subst(U.comp[a][0] * X[0] + U.comp[a][1] * X[1], jphi);
        CHECK(equal_numeric(cur[a], contracted, base.box(), 10).pass);
    }
}

TEST_CASE("metric stress tensor: pure density and symmetry") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});
    MetricSymbols ms(base);

    ExprMatrix gm = expr_matrix(2, 2);
    gm[0][0] = 1 + pow(base.coord_expr(1), 2) / 4;
    gm[1][1] = -(1 + pow(base.coord_expr(0), 2) / 3);
    MetricField g(base, gm, "lorentzian");

    // ell = sqrtg -> T_ab = -1/2 g_ab sqrtg
    JetLagrangian L(fc, ms.sqrtg_expr(), true);
    EnergyTensorField T = metric_stress_tensor(L, g);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Expr want = Expr::rational(-1, 2) * g.g(a, b) * g.sqrt_abs_det();
            CHECK(equal_numeric(T.comp[a][b], want, base.box(), 10).pass);
            CHECK(T.comp[a][b].same_node(T.comp[b][a]));
        }

    // a generic gu-dependent density stays symmetric as Exprs
    Expr ell2 = ms.gu_expr(0, 1) * fc.jet1_expr(0, 0) * fc.jet1_expr(0, 1) * ms.sqrtg_expr();
    EnergyTensorField T2 = metric_stress_tensor(JetLagrangian(fc, ell2, true), g);
    CHECK(T2.comp[0][1].same_node(T2.comp[1][0]));
}

TEST_CASE("symmetry defect vanishes for random lifts and sections") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u", "v"});
    std::vector<Expr> xg{base.coord_expr(0), base.coord_expr(1)};
    std::vector<Expr> gens{xg[0], xg[1], fc.fiber_expr(0), fc.fiber_expr(1),
                           fc.jet1_expr(0, 0), fc.jet1_expr(0, 1), fc.jet1_expr(1, 0)};
    for (int rep = 0; rep < 4; ++rep) {
        Expr ell = rnd_poly(gens) + rnd_poly(gens) * fc.jet1_expr(1, 1);
        JetLagrangian L(fc, ell);
        Section phi(fc, {rnd_poly(xg), rnd_poly(xg)});
        LiftField Y{fc, {rnd_poly(gens), rnd_poly(gens)}, {rnd_poly(gens), rnd_poly(gens)}};
        Expr defect = symmetry_defect(Y, L, phi);
        CHECK(equal_numeric(defect, Expr::integer(0), base.box(), 20, 1e-8, rep).pass);

        // zero lift gives zero defect trivially
        LiftField Yz{fc, {Expr::integer(0), Expr::integer(0)},
                     {Expr::integer(0), Expr::integer(0)}};
        CHECK(symmetry_defect(Yz, L, phi).is_zero());
    }
}

TEST_CASE("critical section: translation currents are closed on shell") {
    // free 1+1 scalar, plane-wave solution, translation lifts
    Chart base = Chart::with_default_box({"t", "x"});
    FiberedChart fc(base, {"u"}, -4.0, 4.0);
    Expr msq = Expr::integer(0);
    Expr ell = Expr::rational(1, 2) * (pow(fc.jet1_expr(0, 0), 2) - pow(fc.jet1_expr(0, 1), 2));
    JetLagrangian L(fc, ell);
    // u = sin(t - x) solves the wave equation
    Section phi(fc, {sin(base.coord_expr(0) - base.coord_expr(1))});
    auto E = euler_lagrange(L);
    CHECK(equal_numeric(subst(E[0], phi.second_jet()), Expr::integer(0), base.box(), 10).pass);

    for (int dir = 0; dir < 2; ++dir) {
        std::vector<Expr> X{Expr::integer(dir == 0 ? 1 : 0), Expr::integer(dir == 1 ? 1 : 0)};
        LiftField Y = lift_from_current(fc, X, {Expr::integer(0)});
        auto cur = current_pullback(Y, L, phi);
        Expr div = diff(cur[0], base.coord(0)) + diff(cur[1], base.coord(1));
        CHECK(equal_numeric(div, Expr::integer(0), base.box(), 10).pass);
    }
}

TEST_CASE("finite-difference action variation agrees with the EL gradient") {
    // 1-fiber free scalar on [0,1]; bump-supported variation
    Chart base = Chart({"x"}, {{0.05, 0.95}});
    FiberedChart fc(base, {"u"}, -4.0, 4.0);
    Expr msq = Expr::rational(1, 2);
    Expr ell = Expr::rational(1, 2) * pow(fc.jet1_expr(0, 0), 2) -
               Expr::rational(1, 2) * msq * pow(fc.fiber_expr(0), 2);
    JetLagrangian L(fc, ell);

    Expr x = base.coord_expr(0);
    Expr phi0 = sin(2 * x) + x * x / 3;
    Expr bump = pow(x, 2) * pow(1 - x, 2);
    Symbol sx = base.coord(0);

    // d/deps S[phi0 + eps bump] at eps = 0 by central difference over the action
    auto action = [&](double epsv) {
        Expr phie = phi0 + Expr::rational(static_cast<std::int64_t>(epsv * 1e6), 1000000) * bump;
        Section sec(fc, {phie});
        Expr integrand = subst(ell, sec.first_jet());
        // composite simpson on [0,1], 200 intervals
        const int N = 200;
        double acc = 0.0;
        for (int k = 0; k <= N; ++k) {
            double xv = static_cast<double>(k) / N;
            double w = (k == 0 || k == N) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            acc += w * eval(integrand, {{sx, CDouble(xv)}}).real();
        }
        return acc / (3.0 * N);
    };
    const double h = 1e-3;
    double fd = (action(h) - action(-h)) / (2 * h);

    // integral of E * bump along j2 phi0
    Section sec0(fc, {phi0});
    Expr Eb = subst(euler_lagrange(L)[0], sec0.second_jet()) * bump;
    const int N = 200;
    double el = 0.0;
    for (int k = 0; k <= N; ++k) {
        double xv = static_cast<double>(k) / N;
        double w = (k == 0 || k == N) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        el += w * eval(Eb, {{sx, CDouble(xv)}}).real();
    }
    el /= 3.0 * N;

    CHECK(std::abs(fd - el) / (1.0 + std::abs(el)) < 1e-4);
}
