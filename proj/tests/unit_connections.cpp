#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jetcartan/connections.hpp"

using namespace jetcartan;

namespace {

std::uint64_t rng_state = 0x3cf5a7d1;
std::int64_t rnd_int(std::int64_t lo, std::int64_t hi) {
    rng_state ^= rng_state << 13;
    rng_state ^= rng_state >> 7;
    rng_state ^= rng_state << 17;
    return lo + static_cast<std::int64_t>(rng_state % static_cast<std::uint64_t>(hi - lo + 1));
}

Expr rnd_poly(const Chart& c, int extra = 0) {
    std::vector<Expr> terms{Expr::rational(rnd_int(-3, 3), rnd_int(1, 4))};
    for (int a = 0; a < c.dim(); ++a) {
        terms.push_back(Expr::rational(rnd_int(-2, 2), rnd_int(2, 5)) * c.coord_expr(a));
        if (extra > 0)
            terms.push_back(Expr::rational(rnd_int(-1, 1), rnd_int(3, 6)) * c.coord_expr(a) *
                            c.coord_expr((a + 1) % c.dim()));
    }
    return sum(terms);
}

AffineConnectionField random_symmetric_gamma(const Chart& c) {
    AffineConnectionField g(c, c.dim());
    for (int k = 0; k < c.dim(); ++k)
        for (int a = 0; a < c.dim(); ++a)
            for (int b = a; b < c.dim(); ++b) {
                Expr v = rnd_poly(c);
                g.G(k, a, b) = v;
                g.G(k, b, a) = v;
            }
    g.mark_symmetric(true);
    return g;
}

} // namespace

TEST_CASE("curvature: zero connection, linear specialization, abelian iqF") {
    Chart base = Chart::with_default_box({"x", "y", "z"});
    FiberedChart fc(base, {"u", "v"});

    std::vector<std::vector<Expr>> zero(2, std::vector<Expr>(3, Expr::integer(0)));
    GeneralConnection kz(fc, zero);
    for (const auto& mat : curvature(kz))
        for (const auto& row : mat)
            for (const auto& e : row) CHECK(e.is_zero());

    // linear kappa^i_a = kappa_a^i_j y^j: general curvature equals the linear
    // display contracted with y
    std::vector<ExprMatrix> lk(3, expr_matrix(2, 2));
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) lk[a][i][j] = rnd_poly(base);
    LinearConnection lin(fc, lk);
    auto rho_lin = linear_curvature(lin);
    auto rho_gen = curvature(lin.to_general());
    Domain box = fc.first_jet_domain();
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                std::vector<Expr> contracted;
                for (int j = 0; j < 2; ++j)
                    contracted.push_back(rho_lin[a][b][i][j] * fc.fiber_expr(j));
                CHECK(equal_numeric(rho_gen[i][a][b], sum(contracted), box, 10).pass);
            }

    // abelian n = 1: kappa_a = i q A_a(x) gives rho_ab = i q (d_b A_a - d_a A_b)
    FiberedChart fc1(base, {"w"});
    Expr q = Expr::rational(2, 3);
    std::vector<Expr> A{rnd_poly(base, 1), rnd_poly(base, 1), rnd_poly(base, 1)};
    std::vector<std::vector<Expr>> kab(1, std::vector<Expr>(3));
    for (int a = 0; a < 3; ++a) kab[0][a] = Expr::imaginary_unit() * q * A[a];
    GeneralConnection ka(fc1, kab);
    auto rho = curvature(ka);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Expr F = diff(A[a], base.coord(b)) - diff(A[b], base.coord(a));
            CHECK(equal_numeric(rho[0][a][b], Expr::imaginary_unit() * q * F,
                                fc1.first_jet_domain(), 5).pass);
        }
}

TEST_CASE("section covariant derivative") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u"});

    GeneralConnection kz(fc, {{Expr::integer(0), Expr::integer(0)}});
    std::vector<Expr> phi{base.coord_expr(0) * base.coord_expr(1)};
    auto d = section_covariant_derivative(kz, phi);
    CHECK(equal_numeric(d[0][0], base.coord_expr(1), base.box()).pass);

    std::vector<ExprMatrix> lk(2, expr_matrix(1, 1));
    lk[0][0][0] = rnd_poly(base);
    lk[1][0][0] = rnd_poly(base);
    LinearConnection lin(fc, lk);
    auto dl = section_covariant_derivative(lin.to_general(), phi);
    for (int a = 0; a < 2; ++a) {
        Expr want = diff(phi[0], base.coord(a)) - lk[a][0][0] * phi[0];
        CHECK(equal_numeric(dl[a][0], want, base.box(), 10).pass);
    }
}

TEST_CASE("horizontal section in one dimension") {
    // kappa^1_1 = y and phi = e^x solves phi' = kappa(x, phi)
    Chart base = Chart::with_default_box({"x"});
    FiberedChart fc(base, {"u"}, -3.0, 3.0);
    GeneralConnection k(fc, {{fc.fiber_expr(0)}});
    std::vector<Expr> phi{exp(base.coord_expr(0))};
    auto d = section_covariant_derivative(k, phi);
    CHECK(equal_numeric(d[0][0], Expr::integer(0), base.box(), 10).pass);
}

TEST_CASE("involution is an involution (dims 2 and 3, random symmetric Gamma)") {
    for (int m : {2, 3}) {
        Chart base = m == 2 ? Chart::with_default_box({"p", "q"})
                            : Chart::with_default_box({"p", "q", "r"});
        FiberedChart fc(base, {"h"});
        AffineConnectionField gam = random_symmetric_gamma(base);
        auto s = involution(fc, gam);
        Domain box = fc.double_jet_domain();
        for (const auto& [sym, image] : s) {
            Expr twice = subst(image, s);
            CHECK(equal_numeric(twice, Expr::variable(sym), box, 10).pass);
        }
        // with ybar = y the map is the plain jet2 transpose
        std::map<Symbol, Expr> diag;
        for (int a = 0; a < m; ++a) diag.emplace(fc.bar(0, a), fc.jet1_expr(0, a));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Expr img = subst(s.at(fc.jet2(0, a, b)), diag);
                CHECK(equal_numeric(img, fc.jet2_expr(0, b, a), box, 5).pass);
            }
    }
}

TEST_CASE("non-symmetric Gamma rejected by involution") {
    Chart base = Chart::with_default_box({"p", "q"});
    FiberedChart fc(base, {"h"});
    AffineConnectionField gam(base, 2);
    gam.G(0, 0, 1) = base.coord_expr(0);
    CHECK_THROWS_AS(involution(fc, gam), std::invalid_argument);
}

TEST_CASE("prolongation: composition matches the display and projects over kappa") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u", "v"});
    const int m = 2, n = 2;

    std::vector<std::vector<Expr>> comps(n, std::vector<Expr>(m, Expr::integer(0)));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            comps[i][a] = rnd_poly(base) + rnd_poly(base) * fc.fiber_expr((i + a) % n) +
                          Expr::rational(rnd_int(-2, 2), 3) * fc.fiber_expr(i) * fc.fiber_expr((i + 1) % n);
    GeneralConnection k(fc, comps);
    AffineConnectionField gam = random_symmetric_gamma(base);
    ProlongedConnection kp = prolong(k, gam);
    Domain box = fc.first_jet_domain();

    // projectability: first-level components equal kappa's as Exprs
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) CHECK(kp.first_level[i][a].same_node(k.k(i, a)));

    // manageable form: (k'_a)^i_b = k^i_{a,b} + y^j_b d_j k^i_a + Gamma_a^c_b (k^i_c - y^i_c)
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                std::vector<Expr> terms{diff(k.k(i, a), base.coord(b))};
                for (int j = 0; j < n; ++j)
                    terms.push_back(fc.jet1_expr(j, b) * diff(k.k(i, a), fc.fiber(j)));
                for (int c = 0; c < m; ++c)
                    terms.push_back(gam.G(c, a, b) * (k.k(i, c) - fc.jet1_expr(i, c)));
                CHECK(equal_numeric(kp.second_level[i][a][b], sum(terms), box, 10).pass);
            }

    // on holonomic points y^i_c = kappa^i_c the Gamma term drops
    std::map<Symbol, Expr> holonomic;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) holonomic.emplace(fc.jet1(i, c), k.k(i, c));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Expr on_holo = subst(kp.second_level[i][a][b], holonomic);
                std::vector<Expr> want{diff(k.k(i, a), base.coord(b))};
                for (int j = 0; j < n; ++j)
                    want.push_back(k.k(j, b) * diff(k.k(i, a), fc.fiber(j)));
                CHECK(equal_numeric(on_holo, sum(want), box, 5).pass);
            }
}

TEST_CASE("dual connection: involutive and leibniz pairing") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"u0", "u1"});
    std::vector<ExprMatrix> lk(2, expr_matrix(2, 2));
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) lk[a][i][j] = rnd_poly(base);
    LinearConnection k(fc, lk);
    LinearConnection dual = dual_connection(k);
    LinearConnection dd = dual_connection(dual);
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(dd.k(a, i, j).same_node(k.k(a, i, j)));

    std::vector<ExprMatrix> zk(2, expr_matrix(2, 2));
    FiberedChart fz(base, {"z0", "z1"});
    LinearConnection kz(fz, zk);
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(dual_connection(kz).k(a, i, j).is_zero());

    // Leibniz: d_a(phibar_i phi^i) = (nabla phibar)_i phi^i + phibar_i (nabla phi)^i
    std::vector<Expr> phi{rnd_poly(base, 1), rnd_poly(base, 1)};
    std::vector<Expr> phib{rnd_poly(base, 1), rnd_poly(base, 1)};
    auto dphi = section_covariant_derivative(k.to_general(), phi);
    auto dphib = section_covariant_derivative(dual.to_general(), phib);
    for (int a = 0; a < 2; ++a) {
        Expr pairing = phib[0] * phi[0] + phib[1] * phi[1];
        Expr lhs = diff(pairing, base.coord(a));
        Expr rhs = dphib[a][0] * phi[0] + dphib[a][1] * phi[1] +
                   phib[0] * dphi[a][0] + phib[1] * dphi[a][1];
        CHECK(equal_numeric(lhs, rhs, base.box(), 10).pass);
    }
}

TEST_CASE("structure constants: u(1), su(2), antisymmetry, jacobi") {
    GaugeStructure u1 = GaugeStructure::u1();
    CHECK(u1.algebra_dim() == 1);
    CHECK(eval(u1.c(0, 0, 0), {}) == CDouble(0.0));

    GaugeStructure su2 = GaugeStructure::su2();
    CHECK(su2.algebra_dim() == 3);
    // c^K_{JH} = -sqrt(2) eps_{JHK}: hand-computed from [sigma_J, sigma_H]
    const double s2 = std::sqrt(2.0);
    auto eps = [](int a, int b, int c) -> int {
        if (a == b || b == c || a == c) return 0;
        if ((a == 0 && b == 1 && c == 2) || (a == 1 && b == 2 && c == 0) ||
            (a == 2 && b == 0 && c == 1))
            return 1;
        return -1;
    };
    for (int K = 0; K < 3; ++K)
        for (int J = 0; J < 3; ++J)
            for (int H = 0; H < 3; ++H) {
                CDouble got = eval(su2.c(K, J, H), {});
                CHECK(std::abs(got - CDouble(-s2 * eps(J, H, K))) < 1e-12);
                CHECK(std::abs(got + eval(su2.c(K, H, J), {})) < 1e-12);
            }
    for (int I = 0; I < 3; ++I)
        for (int J = 0; J < 3; ++J)
            for (int H = 0; H < 3; ++H)
                for (int K = 0; K < 3; ++K) {
                    CDouble acc(0.0);
                    for (int M = 0; M < 3; ++M) {
                        acc += eval(su2.c(I, J, M), {}) * eval(su2.c(M, H, K), {});
                        acc += eval(su2.c(I, H, M), {}) * eval(su2.c(M, K, J), {});
                        acc += eval(su2.c(I, K, M), {}) * eval(su2.c(M, J, H), {});
                    }
                    CHECK(std::abs(acc) < 1e-12);
                }

    ExprMatrix l = expr_matrix(1, 1);
    l[0][0] = 2 * Expr::imaginary_unit();
    CHECK_THROWS_AS(structure_constants({l}), std::invalid_argument);
}

TEST_CASE("index lowering") {
    GaugeStructure su2 = GaugeStructure::su2();
    std::vector<Expr> up{Expr::rational(1, 2), Expr::integer(3), Expr::rational(-2, 5)};
    auto low = index_lower(su2, up);
    for (int I = 0; I < 3; ++I)
        CHECK(std::abs(eval(low[I], {}) - eval(up[I], {})) < 1e-12);

    // rescaled frame l'_1 = 2 l_1: Gram entry becomes 4 (direct Tr(A^dag B))
    std::vector<ExprMatrix> frame{su2.l(0), su2.l(1), su2.l(2)};
    for (auto& row : frame[0])
        for (auto& e : row) e = 2 * e;
    auto low2 = index_lower(frame, up);
    CHECK(std::abs(eval(low2[0], {}) - 4.0 * eval(up[0], {})) < 1e-12);
    CHECK(std::abs(eval(low2[1], {}) - eval(up[1], {})) < 1e-12);

    auto lz = index_lower(su2, {Expr::integer(0), Expr::integer(0), Expr::integer(0)});
    for (const auto& e : lz) CHECK(e.is_zero());
}

TEST_CASE("gauge curvature: abelian and su(2) frame expansion") {
    Chart base = Chart::with_default_box({"x", "y", "z"});
    GaugeStructure u1 = GaugeStructure::u1();
    std::vector<std::vector<Expr>> A1(1, std::vector<Expr>(3, Expr::integer(0)));
    for (int a = 0; a < 3; ++a) A1[0][a] = rnd_poly(base, 1);
    GaugeField ka(u1, base, A1);
    auto rho = gauge_curvature(ka);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Expr F = diff(A1[0][a], base.coord(b)) - diff(A1[0][b], base.coord(a));
            CHECK(equal_numeric(rho[0][a][b], F, base.box(), 5).pass);
        }

    std::vector<std::vector<Expr>> Ac(1, std::vector<Expr>(3, Expr::rational(3, 7)));
    for (const auto& mat : gauge_curvature(GaugeField(u1, base, Ac)))
        for (const auto& row : mat)
            for (const auto& e : row) CHECK(e.is_zero());

    GaugeStructure su2 = GaugeStructure::su2();
    std::vector<std::vector<Expr>> K(3, std::vector<Expr>(3, Expr::integer(0)));
    for (int I = 0; I < 3; ++I)
        for (int a = 0; a < 3; ++a) K[I][a] = rnd_poly(base);
    GaugeField kg(su2, base, K);
    auto rho_g = gauge_curvature(kg);
    LinearConnection lin = expand_to_linear(kg);
    auto rho_l = linear_curvature(lin);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    std::vector<Expr> expanded;
                    for (int I = 0; I < 3; ++I)
                        expanded.push_back(rho_g[I][a][b] * su2.l(I)[i][j]);
                    CHECK(equal_numeric(rho_l[a][b][i][j], sum(expanded), base.box(), 5).pass);
                }
}

TEST_CASE("overconnections: affinity, nabla kappa = -rho, Gamma independence") {
    Chart base = Chart::with_default_box({"x", "y"});
    FiberedChart fc(base, {"m0", "m1"});
    const int m = 2, n = 2;
    std::vector<ExprMatrix> lk(m, expr_matrix(n, n));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lk[a][i][j] = rnd_poly(base);
    LinearConnection k(fc, lk);
    AffineConnectionField gam1 = random_symmetric_gamma(base);
    AffineConnectionField gam2 = random_symmetric_gamma(base);

    Overconnection up1 = overconnection_linear(k, gam1);
    Overconnection up2 = overconnection_linear(k, gam2);

    // affine in the second-level coordinates: second fiber derivative vanishes
    for (int idx = 0; idx < up1.conn.chart().fiber_dim(); ++idx)
        for (int a = 0; a < m; ++a)
            for (int f = 0; f < up1.conn.chart().fiber_dim(); ++f) {
                Expr d2 = diff(diff(up1.conn.k(idx, a), up1.conn.chart().fiber(f)),
                               up1.conn.chart().fiber(f));
                CHECK(d2.is_zero());
            }

    // evaluated at the point kappa itself the Gamma term vanishes:
    // coefficients reduce to d_b k - k y + y k with y = kappa
    auto nk1 = overconnection_covariant_derivative(k, up1);
    auto nk2 = overconnection_covariant_derivative(k, up2);
    auto rho = linear_curvature(k);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    CHECK(equal_numeric(nk1[a][b][i][j], -rho[a][b][i][j], base.box(), 10).pass);
                    CHECK(equal_numeric(nk1[a][b][i][j], nk2[a][b][i][j], base.box(), 10).pass);
                }

    Chart base2 = Chart::with_default_box({"p", "q"});
    FiberedChart fz(base2, {"z9"});
    std::vector<ExprMatrix> zk(2, expr_matrix(1, 1));
    LinearConnection kz(fz, zk);
    AffineConnectionField flat(base2, 2);
    flat.mark_symmetric(true);
    Overconnection upz = overconnection_linear(kz, flat);
    for (int idx = 0; idx < upz.conn.chart().fiber_dim(); ++idx)
        for (int a = 0; a < 2; ++a) CHECK(upz.conn.k(idx, a).is_zero());
}

TEST_CASE("gauge overconnection: abelian reduction and frame-expansion consistency") {
    Chart base = Chart::with_default_box({"x", "y"});
    const int m = 2;

    GaugeStructure u1 = GaugeStructure::u1();
    std::vector<std::vector<Expr>> A(1, std::vector<Expr>(m, Expr::integer(0)));
    for (int a = 0; a < m; ++a) A[0][a] = rnd_poly(base, 1);
    GaugeField ka(u1, base, A);
    AffineConnectionField flat(base, m);
    flat.mark_symmetric(true);
    Overconnection upa = overconnection_gauge(ka, flat);
    for (int b = 0; b < m; ++b)
        for (int a = 0; a < m; ++a)
            CHECK(equal_numeric(upa.conn.k(b, a), diff(A[0][a], base.coord(b)),
                                upa.conn.chart().first_jet_domain(), 5).pass);

    GaugeStructure su2 = GaugeStructure::su2();
    std::vector<std::vector<Expr>> K(3, std::vector<Expr>(m, Expr::integer(0)));
    for (int I = 0; I < 3; ++I)
        for (int a = 0; a < m; ++a) K[I][a] = rnd_poly(base);
    GaugeField kg(su2, base, K);
    AffineConnectionField gam = random_symmetric_gamma(base);
    Overconnection upg = overconnection_gauge(kg, gam);
    LinearConnection lin = expand_to_linear(kg);
    Overconnection upl = overconnection_linear(lin, gam);

    const int n = 2;
    const FiberedChart& gchart = upg.conn.chart();
    const FiberedChart& lchart = upl.conn.chart();
    std::map<Symbol, Expr> restrict_map;
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int j = 0; j < n; ++j) {
                std::vector<Expr> expansion;
                for (int I = 0; I < 3; ++I)
                    expansion.push_back(gchart.fiber_expr(I * m + b) * su2.l(I)[i][j]);
                restrict_map.emplace(lchart.fiber((i * m + b) * n + j), sum(expansion));
            }
    Domain gbox = gchart.first_jet_domain();
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < m; ++b)
                for (int j = 0; j < n; ++j) {
                    Expr linear_side = subst(upl.conn.k((i * m + b) * n + j, a), restrict_map);
                    std::vector<Expr> gauge_side;
                    for (int I = 0; I < 3; ++I)
                        gauge_side.push_back(upg.conn.k(I * m + b, a) * su2.l(I)[i][j]);
                    CHECK(equal_numeric(linear_side, sum(gauge_side), gbox, 5).pass);
                }

    auto nk = overconnection_covariant_derivative(kg, upg);
    auto rho = gauge_curvature(kg);
    for (int I = 0; I < 3; ++I)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                CHECK(equal_numeric(nk[I][a][b], -rho[I][a][b], base.box(), 10).pass);

    auto nka = overconnection_covariant_derivative(ka, upa);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Expr F = diff(A[0][a], base.coord(b)) - diff(A[0][b], base.coord(a));
            CHECK(equal_numeric(nka[0][a][b], -F, base.box(), 10).pass);
        }
}

TEST_CASE("involution with a flat connection is the pure swap and transpose") {
    Chart base = Chart::with_default_box({"p", "q"});
    FiberedChart fc(base, {"fs"});
    AffineConnectionField flat(base, 2);
    flat.mark_symmetric(true);
    auto s = involution(fc, flat);
    for (int a = 0; a < 2; ++a) {
        CHECK(s.at(fc.bar(0, a)).same_node(fc.jet1_expr(0, a)));
        CHECK(s.at(fc.jet1(0, a)).same_node(fc.bar_expr(0, a)));
        for (int b = 0; b < 2; ++b)
            CHECK(s.at(fc.jet2(0, a, b)).same_node(fc.jet2_expr(0, b, a)));
    }
}
