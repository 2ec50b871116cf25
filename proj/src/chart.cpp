#include "jetcartan/chart.hpp"

namespace jetcartan {

Chart::Chart(const std::vector<std::string>& coord_names,
             const std::vector<std::pair<double, double>>& box) {
    if (coord_names.empty()) throw std::invalid_argument("chart needs at least one coordinate");
    if (box.size() != coord_names.size())
        throw std::invalid_argument("chart box size mismatch");
    for (std::size_t a = 0; a < coord_names.size(); ++a) {
        Symbol s = Symbol::intern(coord_names[a]);
        for (Symbol prev : coords_)
            if (prev == s) throw std::invalid_argument("duplicate coordinate name: " + coord_names[a]);
        coords_.push_back(s);
        box_.set(s, box[a].first, box[a].second);
    }
}

Chart Chart::with_default_box(const std::vector<std::string>& coord_names, double lo, double hi) {
    std::vector<std::pair<double, double>> box(coord_names.size(), {lo, hi});
    return Chart(coord_names, box);
}

ExprMatrix expr_matrix(int rows, int cols) {
    return ExprMatrix(rows, std::vector<Expr>(cols, Expr::integer(0)));
}

ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b) {
    const int n = static_cast<int>(a.size());
    const int k = static_cast<int>(b.size());
    const int m = static_cast<int>(b.empty() ? 0 : b[0].size());
    ExprMatrix out = expr_matrix(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            std::vector<Expr> terms;
            for (int h = 0; h < k; ++h) terms.push_back(a[i][h] * b[h][j]);
            out[i][j] = sum(terms);
        }
    return out;
}

namespace {

Expr det_rec(const ExprMatrix& m, std::vector<int> cols, int row) {
    const int n = static_cast<int>(cols.size());
    if (n == 1) return m[row][cols[0]];
    std::vector<Expr> terms;
    for (int k = 0; k < n; ++k) {
        std::vector<int> rest;
        for (int j = 0; j < n; ++j)
            if (j != k) rest.push_back(cols[j]);
        Expr minor = det_rec(m, rest, row + 1);
        Expr term = m[row][cols[k]] * minor;
        terms.push_back((k % 2 == 0) ? term : -term);
    }
    return sum(terms);
}

} // namespace

Expr determinant(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    std::vector<int> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = j;
    return det_rec(m, cols, 0);
}

ExprMatrix adjugate(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    ExprMatrix out = expr_matrix(n, n);
    if (n == 1) {
        out[0][0] = Expr::integer(1);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // cofactor C_ij = (-1)^{i+j} det(minor(i,j)); adj = C^T
            ExprMatrix minor = expr_matrix(n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[rr][cc] = m[r][c];
                    ++cc;
                }
                ++rr;
            }
            Expr cof = determinant(minor);
            out[j][i] = ((i + j) % 2 == 0) ? cof : -cof;
        }
    }
    return out;
}

} // namespace jetcartan
