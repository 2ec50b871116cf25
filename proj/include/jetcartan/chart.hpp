#pragma once

#include "jetcartan/expr.hpp"
#include "jetcartan/numeric.hpp"

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetcartan {

// A single coordinate chart: named coordinates plus a default sampling box.
class Chart {
public:
    Chart() = default;
    Chart(const std::vector<std::string>& coord_names,
          const std::vector<std::pair<double, double>>& box);
    static Chart with_default_box(const std::vector<std::string>& coord_names,
                                  double lo = -1.0, double hi = 1.0);

    int dim() const { return static_cast<int>(coords_.size()); }
    Symbol coord(int a) const { return coords_[a]; }
    Expr coord_expr(int a) const { return Expr::variable(coords_[a]); }
    const std::vector<Symbol>& coords() const { return coords_; }
    const Domain& box() const { return box_; }

    bool operator==(const Chart& o) const { return coords_ == o.coords_; }

private:
    std::vector<Symbol> coords_;
    Domain box_;
};

// Dense expression array with an index signature. Extents may differ per
// slot (base indices run over chart dimension, fiber slots over their own).
class TensorField {
public:
    TensorField() = default;
    TensorField(Chart chart, std::vector<int> shape)
        : chart_(std::move(chart)), shape_(std::move(shape)) {
        std::size_t n = 1;
        for (int e : shape_) n *= static_cast<std::size_t>(e);
        data_.assign(n, Expr::integer(0));
    }

    const Chart& chart() const { return chart_; }
    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }

    Expr& at(std::initializer_list<int> idx) { return data_[offset(idx)]; }
    const Expr& at(std::initializer_list<int> idx) const { return data_[offset(idx)]; }
    const std::vector<Expr>& data() const { return data_; }
    std::vector<Expr>& data() { return data_; }

private:
    std::size_t offset(std::initializer_list<int> idx) const {
        if (static_cast<int>(idx.size()) != rank())
            throw std::invalid_argument("tensor index rank mismatch");
        std::size_t off = 0;
        int k = 0;
        for (int i : idx) {
            if (i < 0 || i >= shape_[k]) throw std::out_of_range("tensor index out of range");
            off = off * static_cast<std::size_t>(shape_[k]) + static_cast<std::size_t>(i);
            ++k;
        }
        return off;
    }

    Chart chart_;
    std::vector<int> shape_;
    std::vector<Expr> data_;
};

// Small dense Expr matrix helpers (used for metric inverse, frames, gammas).
using ExprMatrix = std::vector<std::vector<Expr>>;

ExprMatrix expr_matrix(int rows, int cols);
ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b);
Expr determinant(const ExprMatrix& m);
ExprMatrix adjugate(const ExprMatrix& m);

} // namespace jetcartan
