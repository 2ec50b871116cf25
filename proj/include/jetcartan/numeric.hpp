#pragma once

#include "jetcartan/expr.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetcartan {

using CDouble = std::complex<double>;

// Values for every free variable of the expression being evaluated.
using Assignment = std::map<Symbol, CDouble>;

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic recursive evaluation in double precision (DAG-memoized).
CDouble eval(const Expr& e, const Assignment& a);

// Per-variable real sampling interval.
struct Domain {
    std::map<Symbol, std::pair<double, double>> box;

    void set(Symbol s, double lo, double hi) { box[s] = {lo, hi}; }
    void set(std::string_view name, double lo, double hi) { set(Symbol::intern(name), lo, hi); }
    bool covers(Symbol s) const { return box.count(s) != 0; }
    void merge(const Domain& other) {
        for (const auto& [s, iv] : other.box) box.emplace(s, iv);
    }
};

// Seeded, reproducible point stream over a domain box. Variables are drawn
// in name order so results do not depend on interning order.
class PointSampler {
public:
    PointSampler(const Domain& domain, std::uint64_t seed);
    Assignment next();

private:
    std::vector<std::pair<Symbol, std::pair<double, double>>> vars_;
    std::uint64_t state_;
};

struct EqualityReport {
    bool pass = false;
    double worst_rel_error = 0.0;
    Assignment worst_point;
    int trials = 0;
    std::string failure; // non-empty when evaluation raised a domain error
};

// |e1-e2| <= tol*(1 + max(|e1|,|e2|)) at every sampled point.
EqualityReport equal_numeric(const Expr& e1, const Expr& e2, const Domain& domain,
                             int trials = 20, double tol = 1e-8, std::uint64_t seed = 0);

// Componentwise variant over expression arrays; worst component wins.
EqualityReport equal_numeric(const std::vector<Expr>& lhs, const std::vector<Expr>& rhs,
                             const Domain& domain, int trials = 20, double tol = 1e-8,
                             std::uint64_t seed = 0);

// Central finite difference (e(v+h) - e(v-h)) / 2h at a point.
CDouble finite_difference(const Expr& e, Symbol v, const Assignment& at, double h);

} // namespace jetcartan
